"""Synthetic routing tables and update traces with a roughly realistic shape.

Prefix lengths follow a skewed distribution dominated by /24 (IPv4) or /48
(IPv6); next hops follow a Zipf-like popularity so that a handful of
neighbours carry most routes, as in a real default-free table. Routes are
grouped under covering blocks, and each block has a home next hop that most
of its routes share, which is what makes real tables compressible.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from .engine import RouteUpdate
from .prefix import AddressFamily, IpPrefix

V4_LENGTHS = {
    8: 1, 12: 1, 13: 1, 14: 2, 15: 2, 16: 12, 17: 6, 18: 10, 19: 20,
    20: 30, 21: 35, 22: 80, 23: 70, 24: 550,
}
V6_LENGTHS = {
    19: 1, 20: 2, 24: 4, 28: 6, 29: 20, 32: 120, 33: 10, 36: 20, 40: 30,
    44: 50, 46: 20, 47: 10, 48: 500,
}

# covering blocks; more specifics are drawn under these so they nest
BLOCK_LENGTH = {32: 12, 128: 24}


class Workload:
    def __init__(
        self,
        family: AddressFamily,
        hops: int = 32,
        seed: int = 0,
        blocks: int = 2000,
        locality: float = 0.6,
    ):
        self.family = family
        self.width = family.width
        self.rng = random.Random(seed)
        lengths = V4_LENGTHS if family.width == 32 else V6_LENGTHS
        self._lengths = list(lengths)
        self._len_cum = list(itertools.accumulate(lengths.values()))
        self._hop_cum = list(itertools.accumulate(1.0 / (k + 1) for k in range(hops)))
        blen = BLOCK_LENGTH.get(self.width, max(1, self.width // 3))
        self._block_len = blen
        self._blocks = [self.rng.getrandbits(blen) for _ in range(blocks)]
        self._home = [self.hop() for _ in range(blocks)]
        # duplicate block draws keep the first position
        self._block_pos: dict[int, int] = {}
        for i, b in enumerate(self._blocks):
            self._block_pos.setdefault(b, i)
        self.locality = locality

    def hop(self, block: int | None = None) -> int:
        """A next hop; with a block given, its home hop with probability ``locality``."""
        if block is not None and self.rng.random() < self.locality:
            return self._home[block]
        return self.rng.choices(range(1, len(self._hop_cum) + 1), cum_weights=self._hop_cum)[0]

    def block_of(self, prefix: IpPrefix) -> int | None:
        return self._block_pos.get(prefix.bits >> (self.width - self._block_len))

    def prefix(self) -> IpPrefix:
        return self._draw()[0]

    def route(self) -> tuple[IpPrefix, int]:
        p, i = self._draw()
        return p, self.hop(i)

    def _draw(self) -> tuple[IpPrefix, int]:
        rng, width = self.rng, self.width
        length = rng.choices(self._lengths, cum_weights=self._len_cum)[0]
        i = rng.randrange(len(self._blocks))
        block = self._blocks[i]
        if length <= self._block_len:
            bits = block << (width - self._block_len)
        else:
            bits = (block << (width - self._block_len)) | rng.getrandbits(width - self._block_len)
        shift = width - length
        return IpPrefix((bits >> shift) << shift, length, width), i

    def table(self, size: int) -> dict[IpPrefix, int]:
        out: dict[IpPrefix, int] = {}
        while len(out) < size:
            p, hop = self.route()
            out[p] = hop
        return out

    def updates(self, table: dict[IpPrefix, int], count: int) -> Iterator[RouteUpdate]:
        """Half next-hop changes, a quarter withdrawals, a quarter new routes.

        ``table`` is copied; the stream stays consistent with its own view of
        which routes exist, so every withdrawal names a live route.
        """
        rng = self.rng
        live = list(table)
        pos = {p: i for i, p in enumerate(live)}
        withdrawn: list[IpPrefix] = []
        for _ in range(count):
            roll = rng.random()
            if roll < 0.5 and live:
                p = live[rng.randrange(len(live))]
                yield RouteUpdate.announce(p, self.hop(self.block_of(p)))
            elif roll < 0.75 and live:
                i = rng.randrange(len(live))
                p = live[i]
                last = live.pop()
                if i < len(live):
                    live[i] = last
                    pos[last] = i
                del pos[p]
                withdrawn.append(p)
                yield RouteUpdate.withdraw(p)
            else:
                if withdrawn and rng.random() < 0.5:
                    p = withdrawn.pop(rng.randrange(len(withdrawn)))
                    hop = self.hop(self.block_of(p))
                else:
                    p, hop = self.route()
                if p not in pos:
                    pos[p] = len(live)
                    live.append(p)
                yield RouteUpdate.announce(p, hop)
