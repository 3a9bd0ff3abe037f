"""Correctness oracles for aggregated FIBs.

Two independent checks of forwarding equivalence are provided:

* :func:`check_equivalence` walks the trie once and compares, for every
  node that owns addresses not covered by a child, the hop the original
  table gives those addresses with the hop the aggregated table gives them.
* :func:`brute_force_equivalence` expands both tables over the whole
  address space of a toy-width family and compares them address by address.

:func:`static_oracle` re-aggregates a table from scratch, which is what the
incremental state is compared against during replays.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .engine import build_trie, static_aggregate
from .patricia import DROP, FibTrie, PtNode
from .prefix import AddressFamily, IpAddress, IpPrefix, default_prefix, family_of_width

MAX_BRUTE_FORCE_WIDTH = 16

# per-thread reusable address-space tables for first_difference
_scratch = threading.local()


class View(enum.Enum):
    ORIGINAL = "original"
    AGGREGATED = "aggregated"


@dataclass
class FibSnapshot:
    entries: dict[IpPrefix, int]
    view: View
    width: int = field(default=0)

    def __post_init__(self):
        if not self.width and self.entries:
            self.width = next(iter(self.entries)).width

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, FibSnapshot):
            return self.entries == other.entries
        if isinstance(other, dict):
            return self.entries == other
        return NotImplemented

    def items(self):
        return self.entries.items()

    def get(self, prefix: IpPrefix, default=None):
        return self.entries.get(prefix, default)


def snapshot(trie: FibTrie, view: View = View.AGGREGATED) -> FibSnapshot:
    entries: dict[IpPrefix, int] = {}
    stack = [trie.root]
    pop, push = stack.pop, stack.append
    original = view is View.ORIGINAL
    while stack:
        node = pop()
        if original:
            if node.real:
                entries[node.prefix] = node.original
        elif node.in_fib:
            entries[node.prefix] = node.selected
        l, r = node.child
        if l is not None:
            push(l)
        if r is not None:
            push(r)
    return FibSnapshot(entries, view, trie.width)


def snapshots(trie: FibTrie) -> tuple[FibSnapshot, FibSnapshot]:
    """Both views from a single traversal."""
    original: dict[IpPrefix, int] = {}
    aggregated: dict[IpPrefix, int] = {}
    stack = [trie.root]
    pop, push = stack.pop, stack.append
    while stack:
        node = pop()
        if node.real:
            original[node.prefix] = node.original
        if node.in_fib:
            aggregated[node.prefix] = node.selected
        l, r = node.child
        if l is not None:
            push(l)
        if r is not None:
            push(r)
    width = trie.width
    return FibSnapshot(original, View.ORIGINAL, width), FibSnapshot(aggregated, View.AGGREGATED, width)


def lpm(snap: FibSnapshot | dict, addr: IpAddress) -> int:
    """Next hop of the longest prefix in ``snap`` covering ``addr`` (DROP if none)."""
    entries = snap.entries if isinstance(snap, FibSnapshot) else snap
    width, bits = addr.width, addr.bits
    for length in range(width, -1, -1):
        shift = width - length
        hop = entries.get(IpPrefix((bits >> shift) << shift, length, width))
        if hop is not None:
            return hop
    return DROP


def expand(snap: FibSnapshot | dict, width: int, out: np.ndarray | None = None) -> np.ndarray:
    """Next hop for every address of a toy family, as one array.

    Entries are painted shortest prefix first so longer ones overwrite them.
    """
    if width > MAX_BRUTE_FORCE_WIDTH:
        raise ValueError(f"cannot enumerate a {width}-bit address space")
    entries = snap.entries if isinstance(snap, FibSnapshot) else snap
    table = np.empty(1 << width, dtype=np.int64) if out is None else out
    if default_prefix(width) not in entries:
        table.fill(DROP)
    for prefix, hop in sorted(entries.items(), key=lambda kv: kv[0].length):
        start = prefix.bits
        table[start : start + (1 << (width - prefix.length))] = hop
    return table


def has_residual(node: PtNode) -> bool:
    """Whether some address under ``node`` is not under any of its children."""
    l, r = node.child
    return l is None or r is None or l.length != node.length + 1 or r.length != node.length + 1


def residual_address(node: PtNode, width: int) -> IpAddress:
    """One address that resolves to ``node`` itself rather than a child."""
    for b in (0, 1):
        c = node.child[b]
        base = node.bits | (b << (width - 1 - node.length))
        if c is None:
            return IpAddress(base, width)
        if c.length > node.length + 1:
            # flip the bit just below the branching bit to leave c's block
            flipped = c.bits ^ (1 << (width - 2 - node.length))
            shift = width - node.length - 2
            return IpAddress((flipped >> shift) << shift, width)
    raise ValueError(f"{node.prefix} has no residual addresses")


class Equivalence(NamedTuple):
    ok: bool
    first_violation: PtNode | None = None


def check_equivalence(trie: FibTrie) -> Equivalence:
    """Linear-time forwarding-equivalence check over the trie.

    Uses only the REAL flag and original hop for the original table and only
    the FIB status and selected hop for the aggregated one; derived original
    hops on FAKE nodes are ignored.
    """
    root = trie.root
    top_o = root.original if root.original is not None else DROP
    top_a = root.selected if root.in_fib else DROP
    stack = [(root, top_o, top_a)]
    while stack:
        node, eff_o, eff_a = stack.pop()
        if node.real:
            eff_o = node.original
        if node.in_fib:
            eff_a = node.selected
        l, r = node.child
        if (
            l is None
            or r is None
            or l.length != node.length + 1
            or r.length != node.length + 1
        ) and eff_o != eff_a:
            return Equivalence(False, node)
        if r is not None:
            stack.append((r, eff_o, eff_a))
        if l is not None:
            stack.append((l, eff_o, eff_a))
    return Equivalence(True)


def brute_force_equivalence(trie: FibTrie) -> bool:
    width = trie.width
    if width > MAX_BRUTE_FORCE_WIDTH:
        raise ValueError(f"cannot enumerate a {width}-bit address space")
    original, aggregated = snapshots(trie)
    return first_difference(original, aggregated, width) is None


def first_difference(original: FibSnapshot | dict, aggregated: FibSnapshot | dict, width: int) -> IpAddress | None:
    buffers = getattr(_scratch, "buffers", None)
    if buffers is None:
        buffers = _scratch.buffers = {}
    if width not in buffers:
        buffers[width] = (np.empty(1 << width, dtype=np.int32), np.empty(1 << width, dtype=np.int32))
    entries = original.entries if isinstance(original, FibSnapshot) else original
    small = max(entries.values(), default=0) < 2**31
    entries = aggregated.entries if isinstance(aggregated, FibSnapshot) else aggregated
    small = small and max(entries.values(), default=0) < 2**31
    a = expand(original, width, buffers[width][0] if small else None)
    b = expand(aggregated, width, buffers[width][1] if small else None)
    if np.array_equal(a, b):
        return None
    return IpAddress(int(np.flatnonzero(a != b)[0]), width)


def static_oracle(entries: FibSnapshot | dict, width: int | None = None) -> FibSnapshot:
    """Aggregate ``entries`` from scratch and return the aggregated view."""
    items = entries.entries if isinstance(entries, FibSnapshot) else entries
    if width is None:
        width = entries.width if isinstance(entries, FibSnapshot) and entries.width else next(iter(items)).width
    trie = build_trie(family_of_width(width), items.items())
    static_aggregate(trie)
    return snapshot(trie, View.AGGREGATED)


class TableComparison(NamedTuple):
    ok: bool
    region: IpPrefix | None = None
    address: IpAddress | None = None


def compare_tables(
    original: dict[IpPrefix, int],
    aggregated: dict[IpPrefix, int],
    family: AddressFamily,
    brute_force: bool | None = None,
) -> TableComparison:
    """Check that two plain routing tables forward every address identically.

    Both tables are merged into one trie whose nodes carry the original
    entries as REAL/original and the aggregated entries as IN_FIB/selected,
    then :func:`check_equivalence` runs on it. Toy widths are also checked by
    full enumeration. A missing 0/0 means drop in either table.
    """
    width = family.width
    trie = FibTrie(family, original.get(default_prefix(width), DROP))
    for prefix in set(original) | set(aggregated):
        if prefix.length and prefix not in trie.index:
            trie.insert_structural(prefix)
    for node in trie:
        p = node.prefix
        if p in original:
            node.real = True
            node.original = original[p]
        elif node is not trie.root:
            node.real = False
        if p in aggregated:
            node.in_fib = True
            node.selected = aggregated[p]
    root = trie.root
    if not root.in_fib:
        root.in_fib = True
        root.selected = DROP
    ok, bad = check_equivalence(trie)
    result = TableComparison(True) if ok else TableComparison(False, bad.prefix, residual_address(bad, width))
    if brute_force is None:
        brute_force = width <= MAX_BRUTE_FORCE_WIDTH
    if brute_force:
        addr = first_difference(original, aggregated, width)
        if (addr is None) != result.ok:
            raise AssertionError("per-node and brute-force equivalence checks disagree")
    return result
