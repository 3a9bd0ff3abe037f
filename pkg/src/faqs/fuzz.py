"""Seeded random replays on toy-width tables with every oracle switched on."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .engine import RouteUpdate, aggregate_table, apply
from .patricia import DROP
from .prefix import IpPrefix, default_prefix, toy_family
from .verify import View, check_equivalence, first_difference, snapshot, static_oracle

INITIAL_ENTRIES = 48


def random_prefix(rng: random.Random, width: int) -> IpPrefix:
    length = rng.randint(0, width)
    shift = width - length
    return IpPrefix((rng.getrandbits(width) >> shift) << shift, length, width)


class RouteModel:
    """The set of live routes, with O(1) uniform sampling."""

    def __init__(self):
        self.hops: dict[IpPrefix, int] = {}
        self._keys: list[IpPrefix] = []
        self._pos: dict[IpPrefix, int] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, prefix) -> bool:
        return prefix in self.hops

    def set(self, prefix: IpPrefix, hop: int) -> None:
        if prefix not in self.hops:
            self._pos[prefix] = len(self._keys)
            self._keys.append(prefix)
        self.hops[prefix] = hop

    def remove(self, prefix: IpPrefix) -> None:
        i = self._pos.pop(prefix)
        last = self._keys.pop()
        if i < len(self._keys):
            self._keys[i] = last
            self._pos[last] = i
        del self.hops[prefix]

    def choice(self, rng: random.Random) -> IpPrefix:
        return self._keys[rng.randrange(len(self._keys))]

    def original_view(self, width: int) -> dict[IpPrefix, int]:
        view = dict(self.hops)
        view.setdefault(default_prefix(width), DROP)
        return view


def initial_table(rng: random.Random, width: int, hops: int, size: int = INITIAL_ENTRIES) -> RouteModel:
    model = RouteModel()
    size = min(size, 1 << (width - 1))
    while len(model) < size:
        model.set(random_prefix(rng, width), rng.randint(1, hops))
    return model


def next_update(rng: random.Random, model: RouteModel, width: int, hops: int, target: int) -> RouteUpdate:
    """Draw one update; withdrawals grow likelier as the table outgrows ``target``."""
    p_withdraw = min(0.8, max(0.05, len(model) / (3 * target)))
    if len(model) and rng.random() < p_withdraw:
        return RouteUpdate.withdraw(model.choice(rng))
    if len(model) and rng.random() < 0.5:
        prefix = model.choice(rng)
    else:
        prefix = random_prefix(rng, width)
    return RouteUpdate.announce(prefix, rng.randint(1, hops))


@dataclass
class FuzzResult:
    ok: bool = True
    updates: int = 0
    changes: int = 0
    zero_bursts: int = 0
    max_burst: int = 0
    warnings: int = 0
    failure: str | None = None
    # "equivalence" when forwarding differs, "oracle" for any other mismatch
    failure_class: str | None = None
    failed_at: int | None = None
    repro: str | None = None
    log: list[str] = field(default_factory=list)


def run_fuzz(
    width: int,
    n_updates: int,
    hops: int,
    seed: int,
    *,
    brute_force: bool = True,
    oracle: bool = True,
    structure: bool = False,
) -> FuzzResult:
    """Replay ``n_updates`` random updates, checking every oracle after each.

    Checks per update: per-node equivalence, brute-force equivalence over the
    whole address space, agreement with a from-scratch static aggregation,
    and that the returned ChangeSet turns the previous aggregated FIB into
    the new one. The original view is also compared with an independent
    model of the route table.
    """
    family = toy_family(width)
    rng = random.Random(seed)
    res = FuzzResult()
    model = initial_table(rng, width, hops)
    target = max(len(model), 1)
    res.log.append(f"fuzz width={width} updates={n_updates} hops={hops} seed={seed} initial={len(model)}")
    trie, initial = aggregate_table(family, model.hops.items())
    fib: dict[IpPrefix, int] = {}
    initial.apply_to(fib)

    def fail(i: int, what: str, update: RouteUpdate | None) -> FuzzResult:
        res.ok = False
        res.failed_at = i
        res.failure = what
        res.failure_class = "equivalence" if "equivalence violated" in what else "oracle"
        res.repro = str(update) if update is not None else None
        res.log.append(f"FAIL at update {i}: {what}")
        if update is not None:
            res.log.append(f"repro: {update}")
        return res

    def check(i: int, update: RouteUpdate | None) -> str | None:
        if structure:
            try:
                trie.check_structure()
            except AssertionError as exc:
                return f"structure: {exc}"
            if snapshot(trie, View.ORIGINAL).entries != model.original_view(width):
                return "original view differs from the route model"
        agg = snapshot(trie, View.AGGREGATED).entries
        if agg != fib:
            return "ChangeSet replay does not reproduce the aggregated FIB"
        if len(fib) != trie.in_fib_count:
            return "in_fib counter out of sync"
        ok, bad = check_equivalence(trie)
        if not ok:
            return f"per-node equivalence violated at {bad.prefix}"
        orig = model.original_view(width)
        if brute_force and first_difference(orig, agg, width) is not None:
            return "brute-force equivalence violated"
        if oracle and static_oracle(orig, width).entries != agg:
            return "incremental state differs from static re-aggregation"
        return None

    problem = check(0, None)
    if problem:
        return fail(0, problem, None)

    for i in range(1, n_updates + 1):
        update = next_update(rng, model, width, hops, target)
        cs = apply(trie, update)
        if update.next_hop is None:
            model.remove(update.prefix)
        else:
            model.set(update.prefix, update.next_hop)
        res.updates += 1
        burst = cs.burst_size
        res.changes += burst
        res.zero_bursts += burst == 0
        res.max_burst = max(res.max_burst, burst)
        res.warnings += cs.warning is not None
        try:
            cs.apply_to(fib)
        except KeyError as exc:
            return fail(i, f"ChangeSet not applicable: {exc}", update)
        problem = check(i, update)
        if problem:
            return fail(i, problem, update)

    if snapshot(trie, View.ORIGINAL).entries != model.original_view(width):
        return fail(n_updates, "original view differs from the route model", None)
    res.log.append(
        f"ok updates={res.updates} changes={res.changes} zero_bursts={res.zero_bursts} "
        f"max_burst={res.max_burst} final_routes={len(model)} final_fib={len(fib)}"
    )
    return res
