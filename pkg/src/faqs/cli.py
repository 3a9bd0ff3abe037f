"""Command-line driver: aggregate, replay, verify, fuzz.

Exit codes: 0 success, 2 parse error, 3 forwarding equivalence failure,
4 oracle mismatch, 5 I/O error.
"""

from __future__ import annotations

import argparse
import gc
import logging
import sys
import time
from pathlib import Path

from .engine import aggregate_table, apply
from .fuzz import run_fuzz
from .io import ParseError, load_rib, load_updates, write_snapshot
from .metrics import ReplayReport, record, render
from .prefix import MAX_TOY_WIDTH, MIN_TOY_WIDTH, IpPrefix, family_from_name, format_address, format_prefix
from .verify import View, check_equivalence, compare_tables, snapshot, static_oracle

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_EQUIVALENCE = 3
EXIT_ORACLE = 4
EXIT_IO = 5

log = logging.getLogger("faqs")


class CommandFailed(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _family(text: str):
    try:
        return family_from_name(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _load_table(path, family):
    entries = load_rib(path, family)
    if family is None:
        if not entries:
            raise CommandFailed(EXIT_PARSE, f"{path}: empty table, pass --family")
        family = _family_of(entries[0][0])
    return family, entries


def _family_of(p: IpPrefix):
    return family_from_name({32: "v4", 128: "v6"}.get(p.width, f"toy{p.width}"))


def _trie_for(rib, family):
    family, entries = _load_table(rib, family)
    trie, _ = aggregate_table(family, entries)
    return family, entries, trie


def cmd_aggregate(args) -> int:
    _, _, trie = _trie_for(args.rib, args.family)
    ok, bad = check_equivalence(trie)
    if not ok:
        raise CommandFailed(EXIT_EQUIVALENCE, f"aggregation is not forwarding-equivalent under {format_prefix(bad.prefix)}")
    write_snapshot(snapshot(trie, View.AGGREGATED), args.out)
    report = ReplayReport()
    report.observe(trie)
    if args.stats:
        Path(args.stats).write_text(render(report, "json"), encoding="utf-8")
    ratio = "n/a" if report.ratio_r is None else f"{report.ratio_r:.4f}"
    print(f"routes={trie.real_count - (not trie.default_declared)} fib={trie.in_fib_count - (not trie.default_declared)} ratio={ratio}")
    return EXIT_OK


def _oracle_check(trie, i: int, update) -> None:
    original = snapshot(trie, View.ORIGINAL)
    if static_oracle(original, trie.width) != snapshot(trie, View.AGGREGATED):
        raise CommandFailed(EXIT_ORACLE, f"oracle mismatch after update {i}: {update}")
    ok, bad = check_equivalence(trie)
    if not ok:
        raise CommandFailed(EXIT_ORACLE, f"equivalence check failed after update {i} ({update}) at {format_prefix(bad.prefix)}")


def replay(trie, updates, report: ReplayReport, oracle_every: int | None = None, series_every: int | None = None) -> int:
    """Apply ``updates`` to ``trie``, timing only the apply() calls.

    Returns the number of updates that produced a warning. Cyclic garbage
    collection is paused for the loop: the engine never builds reference
    cycles that outlive an update, and collector passes over a large trie
    would otherwise dominate the timings.
    """
    pc = time.perf_counter
    warnings = 0
    if series_every:
        report.sample(trie)
    gc_was_enabled = gc.isenabled()
    gc.freeze()
    gc.disable()
    try:
        i = 0
        for i, update in enumerate(updates, 1):
            t = pc()
            cs = apply(trie, update)
            elapsed = pc() - t
            record(report, len(cs.changes), elapsed)
            if cs.warning is not None:
                warnings += 1
                log.debug("update %d: %s", i, cs.warning)
            if oracle_every and i % oracle_every == 0:
                _oracle_check(trie, i, update)
            if series_every and i % series_every == 0:
                report.sample(trie)
        if series_every and i % series_every:
            report.sample(trie)
    finally:
        if gc_was_enabled:
            gc.enable()
        gc.unfreeze()
    report.observe(trie)
    return warnings


def cmd_replay(args) -> int:
    family, _, trie = _trie_for(args.rib, args.family)
    report = ReplayReport()
    warnings = replay(trie, load_updates(args.updates, family), report, args.oracle_every, args.series_every)
    out = Path(args.report)
    out.write_text(render(report, "json"), encoding="utf-8")
    if args.series_every:
        stem = out.with_suffix("")
        Path(f"{stem}.series.csv").write_text(render(report, "csv-series"), encoding="utf-8")
        from .plotting import plot_series

        plot_series(report.series, f"{stem}.png", title=f"replay of {Path(args.updates).name}")
    sys.stdout.write(render(report, "table"))
    if warnings:
        print(f"warnings: {warnings} updates named unknown routes", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    family, original = _load_table(args.rib, args.family)
    aggregated = load_rib(args.aggregated, family, allow_drop=True)
    result = compare_tables(dict(original), dict(aggregated), family)
    if not result.ok:
        raise CommandFailed(
            EXIT_EQUIVALENCE,
            f"not equivalent: region {format_prefix(result.region)}, address {format_address(result.address)}",
        )
    print("equivalent")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if not MIN_TOY_WIDTH <= args.width <= MAX_TOY_WIDTH:
        raise CommandFailed(EXIT_PARSE, f"--width must be in {MIN_TOY_WIDTH}..{MAX_TOY_WIDTH}")
    res = run_fuzz(args.width, args.updates, args.hops, args.seed)
    for line in res.log:
        print(line)
    if not res.ok:
        return EXIT_EQUIVALENCE if res.failure_class == "equivalence" else EXIT_ORACLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faqs", description="FIB aggregation with incremental updates.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings for individual updates")
    sub = parser.add_subparsers(dest="command", required=True)

    fam = dict(type=_family, default=None, help="v4 or v6 (toy4..toy16 for binary prefixes); inferred if omitted")

    p = sub.add_parser("aggregate", help="aggregate a RIB snapshot")
    p.add_argument("--rib", required=True, help="RIB snapshot, one 'prefix next_hop' per line")
    p.add_argument("--family", **fam)
    p.add_argument("--out", required=True, help="aggregated FIB, RIB format")
    p.add_argument("--stats", help="optional JSON statistics")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("replay", help="replay an update trace and report metrics")
    p.add_argument("--rib", required=True, help="RIB snapshot, one 'prefix next_hop' per line")
    p.add_argument("--updates", required=True, help="trace of 'A prefix hop' and 'W prefix' lines")
    p.add_argument("--family", **fam)
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--oracle-every", type=_positive, metavar="N", help="check against a full re-aggregation every N updates")
    p.add_argument(
        "--series-every",
        type=_positive,
        metavar="K",
        help="sample table sizes every K updates; writes <report>.series.csv and <report>.png",
    )
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("verify", help="check that an aggregated FIB forwards like the RIB")
    p.add_argument("--rib", required=True, help="RIB snapshot, one 'prefix next_hop' per line")
    p.add_argument("--aggregated", required=True, help="FIB to check, RIB format")
    p.add_argument("--family", **fam)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="seeded random replay on a toy address width")
    p.add_argument("--width", type=int, required=True, help="address width in bits, 4..16")
    p.add_argument("--updates", type=int, required=True, help="number of random updates")
    p.add_argument("--hops", type=_positive, default=4, help="distinct next hops (default 4)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
