"""Replay metrics: update and change counts, timing, burst sizes, memory proxy."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

from .patricia import FibTrie

# rough per-node footprint of a PtNode plus its index entry, in bytes
NODE_BYTES = 64
BURST_SMALL = 30
JSON_KEYS = (
    "n_u",
    "n_c",
    "ratio",
    "nc_per_nu",
    "t_aggr_us",
    "t_peak_ms",
    "burst0_pct",
    "burst1_pct",
    "burst_le30_pct",
    "b_max",
    "mem_bytes",
)
SERIES_FIELDS = ("update", "original_size", "aggregated_size", "cum_time_s", "cum_changes")


class Sample(NamedTuple):
    update: int
    original_size: int
    aggregated_size: int
    cum_time_s: float
    cum_changes: int


def aggregation_ratio(trie: FibTrie) -> float | None:
    """IN_FIB entries over routes; the implicit drop default counts on neither side.

    None when there are no routes to count.
    """
    real, in_fib = trie.real_count, trie.in_fib_count
    if not trie.default_declared:
        real -= 1
        in_fib -= trie.root.in_fib
    if real <= 0:
        return None
    return in_fib / real


@dataclass
class ReplayReport:
    n_u: int = 0
    n_c: int = 0
    ratio_r: float | None = None
    total_time: float = 0.0
    peak_time: float = 0.0
    burst_hist: Counter = field(default_factory=Counter)
    b_max: int = 0
    node_count: int = 0
    series: list[Sample] = field(default_factory=list)

    @property
    def t_aggr_avg(self) -> float:
        """Mean per-update time in microseconds."""
        return self.total_time / self.n_u * 1e6 if self.n_u else 0.0

    @property
    def t_peak(self) -> float:
        """Slowest single update in milliseconds."""
        return self.peak_time * 1e3

    @property
    def m_estimate(self) -> int:
        return self.node_count * NODE_BYTES

    def bursts_at_most(self, k: int) -> int:
        return sum(n for b, n in self.burst_hist.items() if b <= k)

    def observe(self, trie: FibTrie) -> None:
        """Refresh the trie-derived fields (ratio, node count)."""
        self.ratio_r = aggregation_ratio(trie)
        self.node_count = trie.node_count

    def sample(self, trie: FibTrie) -> Sample:
        # table sizes as the data plane sees them: root counted only if declared
        hidden = not trie.default_declared
        s = Sample(
            self.n_u,
            trie.real_count - hidden,
            trie.in_fib_count - (hidden and trie.root.in_fib),
            self.total_time,
            self.n_c,
        )
        self.series.append(s)
        return s

    def as_dict(self) -> dict:
        n = self.n_u
        pct = (lambda k: 100.0 * k / n) if n else (lambda k: 0.0)
        return {
            "n_u": n,
            "n_c": self.n_c,
            "ratio": self.ratio_r,
            "nc_per_nu": self.n_c / n if n else 0.0,
            "t_aggr_us": self.t_aggr_avg,
            "t_peak_ms": self.t_peak,
            "burst0_pct": pct(self.burst_hist.get(0, 0)),
            "burst1_pct": pct(self.burst_hist.get(1, 0)),
            "burst_le30_pct": pct(self.bursts_at_most(BURST_SMALL)),
            "b_max": self.b_max,
            "mem_bytes": self.m_estimate,
        }


def record(report: ReplayReport, burst: int, elapsed: float) -> None:
    """Account one update: ``burst`` FIB changes, ``elapsed`` seconds inside apply()."""
    report.n_u += 1
    report.n_c += burst
    report.burst_hist[burst] += 1
    if burst > report.b_max:
        report.b_max = burst
    report.total_time += elapsed
    if elapsed > report.peak_time:
        report.peak_time = elapsed


def render(report: ReplayReport, format: str = "table") -> str:
    if format == "json":
        return json.dumps(report.as_dict(), indent=2) + "\n"
    if format == "csv-series":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SERIES_FIELDS)
        for s in report.series:
            w.writerow((s.update, s.original_size, s.aggregated_size, f"{s.cum_time_s:.6f}", s.cum_changes))
        return buf.getvalue()
    if format == "table":
        d = report.as_dict()
        ratio = "n/a" if d["ratio"] is None else f"{d['ratio']:.4f}"
        rows = [
            ("updates (n_u)", str(d["n_u"])),
            ("FIB changes (n_c)", str(d["n_c"])),
            ("aggregation ratio (r)", ratio),
            ("n_c / n_u", f"{d['nc_per_nu']:.4f}"),
            ("mean update time (us)", f"{d['t_aggr_us']:.3f}"),
            ("peak update time (ms)", f"{d['t_peak_ms']:.3f}"),
            ("bursts of 0 (%)", f"{d['burst0_pct']:.2f}"),
            ("bursts of 1 (%)", f"{d['burst1_pct']:.2f}"),
            (f"bursts <= {BURST_SMALL} (%)", f"{d['burst_le30_pct']:.2f}"),
            ("max burst (b_max)", str(d["b_max"])),
            ("memory estimate (bytes)", str(d["mem_bytes"])),
        ]
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)
    raise ValueError(f"unknown report format {format!r}")
