from __future__ import annotations

import csv
import io
import json

import pytest
from conftest import P

from faqs.engine import aggregate_table, announce
from faqs.metrics import JSON_KEYS, NODE_BYTES, SERIES_FIELDS, ReplayReport, aggregation_ratio, record, render
from faqs.patricia import FibTrie
from faqs.prefix import IPV4


def test_all_bursts_one():
    r = ReplayReport()
    for _ in range(1000):
        record(r, 1, 1e-6)
    assert r.n_c == 1000 and r.burst_hist[1] == 1000 and r.b_max == 1


def test_mixed_bursts():
    r = ReplayReport()
    for b in (0, 1, 4):
        record(r, b, 2e-6)
    assert r.n_c == 5 and r.b_max == 4 and r.n_u == 3
    assert sum(r.burst_hist.values()) == r.n_u
    d = r.as_dict()
    assert abs(d["burst0_pct"] - 100 / 3) < 1e-9 and d["burst_le30_pct"] == 100.0
    assert abs(d["t_aggr_us"] - 2.0) < 1e-9 and abs(d["t_peak_ms"] - 0.002) < 1e-12


def test_ratio_table_i(aggregated):
    assert aggregation_ratio(aggregated) == 2 / 5
    r = ReplayReport()
    r.observe(aggregated)
    d = json.loads(render(r, "json"))
    assert d["n_u"] == 0 and d["ratio"] == 0.4
    assert d["mem_bytes"] == 8 * NODE_BYTES


def test_ratio_with_declared_default():
    trie, _ = aggregate_table(IPV4, [(P("0.0.0.0/0"), 1), (P("10.0.0.0/8"), 2)])
    assert aggregation_ratio(trie) == 1.0
    announce(trie, P("10.0.0.0/8"), 1)
    assert aggregation_ratio(trie) == 0.5


def test_empty_report():
    r = ReplayReport()
    r.observe(aggregate_table(IPV4, [])[0])
    d = json.loads(render(r, "json"))
    assert tuple(d) == JSON_KEYS
    assert d["ratio"] is None
    assert all(v == 0 for k, v in d.items() if k != "ratio" and k != "mem_bytes")
    assert "n/a" in render(r, "table")


def test_json_round_trip():
    r = ReplayReport()
    record(r, 3, 1e-5)
    text = render(r, "json")
    assert json.loads(text) == r.as_dict()


def test_series_csv(aggregated):
    r = ReplayReport()
    r.sample(aggregated)
    record(r, 4, 1e-5)
    announce(aggregated, P("141.92.0.0/16"), 2)
    r.sample(aggregated)
    rows = list(csv.reader(io.StringIO(render(r, "csv-series"))))
    assert tuple(rows[0]) == SERIES_FIELDS
    assert rows[1][:3] == ["0", "5", "2"]
    assert rows[2][0] == "1" and rows[2][2] == "3" and rows[2][4] == "4"


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render(ReplayReport(), "xml")


def test_root_only_ratio_undefined():
    t = FibTrie(IPV4)
    assert aggregation_ratio(t) is None
