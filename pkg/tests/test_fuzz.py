from __future__ import annotations

import random

import pytest

import faqs.engine as engine
from faqs.fuzz import RouteModel, initial_table, next_update, run_fuzz


@pytest.mark.parametrize("width", [4, 5, 6, 8])
def test_small_widths_with_structure_checks(width):
    res = run_fuzz(width, 1500, 3, seed=width, structure=True)
    assert res.ok, res.log[-2:]
    assert res.updates == 1500 and res.zero_bursts > 0


def test_deterministic_logs():
    a = run_fuzz(8, 500, 4, seed=9)
    b = run_fuzz(8, 500, 4, seed=9)
    assert a.log == b.log and a.ok


def test_zero_updates():
    res = run_fuzz(12, 0, 4, seed=1)
    assert res.ok and res.updates == 0


def test_detects_injected_bug(monkeypatch):
    # an engine that never pushes a hop change into fake descendants must be caught quickly
    monkeypatch.setattr(engine, "_push_down", lambda node, before: None)
    res = run_fuzz(8, 2000, 4, seed=3)
    assert not res.ok and res.failed_at is not None and res.repro
    assert res.log[-1].startswith("repro: ")


def test_route_model():
    m = RouteModel()
    rng = random.Random(0)
    for i in range(50):
        m.set(("p", i), i)
    for i in range(0, 50, 2):
        m.remove(("p", i))
    assert len(m) == 25 and all(m.choice(rng)[1] % 2 for _ in range(100))


def test_generator_keeps_table_bounded():
    rng = random.Random(1)
    model = initial_table(rng, 8, 4)
    target = len(model)
    for _ in range(5000):
        u = next_update(rng, model, 8, 4, target)
        if u.next_hop is None:
            model.remove(u.prefix)
        else:
            model.set(u.prefix, u.next_hop)
    assert 0 < len(model) < 4 * target
