from __future__ import annotations

import pytest

from faqs.engine import aggregate_table, build_trie
from faqs.prefix import IPV4, parse_address, parse_prefix


def P(text, family=IPV4):
    return parse_prefix(text, family)


def A(text, family=IPV4):
    return parse_address(text, family)


# the five-route example table and its aggregated form
TABLE_I = [
    ("141.92.0.0/16", 1),
    ("141.92.64.0/18", 1),
    ("141.92.0.0/19", 1),
    ("141.92.192.0/19", 2),
    ("141.92.224.0/19", 2),
]
TABLE_II = {"141.92.0.0/16": 1, "141.92.192.0/18": 2}
TABLE_I_COMPRESSED = {"141.92.0.0/16": 1, "141.92.192.0/19": 2, "141.92.224.0/19": 2}


def table(rows):
    items = rows.items() if isinstance(rows, dict) else rows
    return {P(p): h for p, h in items}


@pytest.fixture
def table_i():
    return [(P(p), h) for p, h in TABLE_I]


@pytest.fixture
def loaded(table_i):
    """Table I in a trie, not yet aggregated."""
    return build_trie(IPV4, table_i)


@pytest.fixture
def aggregated(table_i):
    trie, _ = aggregate_table(IPV4, table_i)
    return trie
