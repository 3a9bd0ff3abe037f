from __future__ import annotations

import pytest
from conftest import TABLE_I, TABLE_II, P, table
from hypothesis import given, settings
from hypothesis import strategies as st

from faqs.engine import UpdateKind
from faqs.io import ParseError, format_snapshot, load_rib, load_updates, write_snapshot
from faqs.prefix import IPV4, IPV6, IpPrefix, toy_family
from faqs.verify import FibSnapshot, View


def write(tmp_path, text, name="f.txt"):
    path = tmp_path / name
    path.write_bytes(text.encode())
    return path


def test_load_table_i(tmp_path):
    text = "# example\n" + "".join(f"{p} {h}\n" for p, h in TABLE_I)
    entries = load_rib(write(tmp_path, text))
    assert entries == [(P(p), h) for p, h in TABLE_I]


def test_crlf_comments_blank(tmp_path):
    path = write(tmp_path, "\r\n10.0.0.0/8 3  # trailing\r\n\r\n# only\r\n")
    assert load_rib(path) == [(P("10.0.0.0/8"), 3)]


def test_empty_file(tmp_path):
    assert load_rib(write(tmp_path, "")) == []


def test_duplicate_names_second_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_rib(write(tmp_path, "141.92.0.0/16 1\n141.92.0.0/16 1\n"))
    assert exc.value.line == 2


@pytest.mark.parametrize(
    "text",
    [
        "10.0.0.0/8 1\n2001:db8::/32 1\n",
        "10.0.0.0/8 0\n",
        "10.0.0.1/8 1\n",
        "10.0.0.0/8\n",
        "10.0.0.0/8 x\n",
    ],
)
def test_rib_errors(tmp_path, text):
    with pytest.raises(ParseError):
        load_rib(write(tmp_path, text))


def test_family_given(tmp_path):
    assert load_rib(write(tmp_path, "2001:db8::/32 4\n"), IPV6)[0][0].width == 128
    with pytest.raises(ParseError):
        load_rib(write(tmp_path, "2001:db8::/32 4\n"), IPV4)
    toy = load_rib(write(tmp_path, "101/3 2\n"), toy_family(8))
    assert toy == [(IpPrefix(0b10100000, 3, 8), 2)]
    with pytest.raises(ParseError):
        load_rib(write(tmp_path, "101/3 2\n"))


def test_load_updates(tmp_path):
    ups = list(load_updates(write(tmp_path, "A 141.92.0.0/16 2\nW 141.92.192.0/19\n")))
    assert ups[0].kind is UpdateKind.ANNOUNCE and ups[0].next_hop == 2
    assert ups[1].kind is UpdateKind.WITHDRAW and ups[1].next_hop is None


def test_updates_error_line_three(tmp_path):
    stream = load_updates(write(tmp_path, "A 10.0.0.0/8 1\nW 10.0.0.0/8\nX 10.0.0.0/8\n"))
    assert next(stream) and next(stream)
    with pytest.raises(ParseError) as exc:
        next(stream)
    assert exc.value.line == 3


def test_updates_are_lazy(tmp_path):
    path = write(tmp_path, "A 10.0.0.0/8 1\nthis line is broken\n")
    stream = load_updates(path)
    assert next(stream).prefix == P("10.0.0.0/8")


def test_write_table_ii(tmp_path):
    snap = FibSnapshot({P("0.0.0.0/0"): 0, **table(TABLE_II)}, View.AGGREGATED)
    path = tmp_path / "out.txt"
    write_snapshot(snap, path)
    assert path.read_text() == "141.92.0.0/16 1\n141.92.192.0/18 2\n"
    declared = {P("0.0.0.0/0"): 4, **table(TABLE_II)}
    assert format_snapshot(declared).splitlines()[0] == "0.0.0.0/0 4"
    write_snapshot({}, path)
    assert path.read_text() == ""


def test_snapshot_keeps_drop_regions(tmp_path):
    path = tmp_path / "agg.txt"
    write_snapshot({P("10.0.0.0/8"): 1, P("10.1.0.0/16"): 0}, path)
    with pytest.raises(ParseError):
        load_rib(path)
    assert dict(load_rib(path, allow_drop=True)) == {P("10.0.0.0/8"): 1, P("10.1.0.0/16"): 0}


v4_entries = st.dictionaries(
    st.builds(lambda n, b: IpPrefix((b >> (32 - n)) << (32 - n), n, 32), st.integers(1, 32), st.integers(0, 2**32 - 1)),
    st.integers(1, 1000),
    max_size=30,
)


@settings(max_examples=100)
@given(v4_entries)
def test_write_load_round_trip(tmp_path_factory, entries):
    path = tmp_path_factory.mktemp("rt") / "snap.txt"
    write_snapshot(entries, path)
    assert dict(load_rib(path, IPV4)) == entries
