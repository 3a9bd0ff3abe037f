"""Text formats for routing tables and update traces.

RIB and snapshot files hold one ``<prefix>/<len> <hop>`` per line. Update
traces hold ``A <prefix>/<len> <hop>`` or ``W <prefix>/<len>`` lines. In
both, ``#`` starts a comment and blank lines are skipped; LF and CRLF line
endings are accepted.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from .engine import RouteUpdate
from .patricia import DROP
from .prefix import IPV4, IPV6, AddressFamily, IpPrefix, format_prefix, parse_prefix
from .verify import FibSnapshot


class ParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message


def _body(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _guess_family(prefix_text: str) -> AddressFamily | None:
    if ":" in prefix_text:
        return IPV6
    if "." in prefix_text:
        return IPV4
    return None


def _prefix(text: str, family: AddressFamily | None, path, lineno: int) -> tuple[IpPrefix, AddressFamily]:
    seen = _guess_family(text)
    if family is None:
        if seen is None:
            raise ParseError(path, lineno, f"cannot tell the address family of {text!r}; pass one explicitly")
        family = seen
    elif seen is not None and seen != family:
        raise ParseError(path, lineno, f"mixed address families: {text!r} is not {family.name}")
    elif seen is None and not family.is_toy:
        raise ParseError(path, lineno, f"mixed address families: {text!r} is not {family.name}")
    try:
        return parse_prefix(text, family), family
    except ValueError as exc:
        raise ParseError(path, lineno, str(exc)) from None


def _hop(text: str, path, lineno: int, allow_drop: bool = False) -> int:
    if not text.isdigit():
        raise ParseError(path, lineno, f"next hop must be a positive integer, got {text!r}")
    hop = int(text)
    if hop == DROP and not allow_drop:
        raise ParseError(path, lineno, "next hop 0 is reserved for drop")
    return hop


def load_rib(path, family: AddressFamily | None = None, allow_drop: bool = False) -> list[tuple[IpPrefix, int]]:
    """Entries in file order. The family is inferred from the first line if not given.

    ``allow_drop`` admits hop 0, which aggregated snapshots may contain where
    a drop region has to be re-established under a more general route.
    """
    entries: list[tuple[IpPrefix, int]] = []
    seen: set[IpPrefix] = set()
    with open(path, encoding="utf-8", newline=None) as fh:
        for lineno, raw in enumerate(fh, 1):
            body = _body(raw)
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ParseError(path, lineno, f"expected '<prefix>/<len> <hop>', got {body!r}")
            prefix, family = _prefix(parts[0], family, path, lineno)
            if prefix in seen:
                raise ParseError(path, lineno, f"duplicate prefix {format_prefix(prefix)}")
            seen.add(prefix)
            entries.append((prefix, _hop(parts[1], path, lineno, allow_drop)))
    return entries


def load_updates(path, family: AddressFamily | None = None) -> Iterator[RouteUpdate]:
    """Stream updates one line at a time; errors surface when the bad line is reached."""
    with open(path, encoding="utf-8", newline=None) as fh:
        for lineno, raw in enumerate(fh, 1):
            body = _body(raw)
            if not body:
                continue
            parts = body.split()
            op = parts[0]
            if op == "A" and len(parts) == 3:
                prefix, family = _prefix(parts[1], family, path, lineno)
                yield RouteUpdate.announce(prefix, _hop(parts[2], path, lineno))
            elif op == "W" and len(parts) == 2:
                prefix, family = _prefix(parts[1], family, path, lineno)
                yield RouteUpdate.withdraw(prefix)
            else:
                raise ParseError(path, lineno, f"expected 'A <prefix> <hop>' or 'W <prefix>', got {body!r}")


def format_snapshot(snapshot: FibSnapshot | dict) -> str:
    entries = snapshot.entries if isinstance(snapshot, FibSnapshot) else snapshot
    lines = []
    for prefix in sorted(entries):
        hop = entries[prefix]
        # the implicit drop default is not a route
        if prefix.length == 0 and hop == DROP:
            continue
        lines.append(f"{format_prefix(prefix)} {hop}\n")
    return "".join(lines)


def write_snapshot(snapshot: FibSnapshot | dict, path) -> None:
    """Write in RIB format, sorted by (address bits, length)."""
    Path(path).write_text(format_snapshot(snapshot), encoding="utf-8")
