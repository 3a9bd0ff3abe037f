"""IP prefixes and addresses as plain integers with a fixed bit width.

Bits are numbered MSB-first from zero, so ``bit_at(p, 0)`` is the most
significant bit of the address. Toy widths (4..16 bits) exist so tests can
enumerate every address.
"""

from __future__ import annotations

import socket
from typing import NamedTuple


class AddressFamily(NamedTuple):
    name: str
    width: int

    @property
    def is_toy(self) -> bool:
        return self.width <= 16


IPV4 = AddressFamily("v4", 32)
IPV6 = AddressFamily("v6", 128)

MIN_TOY_WIDTH = 4
MAX_TOY_WIDTH = 16


def toy_family(width: int) -> AddressFamily:
    if not MIN_TOY_WIDTH <= width <= MAX_TOY_WIDTH:
        raise ValueError(f"toy width must be in {MIN_TOY_WIDTH}..{MAX_TOY_WIDTH}, got {width}")
    return AddressFamily(f"toy{width}", width)


def family_from_name(name: str) -> AddressFamily:
    """Accepts ``v4``, ``v6`` or ``toyN``."""
    if name in ("v4", "ipv4", "4"):
        return IPV4
    if name in ("v6", "ipv6", "6"):
        return IPV6
    if name.startswith("toy") and name[3:].isdigit():
        return toy_family(int(name[3:]))
    raise ValueError(f"unknown address family {name!r}")


def family_of_width(width: int) -> AddressFamily:
    if width == 32:
        return IPV4
    if width == 128:
        return IPV6
    return toy_family(width)


class IpPrefix(NamedTuple):
    bits: int
    length: int
    width: int

    @property
    def family(self) -> AddressFamily:
        return family_of_width(self.width)

    def __str__(self) -> str:
        return format_prefix(self)


class IpAddress(NamedTuple):
    bits: int
    width: int

    def __str__(self) -> str:
        return format_address(self)


class FamilyMismatch(ValueError):
    pass


def make_prefix(bits: int, length: int, width: int) -> IpPrefix:
    """Build a prefix, rejecting set host bits."""
    if not 0 <= length <= width:
        raise ValueError(f"prefix length {length} out of range 0..{width}")
    if bits < 0 or bits >> width:
        raise ValueError(f"address does not fit in {width} bits")
    if bits & ((1 << (width - length)) - 1):
        raise ValueError("host bits set beyond prefix length")
    return IpPrefix(bits, length, width)


def default_prefix(width: int) -> IpPrefix:
    return IpPrefix(0, 0, width)


def _address_bits(text: str, family: AddressFamily) -> int:
    width = family.width
    if width == 32:
        try:
            return int.from_bytes(socket.inet_pton(socket.AF_INET, text), "big")
        except OSError:
            raise ValueError(f"malformed IPv4 address {text!r}") from None
    if width == 128:
        try:
            return int.from_bytes(socket.inet_pton(socket.AF_INET6, text), "big")
        except OSError:
            raise ValueError(f"malformed IPv6 address {text!r}") from None
    if not text or len(text) > width or text.strip("01"):
        raise ValueError(f"malformed {width}-bit binary address {text!r}")
    return int(text, 2) << (width - len(text))


def parse_prefix(text: str, family: AddressFamily) -> IpPrefix:
    addr, sep, plen = text.strip().partition("/")
    if not sep or not plen.isdigit():
        raise ValueError(f"malformed prefix {text!r}: expected <address>/<length>")
    return make_prefix(_address_bits(addr, family), int(plen), family.width)


def parse_address(text: str, family: AddressFamily) -> IpAddress:
    return IpAddress(_address_bits(text.strip(), family), family.width)


def format_address(addr: IpAddress | IpPrefix) -> str:
    width = addr.width
    if width == 32:
        return socket.inet_ntop(socket.AF_INET, addr.bits.to_bytes(4, "big"))
    if width == 128:
        return socket.inet_ntop(socket.AF_INET6, addr.bits.to_bytes(16, "big"))
    return format(addr.bits, f"0{width}b")


def format_prefix(p: IpPrefix) -> str:
    return f"{format_address(p)}/{p.length}"


def _same_family(p, q) -> None:
    if p.width != q.width:
        raise FamilyMismatch(f"width {p.width} vs {q.width}")


def covers(p: IpPrefix, q: IpPrefix) -> bool:
    """True if every address in ``q`` is also in ``p``."""
    _same_family(p, q)
    if p.length > q.length:
        return False
    shift = p.width - p.length
    return (p.bits >> shift) == (q.bits >> shift)


def covers_address(p: IpPrefix, addr: IpAddress) -> bool:
    _same_family(p, addr)
    shift = p.width - p.length
    return (p.bits >> shift) == (addr.bits >> shift)


def bit_at(p: IpPrefix | IpAddress, index: int) -> int:
    limit = p.length if isinstance(p, IpPrefix) else p.width
    if not 0 <= index < limit:
        raise IndexError(f"bit index {index} out of range 0..{limit - 1}")
    return (p.bits >> (p.width - 1 - index)) & 1


def common_prefix_length(p: IpPrefix, q: IpPrefix) -> int:
    _same_family(p, q)
    return min(p.width - (p.bits ^ q.bits).bit_length(), p.length, q.length)


def truncate(bits: int, length: int, width: int) -> IpPrefix:
    """Prefix of the first ``length`` bits of ``bits``, host bits cleared."""
    shift = width - length
    return IpPrefix((bits >> shift) << shift, length, width)
