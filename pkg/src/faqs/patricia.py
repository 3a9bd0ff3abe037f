"""PATRICIA trie holding the control-plane copy of the FIB.

Each node stores its prefix plus the four aggregation fields: node type
(REAL/FAKE), original next hop, selected next hop and FIB status. Only the
structure is managed here; the fields are driven by :mod:`faqs.engine`.
"""

from __future__ import annotations

import enum
from typing import Iterator

from .prefix import AddressFamily, IpPrefix, default_prefix

DROP = 0


def _prefix(bits: int, length: int, width: int) -> IpPrefix:
    # skips the NamedTuple constructor's argument handling
    return tuple.__new__(IpPrefix, (bits, length, width))


class NodeType(enum.Enum):
    REAL = "REAL"
    FAKE = "FAKE"


class FibStatus(enum.Enum):
    IN_FIB = "IN_FIB"
    NON_FIB = "NON_FIB"


class PtNode:
    """One trie node.

    ``real`` and ``in_fib`` are stored as booleans for speed; ``node_type``
    and ``fib_status`` expose them as enums.
    """

    __slots__ = ("prefix", "bits", "length", "real", "original", "selected", "in_fib", "child", "parent")

    def __init__(self, prefix: IpPrefix, real: bool = False, original: int | None = None):
        self.prefix = prefix
        self.bits = prefix[0]
        self.length = prefix[1]
        self.real = real
        self.original = original
        self.selected: int | None = None
        self.in_fib = False
        self.child: list[PtNode | None] = [None, None]
        self.parent: PtNode | None = None

    @property
    def left(self) -> PtNode | None:
        return self.child[0]

    @property
    def right(self) -> PtNode | None:
        return self.child[1]

    @property
    def node_type(self) -> NodeType:
        return NodeType.REAL if self.real else NodeType.FAKE

    @property
    def fib_status(self) -> FibStatus:
        return FibStatus.IN_FIB if self.in_fib else FibStatus.NON_FIB

    def n_children(self) -> int:
        return (self.child[0] is not None) + (self.child[1] is not None)

    def __repr__(self) -> str:
        kind = "R" if self.real else "F"
        status = "IN" if self.in_fib else "NON"
        return f"<PtNode {self.prefix} {kind} O={self.original} S={self.selected} {status}>"


class DuplicatePrefix(KeyError):
    pass


class Detached:
    """Outcome of :meth:`FibTrie.detach`."""

    __slots__ = ("removed", "parent", "survivor", "merged")

    def __init__(self, removed: bool, parent=None, survivor=None, merged=None):
        self.removed = removed
        # node the removed node hung from; after a merge this is the merged glue's parent
        self.parent = parent
        self.survivor = survivor
        self.merged = merged


class FibTrie:
    def __init__(self, family: AddressFamily, default_hop: int = DROP, default_declared: bool = False):
        self.family = family
        self.width = family.width
        self.root = PtNode(default_prefix(self.width), real=True, original=default_hop)
        # whether 0/0 came from the routing table rather than the implicit drop route
        self.default_declared = default_declared
        self.index: dict[IpPrefix, PtNode] = {self.root.prefix: self.root}
        self.node_count = 1
        self.real_count = 1
        self.in_fib_count = 0

    def __len__(self) -> int:
        return self.node_count

    def __iter__(self) -> Iterator[PtNode]:
        """Pre-order, left before right."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            r, l = node.child[1], node.child[0]
            if r is not None:
                stack.append(r)
            if l is not None:
                stack.append(l)

    def _check_family(self, p: IpPrefix) -> None:
        if p.width != self.width:
            raise ValueError(f"prefix width {p.width} does not match trie width {self.width}")

    def find_exact(self, p: IpPrefix) -> PtNode | None:
        self._check_family(p)
        return self.index.get(p)

    def walk_to(self, p: IpPrefix) -> PtNode | None:
        """Exact match by descending the trie (the index-free lookup)."""
        self._check_family(p)
        node = self.root
        width, bits, length = self.width, p.bits, p.length
        while node is not None and node.length < length:
            node = node.child[(bits >> (width - 1 - node.length)) & 1]
            if node is not None and (node.length > length or (bits ^ node.bits) >> (width - node.length)):
                return None
        if node is not None and node.length == length and node.bits == bits:
            return node
        return None

    def deepest_cover(self, bits: int, length: int) -> PtNode:
        """Longest node strictly shorter than ``length`` covering ``bits``.

        Every node covering a prefix lies on that prefix's search path, so
        probing the index from the longest truncation down finds where a
        walk from the root would end up, without touching the nodes between.
        """
        index, width = self.index, self.width
        for l in range(length - 1, 0, -1):
            shift = width - l
            # plain tuples hash and compare equal to IpPrefix keys
            node = index.get(((bits >> shift) << shift, l, width))
            if node is not None:
                return node
        return self.root

    def insert_structural(self, p: IpPrefix) -> tuple[PtNode, PtNode | None]:
        """Link a new FAKE node for ``p``; returns it and the glue node, if one was needed.

        The caller sets the node's type and original next hop.
        """
        bits, length, width = p
        if width != self.width:
            self._check_family(p)
        if p in self.index:
            raise DuplicatePrefix(str(p))
        top = width - 1
        new = PtNode(p)
        node = self.deepest_cover(bits, length)
        while True:
            b = (bits >> (top - node.length)) & 1
            c = node.child[b]
            if c is None:
                node.child[b] = new
                new.parent = node
                glue = None
                break
            clen = c.length
            cpl = width - (bits ^ c.bits).bit_length()
            if cpl > length:
                cpl = length
            if cpl >= clen:
                cpl = clen
                # c covers p (c.length < length since p is not present)
                node = c
                continue
            if cpl == length:
                # p covers c: splice p between node and c
                node.child[b] = new
                new.parent = node
                new.child[(c.bits >> (top - length)) & 1] = c
                c.parent = new
                glue = None
                break
            shift = width - cpl
            glue = PtNode(_prefix((bits >> shift) << shift, cpl, width))
            node.child[b] = glue
            glue.parent = node
            nb = (bits >> (top - cpl)) & 1
            glue.child[nb] = new
            glue.child[1 - nb] = c
            new.parent = glue
            c.parent = glue
            self.index[glue.prefix] = glue
            self.node_count += 1
            break
        self.index[p] = new
        self.node_count += 1
        return new, glue

    def bulk_insert(self, prefixes) -> None:
        """Build the structure for many prefixes into a root-only trie.

        Sorting by (bits, length) yields the trie's pre-order, so a stack of
        the rightmost path is enough: no walk from the root per prefix.
        """
        if self.node_count != 1:
            raise ValueError("bulk_insert needs an empty trie")
        width = self.width
        top = width - 1
        index = self.index
        stack = [self.root]
        for p in sorted(set(prefixes)):
            bits, length, w = p
            if w != width:
                self._check_family(p)
            if length == 0:
                continue
            node = stack[-1]
            # pop until the stack top covers p
            while node.length >= length or (bits ^ node.bits) >> (width - node.length):
                stack.pop()
                node = stack[-1]
            new = PtNode(p)
            index[p] = new
            b = (bits >> (top - node.length)) & 1
            c = node.child[b]
            if c is None:
                node.child[b] = new
                new.parent = node
            else:
                cpl = width - (bits ^ c.bits).bit_length()
                shift = width - cpl
                glue = PtNode(_prefix((bits >> shift) << shift, cpl, width))
                index[glue.prefix] = glue
                node.child[b] = glue
                glue.parent = node
                glue.child[0] = c
                glue.child[1] = new
                c.parent = new.parent = glue
                stack.append(glue)
            stack.append(new)
        self.node_count = len(index)

    def detach(self, node: PtNode) -> Detached:
        """Unlink ``node`` if it has at most one child.

        A FAKE parent left with a single child is merged away as well. Nodes
        with two children are left in place (``removed`` is False). Counters
        are adjusted; FIB-status bookkeeping is up to the caller.
        """
        if node is self.root:
            raise ValueError("the root node cannot be removed")
        l, r = node.child
        if l is not None and r is not None:
            return Detached(False)
        parent = node.parent
        slot = 0 if parent.child[0] is node else 1
        only = l if l is not None else r
        parent.child[slot] = only
        if only is not None:
            only.parent = parent
        self._forget(node)
        if only is not None or parent.real:
            return Detached(True, parent, only)
        # parent is a FAKE glue node with one remaining child: merge it away
        sibling = parent.child[1 - slot]
        grand = parent.parent
        gslot = 0 if grand.child[0] is parent else 1
        grand.child[gslot] = sibling
        sibling.parent = grand
        self._forget(parent)
        return Detached(True, grand, sibling, parent)

    def remove_structural(self, node: PtNode) -> bool:
        return self.detach(node).removed

    def _forget(self, node: PtNode) -> None:
        del self.index[node.prefix]
        self.node_count -= 1
        if node.real:
            self.real_count -= 1
        if node.in_fib:
            self.in_fib_count -= 1
        node.parent = None
        child = node.child
        child[0] = child[1] = None

    def tallies(self) -> tuple[int, int, int]:
        """(nodes, real, in_fib) recomputed by full traversal."""
        n = real = in_fib = 0
        for node in self:
            n += 1
            real += node.real
            in_fib += node.in_fib
        return n, real, in_fib

    def check_structure(self) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        width = self.width
        root = self.root
        assert root.parent is None and root.length == 0 and root.real, "bad root"
        seen = 0
        for node in self:
            seen += 1
            assert self.index.get(node.prefix) is node, f"index out of sync at {node.prefix}"
            nc = node.n_children()
            if not node.real:
                assert nc == 2, f"FAKE node {node.prefix} has {nc} children"
            for b, c in enumerate(node.child):
                if c is None:
                    continue
                assert c.parent is node, f"parent link broken at {c.prefix}"
                assert c.length > node.length, f"{c.prefix} does not extend {node.prefix}"
                shift = width - node.length
                assert (c.bits >> shift) == (node.bits >> shift), f"{c.prefix} not under {node.prefix}"
                assert (c.bits >> (width - 1 - node.length)) & 1 == b, f"{c.prefix} on wrong side"
        assert seen == len(self.index), "index holds detached nodes"
        assert (self.node_count, self.real_count, self.in_fib_count) == self.tallies(), "stale counters"


def new_trie(family: AddressFamily, default_hop: int = DROP, default_declared: bool = False) -> FibTrie:
    return FibTrie(family, default_hop, default_declared)
