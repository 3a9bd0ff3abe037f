"""FAQS aggregation: static aggregation plus incremental update handling.

The static pass walks the trie once in post-order. On the way down every
FAKE node inherits the original next hop of its parent; on the way up each
node picks a selected next hop and fixes the FIB status of its children.

Updates touch only the subtree below the changed node and the chain of its
ancestors, with three early exits:

* a new node whose next hop equals its parent's changes nothing;
* the downward pass does not enter REAL descendants;
* the upward pass stops at the first ancestor whose selected hop is unchanged.

Every mutation of a node's selected hop or FIB status goes through a
:class:`Recorder`, which turns the before/after state into the net list of
FIB changes for the update.
"""

from __future__ import annotations

import enum
import logging
from typing import Iterable, NamedTuple

from .patricia import DROP, FibTrie, PtNode
from .prefix import AddressFamily, IpPrefix, format_prefix

log = logging.getLogger(__name__)


class ChangeKind(enum.Enum):
    ADD = "ADD"
    CHANGE = "CHANGE"
    DELETE = "DELETE"


class FibChange(NamedTuple):
    kind: ChangeKind
    prefix: IpPrefix
    next_hop: int | None = None

    def __str__(self) -> str:
        if self.kind is ChangeKind.DELETE:
            return f"DELETE {format_prefix(self.prefix)}"
        return f"{self.kind.value} {format_prefix(self.prefix)} {self.next_hop}"


class UpdateKind(enum.Enum):
    ANNOUNCE = "A"
    WITHDRAW = "W"


ANNOUNCE = UpdateKind.ANNOUNCE


class RouteUpdate(NamedTuple):
    kind: UpdateKind
    prefix: IpPrefix
    next_hop: int | None = None

    @classmethod
    def announce(cls, prefix: IpPrefix, next_hop: int) -> RouteUpdate:
        return cls(UpdateKind.ANNOUNCE, prefix, next_hop)

    @classmethod
    def withdraw(cls, prefix: IpPrefix) -> RouteUpdate:
        return cls(UpdateKind.WITHDRAW, prefix)

    def __str__(self) -> str:
        if self.kind is UpdateKind.WITHDRAW:
            return f"W {format_prefix(self.prefix)}"
        return f"A {format_prefix(self.prefix)} {self.next_hop}"


ADD, CHANGE, DELETE = ChangeKind.ADD, ChangeKind.CHANGE, ChangeKind.DELETE


class ChangeSet:
    """Net FIB changes caused by one update (at most one per prefix)."""

    __slots__ = ("changes", "warning")

    def __init__(self, changes: list[FibChange] | None = None, warning: str | None = None):
        self.changes = [] if changes is None else changes
        self.warning = warning

    @property
    def burst_size(self) -> int:
        return len(self.changes)

    def __len__(self) -> int:
        return len(self.changes)

    def __iter__(self):
        return iter(self.changes)

    def __bool__(self) -> bool:
        return bool(self.changes)

    def as_set(self) -> set[FibChange]:
        return set(self.changes)

    def apply_to(self, fib: dict[IpPrefix, int]) -> dict[IpPrefix, int]:
        """Edit ``fib`` in place as the data plane would; returns it."""
        for kind, prefix, hop in self.changes:
            if kind is ChangeKind.DELETE:
                del fib[prefix]
            elif kind is ChangeKind.ADD:
                if prefix in fib:
                    raise KeyError(f"ADD of existing entry {format_prefix(prefix)}")
                fib[prefix] = hop
            else:
                if prefix not in fib:
                    raise KeyError(f"CHANGE of missing entry {format_prefix(prefix)}")
                fib[prefix] = hop
        return fib

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.changes)
        if self.warning:
            return f"<ChangeSet [{body}] warning={self.warning!r}>"
        return f"<ChangeSet [{body}]>"


class Recorder:
    """Remembers the pre-update (status, selected hop) of every touched node."""

    __slots__ = ("trie", "before")

    def __init__(self, trie: FibTrie):
        self.trie = trie
        self.before: dict[PtNode, tuple[bool, int | None]] = {}

    def touch(self, node: PtNode) -> None:
        if node not in self.before:
            self.before[node] = (node.in_fib, node.selected)

    def finish(self, warning: str | None = None) -> ChangeSet:
        return _finish(self.trie, self.before, warning)


def _finish(trie: FibTrie, before: dict, warning: str | None = None) -> ChangeSet:
    """Net changes from the recorded pre-states; keeps the IN_FIB counter current."""
    if not before:
        return ChangeSet([], warning)
    changes = []
    add = changes.append
    make = tuple.__new__
    delta = 0
    for node, (was_in, old) in before.items():
        if was_in:
            if not node.in_fib:
                add(make(FibChange, (DELETE, node.prefix, None)))
                delta -= 1
            elif node.selected != old:
                add(make(FibChange, (CHANGE, node.prefix, node.selected)))
        elif node.in_fib:
            add(make(FibChange, (ADD, node.prefix, node.selected)))
            delta += 1
    trie.in_fib_count += delta
    return ChangeSet(changes, warning)


def set_selected_next_hop(node: PtNode, rec: Recorder | None = None) -> bool:
    """Assign S(node) from its children; returns whether it changed.

    S(node) is the left child's selected hop when both children sit exactly
    one bit below the node and the right child's selected hop differs from
    the node's original hop; otherwise it is the node's own original hop.
    """
    l, r = node.child
    if (
        l is not None
        and r is not None
        and l.length == node.length + 1
        and r.length == node.length + 1
        and node.original != r.selected
    ):
        new = l.selected
    else:
        new = node.original
    if new == node.selected:
        return False
    if rec is not None:
        before = rec.before
        if node not in before:
            before[node] = (node.in_fib, node.selected)
    node.selected = new
    return True


def set_child_fib_status(node: PtNode, rec: Recorder) -> None:
    """A child is IN_FIB exactly when its selected hop differs from the node's."""
    s = node.selected
    before = rec.before
    for c in node.child:
        if c is None:
            continue
        want = c.selected != s
        if want != c.in_fib:
            if c not in before:
                before[c] = (c.in_fib, c.selected)
            c.in_fib = want


def static_aggregate(trie: FibTrie) -> ChangeSet:
    """Aggregate the whole trie in one post-order pass.

    On a freshly loaded trie the result lists the entire aggregated FIB as
    ADDs (the root included).
    """
    root = trie.root
    if root.original is None:
        raise ValueError("root has no original next hop")
    rec = Recorder(trie)
    _aggregate_below(root, rec.before)
    if not root.in_fib:
        rec.touch(root)
        root.in_fib = True
    return rec.finish()


def _aggregate_below(node: PtNode, before: dict) -> None:
    # recursion depth is bounded by the address width
    l, r = node.child
    if l is not None:
        if not l.real:
            l.original = node.original
        _aggregate_below(l, before)
    if r is not None:
        if not r.real:
            r.original = node.original
        _aggregate_below(r, before)
    _settle(node, before)


def _settle(node: PtNode, before: dict) -> bool:
    """set_selected_next_hop followed by set_child_fib_status, inlined."""
    l, r = node.child
    if (
        l is not None
        and r is not None
        and l.length == r.length == node.length + 1
        and node.original != r.selected
    ):
        s = l.selected
    else:
        s = node.original
    changed = s != node.selected
    if changed:
        if node not in before:
            before[node] = (node.in_fib, node.selected)
        node.selected = s
    if l is not None and (l.selected != s) != l.in_fib:
        if l not in before:
            before[l] = (l.in_fib, l.selected)
        l.in_fib = not l.in_fib
    if r is not None and (r.selected != s) != r.in_fib:
        if r not in before:
            before[r] = (r.in_fib, r.selected)
        r.in_fib = not r.in_fib
    return changed


def update_subtree(node: PtNode, rec: Recorder) -> None:
    """Push O(node) into FAKE descendants, then redo S and statuses bottom-up.

    REAL descendants keep their own original hop, so their branches are not
    entered.
    """
    _push_down(node, rec.before)


def _push_down(node: PtNode, before: dict) -> None:
    o = node.original
    l, r = node.child
    if l is not None and not l.real:
        l.original = o
        _push_down(l, before)
    if r is not None and not r.real:
        r.original = o
        _push_down(r, before)
    _settle(node, before)


def refresh_upward(p: PtNode | None, rec: Recorder) -> None:
    """Recompute ``p`` and its ancestors until a selected hop stays put."""
    _climb(p, rec.before)


def _climb(p: PtNode | None, before: dict) -> None:
    while p is not None and _settle(p, before):
        p = p.parent


def update_ancestors(node: PtNode, rec: Recorder) -> None:
    refresh_upward(node.parent, rec)


def _check_hop(hop: int) -> None:
    if hop is None or hop < 0:
        raise ValueError(f"next hop must be a non-negative integer, got {hop!r}")


def announce(trie: FibTrie, prefix: IpPrefix, hop: int) -> ChangeSet:
    """Add a route or change the next hop of an existing one."""
    if prefix[2] != trie.width:
        trie._check_family(prefix)
    if hop is None or hop < 0:
        _check_hop(hop)
    before: dict = {}
    node = trie.index.get(prefix)
    if node is None:
        node, glue = trie.insert_structural(prefix)
        node.real = True
        trie.real_count += 1
        node.original = hop
        parent = node.parent
        if glue is not None:
            glue.original = glue.parent.original
        if parent.original != hop:
            _push_down(node, before)
            _climb(parent, before)
        else:
            # nothing observable changes; store the S = O, NON_FIB values a
            # static pass would assign to the new node and its glue
            node.selected = hop
            if glue is not None:
                glue.selected = glue.original
            return ChangeSet([])
        return _finish(trie, before)
    if not node.real:
        node.real = True
        trie.real_count += 1
    if node.original != hop:
        node.original = hop
        _push_down(node, before)
        _climb(node.parent, before)
    if node is trie.root:
        trie.default_declared = True
    return _finish(trie, before)


def withdraw(trie: FibTrie, prefix: IpPrefix) -> ChangeSet:
    """Remove a route. Unknown prefixes give an empty ChangeSet with a warning."""
    if prefix[2] != trie.width:
        trie._check_family(prefix)
    node = trie.index.get(prefix)
    if node is None or not node.real:
        msg = f"withdrawal of unknown prefix {format_prefix(prefix)}"
        log.debug(msg)
        return ChangeSet(warning=msg)
    before: dict = {}
    if node is trie.root:
        if not trie.default_declared:
            msg = f"withdrawal of undeclared default route {format_prefix(prefix)}"
            log.debug(msg)
            return ChangeSet(warning=msg)
        trie.default_declared = False
        if node.original != DROP:
            node.original = DROP
            _push_down(node, before)
        return _finish(trie, before)

    l, r = node.child
    if l is not None and r is not None:
        node.real = False
        trie.real_count -= 1
        inherited = node.parent.original
        if node.original != inherited:
            node.original = inherited
            _push_down(node, before)
            _climb(node.parent, before)
        return _finish(trie, before)

    before[node] = (node.in_fib, node.selected)
    node.in_fib = False
    parent = node.parent
    if l is None and r is None and not parent.real:
        # the glue parent goes too
        before[parent] = (parent.in_fib, parent.selected)
        parent.in_fib = False
    det = trie.detach(node)
    anchor, survivor = det.parent, det.survivor
    if survivor is not None and not survivor.real and survivor.original != anchor.original:
        survivor.original = anchor.original
        _push_down(survivor, before)
    _climb(anchor, before)
    return _finish(trie, before)


def apply(trie: FibTrie, update: RouteUpdate) -> ChangeSet:
    kind, prefix, hop = update
    if kind is ANNOUNCE:
        return announce(trie, prefix, hop)
    return withdraw(trie, prefix)


def build_trie(
    family: AddressFamily,
    entries: Iterable[tuple[IpPrefix, int]],
    default_hop: int = DROP,
) -> FibTrie:
    """Load routes into a fresh trie without aggregating.

    An explicit 0/0 entry overrides ``default_hop`` and marks the default as
    declared.
    """
    trie = FibTrie(family, default_hop)
    hops: dict[IpPrefix, int] = {}
    for prefix, hop in entries:
        if hop is None or hop < 0:
            _check_hop(hop)
        if prefix[1] == 0:
            trie._check_family(prefix)
            trie.root.original = hop
            trie.default_declared = True
        else:
            hops[prefix] = hop
    trie.bulk_insert(hops)
    index = trie.index
    for prefix, hop in hops.items():
        node = index[prefix]
        node.real = True
        node.original = hop
    trie.real_count += len(hops)
    return trie


def aggregate_table(
    family: AddressFamily,
    entries: Iterable[tuple[IpPrefix, int]],
    default_hop: int = DROP,
) -> tuple[FibTrie, ChangeSet]:
    trie = build_trie(family, entries, default_hop)
    return trie, static_aggregate(trie)
