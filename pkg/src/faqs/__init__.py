"""FIB aggregation with fast incremental updates over a PATRICIA trie."""

from .engine import (
    ChangeKind,
    ChangeSet,
    FibChange,
    RouteUpdate,
    UpdateKind,
    aggregate_table,
    announce,
    apply,
    build_trie,
    static_aggregate,
    withdraw,
)
from .patricia import DROP, FibStatus, FibTrie, NodeType, PtNode, new_trie
from .prefix import IPV4, IPV6, AddressFamily, IpAddress, IpPrefix, parse_address, parse_prefix, toy_family
from .verify import View, brute_force_equivalence, check_equivalence, lpm, snapshot, static_oracle

__all__ = [
    "AddressFamily",
    "ChangeKind",
    "ChangeSet",
    "DROP",
    "FibChange",
    "FibStatus",
    "FibTrie",
    "IPV4",
    "IPV6",
    "IpAddress",
    "IpPrefix",
    "NodeType",
    "PtNode",
    "RouteUpdate",
    "UpdateKind",
    "View",
    "aggregate_table",
    "announce",
    "apply",
    "brute_force_equivalence",
    "build_trie",
    "check_equivalence",
    "lpm",
    "new_trie",
    "parse_address",
    "parse_prefix",
    "snapshot",
    "static_aggregate",
    "static_oracle",
    "toy_family",
    "withdraw",
]
