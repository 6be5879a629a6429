"""Weighted graphs, matchings, and alternating-structure utilities.

All weights are exact rationals (fractions.Fraction); every operation in
this module is a pure function on immutable data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable


class GraphError(ValueError):
    """Invalid graph structure or malformed graph input."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with non-negative rational edge weights.

    Nodes are dense integers 0..n-1. ``edges[e]`` is a ``(u, v, w)`` triple
    and ``adjacency[i]`` lists the edge ids incident to node ``i``.
    """

    num_nodes: int
    edges: tuple[tuple[int, int, Fraction], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, compare=False)

    def __post_init__(self):
        seen_pairs = set()
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for eid, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise GraphError(f"edge {eid}: endpoint out of range")
            if u == v:
                raise GraphError(f"edge {eid}: self-loop at node {u}")
            pair = (min(u, v), max(u, v))
            if pair in seen_pairs:
                raise GraphError(f"edge {eid}: duplicate edge {pair}")
            seen_pairs.add(pair)
            if w < 0:
                raise GraphError(f"edge {eid}: negative weight {w}")
            adj[u].append(eid)
            adj[v].append(eid)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def weight(self, eid: int) -> Fraction:
        return self.edges[eid][2]

    def endpoints(self, eid: int) -> tuple[int, int]:
        u, v, _ = self.edges[eid]
        return u, v

    def other_endpoint(self, eid: int, node: int) -> int:
        u, v, _ = self.edges[eid]
        if node == u:
            return v
        if node == v:
            return u
        raise GraphError(f"node {node} is not an endpoint of edge {eid}")

    def max_weight(self) -> Fraction:
        return max((w for _, _, w in self.edges), default=Fraction(0))

    def neighbors(self, node: int) -> list[int]:
        return [self.other_endpoint(e, node) for e in self.adjacency[node]]

    def edge_id(self, u: int, v: int) -> int:
        """Edge id of the edge {u, v}, or GraphError if absent."""
        for e in self.adjacency[u]:
            if self.other_endpoint(e, u) == v:
                return e
        raise GraphError(f"no edge between {u} and {v}")

    def serialize(self) -> str:
        """Edge-list text; inverse of parse_graph for dense node ids."""
        lines = [f"# {self.num_nodes} nodes, {self.num_edges} edges"]
        for u, v, w in self.edges:
            lines.append(f"{u} {v} {w}")
        return "\n".join(lines) + "\n"


def graph_from_edges(edges: Iterable[tuple[int, int, Fraction | int | str]],
                     num_nodes: int | None = None) -> WeightedGraph:
    """Build a WeightedGraph from (u, v, w) triples, inferring n if absent."""
    triples = [(u, v, Fraction(w)) for u, v, w in edges]
    if num_nodes is None:
        num_nodes = 1 + max((max(u, v) for u, v, _ in triples), default=-1)
    return WeightedGraph(num_nodes, tuple(triples))


def parse_graph(text: str) -> WeightedGraph:
    """Parse the edge-list format: '#' comments, data lines "u v w".

    Weights may be decimals ("1.2") or rationals ("6/5"). Node labels are
    arbitrary non-negative integers and get remapped to 0..n-1 in order of
    first appearance.
    """
    label_to_id: dict[int, int] = {}
    triples: list[tuple[int, int, Fraction]] = []
    seen_pairs: dict[tuple[int, int], int] = {}

    def intern(label: int) -> int:
        if label not in label_to_id:
            label_to_id[label] = len(label_to_id)
        return label_to_id[label]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"expected 'u v w', got {line!r}", line=lineno)
        try:
            ulab, vlab = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"bad node label in {line!r}", line=lineno) from None
        if ulab < 0 or vlab < 0:
            raise GraphError("node labels must be non-negative", line=lineno)
        try:
            w = Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise GraphError(f"bad weight {parts[2]!r}", line=lineno) from None
        if w < 0:
            raise GraphError(f"negative weight {w}", line=lineno)
        if ulab == vlab:
            raise GraphError(f"self-loop at node {ulab}", line=lineno)
        u, v = intern(ulab), intern(vlab)
        pair = (min(u, v), max(u, v))
        if pair in seen_pairs:
            raise GraphError(
                f"duplicate edge {{{ulab}, {vlab}}} (first at line "
                f"{seen_pairs[pair]})", line=lineno)
        seen_pairs[pair] = lineno
        triples.append((u, v, w))

    return WeightedGraph(len(label_to_id), tuple(triples))


@dataclass(frozen=True)
class Matching:
    """A set of pairwise node-disjoint edge ids, with its total weight."""

    edge_ids: frozenset[int]
    total_weight: Fraction

    @staticmethod
    def from_edges(g: WeightedGraph, edge_ids: Iterable[int]) -> "Matching":
        ids = frozenset(edge_ids)
        if not is_matching(g, ids):
            raise GraphError(f"edge set {sorted(ids)} is not a matching")
        total = sum((g.weight(e) for e in ids), Fraction(0))
        return Matching(ids, total)

    def __contains__(self, eid: int) -> bool:
        return eid in self.edge_ids

    def saturates(self, g: WeightedGraph, node: int) -> bool:
        return any(e in self.edge_ids for e in g.adjacency[node])


def is_matching(g: WeightedGraph, edge_ids: Iterable[int]) -> bool:
    """True iff no two of the given edges share an endpoint."""
    used: set[int] = set()
    for eid in edge_ids:
        if not 0 <= eid < g.num_edges:
            raise GraphError(f"unknown edge id {eid}")
        u, v = g.endpoints(eid)
        if u in used or v in used:
            return False
        used.update((u, v))
    return True


@dataclass(frozen=True)
class AlternatingComponent:
    """A maximal path or even cycle of a symmetric difference m1 (triangle) m2.

    ``edge_ids`` is the ordered edge sequence; ``in_first[i]`` is True when
    ``edge_ids[i]`` belongs to the first matching.
    """

    kind: str  # "path" | "cycle"
    edge_ids: tuple[int, ...]
    in_first: tuple[bool, ...]

    def __post_init__(self):
        if self.kind not in ("path", "cycle"):
            raise GraphError(f"bad component kind {self.kind!r}")
        if len(self.edge_ids) != len(self.in_first):
            raise GraphError("edge/flag length mismatch")
        for a, b in zip(self.in_first, self.in_first[1:]):
            if a == b:
                raise GraphError("membership flags do not alternate")
        if self.kind == "cycle":
            if len(self.edge_ids) % 2 != 0:
                raise GraphError("alternating cycle must have even length")


def symmetric_difference(g: WeightedGraph, m1: Matching,
                         m2: Matching) -> list[AlternatingComponent]:
    """Decompose m1 triangle m2 into maximal alternating paths and even cycles.

    Each diff node touches at most one edge from each matching, so the diff
    is a disjoint union of paths and even cycles with strictly alternating
    membership.
    """
    diff = m1.edge_ids ^ m2.edge_ids
    if not diff:
        return []
    incident: dict[int, list[int]] = {}
    for eid in diff:
        for node in g.endpoints(eid):
            incident.setdefault(node, []).append(eid)

    visited: set[int] = set()
    components: list[AlternatingComponent] = []

    def walk(start_node: int, start_edge: int) -> tuple[list[int], bool]:
        """Trace from start_node through start_edge to exhaustion.

        Returns the edge sequence and whether it closed into a cycle.
        """
        seq = []
        node, eid = start_node, start_edge
        while True:
            seq.append(eid)
            visited.add(eid)
            node = g.other_endpoint(eid, node)
            nxt = [e for e in incident.get(node, []) if e not in visited]
            if not nxt:
                closed = node == start_node
                return seq, closed
            eid = nxt[0]

    # Paths first: start at nodes of diff-degree 1.
    for node in sorted(incident):
        if len(incident[node]) != 1:
            continue
        eid = incident[node][0]
        if eid in visited:
            continue
        seq, closed = walk(node, eid)
        assert not closed
        components.append(_component("path", seq, m1))
    # Remaining edges form cycles.
    for eid in sorted(diff):
        if eid in visited:
            continue
        start = g.endpoints(eid)[0]
        seq, closed = walk(start, eid)
        assert closed
        components.append(_component("cycle", seq, m1))
    return components


def _component(kind: str, seq: list[int], m1: Matching) -> AlternatingComponent:
    return AlternatingComponent(kind, tuple(seq),
                                tuple(e in m1.edge_ids for e in seq))


def apply_alternation(g: WeightedGraph, m: Matching,
                      comp: AlternatingComponent) -> Matching:
    """Toggle the component's edges in m.

    The result is guaranteed to be a matching when comp came out of
    symmetric_difference against another matching; a violation here means a
    caller bug and raises GraphError.
    """
    new_ids = m.edge_ids ^ set(comp.edge_ids)
    return Matching.from_edges(g, new_ids)
