"""Computation trees: recursive unrolling of the graph from a root edge.

The depth-1 tree is the root edge alone; each further level hangs, below
every leaf, one child copy per base-graph neighbor except the neighbor the
leaf was reached from. Edge weights are inherited from the base graph.
Max-weight matchings on the tree come from a leaf-to-root DP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import Matching, WeightedGraph

DEFAULT_SIZE_CAP = 10**6


class TreeTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ComputationTree:
    g: WeightedGraph
    root_edge: int
    depth: int
    #: per tree node: (base node id, parent tree node or -1, parent tree
    #: edge or -1). Nodes 0 and 1 are the root edge's endpoint copies.
    nodes: tuple[tuple[int, int, int], ...]
    #: per tree edge: (base edge id, upper tree node, lower tree node);
    #: tree edge 0 is the root edge between nodes 0 and 1.
    edges: tuple[tuple[int, int, int], ...]

    def weight(self, tid: int) -> Fraction:
        return self.g.weight(self.edges[tid][0])

    def base_edge(self, tid: int) -> int:
        return self.edges[tid][0]

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def node_depth(self, tnode: int) -> int:
        d = 1
        while self.nodes[tnode][1] >= 0:
            tnode = self.nodes[tnode][1]
            d += 1
        return d


@dataclass(frozen=True)
class TreeMatching:
    edge_ids: frozenset[int]
    total_weight: Fraction
    #: True when other max-weight tree matchings exist (set by the DP)
    tie: bool = False


def build_tree(g: WeightedGraph, root: int, k: int,
               size_cap: int = DEFAULT_SIZE_CAP) -> ComputationTree:
    """The full depth-k computation tree rooted at the given base edge."""
    if k < 1:
        raise ValueError(f"depth must be >= 1, got {k}")
    if not 0 <= root < g.num_edges:
        raise ValueError(f"bad root edge id {root}")
    u, v, _ = g.edges[root]
    nodes: list[tuple[int, int, int]] = [(u, -1, -1), (v, -1, -1)]
    edges: list[tuple[int, int, int]] = [(root, 0, 1)]
    # frontier entries: (tree node id, base node, base node it came from)
    frontier = [(0, u, v), (1, v, u)]
    for _ in range(k - 1):
        nxt = []
        for tnode, base, came_from in frontier:
            for eid in g.adjacency[base]:
                nb = g.other_endpoint(eid, base)
                if nb == came_from:
                    continue
                child = len(nodes)
                tedge = len(edges)
                if tedge >= size_cap:
                    raise TreeTooLarge(
                        f"computation tree exceeds {size_cap} edges")
                nodes.append((nb, tnode, tedge))
                edges.append((eid, tnode, child))
                nxt.append((child, nb, base))
        frontier = nxt
    return ComputationTree(g, root, k, tuple(nodes), tuple(edges))


def project_matching(m: Matching, t: ComputationTree) -> TreeMatching:
    """All tree copies of the matching's edges (always a tree matching)."""
    ids = frozenset(tid for tid in range(t.num_edges)
                    if t.base_edge(tid) in m.edge_ids)
    total = sum((t.weight(tid) for tid in ids), Fraction(0))
    tm = TreeMatching(ids, total)
    _check_tree_matching(t, tm)
    return tm


def _check_tree_matching(t: ComputationTree, tm: TreeMatching):
    used: set[int] = set()
    for tid in tm.edge_ids:
        _, a, b = t.edges[tid]
        if a in used or b in used:
            raise ValueError(f"tree edges share node (edge {tid})")
        used.update((a, b))


@dataclass
class _Dp:
    """Per-node DP: best subtree weight with the node free / unconstrained,
    plus optimal-solution counts for tie detection."""

    free: Fraction
    best: Fraction
    n_free: int
    n_best: int


def _children(t: ComputationTree) -> list[list[tuple[int, int]]]:
    ch: list[list[tuple[int, int]]] = [[] for _ in range(t.num_nodes)]
    for tnode in range(2, t.num_nodes):
        _, parent, tedge = t.nodes[tnode]
        ch[parent].append((tnode, tedge))
    return ch


def _run_dp(t: ComputationTree) -> tuple[list[_Dp], list[list[tuple[int, int]]]]:
    ch = _children(t)
    dp: list[_Dp | None] = [None] * t.num_nodes
    # children always have larger ids than parents, so reverse id order is
    # a valid postorder.
    for x in range(t.num_nodes - 1, -1, -1):
        free = Fraction(0)
        n_free = 1
        for c, _ in ch[x]:
            free += dp[c].best
            n_free *= dp[c].n_best
        best, n_best = free, n_free
        for c, tedge in ch[x]:
            # match x to child c: swap c's contribution from best to free
            cand = free - dp[c].best + dp[c].free + t.weight(tedge)
            cnt = n_free // dp[c].n_best * dp[c].n_free
            if cand > best:
                best, n_best = cand, cnt
            elif cand == best:
                n_best += cnt
        dp[x] = _Dp(free, best, n_free, n_best)
    return dp, ch  # type: ignore[return-value]


def tree_optimal_matching(t: ComputationTree) -> TreeMatching:
    """Max-weight matching on the tree by leaf-to-root DP.

    Deterministic tie-break: prefer the root edge excluded, then at each
    node prefer leaving the node free, then match the smallest tree-edge
    id. The ``tie`` flag reports whether other optima exist at all.
    """
    dp, ch = _run_dp(t)
    w_root = t.weight(0)
    in_val = w_root + dp[0].free + dp[1].free
    out_val = dp[0].best + dp[1].best
    n_opt = 0
    if in_val >= out_val:
        n_opt += dp[0].n_free * dp[1].n_free
    if out_val >= in_val:
        n_opt += dp[0].n_best * dp[1].n_best

    chosen: list[int] = []

    def take(x: int, mode: str):
        """mode "free": x must stay unmatched downward; "best": either."""
        d = dp[x]
        if mode == "best" and d.best > d.free:
            # forced to match x to some child; pick the smallest tree edge
            # among optimal options
            for c, tedge in sorted(ch[x], key=lambda p: p[1]):
                cand = (d.free - dp[c].best + dp[c].free + t.weight(tedge))
                if cand == d.best:
                    chosen.append(tedge)
                    for c2, _ in ch[x]:
                        take(c2, "free" if c2 == c else "best")
                    return
            raise AssertionError("DP reconstruction failed")
        for c, _ in ch[x]:
            take(c, "best")

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, t.num_nodes + 100))
    try:
        if in_val > out_val:
            chosen.append(0)
            take(0, "free")
            take(1, "free")
            total = in_val
        else:
            take(0, "best")
            take(1, "best")
            total = out_val
    finally:
        sys.setrecursionlimit(old)

    tm = TreeMatching(frozenset(chosen), total, tie=n_opt > 1)
    _check_tree_matching(t, tm)
    if tm.total_weight != sum((t.weight(i) for i in tm.edge_ids), Fraction(0)):
        raise AssertionError("DP weight mismatch")
    return tm


def root_membership(t: ComputationTree) -> str:
    """Whether the root edge is in every / no / some-but-not-all
    max-weight tree matching: "in", "out", or "tie"."""
    dp, _ = _run_dp(t)
    in_val = t.weight(0) + dp[0].free + dp[1].free
    out_val = dp[0].best + dp[1].best
    if in_val > out_val:
        return "in"
    if in_val < out_val:
        return "out"
    return "tie"


def dump_tree(t: ComputationTree, tm: TreeMatching | None = None) -> str:
    """Indented text dump: one node per line with depth, base copy, and
    whether the edge to its parent is matched."""
    lines = [f"root-edge base={t.base_edge(0)} depth={t.depth}"]
    matched = tm.edge_ids if tm else frozenset()

    def visit(tnode: int, indent: int, via: int | None):
        base = t.nodes[tnode][0]
        flag = "*" if via is not None and via in matched else " "
        lines.append(f"{'  ' * indent}{flag}n{base}")
        for c in range(2, t.num_nodes):
            if t.nodes[c][1] == tnode:
                visit(c, indent + 1, t.nodes[c][2])

    root_flag = "*" if 0 in matched else " "
    lines[0] += f" {root_flag}"
    visit(0, 1, None)
    visit(1, 1, None)
    return "\n".join(lines) + "\n"
