"""Bad-blossom certificates for loose LP relaxations.

When the relaxation is loose, the support graph (optimal matching edges
plus fractionally-positive edges) contains no augmentation, but it must
contain a bad stemmed blossom or a bad blossom pair. This module builds
the support graph, excludes augmentations, extracts a maximum-margin bad
structure by exhaustive desk-scale search, and can refute tree-optimality
of the matching projection with the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import comptree
from .graph import Matching, WeightedGraph, is_matching

F = Fraction


class CertificateError(RuntimeError):
    pass


@dataclass(frozen=True)
class SupportGraph:
    g: WeightedGraph
    edge_ids: frozenset[int]          # E': M* plus fractional support
    saturated: tuple[bool, ...]       # by M*
    #: "saturated-leaf" | "unsaturated" | "interior" per node
    leaf_class: tuple[str, ...]


@dataclass(frozen=True)
class Augmentation:
    kind: str                # "cycle" | "path"
    edge_ids: tuple[int, ...]


@dataclass(frozen=True)
class BlossomCertificate:
    kind: str                          # "StemmedBlossom" | "BlossomPair"
    cycle: tuple[int, ...]             # odd cycle edge sequence
    cycle2: tuple[int, ...] | None     # second cycle for pairs
    path: tuple[int, ...]              # stem / base-joining path, may be ()
    base: int                          # base node of cycle
    base2: int | None
    margin: Fraction

    def all_edges(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.cycle) | set(self.cycle2 or ())
                            | set(self.path)))


def support_graph(g: WeightedGraph, x, mstar: Matching) -> SupportGraph:
    """E' = M* plus edges with strictly positive LP value.

    Raises if x has no fractional support outside M* (i.e. the LP was
    tight and there is nothing to certify).
    """
    ids = set(mstar.edge_ids)
    extra = [e for e in range(g.num_edges)
             if e not in mstar.edge_ids and F(x[e]) > 0]
    if not extra:
        raise CertificateError(
            "support graph has no edge outside the optimal matching; "
            "the LP is tight here")
    ids.update(extra)
    saturated = tuple(mstar.saturates(g, i) for i in range(g.num_nodes))
    classes = []
    for i in range(g.num_nodes):
        if not saturated[i]:
            classes.append("unsaturated")
        elif all(e in mstar.edge_ids or e not in ids
                 for e in g.adjacency[i]):
            classes.append("saturated-leaf")
        else:
            classes.append("interior")
    return SupportGraph(g, frozenset(ids), saturated, tuple(classes))


def _cycle_nodes(g: WeightedGraph, cycle: tuple[int, ...]) -> list[int]:
    """Ordered node sequence of an edge cycle (first node repeated last)."""
    if len(cycle) < 3:
        raise CertificateError("cycle too short")
    e0, e1 = cycle[0], cycle[1]
    a, b = g.endpoints(e0)
    start = a if b in g.endpoints(e1) else b
    nodes = [start]
    cur = start
    for eid in cycle:
        cur = g.other_endpoint(eid, cur)
        nodes.append(cur)
    if nodes[-1] != start:
        raise CertificateError("edge sequence does not close into a cycle")
    return nodes


def _simple_cycles(g: WeightedGraph, allowed: frozenset[int]):
    """Every simple cycle within the allowed edges, once per cycle."""
    for start in range(g.num_nodes):
        # Paths with all intermediate nodes > start; dedupe direction by
        # requiring the second node to be smaller than the last.
        stack = [(start, [start], [])]
        while stack:
            node, nodes, edges = stack.pop()
            for eid in g.adjacency[node]:
                if eid not in allowed or (edges and eid == edges[-1]):
                    continue
                nb = g.other_endpoint(eid, node)
                if nb == start and len(edges) >= 2:
                    if nodes[1] < nodes[-1]:
                        yield tuple(edges + [eid])
                    continue
                if nb <= start or nb in nodes:
                    continue
                stack.append((nb, nodes + [nb], edges + [eid]))


def _blossoms(g: WeightedGraph, mstar: Matching, allowed: frozenset[int]):
    """(cycle, base) for every blossom within the allowed edges."""
    for cyc in _simple_cycles(g, allowed):
        if len(cyc) % 2 == 0:
            continue
        in_m = [e for e in cyc if e in mstar.edge_ids]
        if len(in_m) != (len(cyc) - 1) // 2:
            continue
        nodes = set(_cycle_nodes(g, cyc))
        covered = set()
        for e in in_m:
            covered.update(g.endpoints(e))
        free = nodes - covered
        assert len(free) == 1, "blossom base is unique by construction"
        yield cyc, free.pop()


def _alternating_paths_from(g: WeightedGraph, mstar: Matching,
                            allowed: frozenset[int], start: int,
                            forbidden_nodes: set[int],
                            first_in_m: bool):
    """Simple alternating paths out of start (edge lists, all prefixes)."""
    out: list[tuple[int, ...]] = []

    def dfs(node: int, want_m: bool, used_nodes: set[int],
            path: list[int]):
        if path:
            out.append(tuple(path))
        for eid in g.adjacency[node]:
            if eid not in allowed:
                continue
            if (eid in mstar.edge_ids) != want_m:
                continue
            nb = g.other_endpoint(eid, node)
            if nb in used_nodes or nb in forbidden_nodes:
                continue
            path.append(eid)
            used_nodes.add(nb)
            dfs(nb, not want_m, used_nodes, path)
            used_nodes.remove(nb)
            path.pop()

    dfs(start, first_in_m, {start}, [])
    return out


def _margin_parts(g: WeightedGraph, mstar: Matching,
                  edges, factor: int) -> Fraction:
    """factor * (w(edges - M*) - w(edges ^ M*))."""
    total = F(0)
    for e in edges:
        w = g.weight(e)
        total += -w if e in mstar.edge_ids else w
    return factor * total


def _stem_valid(g: WeightedGraph, mstar: Matching, path) -> bool:
    """Toggling the stem must leave a valid matching."""
    return is_matching(g, mstar.edge_ids ^ set(path))


def enumerate_bad_structures(g: WeightedGraph, mstar: Matching,
                             allowed: frozenset[int] | None = None
                             ) -> list[BlossomCertificate]:
    """All bad stemmed blossoms and bad blossom pairs within the edge set.

    Exhaustive and desk-scale; used both for certificate extraction on
    loose support graphs and for the converse no-bad-structure check on
    tight instances.
    """
    if allowed is None:
        allowed = frozenset(range(g.num_edges))
    found: list[BlossomCertificate] = []
    blossoms = list(_blossoms(g, mstar, allowed))

    for cyc, base in blossoms:
        cyc_nodes = set(_cycle_nodes(g, cyc))
        margin_c = _margin_parts(g, mstar, cyc, 1)
        stems = [()] + _alternating_paths_from(
            g, mstar, allowed, base, cyc_nodes - {base}, first_in_m=True)
        for stem in stems:
            if stem and not _stem_valid(g, mstar, stem):
                continue
            margin = margin_c + _margin_parts(g, mstar, stem, 2)
            if margin > 0:
                found.append(BlossomCertificate(
                    "StemmedBlossom", cyc, None, tuple(stem), base, None,
                    margin))

    for i, (c1, b1) in enumerate(blossoms):
        n1 = set(_cycle_nodes(g, c1))
        for c2, b2 in blossoms[i + 1:]:
            n2 = set(_cycle_nodes(g, c2))
            if n1 & n2:
                continue
            # alternating base-to-base paths starting and ending in M*
            for path in _alternating_paths_from(
                    g, mstar, allowed, b1,
                    (n1 | n2) - {b1, b2}, first_in_m=True):
                last = path[-1]
                end_node = _path_end(g, b1, path)
                if end_node != b2 or last not in mstar.edge_ids:
                    continue
                margin = (_margin_parts(g, mstar, c1, 1)
                          + _margin_parts(g, mstar, c2, 1)
                          + _margin_parts(g, mstar, path, 2))
                if margin > 0:
                    found.append(BlossomCertificate(
                        "BlossomPair", c1, c2, tuple(path), b1, b2, margin))
    return found


def _path_end(g: WeightedGraph, start: int, path) -> int:
    cur = start
    for eid in path:
        cur = g.other_endpoint(eid, cur)
    return cur


def find_augmentation(sg: SupportGraph,
                      mstar: Matching) -> Augmentation | None:
    """Even alternating cycle, or alternating path between two unsaturated
    nodes, inside the support graph; None when none exists.

    On a support graph built from an optimal loose LP solution the answer
    must be None; anything else flags an upstream bug to the caller.
    """
    g = sg.g
    for cyc in _simple_cycles(g, sg.edge_ids):
        if len(cyc) % 2 != 0:
            continue
        flags = [e in mstar.edge_ids for e in cyc]
        if all(a != b for a, b in zip(flags, flags[1:] + flags[:1])):
            return Augmentation("cycle", cyc)
    unsat = [i for i in range(g.num_nodes) if not sg.saturated[i]]
    for start in unsat:
        for path in _alternating_paths_from(g, mstar, sg.edge_ids, start,
                                            set(), first_in_m=False):
            end = _path_end(g, start, path)
            if end != start and not sg.saturated[end] \
                    and path[-1] not in mstar.edge_ids:
                return Augmentation("path", tuple(path))
    return None


def _assert_endpoint_cases(sg: SupportGraph, mstar: Matching):
    """The longest alternating walk cannot end in two non-interior nodes.

    These are the non-constructive impossibility branches of the support
    graph case analysis; reaching them means the LP solution or matching
    fed in was not actually optimal.
    """
    g = sg.g
    best: tuple[int, ...] = ()
    best_ends: tuple[int, int] | None = None

    def dfs(node: int, want_m: bool, used: set[int], path: list[int],
            start: int):
        nonlocal best, best_ends
        if len(path) > len(best):
            best = tuple(path)
            best_ends = (start, node)
        for eid in g.adjacency[node]:
            if eid not in sg.edge_ids or eid in used:
                continue
            if (eid in mstar.edge_ids) != want_m:
                continue
            used.add(eid)
            path.append(eid)
            dfs(g.other_endpoint(eid, node), not want_m, used, path, start)
            path.pop()
            used.remove(eid)

    for start in range(g.num_nodes):
        for first_in_m in (False, True):
            dfs(start, first_in_m, set(), [], start)

    # Closed walks (equal endpoints) fall outside the endpoint dichotomy.
    if best_ends is not None and best and best_ends[0] != best_ends[1]:
        classes = {sg.leaf_class[v] for v in best_ends}
        if "interior" not in classes:
            raise CertificateError(
                "longest alternating walk ends in "
                f"{sorted(classes)}: impossible for an optimal loose "
                "LP solution")


def find_bad_certificate(sg: SupportGraph,
                         mstar: Matching) -> BlossomCertificate:
    """Maximum-margin bad structure in the support graph.

    Requires that find_augmentation returned None. Failure to find any
    certificate contradicts the loose-implies-bad-structure guarantee and
    raises CertificateError.
    """
    _assert_endpoint_cases(sg, mstar)
    found = enumerate_bad_structures(sg.g, mstar, sg.edge_ids)
    if not found:
        raise CertificateError(
            "no bad stemmed blossom or blossom pair in a loose support "
            "graph: contradiction, upstream inputs are suspect")
    return max(found, key=lambda c: (c.margin, tuple(-i for i in
                                                     c.all_edges())))


def verify_certificate(cert: BlossomCertificate, g: WeightedGraph,
                       mstar: Matching) -> Fraction:
    """Recompute the badness margin from scratch; structural violations
    are each reported distinctly."""
    if cert.kind not in ("StemmedBlossom", "BlossomPair"):
        raise CertificateError(f"unknown certificate kind {cert.kind!r}")
    margin = F(0)
    for label, cyc, base in (("cycle", cert.cycle, cert.base),
                             ("cycle2", cert.cycle2, cert.base2)):
        if cyc is None:
            if cert.kind == "BlossomPair":
                raise CertificateError("blossom pair missing second cycle")
            continue
        if len(cyc) % 2 == 0:
            raise CertificateError(f"{label}: even length {len(cyc)}")
        nodes = _cycle_nodes(g, cyc)  # raises if not a closed cycle
        if len(set(nodes[:-1])) != len(cyc):
            raise CertificateError(f"{label}: repeated node")
        in_m = [e for e in cyc if e in mstar.edge_ids]
        if len(in_m) != (len(cyc) - 1) // 2:
            raise CertificateError(
                f"{label}: {len(in_m)} matching edges, expected "
                f"{(len(cyc) - 1) // 2}")
        covered = set()
        for e in in_m:
            covered.update(g.endpoints(e))
        if base in covered or base not in nodes:
            raise CertificateError(f"{label}: bad base node {base}")
        margin += _margin_parts(g, mstar, cyc, 1)

    if cert.path:
        want_m = True
        cur = cert.base
        seen = {cur}
        for eid in cert.path:
            if (eid in mstar.edge_ids) != want_m:
                raise CertificateError("stem/path does not alternate "
                                       "starting with a matching edge")
            cur = g.other_endpoint(eid, cur)  # raises if misrooted
            if cur in seen:
                raise CertificateError("stem/path repeats a node")
            seen.add(cur)
            want_m = not want_m
        if cert.kind == "BlossomPair":
            if cur != cert.base2:
                raise CertificateError("pair path does not join the bases")
            if cert.path[-1] not in mstar.edge_ids:
                raise CertificateError("pair path must end with a "
                                       "matching edge")
        elif not _stem_valid(g, mstar, cert.path):
            raise CertificateError("toggling the stem breaks the matching")
        margin += _margin_parts(g, mstar, cert.path, 2)
    elif cert.kind == "BlossomPair":
        raise CertificateError("blossom pair requires a base-joining path")

    if margin != cert.margin:
        raise CertificateError(
            f"stored margin {cert.margin} != recomputed {margin}")
    if margin <= 0:
        raise CertificateError(f"margin {margin} is not positive")
    return margin


def certificate_text(cert: BlossomCertificate) -> str:
    """Structured text form: kind, cycles, path, margin as p/q."""
    lines = [f"kind: {cert.kind}",
             f"cycle: {list(cert.cycle)} (base {cert.base})"]
    if cert.cycle2 is not None:
        lines.append(f"cycle2: {list(cert.cycle2)} (base {cert.base2})")
    lines.append(f"path: {list(cert.path)}")
    lines.append(f"margin: {cert.margin}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RefutationReport:
    gain: Fraction
    tree_depth: int
    projected_weight: Fraction
    improved_weight: Fraction
    augmenting_path: tuple[int, ...]    # tree edge ids, R1 + root + R2
    improved: comptree.TreeMatching


def tree_refutation(cert: BlossomCertificate, g: WeightedGraph,
                    mstar: Matching, k: int) -> RefutationReport:
    """Concrete tree witness that the projection of M* is not optimal.

    Picks a matching edge e on the blossom cycle, walks both ways around
    the cycle through the base and down the stem, lifts both walks into
    the depth-(k+|V|) computation tree rooted at e, and augments the
    projection along the lifted alternating path. The weight gain equals
    the certificate margin.
    """
    if cert.kind != "StemmedBlossom":
        raise CertificateError(
            "tree refutation supports stemmed blossoms only")
    if k < 1:
        raise CertificateError(f"depth must be >= 1, got {k}")
    cyc_m = sorted(e for e in cert.cycle if e in mstar.edge_ids)
    if not cyc_m:
        raise CertificateError("no matching edge on the blossom cycle")
    e = cyc_m[0]

    nodes = _cycle_nodes(g, cert.cycle)[:-1]
    idx = cert.cycle.index(e)
    L = len(cert.cycle)
    # cycle[i] joins nodes[i] and nodes[i+1 mod L]
    # walk both directions from e's endpoints around to the base
    base_pos = nodes.index(cert.base)

    def around(from_pos: int, step: int) -> list[int]:
        seq = []
        pos = from_pos
        while pos != base_pos:
            if step == 1:
                seq.append(cert.cycle[pos])
                pos = (pos + 1) % L
            else:
                pos = (pos - 1) % L
                seq.append(cert.cycle[pos])
        return seq

    # e joins nodes[idx] (reached backwards) and nodes[idx+1] (forwards)
    p1 = around((idx + 1) % L, +1) + list(cert.path)
    p2 = around(idx, -1) + list(cert.path)

    def switch_gain(path) -> Fraction:
        return _margin_parts(g, mstar, path, 1)

    d1, d2 = switch_gain(p1), switch_gain(p2)
    gain = d1 + d2 - g.weight(e)
    if gain != cert.margin:
        raise CertificateError(
            f"refutation gain {gain} != certificate margin {cert.margin}")

    t = comptree.build_tree(g, e, k + g.num_nodes)
    proj = comptree.project_matching(mstar, t)

    children: dict[int, dict[int, tuple[int, int]]] = {}
    for tn in range(2, t.num_nodes):
        base_node, parent, tedge = t.nodes[tn]
        children.setdefault(parent, {})[base_node] = (tn, tedge)

    def lift(start_tnode: int, start_base: int, path) -> list[int]:
        tnode, cur = start_tnode, start_base
        tedges = []
        for eid in path:
            nxt = g.other_endpoint(eid, cur)
            tn, tedge = children[tnode][nxt]
            tedges.append(tedge)
            tnode, cur = tn, nxt
        return tedges

    u, v, _ = g.edges[e]
    # p1 starts at nodes[(idx+1) % L]; p2 at nodes[idx]
    start1 = nodes[(idx + 1) % L]
    start2 = nodes[idx]
    tn1 = 0 if t.nodes[0][0] == start1 else 1
    tn2 = 1 - tn1
    r1 = lift(tn1, start1, p1)
    r2 = lift(tn2, start2, p2)
    s_edges = tuple(r1[::-1] + [0] + r2)

    toggled = proj.edge_ids ^ set(s_edges)
    total = sum((t.weight(i) for i in toggled), F(0))
    improved = comptree.TreeMatching(frozenset(toggled), total)
    comptree._check_tree_matching(t, improved)
    if total != proj.total_weight + gain:
        raise CertificateError("augmented tree matching weight mismatch")
    return RefutationReport(gain, t.depth, proj.total_weight, total,
                            s_edges, improved)
