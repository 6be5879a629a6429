"""Exact LP relaxation of weighted matching, with dual extraction.

The primal is  max w.x  s.t.  sum_{e at i} x_e <= 1,  x >= 0; the dual is
the fractional vertex cover  min sum z_i  s.t.  z_i + z_j >= w_ij, z >= 0.
Everything runs in exact rational arithmetic so the Tight/Loose verdict and
the slack gap are knife-edge reliable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import simplex
from .graph import Matching, WeightedGraph

F = Fraction

#: Sentinel gap for graphs whose optimum matches every edge (empty
#: minimization in the slack gap).
INFINITE_GAP = float("inf")


class LpError(RuntimeError):
    pass


@dataclass(frozen=True)
class LpResult:
    x: tuple[Fraction, ...]          # per-edge primal value in [0, 1]
    z: tuple[Fraction, ...]          # per-node dual value >= 0
    primal_objective: Fraction
    dual_objective: Fraction
    tight: bool
    primal_unique: bool
    #: min dual slack over non-matching edges; set only when tight
    #: (INFINITE_GAP when the optimal matching covers every edge)
    epsilon: Fraction | float | None

    @property
    def tightness(self) -> str:
        return "Tight" if self.tight else "Loose"

    def integral_matching(self, g: WeightedGraph) -> Matching:
        if not self.tight:
            raise LpError("no integral optimum on a Loose instance")
        return Matching.from_edges(
            g, [e for e, v in enumerate(self.x) if v == 1])


@dataclass(frozen=True)
class SlacknessReport:
    """One verdict per complementary-slackness clause, exact arithmetic."""

    matched_edges_tight: bool      # (i,j) in M*  =>  w_ij = z_i + z_j
    unmatched_edges_covered: bool  # (i,j) not in M*  =>  w_ij <= z_i + z_j
    unsaturated_nodes_zero: bool   # i unsaturated  =>  z_i = 0
    duals_bounded: bool            # z_i <= max_e w_e
    violations: tuple[str, ...]

    @property
    def all_ok(self) -> bool:
        return (self.matched_edges_tight and self.unmatched_edges_covered
                and self.unsaturated_nodes_zero and self.duals_bounded)


def _incidence(g: WeightedGraph) -> list[list[Fraction]]:
    rows = []
    for i in range(g.num_nodes):
        row = [F(0)] * g.num_edges
        for e in g.adjacency[i]:
            row[e] = F(1)
        rows.append(row)
    return rows


def solve_lp(g: WeightedGraph) -> LpResult:
    """Solve the relaxation exactly; classify tightness and fix a dual.

    Tight means: the LP optimum is unique and fully integral. On Tight
    instances the dual is re-selected from the optimal dual face so that it
    is bounded by w_max and maximizes the minimum slack on non-matching
    edges (which is then the reported gap epsilon).
    """
    m, n = g.num_edges, g.num_nodes
    weights = [g.weight(e) for e in range(m)]
    if m == 0:
        return LpResult((), tuple([F(0)] * n), F(0), F(0), True, True,
                        INFINITE_GAP)

    a_ub = _incidence(g)
    b_ub = [F(1)] * n
    sol = simplex.solve_lp(weights, a_ub, b_ub)
    if sol.status != "optimal":
        raise LpError(f"matching LP came back {sol.status}")
    x = sol.x
    opt = sol.objective
    z = list(sol.duals)
    if sum(z, F(0)) != opt:
        raise LpError("duality gap in exact arithmetic (solver bug)")
    if any(zi < 0 for zi in z):
        raise LpError("negative dual from simplex (solver bug)")

    unique = _primal_unique(g, sol, a_ub)
    tight = unique and all(v == 0 or v == 1 for v in x)

    epsilon: Fraction | float | None = None
    if tight:
        unmatched = [e for e in range(m) if x[e] == 0]
        if not unmatched:
            epsilon = INFINITE_GAP
            z = _select_dual(g, opt)
        else:
            z, epsilon = _select_dual_with_gap(g, opt, unmatched)
            if epsilon <= 0:
                raise LpError(
                    "non-positive slack gap on a tight instance "
                    "(uniqueness assumptions broken)")
    else:
        wmax = g.max_weight()
        if any(zi > wmax for zi in z):
            z = _select_dual(g, opt)

    return LpResult(tuple(x), tuple(z), opt, sum(z, F(0)), tight, unique,
                    epsilon)


def _primal_unique(g: WeightedGraph, sol: simplex.LpSolution,
                   a_ub: list[list[Fraction]]) -> bool:
    """Certified uniqueness of the LP optimum.

    Any alternative optimum must activate, away from zero, some variable or
    slack that currently sits at zero with zero reduced cost. Maximizing the
    sum of all such candidates over the optimal face moves iff the optimum
    is non-unique.
    """
    m, n = g.num_edges, g.num_nodes
    weights = [g.weight(e) for e in range(m)]
    cand_edges = [e for e in range(m) if sol.x[e] == 0
                  and sol.reduced_costs[e] == 0]
    slacks = [F(1) - sum((sol.x[e] for e in g.adjacency[i]), F(0))
              for i in range(n)]
    cand_nodes = [i for i in range(n) if slacks[i] == 0 and sol.duals[i] == 0]
    if not cand_edges and not cand_nodes:
        return True

    # Variables: x (m) then explicit slacks t (n).
    nv = m + n
    c = [F(0)] * nv
    for e in cand_edges:
        c[e] = F(1)
    for i in cand_nodes:
        c[m + i] = F(1)
    a_eq = []
    b_eq = []
    for i in range(n):
        row = [F(0)] * nv
        for e in g.adjacency[i]:
            row[e] = F(1)
        row[m + i] = F(1)
        a_eq.append(row)
        b_eq.append(F(1))
    obj_row = [weights[e] for e in range(m)] + [F(0)] * n
    a_eq.append(obj_row)
    b_eq.append(sol.objective)
    probe = simplex.solve_lp(c, a_eq=a_eq, b_eq=b_eq)
    if probe.status != "optimal":
        raise LpError(f"uniqueness probe came back {probe.status}")
    return probe.objective == 0


def _select_dual(g: WeightedGraph, opt: Fraction) -> list[Fraction]:
    """Pick a point of the optimal dual face with every z_i <= w_max."""
    n, m = g.num_nodes, g.num_edges
    wmax = g.max_weight()
    a_ub, b_ub = [], []
    for e in range(m):
        u, v, w = g.edges[e]
        row = [F(0)] * n
        row[u] -= 1
        row[v] -= 1
        a_ub.append(row)          # -z_u - z_v <= -w
        b_ub.append(-w)
    for i in range(n):
        row = [F(0)] * n
        row[i] = F(1)
        a_ub.append(row)          # z_i <= w_max
        b_ub.append(wmax)
    a_eq = [[F(1)] * n]
    b_eq = [opt]                  # stay on the optimal dual face
    sol = simplex.solve_lp([F(0)] * n, a_ub, b_ub, a_eq, b_eq)
    if sol.status != "optimal":
        raise LpError(
            "no dual optimum within the w_max bound (contradicts the "
            "complementary-slackness bound)")
    return sol.x


def _select_dual_with_gap(g: WeightedGraph, opt: Fraction,
                          unmatched: list[int]) -> tuple[list[Fraction], Fraction]:
    """Dual-face point maximizing the min slack over non-matching edges.

    Variables are (z_0..z_{n-1}, gap); the gap value doubles as epsilon.
    """
    n, m = g.num_nodes, g.num_edges
    wmax = g.max_weight()
    nv = n + 1
    a_ub, b_ub = [], []
    unmatched_set = set(unmatched)
    for e in range(m):
        u, v, w = g.edges[e]
        row = [F(0)] * nv
        row[u] -= 1
        row[v] -= 1
        if e in unmatched_set:
            row[n] = F(1)         # -z_u - z_v + gap <= -w
        a_ub.append(row)
        b_ub.append(-w)
    for i in range(n):
        row = [F(0)] * nv
        row[i] = F(1)
        a_ub.append(row)
        b_ub.append(wmax)
    a_eq = [[F(1)] * n + [F(0)]]
    b_eq = [opt]
    c = [F(0)] * n + [F(1)]
    sol = simplex.solve_lp(c, a_ub, b_ub, a_eq, b_eq)
    if sol.status != "optimal":
        raise LpError(f"gap-maximizing dual solve came back {sol.status}")
    return sol.x[:n], sol.objective


def check_complementary_slackness(g: WeightedGraph, m: Matching,
                                  r: LpResult) -> SlacknessReport:
    """Audit the four complementary-slackness clauses in exact arithmetic."""
    if not r.tight:
        raise LpError("complementary slackness applies to Tight results only")
    wmax = g.max_weight()
    violations: list[str] = []
    c1 = c2 = c3 = c4 = True
    for e in range(g.num_edges):
        u, v, w = g.edges[e]
        cover = r.z[u] + r.z[v]
        if e in m.edge_ids:
            if cover != w:
                c1 = False
                violations.append(f"matched edge {e}: z_u+z_v={cover} != {w}")
        elif cover < w:
            c2 = False
            violations.append(f"unmatched edge {e}: z_u+z_v={cover} < {w}")
    for i in range(g.num_nodes):
        if not m.saturates(g, i) and r.z[i] != 0:
            c3 = False
            violations.append(f"unsaturated node {i}: z={r.z[i]} != 0")
        if r.z[i] > wmax:
            c4 = False
            violations.append(f"node {i}: z={r.z[i]} > w_max={wmax}")
    return SlacknessReport(c1, c2, c3, c4, tuple(violations))


def compute_epsilon(g: WeightedGraph, m: Matching,
                    r: LpResult) -> Fraction | float:
    """Minimum dual slack z_i + z_j - w_ij over edges outside the matching.

    INFINITE_GAP when every edge is matched. A non-positive result means
    the uniqueness assumptions are broken and raises.
    """
    if not r.tight:
        raise LpError("slack gap is defined for Tight results only")
    slacks = [r.z[u] + r.z[v] - w
              for e, (u, v, w) in enumerate(g.edges) if e not in m.edge_ids]
    if not slacks:
        return INFINITE_GAP
    eps = min(slacks)
    if eps <= 0:
        raise LpError(f"non-positive slack gap {eps}: uniqueness broken")
    return eps


def check_A2(r: LpResult) -> bool:
    """True iff the LP optimum is unique (possibly fractional)."""
    return r.primal_unique


def dump_lp(g: WeightedGraph, r: LpResult) -> str:
    """Human/machine-readable diagnostic dump, rationals as "p/q"."""
    doc = {
        "x": {str(e): str(r.x[e]) for e in range(g.num_edges)},
        "z": {str(i): str(r.z[i]) for i in range(g.num_nodes)},
        "objective": str(r.primal_objective),
        "tightness": r.tightness,
        "epsilon": (None if r.epsilon is None
                    else "inf" if r.epsilon == INFINITE_GAP
                    else str(r.epsilon)),
    }
    return json.dumps(doc, indent=2)
