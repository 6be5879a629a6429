"""Ground-truth maximum-weight matching by exhaustive branch-and-bound.

Desk-scale only: every matching is considered (with pruning that provably
never discards the best or the runner-up), so optimality and uniqueness
come out certified rather than sampled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import Matching, WeightedGraph

DEFAULT_MAX_EDGES = 24


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best: Matching
    best_weight: Fraction
    unique: bool
    #: weight of the best matching whose edge set differs from ``best``;
    #: None when the graph admits only one matching (the empty one).
    runner_up_weight: Fraction | None


def brute_force_max_matching(g: WeightedGraph,
                             max_edges: int = DEFAULT_MAX_EDGES) -> OracleResult:
    """Exhaustive max-weight matching with uniqueness certification.

    Edges are branched in descending weight order; a branch is pruned only
    when its optimistic bound falls strictly below the current runner-up,
    which preserves every optimum (needed for the lexicographic tie-break
    and the uniqueness verdict).
    """
    if g.num_edges > max_edges:
        raise InstanceTooLarge(
            f"{g.num_edges} edges exceeds oracle limit {max_edges}")

    order = sorted(range(g.num_edges), key=lambda e: (-g.weight(e), e))
    weights = [g.weight(e) for e in order]
    # suffix[i] = total weight of order[i:], the optimistic bound remainder.
    suffix = [Fraction(0)] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]

    best_w = Fraction(0)
    best_set: tuple[int, ...] = ()
    runner_w: Fraction | None = None

    def record(weight: Fraction, chosen: list[int]):
        nonlocal best_w, best_set, runner_w
        key = tuple(sorted(chosen))
        if weight > best_w:
            if best_set != key:
                runner_w = best_w
            best_w, best_set = weight, key
        elif weight == best_w:
            if key != best_set:
                runner_w = best_w
                if key < best_set:
                    best_set = key
        else:
            if runner_w is None or weight > runner_w:
                runner_w = weight

    saturated = [False] * g.num_nodes

    def search(i: int, weight: Fraction, chosen: list[int]):
        if i == len(order):
            record(weight, chosen)
            return
        if runner_w is not None and weight + suffix[i] < runner_w:
            return
        eid = order[i]
        u, v = g.endpoints(eid)
        if not saturated[u] and not saturated[v]:
            saturated[u] = saturated[v] = True
            chosen.append(eid)
            search(i + 1, weight + weights[i], chosen)
            chosen.pop()
            saturated[u] = saturated[v] = False
        search(i + 1, weight, chosen)

    # The empty matching exists even on the empty graph.
    record(Fraction(0), [])
    if g.num_edges:
        search(0, Fraction(0), [])

    unique = runner_w is None or runner_w < best_w
    return OracleResult(
        best=Matching.from_edges(g, best_set),
        best_weight=best_w,
        unique=unique,
        runner_up_weight=runner_w,
    )


def check_A1(g: WeightedGraph, max_edges: int = DEFAULT_MAX_EDGES) -> bool:
    """True iff the maximum-weight matching is unique."""
    return brute_force_max_matching(g, max_edges=max_edges).unique
