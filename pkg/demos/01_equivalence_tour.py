"""Tour of the headline equivalence on two tiny instances.

Max-product message passing finds the maximum-weight matching exactly
when the LP relaxation of the matching problem is tight — and fails to
converge when the relaxation is loose. One instance of each, end to end.
"""

from fractions import Fraction as F

from matchlab import lp, maxproduct as mp, oracle
from matchlab.graph import graph_from_edges


def show(name, g):
    print(f"=== {name} ===")
    res = oracle.brute_force_max_matching(g)
    print(f"oracle optimum: edges {sorted(res.best.edge_ids)} "
          f"weight {res.best_weight} (unique: {res.unique})")

    r = lp.solve_lp(g)
    print(f"LP relaxation: {r.tightness}, objective {r.primal_objective}, "
          f"x = {[str(v) for v in r.x]}")

    out = mp.run(g, max_steps=1000)
    if out.converged:
        print(f"max-product: converged at step {out.step} to "
              f"{sorted(out.matching.edge_ids)}")
        bound = mp.predicted_bound(g.max_weight(), r.epsilon)
        print(f"  within the predicted bound of {bound} steps")
    else:
        d = out.diagnostics
        print(f"max-product: no convergence in {d.steps_run} steps "
              f"(beliefs oscillate with period {d.oscillation_period})")
    print()


# A path a-b-c with weights 2 and 1. The single best matching {ab} is
# also the unique LP optimum: tight, so max-product must converge.
show("tight: weighted path", graph_from_edges([(0, 1, 2), (1, 2, 1)]))

# A near-equal triangle. Putting 1/2 on every edge beats any single
# edge, so the LP optimum is fractional: loose, and max-product cycles
# between the two contenders forever.
show("loose: near-equal triangle",
     graph_from_edges([(0, 1, F(1)), (1, 2, F(11, 10)), (0, 2, F(12, 10))]))
