"""The LP relaxation in exact rationals: duals, slackness, and the gap.

On a tight instance the dual (a fractional vertex cover) certifies the
matching, and the minimum slack on non-matching edges — the gap epsilon —
controls how fast max-product converges: within ceil(2*w_max/epsilon).
"""

from matchlab import lp, maxproduct as mp
from matchlab.graph import graph_from_edges

g = graph_from_edges([(0, 1, 3), (1, 2, 1), (2, 3, 3), (3, 0, 1)])
print("4-cycle with weights 3,1,3,1")
r = lp.solve_lp(g)
print(lp.dump_lp(g, r))
print()

m = r.integral_matching(g)
rep = lp.check_complementary_slackness(g, m, r)
print("complementary slackness clauses:")
print(f"  matched edges tight (w = z_i + z_j):    {rep.matched_edges_tight}")
print(f"  unmatched edges covered (w <= z_i+z_j): {rep.unmatched_edges_covered}")
print(f"  unsaturated nodes carry z = 0:          {rep.unsaturated_nodes_zero}")
print(f"  every dual bounded by w_max:            {rep.duals_bounded}")
print()

eps = lp.compute_epsilon(g, m, r)
bound = mp.predicted_bound(g.max_weight(), eps)
print(f"gap epsilon = {eps}  ->  convergence bound ceil(2*w_max/eps) = {bound}")
out = mp.run(g)
print(f"max-product actually converged at step {out.step}")
