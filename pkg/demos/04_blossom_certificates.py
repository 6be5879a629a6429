"""Why loose instances break: a constructive blossom certificate.

When the LP is loose, the support graph (matching edges plus fractional
support) contains no augmenting structure, yet it must contain a bad
stemmed blossom or bad blossom pair. That structure is a reusable witness:
lifted into a deep computation tree, it strictly improves the projection
of the true matching, which is why the beliefs can never settle on it.
"""

from fractions import Fraction as F

from matchlab import blossom, lp, oracle
from matchlab.graph import graph_from_edges

w = [F(10 + i, 10) for i in range(5)]
g = graph_from_edges([(i, (i + 1) % 5, w[i]) for i in range(5)])
print("5-cycle with weights 1.0 .. 1.4\n")

mstar = oracle.brute_force_max_matching(g).best
r = lp.solve_lp(g)
print(f"best matching: {sorted(mstar.edge_ids)} weight {mstar.total_weight}")
print(f"LP: {r.tightness}, objective {r.primal_objective}, "
      f"x = {[str(v) for v in r.x]}\n")

sg = blossom.support_graph(g, r.x, mstar)
print(f"support graph edges: {sorted(sg.edge_ids)}")
print(f"node classes: {sg.leaf_class}")
print(f"augmentation present: {blossom.find_augmentation(sg, mstar)}\n")

cert = blossom.find_bad_certificate(sg, mstar)
print(blossom.certificate_text(cert))
print(f"verified margin: {blossom.verify_certificate(cert, g, mstar)}\n")

rep = blossom.tree_refutation(cert, g, mstar, 3)
print("lifting the certificate into a computation tree of depth "
      f"{rep.tree_depth}:")
print(f"  projected matching weight: {rep.projected_weight}")
print(f"  after augmenting along the lifted path: {rep.improved_weight}")
print(f"  gain = certificate margin = {rep.gain}")
