"""Computation trees: what the beliefs are really computing.

Unrolling the graph from a root edge for k levels gives the depth-k
computation tree. The synchronous belief for an edge at step k decodes
exactly whether that edge's root copy belongs to every, no, or only some
maximum-weight matching of its depth-k tree.
"""

from fractions import Fraction as F

from matchlab import comptree, maxproduct as mp
from matchlab.graph import graph_from_edges

g = graph_from_edges([(0, 1, F(1)), (1, 2, F(11, 10)), (0, 2, F(12, 10))])
print("near-equal triangle; unrolling edge 0 = (0,1)\n")

for k in (1, 2, 3, 4):
    t = comptree.build_tree(g, 0, k)
    tm = comptree.tree_optimal_matching(t)
    print(f"depth {k}: {t.num_edges} tree edges, optimum weight "
          f"{tm.total_weight}, root is '{comptree.root_membership(t)}'")
print()
print("depth-4 tree with its optimal matching (* = matched):")
print(comptree.dump_tree(comptree.build_tree(g, 0, 4),
                         comptree.tree_optimal_matching(
                             comptree.build_tree(g, 0, 4))))

print("exact-rational sync beliefs decode the same verdicts:")
ex = mp.ExactSyncEngine(g)
for k in range(1, 5):
    ex.step()
    verdicts = [comptree.root_membership(comptree.build_tree(g, e, k))
                for e in range(g.num_edges)]
    print(f"  step {k}: decode {ex.decode()}   tree roots {tuple(verdicts)}")
print("\nthe oscillation of the decode IS the tree optimum flip-flopping.")
