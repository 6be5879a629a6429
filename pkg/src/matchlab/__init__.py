"""Weighted-matching laboratory.

Exhaustive oracle, exact LP relaxation with duals, max-product message
passing, computation trees, bad-blossom certificates, and a batch
experiment harness tying them together.
"""

from .graph import (AlternatingComponent, GraphError, Matching,
                    WeightedGraph, apply_alternation, graph_from_edges,
                    is_matching, parse_graph, symmetric_difference)
from .oracle import (OracleResult, InstanceTooLarge,
                     brute_force_max_matching, check_A1)
from .lp import (INFINITE_GAP, LpError, LpResult, SlacknessReport,
                 check_A2, check_complementary_slackness, compute_epsilon,
                 dump_lp, solve_lp)
from .maxproduct import (MpOutcome, Schedule, StructuralAnomaly,
                         predicted_bound, run, trace_csv)
from .comptree import (ComputationTree, TreeMatching, TreeTooLarge,
                       build_tree, dump_tree, project_matching,
                       root_membership, tree_optimal_matching)
from .blossom import (Augmentation, BlossomCertificate, CertificateError,
                      SupportGraph, certificate_text,
                      enumerate_bad_structures, find_augmentation,
                      find_bad_certificate, support_graph, tree_refutation,
                      verify_certificate)
from .harness import (ExperimentConfig, GenerationError, InstanceSpec,
                      RunRecord, diagnose, evaluate_instance, generate,
                      run_experiment)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
