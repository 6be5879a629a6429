"""A small batch experiment: the equivalence as a table.

Every row runs one seeded random instance through the oracle, the exact
LP, and max-product, and records whether "max-product converged to the
optimum" agreed with "LP tight". The agreement column is the theorem.
"""

from matchlab import harness

specs = []
for s in range(6):
    specs.append(harness.InstanceSpec("random-general", nodes=8,
                                      edge_prob=0.45, seed=s))
for s in range(3):
    specs.append(harness.InstanceSpec("odd-cycle", nodes=5, seed=s))
specs.append(harness.InstanceSpec("blossom-gadget", nodes=5, seed=0))

cfg = harness.ExperimentConfig(oracle_max_edges=30, async_seeds=2,
                               max_steps_cap=3000)
records, csv = harness.run_experiment(specs, cfg)
print(csv)

agree = sum(1 for r in records if r.agreement)
print(f"{agree}/{len(records)} rows agree; exit code "
      f"{harness.exit_code(records)}")
