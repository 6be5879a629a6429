"""Instance generation and the batch experiment pipeline."""

from fractions import Fraction as F

import pytest

from matchlab import harness, lp, oracle
from matchlab.harness import (CSV_COLUMNS, ExperimentConfig, GenerationError,
                              InstanceSpec, RunRecord, evaluate_instance,
                              generate, run_experiment, to_csv)

FAST = ExperimentConfig(oracle_max_edges=30, max_steps_floor=200,
                        max_steps_cap=1500)


class TestGenerate:
    def test_deterministic(self):
        spec = InstanceSpec("random-general", nodes=7, seed=42)
        g1, r1 = generate(spec, FAST)
        g2, r2 = generate(spec, FAST)
        assert g1.edges == g2.edges and r1 == r2

    def test_seeds_differ(self):
        a, _ = generate(InstanceSpec("random-general", nodes=7, seed=1), FAST)
        b, _ = generate(InstanceSpec("random-general", nodes=7, seed=2), FAST)
        assert a.edges != b.edges

    def test_uniqueness_assumptions_hold(self):
        for seed in range(5):
            g, _ = generate(InstanceSpec("random-general", nodes=8,
                                         seed=seed), FAST)
            assert oracle.check_A1(g, max_edges=30)
            assert lp.check_A2(lp.solve_lp(g))

    def test_bipartite_structure(self):
        spec = InstanceSpec("random-bipartite", nodes=4, nodes2=5, seed=3)
        g, _ = generate(spec, FAST)
        for u, v, _w in g.edges:
            assert (u < 4) != (v < 4)

    def test_perturbation_preserves_integer_part(self):
        spec = InstanceSpec("random-general", nodes=7, weight_max=50, seed=9)
        g, _ = generate(spec, FAST)
        weights = [w for _, _, w in g.edges]
        assert len(set(weights)) == len(weights)    # all distinct
        m = g.num_edges
        for w in weights:
            frac = w - int(w)
            assert 0 < frac <= F(4 * m, 16 * m * m)
        # total perturbation below half the weight granularity
        assert sum(w - int(w) for w in weights) < F(1, 2)

    def test_odd_cycle_and_gadget_are_loose(self):
        for kind, n in (("odd-cycle", 5), ("odd-cycle", 7),
                        ("blossom-gadget", 5)):
            g, _ = generate(InstanceSpec(kind, nodes=n, seed=1), FAST)
            assert not lp.solve_lp(g).tight

    def test_even_cycle_request_is_rounded_up(self):
        g, _ = generate(InstanceSpec("odd-cycle", nodes=4, seed=0), FAST)
        assert g.num_nodes == 5 and g.num_edges == 5

    def test_file_kind(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1 2\n1 2 1\n")
        g, retries = generate(InstanceSpec("file", path=str(p)), FAST)
        assert g.num_edges == 2 and retries == 0

    def test_file_kind_requires_path(self):
        with pytest.raises(GenerationError):
            generate(InstanceSpec("file"), FAST)

    def test_unknown_kind_rejected(self):
        with pytest.raises(GenerationError):
            InstanceSpec("mystery")


class TestEvaluate:
    def test_tight_instance(self):
        g, _ = generate(InstanceSpec("random-general", nodes=7, seed=4), FAST)
        rec = evaluate_instance(g, 0, 4, FAST)
        assert rec.error is None and not rec.internal_assertion
        assert rec.a1 and rec.a2
        if rec.lp_tightness == "Tight":
            assert rec.mp_verdict == "Converged"
            assert rec.mp_steps <= rec.predicted_bound
            assert rec.agreement

    def test_loose_instance(self, triangle):
        rec = evaluate_instance(triangle, 0, 0, FAST)
        assert rec.lp_tightness == "Loose"
        assert rec.mp_verdict == "NoConvergence"
        assert rec.certificate_kind == "StemmedBlossom"
        assert rec.agreement and not rec.internal_assertion
        assert rec.epsilon is None

    def test_oversized_instance_recorded_not_fatal(self):
        from matchlab.graph import graph_from_edges
        g = graph_from_edges([(0, i + 1, 1) for i in range(35)])
        rec = evaluate_instance(g, 0, 0, FAST)
        assert rec.error is not None
        assert rec.agreement is None
        assert harness.exit_code([rec]) == 0     # errors are not failures

    def test_async_seeds_run(self, path3):
        cfg = ExperimentConfig(oracle_max_edges=30, async_seeds=3,
                               max_steps_floor=200, max_steps_cap=1500)
        rec = evaluate_instance(path3, 0, 0, cfg)
        assert rec.agreement and not rec.internal_assertion


class TestExperiment:
    def test_csv_shape_and_determinism(self):
        specs = [InstanceSpec("random-general", nodes=6, seed=s)
                 for s in range(3)]
        recs1, csv1 = run_experiment(specs, FAST)
        recs2, csv2 = run_experiment(specs, FAST)
        assert csv1 == csv2                       # byte-identical
        lines = csv1.strip().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(specs)
        assert harness.exit_code(recs1) == 0

    def test_timestamp_column_togglable(self):
        specs = [InstanceSpec("random-general", nodes=5, seed=0)]
        cfg = ExperimentConfig(oracle_max_edges=30, timestamp=True,
                               max_steps_floor=200, max_steps_cap=1500)
        _, csv = run_experiment(specs, cfg)
        assert csv.splitlines()[0].endswith(",timestamp")

    def test_generation_failure_recorded(self):
        specs = [InstanceSpec("file", path="/nonexistent/file", seed=0)]
        recs, csv = run_experiment(specs, FAST)
        assert recs[0].error is not None
        assert "instance" in csv.splitlines()[0]


class TestExitCodes:
    def _rec(self, **kw):
        base = dict(instance=0, seed=0, a1=True, a2=True,
                    lp_tightness="Tight", epsilon="1", mp_verdict="Converged",
                    mp_steps=2, predicted_bound=4, oracle_weight="2",
                    agreement=True, certificate_kind=None)
        base.update(kw)
        return RunRecord(**base)

    def test_ok(self):
        assert harness.exit_code([self._rec()]) == 0

    def test_disagreement(self):
        assert harness.exit_code([self._rec(), self._rec(agreement=False)]) == 2

    def test_internal_assertion_wins(self):
        recs = [self._rec(agreement=False),
                self._rec(internal_assertion=True)]
        assert harness.exit_code(recs) == 4


def test_diagnose_tight(path3):
    text = harness.diagnose(path3, FAST)
    assert "lp: Tight" in text
    assert "gap epsilon: 1" in text
    assert "predicted bound: 4" in text
    assert "Converged at step 2" in text


def test_diagnose_loose(triangle):
    text = harness.diagnose(triangle, FAST)
    assert "lp: Loose" in text
    assert "NoConvergence" in text
    assert "margin: 9/10" in text


def test_to_csv_empty():
    assert to_csv([], FAST).strip() == ",".join(CSV_COLUMNS)
