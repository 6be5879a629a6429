"""Max-product engine: message algebra, schedules, convergence verdicts."""

import random
from fractions import Fraction as F

import numpy as np
import pytest

from matchlab import maxproduct as mp
from matchlab.graph import graph_from_edges
from matchlab.oracle import brute_force_max_matching


class TestMessageAlgebra:
    def test_first_layer_values(self, path3):
        """After one layer: node->edge messages are 0 (inputs were flat)
        and edge->node messages equal the edge weight."""
        eng = mp.Engine(path3)
        s = eng.update_step(eng.init_messages())
        assert s.t == 1
        assert np.allclose(s.lam_ne, 0.0)
        assert np.allclose(s.lam_en, [2.0, 2.0, 1.0, 1.0])

    def test_second_layer_on_path(self, path3):
        """Node b has seen edge bc (weight 1), so b -> ab carries -1; the
        endpoints a and c have no competing edges and keep sending 0."""
        eng = mp.Engine(path3)
        s = eng.update_step(eng.update_step(eng.init_messages()))
        slot_b_to_ab = 2 * 0 + 1   # edge 0 = (a,b); side 1 is node b
        slot_a_to_ab = 2 * 0 + 0
        assert s.lam_ne[slot_b_to_ab] == pytest.approx(-1.0)
        assert s.lam_ne[slot_a_to_ab] == 0.0
        b = eng.compute_beliefs(s)
        assert b.decoded == ("one", "zero")

    def test_exact_engine_matches_float(self):
        rng = random.Random(2)
        for _ in range(20):
            n = rng.randint(2, 7)
            edges = [(u, v, F(rng.randint(1, 30), rng.choice([1, 2, 4])))
                     for u in range(n) for v in range(u + 1, n)
                     if rng.random() < 0.5]
            if not edges:
                continue
            g = graph_from_edges(edges, num_nodes=n)
            eng = mp.Engine(g)
            s = eng.init_messages()
            ex = mp.ExactSyncEngine(g)
            for _ in range(6):
                s = eng.update_step(s)
                ex.step()
                assert np.allclose(eng.compute_beliefs(s).beta,
                                   [float(b) for b in ex.beliefs()],
                                   atol=1e-9)

    def test_two_entry_shadow_decodes_identically(self):
        """Keeping (log m0, log m1) separately instead of the normalized
        ratio cannot change the three-valued decode."""
        rng = random.Random(8)
        for _ in range(15):
            n = rng.randint(2, 6)
            edges = [(u, v, F(rng.randint(1, 20)))
                     for u in range(n) for v in range(u + 1, n)
                     if rng.random() < 0.6]
            if not edges:
                continue
            g = graph_from_edges(edges, num_nodes=n)
            ex = mp.ExactSyncEngine(g)
            shadow = mp.TwoEntrySyncEngine(g)
            for _ in range(5):
                ex.step()
                shadow.step()
                assert ex.decode() == shadow.decode()


class TestSchedule:
    def test_sync_has_no_mask(self):
        assert mp.Schedule("sync").mask_for_step(3, 10) is None

    def test_async_round_partitions_all_slots(self):
        sched = mp.Schedule("async", seed=5, chunks_per_round=4)
        for rnd in range(3):
            seen = np.zeros(10, dtype=int)
            for c in range(4):
                mask = sched.mask_for_step(4 * rnd + c, 10)
                seen += mask.astype(int)
            assert (seen == 1).all()

    def test_deterministic_per_seed(self):
        a = mp.Schedule("async", seed=1).mask_for_step(2, 12)
        b = mp.Schedule("async", seed=1).mask_for_step(2, 12)
        c = mp.Schedule("async", seed=2).mask_for_step(2, 12)
        assert (a == b).all()
        assert not (a == c).all()

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            mp.Schedule("chaotic")


class TestRun:
    def test_path_converges_at_two_within_bound(self, path3):
        out = mp.run(path3)
        assert out.converged
        assert out.matching.edge_ids == {0}
        assert out.step == 2
        assert out.step <= mp.predicted_bound(F(2), F(1))   # 4

    def test_single_edge_converges_immediately(self, single_edge):
        out = mp.run(single_edge)
        assert out.converged and out.step == 1
        assert out.matching.edge_ids == {0}

    def test_four_cycle(self, four_cycle):
        out = mp.run(four_cycle)
        assert out.converged
        assert out.matching.edge_ids == {0, 2}
        assert out.step <= mp.predicted_bound(F(3), F(2))   # 3

    def test_triangle_oscillates(self, triangle):
        out = mp.run(triangle, max_steps=1000)
        assert not out.converged
        assert out.matching is None and out.step is None
        assert out.diagnostics.steps_run == 1000
        assert out.diagnostics.oscillation_period == 2

    def test_loose_c5_oscillates(self, loose_c5):
        out = mp.run(loose_c5, max_steps=1000)
        assert not out.converged
        assert out.diagnostics.oscillation_period is not None

    def test_empty_graph(self):
        out = mp.run(graph_from_edges([], num_nodes=3))
        assert out.converged and out.matching.edge_ids == frozenset()

    def test_async_schedules_agree_with_sync(self, path3, four_cycle):
        for g in (path3, four_cycle):
            want = mp.run(g).matching.edge_ids
            for seed in range(4):
                out = mp.run(g, mp.Schedule("async", seed=seed),
                             max_steps=2000)
                assert out.converged
                assert out.matching.edge_ids == want

    def test_trace(self, path3):
        out = mp.run(path3, trace_every=1)
        assert out.diagnostics.trace
        step, betas, decoded = out.diagnostics.trace[0]
        assert step == 1 and len(betas) == 2 and len(decoded) == 2
        csv = mp.trace_csv(out.diagnostics)
        lines = csv.strip().splitlines()
        assert lines[0] == "step,edge,beta,decoded"
        assert len(lines) == 1 + 2 * len(out.diagnostics.trace)

    def test_max_steps_validation(self, path3):
        with pytest.raises(ValueError):
            mp.run(path3, max_steps=1, stability_window=5)

    def test_random_instances_never_stably_wrong(self):
        rng = random.Random(31)
        for _ in range(25):
            n = rng.randint(3, 8)
            edges = [(u, v, F(rng.randint(1, 50))
                      + F(rng.randint(1, 97), 10000))
                     for u in range(n) for v in range(u + 1, n)
                     if rng.random() < 0.5]
            if not edges:
                continue
            g = graph_from_edges(edges, num_nodes=n)
            best = brute_force_max_matching(g).best
            out = mp.run(g, max_steps=2000)
            if out.converged:
                assert out.matching.edge_ids == best.edge_ids


class TestPredictedBound:
    def test_values(self):
        assert mp.predicted_bound(F(2), F(1)) == 4
        assert mp.predicted_bound(F(3), F(2)) == 3
        assert mp.predicted_bound(F(7, 2), F(3)) == 3   # ceil(7/3)

    def test_infinite_gap_sentinel(self):
        assert mp.predicted_bound(F(5), float("inf")) == 1

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            mp.predicted_bound(F(5), F(0))


def test_belief_state_helpers(path3):
    eng = mp.Engine(path3)
    s = eng.update_step(eng.update_step(eng.init_messages()))
    b = eng.compute_beliefs(s)
    assert b.assignment() == (0,)
    assert not b.has_tie
