import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bireg import graphgen as gg
from bireg.numkernel import rng_from_seed, rng_substream
from conftest import SMALL_PARAM_GRID, oracle_tangle_free


class TestConfigurationModel:
    def test_forced_single_edge(self):
        g = gg.sample_configuration(1, 1, 1, 1, rng_from_seed(0))
        assert g.edges == ((0, 0),)
        assert g.simple

    def test_simple_23_outcome_is_complete(self):
        g = gg.sample_simple(2, 3, 3, 2, rng_from_seed(1))
        assert g.edges == gg.complete_bipartite(2, 3).edges

    def test_paper_scale_structure(self):
        g = gg.sample_configuration(120, 280, 7, 3, rng_from_seed(42))
        assert g.num_edges == 840
        assert gg.validate(g).passed

    def test_parameter_mismatch(self):
        with pytest.raises(gg.ParameterError):
            gg.sample_configuration(2, 3, 3, 3, rng_from_seed(0))

    def test_determinism(self):
        a = gg.sample_configuration(6, 9, 3, 2, rng_from_seed(7))
        b = gg.sample_configuration(6, 9, 3, 2, rng_from_seed(7))
        assert a.edges == b.edges

    @settings(deadline=None, max_examples=30)
    @given(st.sampled_from(SMALL_PARAM_GRID), st.integers(0, 10 ** 6))
    def test_sampler_outputs_validate(self, params, seed):
        n, m, d1, d2 = params
        g = gg.sample_configuration(n, m, d1, d2, rng_from_seed(seed))
        assert gg.validate(g).passed


class TestExploration:
    def test_forced_1221(self):
        g = gg.sample_exploration(1, 2, 2, 1, rng_from_seed(3))
        assert g.edges == ((0, 0), (0, 1))

    def test_simple_outcome_is_complete(self):
        for seed in range(50):
            g = gg.sample_exploration(2, 3, 3, 2, rng_from_seed(seed))
            if g.simple:
                assert g.edges == gg.complete_bipartite(2, 3).edges
                return
        pytest.fail("no simple outcome in 50 seeds")

    @settings(deadline=None, max_examples=20)
    @given(st.sampled_from(SMALL_PARAM_GRID), st.integers(0, 10 ** 6))
    def test_outputs_validate(self, params, seed):
        n, m, d1, d2 = params
        g = gg.sample_exploration(n, m, d1, d2, rng_from_seed(seed))
        assert gg.validate(g).passed

    def test_same_law_as_configuration(self):
        # per-cell edge-multiplicity histograms over 10^4 samples, compared
        # with a pooled 4-sigma binomial margin per (cell, count) bin
        n, m, d1, d2 = 3, 3, 2, 2
        samples = 10 ** 4
        rng_a = rng_from_seed(505)
        rng_b = rng_from_seed(606)
        hist_a = np.zeros((n * m, d2 + 1))
        hist_b = np.zeros((n * m, d2 + 1))
        for _ in range(samples):
            ga = gg.sample_configuration(n, m, d1, d2, rng_a)
            gb = gg.sample_exploration(n, m, d1, d2, rng_b)
            for hist, g in ((hist_a, ga), (hist_b, gb)):
                counts = np.zeros(n * m, dtype=int)
                for l, r in g.edges:
                    counts[l * m + r] += 1
                for cell, c in enumerate(counts):
                    hist[cell, min(c, d2)] += 1
        pa, pb = hist_a / samples, hist_b / samples
        pooled = (hist_a + hist_b) / (2 * samples)
        sigma = np.sqrt(np.maximum(pooled * (1 - pooled), 1e-12) * 2 / samples)
        assert np.all(np.abs(pa - pb) <= 4.0 * sigma)

    def test_degree_histograms_match(self):
        # (3,2,2,3): degrees are deterministic, so compare the distribution
        # of parallel-edge multiplicities between the two samplers
        samples = 10 ** 4
        rng_a = rng_from_seed(11)
        rng_b = rng_from_seed(22)
        max_mult = 4
        ha = np.zeros(max_mult)
        hb = np.zeros(max_mult)
        for _ in range(samples):
            for h, sampler, rng in (
                (ha, gg.sample_configuration, rng_a),
                (hb, gg.sample_exploration, rng_b),
            ):
                g = sampler(3, 2, 2, 3, rng)
                top = max(g.edges.count(e) for e in set(g.edges))
                h[min(top - 1, max_mult - 1)] += 1
        pa, pb = ha / samples, hb / samples
        pooled = (ha + hb) / (2 * samples)
        sigma = np.sqrt(np.maximum(pooled * (1 - pooled), 1e-12) * 2 / samples)
        assert np.all(np.abs(pa - pb) <= 3.0 * sigma + 1e-12)


class TestSampleSimple:
    def test_k23(self):
        g = gg.sample_simple(2, 3, 3, 2, rng_from_seed(9))
        assert g.simple and g.edges == gg.complete_bipartite(2, 3).edges

    def test_zero_budget(self):
        with pytest.raises(gg.ParameterError):
            gg.sample_simple(2, 3, 3, 2, rng_from_seed(0), max_attempts=0)

    def test_budget_exhausted(self):
        # (120,280,7,3) simplicity probability is ~exp(-6); 2 attempts lose
        with pytest.raises(gg.BudgetExhausted):
            gg.sample_simple(120, 280, 7, 3, rng_from_seed(0), max_attempts=2)

    def test_paper_scale_attempts_and_rate(self):
        g = gg.sample_simple(120, 280, 7, 3, rng_from_seed(42), max_attempts=20000)
        assert g.simple and g.num_edges == 840
        assert g.attempts <= 1000
        # measured per-attempt simplicity rate sits near exp(-(d1-1)(d2-1)/2)
        rng = rng_from_seed(1234)
        trials, hits = 4000, 0
        for _ in range(trials):
            hits += gg.sample_configuration(120, 280, 7, 3, rng).simple
        rate = hits / trials
        assert 0.0005 < rate < 0.01
        assert abs(rate - np.exp(-6)) < 0.004

    def test_determinism(self):
        a = gg.sample_simple(6, 9, 3, 2, rng_from_seed(77))
        b = gg.sample_simple(6, 9, 3, 2, rng_from_seed(77))
        assert a.edges == b.edges and a.attempts == b.attempts


class TestValidate:
    def test_k23_passes(self, k23):
        assert gg.validate(k23).passed

    def test_constructed_failure(self, k23):
        # duplicate one edge, drop another: degrees break, duplicates appear
        edges = list(k23.edges)
        edges.remove((1, 2))
        edges.append((0, 0))
        g = gg.BipartiteGraph(
            n=2, m=3, d1=3, d2=2, edges=tuple(sorted(edges)), simple=False
        )
        diag = gg.validate(g)
        assert not diag.passed
        assert diag.left_degree_violations and diag.right_degree_violations
        assert (0, 0) in diag.duplicate_edges

    def test_flag_mismatch_detected(self, k23):
        g = gg.BipartiteGraph(n=2, m=3, d1=3, d2=2, edges=k23.edges, simple=False)
        assert not gg.validate(g).passed


class TestBall:
    def test_radius_one_star(self, k23):
        b = gg.ball(k23, 0, 1)
        assert len(b.vertices) == 4 and len(b.edges) == 3
        assert b.excess == 0

    def test_radius_zero(self, k23):
        b = gg.ball(k23, 3, 0)
        assert b.vertices == (3,) and b.edges == ()

    def test_radius_two_whole_graph(self, k23):
        for v in range(5):
            b = gg.ball(k23, v, 2)
            assert len(b.vertices) == 5 and len(b.edges) == 6

    def test_invalid_vertex(self, k23):
        with pytest.raises(gg.ParameterError):
            gg.ball(k23, 5, 1)


class TestTangleFree:
    def test_tree_always_free(self):
        # a path: 1 left vertex of degree 2, 2 right leaves
        g = gg.from_edges(1, 2, 2, 1, [(0, 0), (0, 1)])
        for ell in range(4):
            assert gg.tangle_free(g, ell).tangle_free

    def test_k23_one_free_two_not(self, k23):
        r1 = gg.tangle_free(k23, 1)
        assert r1.tangle_free and r1.worst_excess <= 1
        r2 = gg.tangle_free(k23, 2)
        assert not r2.tangle_free and r2.worst_excess == 2

    def test_against_cycle_space_oracle(self):
        rng = rng_from_seed(31337)
        params = [(4, 6, 3, 2), (6, 4, 2, 3), (6, 6, 2, 2), (8, 12, 3, 2), (12, 8, 2, 3)]
        for trial in range(30):
            n, m, d1, d2 = params[trial % len(params)]
            g = gg.sample_configuration(n, m, d1, d2, rng)
            for ell in (1, 2, 3):
                want, _ = oracle_tangle_free(g, ell)
                assert gg.tangle_free(g, ell).tangle_free == want


class TestFrames:
    def test_balance_violation(self):
        with pytest.raises(gg.FrameError):
            gg.Frame(classes=("a", "b"), p=(Fraction(1, 2), Fraction(1, 2)),
                     D=((0, 3), (2, 0)))

    def test_proportions_must_sum_to_one(self):
        with pytest.raises(gg.FrameError):
            gg.Frame(classes=("a", "b"), p=(Fraction(1, 2), Fraction(1, 3)),
                     D=((0, 1), (1, 0)))

    def test_non_integral_class_size(self):
        fr = gg.sbm_frame(3, 2)
        with pytest.raises(gg.FrameError):
            fr.class_sizes(5)

    def test_tripartite_example(self):
        # one red/green neighbor count per blue vertex, sizes 9/9/54 at 72
        fr = gg.Frame(
            classes=("A", "B", "C"),
            p=(Fraction(1, 8), Fraction(1, 8), Fraction(3, 4)),
            D=((0, 0, 6), (0, 0, 12), (1, 2, 0)),
        )
        assert fr.class_sizes(72) == (9, 9, 54)
        fg = gg.sample_frame_graph(72, fr, rng_from_seed(4), max_attempts=100000)
        assert fg.class_counts() == (9, 9, 54)
        assert gg.validate_frame_graph(fg)
        # explicit blue-vertex check: 1 neighbor in A, 2 in B
        nbrs = {v: [] for v in range(72)}
        for u, v in fg.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        for v in range(18, 72):
            classes = sorted(fg.labels[w] for w in nbrs[v])
            assert classes == [0, 1, 1]

    def test_sbm_frame_sample(self):
        fr = gg.sbm_frame(4, 2)
        fg = gg.sample_frame_graph(20, fr, rng_from_seed(12), max_attempts=100000)
        assert gg.validate_frame_graph(fg)

    def test_two_class_reduces_to_bipartite(self):
        fr = gg.two_class_bipartite_frame(4, 6, 3, 2)
        fg = gg.sample_frame_graph(10, fr, rng_from_seed(8), max_attempts=100000)
        assert gg.validate_frame_graph(fg)
        assert fg.class_counts() == (4, 6)
        # every edge crosses the classes: the block law is sample_simple's
        for u, v in fg.edges:
            assert fg.labels[u] != fg.labels[v]
        degs = np.zeros(10, dtype=int)
        for u, v in fg.edges:
            degs[u] += 1
            degs[v] += 1
        assert list(degs) == [3] * 4 + [2] * 6

    def test_odd_diagonal_block_rejected(self):
        fr = gg.Frame(classes=("a",), p=(Fraction(1),), D=((3,),))
        with pytest.raises(gg.ParameterError):
            gg.sample_frame_graph(3, fr, rng_from_seed(0))

    def test_frame_json_roundtrip(self):
        fr = gg.sbm_frame(5, 3)
        assert gg.Frame.from_json_dict(fr.to_json_dict()) == fr


class TestConditionalEdgeProbability:
    def test_isolated_edge(self):
        rng = rng_from_seed(2024)
        est = gg.conditional_edge_probability(
            30, 45, 3, 2, H=[(0, 0)], e=(5, 7), trials=400_000, rng=rng
        )
        assert est.effective_samples > 10_000
        assert abs(est.p_hat - 2 / 30) <= 3 * est.std_err

    def test_shared_degree_one_endpoint(self):
        rng = rng_from_seed(31)
        est = gg.conditional_edge_probability(
            30, 45, 3, 2, H=[(0, 0)], e=(1, 0), trials=400_000, rng=rng
        )
        assert abs(est.p_hat - (2 - 1) / 30) <= 3 * est.std_err

    def test_empty_conditioning(self):
        rng = rng_from_seed(8)
        est = gg.conditional_edge_probability(
            30, 45, 3, 2, H=[], e=(3, 3), trials=100_000, rng=rng
        )
        assert est.effective_samples == 100_000
        assert abs(est.p_hat - 3 / 45) <= 3 * est.std_err

    def test_rejects_candidate_in_h(self):
        with pytest.raises(gg.ParameterError):
            gg.conditional_edge_probability(
                30, 45, 3, 2, H=[(0, 0)], e=(0, 0), trials=10, rng=rng_from_seed(0)
            )

    def test_rejects_large_h(self):
        H = [(i, i) for i in range(5)]
        with pytest.raises(gg.ParameterError):
            gg.conditional_edge_probability(
                30, 45, 3, 2, H=H, e=(9, 9), trials=10, rng=rng_from_seed(0)
            )


class TestGraphJson:
    def test_roundtrip(self, tmp_path, k23):
        path = tmp_path / "g.json"
        gg.save_graph(k23, path)
        g2 = gg.load_graph(path)
        assert g2 == k23
        with open(path) as f:
            data = json.load(f)
        assert data["edges"] == sorted(data["edges"])

    def test_substream_independence(self):
        g0 = gg.sample_configuration(6, 9, 3, 2, rng_substream(9, 0))
        g1 = gg.sample_configuration(6, 9, 3, 2, rng_substream(9, 1))
        assert g0.edges != g1.edges
