"""Random model generators: determinism, marginals, and spec parsing."""

import math
from dataclasses import replace

import pytest

from sparsemc import models
from sparsemc.models import (ModelSpec, chung_lu_precondition_ok, gen_chung_lu,
                             gen_config, gen_er, gen_pa, generate,
                             integer_power_law_weights, pa_multigraph,
                             parse_model_desc, parse_probability_expr,
                             power_law_weights)


class TestDeterminism:
    @pytest.mark.parametrize("make", [
        lambda s: gen_er(60, 0.05, s),
        lambda s: gen_chung_lu(60, 3.0, 1.0, s),
        lambda s: gen_config(60, integer_power_law_weights(60, 3.0, 1.0), s)[0],
        lambda s: gen_pa(60, 2, s),
    ])
    def test_same_seed_same_graph(self, make):
        assert make(5) == make(5)
        assert make(5) != make(6)


class TestUniformModel:
    def test_extremes(self):
        assert gen_er(10, 0.0, 1).m == 0
        assert gen_er(10, 1.0, 1).m == 45

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            gen_er(10, 1.5, 1)

    def test_edge_count_near_mean(self):
        # Binomial(499500, 2/1000): mean 999, sd ~31.6; stay within ~6 sd
        m = gen_er(1000, 2 / 1000, seed=42).m
        assert 800 <= m <= 1200


class TestWeightedPairModel:
    def test_weights_formula(self):
        w = power_law_weights(8, 3.0, 2.0)
        for i in range(1, 9):
            assert w[i - 1] == pytest.approx(2.0 * (8 / i) ** 0.5)
        assert all(a >= b for a, b in zip(w, w[1:]))

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            power_law_weights(5, 2.0)
        with pytest.raises(ValueError):
            power_law_weights(0, 3.0)
        with pytest.raises(ValueError):
            power_law_weights(5, 3.0, c=0.0)

    def test_precondition_flag(self):
        # max w^2 vs sum w: small n with alpha near 2 clips, large alpha not
        assert not chung_lu_precondition_ok(100, 2.1)
        assert chung_lu_precondition_ok(100, 4.0)

    def test_first_pair_marginal_matches_formula(self):
        # Pr[v1v2 edge] = min(1, w1 w2 / sum w); Monte Carlo within 4 sigma
        n, alpha, c = 4, 3.0, 1.0
        w = power_law_weights(n, alpha, c)
        p = min(1.0, w[0] * w[1] / w.sum())
        trials = 1200
        hits = sum(gen_chung_lu(n, alpha, c, seed).has_edge(1, 2)
                   for seed in range(trials))
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) <= 4 * sigma


class TestStubMatching:
    def test_pre_erasure_degrees_equal_weights(self):
        weights = [3, 2, 2, 1]
        for seed in range(10):
            _, pre = gen_config(4, weights, seed)
            assert pre == weights

    def test_odd_total_fixed_on_last_weight(self):
        g, pre = gen_config(3, [1, 1, 1], seed=0)
        assert pre == [1, 1, 2]
        assert sum(pre) % 2 == 0

    def test_erasure_yields_simple_graph(self):
        g, pre = gen_config(30, integer_power_law_weights(30, 2.5, 2.0), seed=3)
        assert g.m <= sum(pre) // 2
        for v in g.vertices:
            assert not g.has_edge(v, v)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            gen_config(3, [1, 2], seed=0)
        with pytest.raises(ValueError):
            gen_config(2, [1, -1], seed=0)


class TestAttachmentModel:
    def test_multigraph_edge_count_exact(self):
        for n, m in ((10, 1), (25, 2), (13, 3)):
            assert len(pa_multigraph(n, m, seed=1)) == m * n

    def test_endpoints_in_range_and_erasure(self):
        edges = pa_multigraph(50, 2, seed=2)
        assert all(1 <= a <= 50 and 1 <= b <= 50 for a, b in edges)
        g = gen_pa(50, 2, seed=2)
        assert g.n == 50
        assert g.m <= len(edges)

    def test_attachment_favors_early_vertices(self):
        g = gen_pa(400, 2, seed=7)
        early = sum(g.degree(v) for v in range(1, 21)) / 20
        late = sum(g.degree(v) for v in range(381, 401)) / 20
        assert early > 2 * late

    def test_validation(self):
        with pytest.raises(ValueError):
            pa_multigraph(0, 2, seed=1)
        with pytest.raises(ValueError):
            pa_multigraph(5, 0, seed=1)


class TestProbabilityExpr:
    def test_forms(self):
        assert parse_probability_expr("0.25", 10) == 0.25
        assert parse_probability_expr("2/n", 100) == pytest.approx(0.02)
        assert parse_probability_expr(" 1/n ", 4) == 0.25

    @pytest.mark.parametrize("expr", ["n/2", "2/m", "abc", "2.5", "-1", "3/n"])
    def test_rejects(self, expr):
        with pytest.raises(ValueError):
            parse_probability_expr(expr, 2)


class TestModelSpec:
    @pytest.mark.parametrize("spec", [
        ModelSpec(kind="er", p_expr="2/n"),
        ModelSpec(kind="er", p_expr="0.125"),
        ModelSpec(kind="chung-lu", alpha=3.0, c=1.0),
        ModelSpec(kind="chung-lu", alpha=2.5, c=2.0),
        ModelSpec(kind="config", alpha=3.0, c=1.0),
        ModelSpec(kind="pa", m=2),
    ])
    def test_describe_round_trip(self, spec):
        assert parse_model_desc(spec.describe()) == spec

    def test_seed_parameter(self):
        spec = parse_model_desc("pa m=2", seed=9)
        assert spec.seed == 9
        assert generate(spec, 30) == gen_pa(30, 2, seed=9)

    @pytest.mark.parametrize("text", [
        "", "mystery p=1", "er", "er q=2", "er p=2/n p=3/n", "er p",
        "chung-lu c=1", "chung-lu alpha=2", "pa", "pa m=0", "pa m=x",
    ])
    def test_rejects_bad_descriptions(self, text):
        with pytest.raises(ValueError):
            parse_model_desc(text)

    def test_generate_dispatch(self):
        assert generate(ModelSpec(kind="er", seed=3, p_expr="0.1"), 20) == \
            gen_er(20, 0.1, 3)
        assert generate(ModelSpec(kind="chung-lu", seed=3, alpha=3.0), 20) == \
            gen_chung_lu(20, 3.0, 1.0, 3)
        cfg_graph, _ = gen_config(20, integer_power_law_weights(20, 3.0, 1.0), 3)
        assert generate(ModelSpec(kind="config", seed=3, alpha=3.0), 20) == cfg_graph

    def test_validate_catches_missing_fields(self):
        with pytest.raises(ValueError):
            ModelSpec(kind="er").validate()
        with pytest.raises(ValueError):
            ModelSpec(kind="chung-lu", alpha=1.5).validate()
        with pytest.raises(ValueError):
            ModelSpec(kind="nope").validate()


def test_integer_weights_floor_at_one():
    ws = integer_power_law_weights(50, 3.5, 0.2)
    assert all(w >= 1 for w in ws)
    assert ws == sorted(ws, reverse=True)
