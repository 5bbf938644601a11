"""The verification suites themselves: green on the real code, red under
an injected defect, informative when a suite crashes."""

import random

import pytest

from sparsemc import decomp, selftest
from sparsemc.fo import free_vars, naive_check, qrank
from sparsemc.graphs import LabeledGraph, path_graph
from sparsemc.qtypes import TypeContext, compute_qtype
from sparsemc.selftest import rank_characteristic, run_selftest

FAST_SUITES = ["peel-idempotence", "scattered-brute-force"]


class TestRunner:
    def test_fast_suites_pass(self):
        report = run_selftest(names=FAST_SUITES)
        assert report.ok
        assert [r.name for r in report.results] == FAST_SUITES
        lines = report.lines()
        assert all(line.startswith("PASS") for line in lines[:-1])
        assert lines[-1] == "all suites passed"

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown suites"):
            run_selftest(names=["frobnicate"])

    def test_injected_defect_turns_the_suite_red(self, monkeypatch):
        monkeypatch.setattr(decomp, "peel_degree_one",
                            lambda g: frozenset())
        report = run_selftest(names=["peel-idempotence"])
        assert not report.ok
        assert report.lines()[-1] == "FAILURES PRESENT"

    def test_crashing_suite_is_a_failing_suite(self, monkeypatch):
        def boom(g):
            raise RuntimeError("wires crossed")

        monkeypatch.setattr(decomp, "peel_degree_one", boom)
        report = run_selftest(names=["peel-idempotence"])
        assert not report.ok
        assert "crashed" in report.results[0].detail


class TestRankCharacteristic:
    def test_self_satisfaction(self):
        g = LabeledGraph(path_graph(4), (frozenset({2}),))
        for q in (0, 1, 2):
            phi = rank_characteristic(g, (1, 3), q)
            assert free_vars(phi) == frozenset({"x1", "x2"})
            assert qrank(phi) == q
            assert naive_check(g, phi, {"x1": 1, "x2": 3})

    def test_separates_types_and_only_types(self):
        rng = random.Random(3)
        graphs = [path_graph(3), path_graph(4),
                  LabeledGraph(path_graph(3), (frozenset({1}),)),
                  LabeledGraph(path_graph(3), (frozenset({2}),))]
        # pad the alphabet so every graph carries one label class
        graphs = [g if isinstance(g, LabeledGraph) else
                  LabeledGraph(g, (frozenset(),)) for g in graphs]
        q = 2
        for g in graphs:
            for h in graphs:
                ctx = TypeContext()
                same = (compute_qtype(g, (), q, ctx).canonical()
                        == compute_qtype(h, (), q, ctx).canonical())
                phi = rank_characteristic(g, (), q)
                assert naive_check(h, phi) == same

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(ValueError):
            rank_characteristic(path_graph(3), (), 0)
