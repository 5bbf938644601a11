"""Command-line surface: subcommand chains and exit codes."""

import csv
import io

import pytest

from sparsemc.cli import (EXIT_INTERNAL, EXIT_OK, EXIT_UNSAT, EXIT_USAGE,
                          main)
from sparsemc.graphio import parse_graph, read_graph

GNF_ISOLATED_PAIR = ('bls iso r 1 s 2 omega "~exists y. E(x, y)"\n'
                     'sentence iso\n')
GNF_ANY_EDGE = ('bls hub r 1 s 1 omega "exists y. E(x, y)"\n'
                'sentence hub\n')


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_to_stdout_and_determinism(self, capsys):
        code, out, _ = run(capsys, "generate", "--model", "er p=2/n", "--n", "15")
        assert code == EXIT_OK
        g = parse_graph(out)
        assert g.n == 15
        code2, out2, _ = run(capsys, "generate", "--model", "er p=2/n",
                             "--n", "15")
        assert out2 == out
        code3, out3, _ = run(capsys, "--seed", "5", "generate",
                             "--model", "er p=2/n", "--n", "15")
        assert code3 == EXIT_OK and out3 != out

    def test_to_file_with_provenance_comments(self, capsys, tmp_path):
        path = tmp_path / "g.graph"
        code, out, _ = run(capsys, "--seed", "3", "generate",
                           "--model", "pa m=2", "--n", "20",
                           "--output", str(path))
        assert code == EXIT_OK and out == ""
        text = path.read_text()
        assert "# model=pa m=2" in text and "# seed=3" in text
        assert read_graph(path).n == 20

    def test_bad_model_is_usage_error(self, capsys):
        code, _, err = run(capsys, "generate", "--model", "banana", "--n", "5")
        assert code == EXIT_USAGE and "error:" in err


class TestStats:
    def test_key_value_output(self, capsys, tmp_path):
        path = tmp_path / "g.graph"
        run(capsys, "generate", "--model", "er p=0.3", "--n", "12",
            "--output", str(path))
        code, out, _ = run(capsys, "stats", str(path))
        assert code == EXIT_OK
        kv = dict(line.split("=", 1) for line in out.strip().splitlines())
        assert kv["vertices"] == "12"
        assert int(kv["edges"]) >= 0
        assert set(kv) == {"vertices", "edges", "labels", "max_degree",
                           "degree_avg2", "triangles", "degree_hist"}

    def test_missing_file_is_usage_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "stats", str(tmp_path / "nope.graph"))
        assert code == EXIT_USAGE and "error:" in err

    def test_malformed_file_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "bad.graph"
        path.write_text("this is not a graph\n")
        code, _, err = run(capsys, "stats", str(path))
        assert code == EXIT_USAGE and "error:" in err


class TestDecompose:
    @pytest.mark.parametrize("command", ["decompose", "minb"])
    def test_one_record_csv(self, capsys, tmp_path, command):
        path = tmp_path / "g.graph"
        run(capsys, "generate", "--model", "er p=2/n", "--n", "30",
            "--output", str(path))
        code, out, _ = run(capsys, command, str(path), "--r", "1", "--mu", "5")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 1
        row = rows[0]
        assert row["n"] == "30" and int(row["b_min"]) >= 1
        assert set(row) == {"n", "m", "r", "mu", "b_min", "z_size", "p_size",
                            "small_boundaries", "max_part", "seconds"}


class TestKernelize:
    def test_graph_to_stdout_report_to_stderr(self, capsys, tmp_path):
        path = tmp_path / "g.graph"
        run(capsys, "generate", "--model", "er p=2/n", "--n", "40",
            "--output", str(path))
        code, out, err = run(capsys, "kernelize", str(path), "--q", "2")
        assert code == EXIT_OK
        kernel = parse_graph(out)
        report = list(csv.DictReader(io.StringIO(err)))[0]
        assert int(report["vertices_before"]) == 40
        assert int(report["vertices_after"]) == kernel.n

    def test_graph_to_file_report_to_stdout(self, capsys, tmp_path):
        src = tmp_path / "g.graph"
        dst = tmp_path / "kernel.graph"
        run(capsys, "generate", "--model", "er p=2/n", "--n", "40",
            "--output", str(src))
        code, out, err = run(capsys, "kernelize", str(src),
                             "--output", str(dst))
        assert code == EXIT_OK and err == ""
        report = list(csv.DictReader(io.StringIO(out)))[0]
        assert read_graph(dst).n == int(report["vertices_after"])


class TestCheckNaive:
    def test_both_verdicts(self, capsys, tmp_path):
        path = tmp_path / "g.graph"
        path.write_text("graph 2 1 0\ne 1 2\n")
        sat = tmp_path / "sat.fo"
        sat.write_text("# some vertex has a neighbor\nexists x. exists y. E(x, y)\n")
        unsat = tmp_path / "unsat.fo"
        unsat.write_text("forall x. forall y. E(x, y)\n")
        code, out, _ = run(capsys, "check-naive", str(path), str(sat))
        assert (code, out.strip()) == (EXIT_OK, "SAT")
        code, out, _ = run(capsys, "check-naive", str(path), str(unsat))
        assert (code, out.strip()) == (EXIT_UNSAT, "UNSAT")

    def test_open_formula_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "g.graph"
        path.write_text("graph 2 1 0\ne 1 2\n")
        bad = tmp_path / "open.fo"
        bad.write_text("E(x, y)\n")
        code, _, err = run(capsys, "check-naive", str(path), str(bad))
        assert code == EXIT_USAGE and "error:" in err


class TestCheckGnf:
    def write_graph_file(self, tmp_path, text):
        path = tmp_path / "g.graph"
        path.write_text(text)
        return path

    def test_sat_with_per_leaf_rows(self, capsys, tmp_path):
        # two isolated vertices plus an edge: the pair sentence holds
        g = self.write_graph_file(tmp_path, "graph 4 1 0\ne 1 2\n")
        s = tmp_path / "s.gnf"
        s.write_text(GNF_ISOLATED_PAIR)
        code, out, _ = run(capsys, "check-gnf", str(g), str(s))
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "SAT"
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
        assert rows[0]["leaf"] == "iso" and rows[0]["holds"] == "yes"
        assert int(rows[0]["satisfying"]) == 2

    def test_unsat_exit_code(self, capsys, tmp_path):
        g = self.write_graph_file(tmp_path, "graph 3 0 0\n")
        s = tmp_path / "s.gnf"
        s.write_text(GNF_ANY_EDGE)
        code, out, _ = run(capsys, "check-gnf", str(g), str(s))
        assert code == EXIT_UNSAT and out.splitlines()[0] == "UNSAT"

    def test_no_kernel_agrees(self, capsys, tmp_path):
        g = self.write_graph_file(tmp_path, "graph 6 2 0\ne 1 2\ne 3 4\n")
        s = tmp_path / "s.gnf"
        s.write_text(GNF_ISOLATED_PAIR)
        fast, out_fast, _ = run(capsys, "check-gnf", str(g), str(s))
        slow, out_slow, _ = run(capsys, "check-gnf", str(g), str(s),
                                "--no-kernel")
        assert fast == slow
        assert out_fast.splitlines()[0] == out_slow.splitlines()[0]

    def test_bad_sentence_is_usage_error(self, capsys, tmp_path):
        g = self.write_graph_file(tmp_path, "graph 2 0 0\n")
        s = tmp_path / "s.gnf"
        s.write_text("bls broken r 1\nsentence broken\n")
        code, _, err = run(capsys, "check-gnf", str(g), str(s))
        assert code == EXIT_USAGE and "error:" in err


class TestExperiment:
    def test_end_to_end(self, capsys, tmp_path):
        plan = tmp_path / "plan.txt"
        plan.write_text("model=er p=2/n\nn=10,14\nseeds=2\n"
                        "measures=degree,minb\n")
        out_dir = tmp_path / "results"
        code, out, _ = run(capsys, "--out", str(out_dir), "--workers", "1",
                           "experiment", str(plan))
        assert code == EXIT_OK
        assert "4 new rows" in out
        report = out_dir / "report.csv"
        assert report.exists()
        for name in ("degree_ccdf.svg", "minb_vs_n.svg", "kernel_vs_n.svg",
                     "triangles_vs_n.svg"):
            assert (out_dir / name).exists()
        # a rerun of a completed plan adds nothing
        code, out, _ = run(capsys, "--out", str(out_dir), "--workers", "1",
                           "experiment", str(plan))
        assert code == EXIT_OK and "0 new rows" in out

    def test_bad_plan_is_usage_error(self, capsys, tmp_path):
        plan = tmp_path / "plan.txt"
        plan.write_text("model=er p=2/n\n")  # missing n=
        code, _, err = run(capsys, "experiment", str(plan))
        assert code == EXIT_USAGE and "error:" in err


class TestSelftest:
    def test_single_fast_suite(self, capsys):
        code, out, _ = run(capsys, "selftest", "--suite", "peel-idempotence")
        assert code == EXIT_OK
        assert out.startswith("PASS")

    def test_unknown_suite_is_usage_error(self, capsys):
        code, _, err = run(capsys, "selftest", "--suite", "frobnicate")
        assert code == EXIT_USAGE and "error:" in err


class TestParserBehaviour:
    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == EXIT_USAGE
        capsys.readouterr()

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["generate", "--frobnicate"]) == EXIT_USAGE
        capsys.readouterr()

    def test_internal_errors_exit_three(self, capsys, tmp_path, monkeypatch):
        from sparsemc import cli

        def explode(args):
            raise RuntimeError("wires crossed")

        # the parser binds handlers while main() builds it, so the patch
        # is picked up on the next invocation
        monkeypatch.setattr(cli, "_cmd_stats", explode)
        path = tmp_path / "g.graph"
        path.write_text("graph 1 0 0\n")
        code = cli.main(["stats", str(path)])
        captured = capsys.readouterr()
        assert code == EXIT_INTERNAL
        assert "internal error:" in captured.err
