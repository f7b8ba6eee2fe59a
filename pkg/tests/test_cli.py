"""End-to-end tests of the command-line interface and its file formats."""
from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from uctrl import cli
from uctrl import constructions as co
from uctrl import linalg as la
from uctrl import model as mo


def run(*argv) -> int:
    return cli.main([str(a) for a in argv])


class TestBuild:
    def test_dong_layout_and_queries(self, tmp_path):
        out = tmp_path / "dong.json"
        assert run("build", "dong", "--d", 2, "--out", out) == 0
        ir = json.loads(out.read_text())
        assert [f["dim"] for f in ir["layout"]] == [2, 2, 2, 2]
        queries = [s for s in ir["steps"] if "query" in s]
        assert len(queries) == 2 and all(q["query"] == "id" for q in queries)

    def test_kitaev_single_query(self, tmp_path):
        out = tmp_path / "kit.json"
        assert run("build", "kitaev", "--d", 3, "--out", out) == 0
        ir = json.loads(out.read_text())
        assert len([s for s in ir["steps"] if "query" in s]) == 1

    def test_power_indivisible_is_input_error(self, tmp_path, capsys):
        code = run("build", "power", "--d", 2, "--m", 3, "--out", tmp_path / "x.json")
        assert code == cli.EXIT_INPUT_ERROR
        assert "does not divide" in capsys.readouterr().err

    def test_bad_d_rejected(self, tmp_path):
        assert run("build", "dong", "--d", 7, "--out", tmp_path / "x.json") == cli.EXIT_INPUT_ERROR

    @pytest.mark.parametrize("name,d", [
        ("kitaev", 2), ("dong", 2), ("neutraliser", 2), ("conjugation", 3),
        ("transpose", 2), ("inverse", 2), ("spin-echo", 2),
    ])
    def test_roundtrip_eval_agreement(self, name, d, tmp_path):
        out = tmp_path / f"{name}.json"
        assert run("build", name, "--d", d, "--out", out) == 0
        parsed = mo.from_ir(out)
        built = co.build(name, d)
        for s in range(10):
            u = la.haar_unitary(d, 4000 + s)
            np.testing.assert_allclose(parsed.eval(u), built.eval(u), atol=1e-12)


class TestVerify:
    def test_dong_exact_passes(self, tmp_path):
        ir = tmp_path / "dong.json"
        rep = tmp_path / "rep.json"
        run("build", "dong", "--d", 2, "--out", ir)
        code = run("verify", ir, "--task", "cUm", "--m", 2, "--d", 2,
                   "--samples", 5, "--out", rep)
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["passed"]
        assert all(e["residual"] < 1e-9 for e in report["results"])
        assert all(e["check"] == "exact" and "U_seed" in e for e in report["results"])

    def test_kitaev_fails_with_rank_diagnostic(self, tmp_path):
        ir = tmp_path / "kit.json"
        rep = tmp_path / "rep.json"
        run("build", "kitaev", "--d", 2, "--out", ir)
        code = run("verify", ir, "--task", "cUm", "--m", 1, "--d", 2,
                   "--samples", 3, "--out", rep)
        assert code == cli.EXIT_CHECK_FAILED
        report = json.loads(rep.read_text())
        assert not report["passed"]
        assert any("rank" in e.get("diagnostic", "") for e in report["results"])

    def test_neutraliser_passes(self, tmp_path):
        ir = tmp_path / "neu.json"
        rep = tmp_path / "rep.json"
        run("build", "neutraliser", "--d", 2, "--out", ir)
        code = run("verify", ir, "--task", "neutralise", "--d", 2,
                   "--samples", 5, "--out", rep)
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["passed"] and abs(report["r"] - 1.0) < 1e-10

    def test_clean_check(self, tmp_path):
        ir = tmp_path / "conj.json"
        rep = tmp_path / "rep.json"
        run("build", "conjugation", "--d", 3, "--out", ir)
        code = run("verify", ir, "--task", "conjugation", "--check", "clean",
                   "--d", 3, "--samples", 5, "--out", rep)
        assert code == 0

    def test_eps_check(self, tmp_path):
        ir = tmp_path / "transp.json"
        rep = tmp_path / "rep.json"
        run("build", "transpose", "--d", 2, "--out", ir)
        code = run("verify", ir, "--task", "transpose", "--check", "eps",
                   "--d", 2, "--samples", 2, "--out", rep)
        assert code == 0

    def test_homogeneity_check(self, tmp_path):
        ir = tmp_path / "dong.json"
        run("build", "dong", "--d", 2, "--out", ir)
        assert run("verify", ir, "--task", "cUm", "--m", 2, "--check", "homogeneity",
                   "--d", 2, "--samples", 3) == 0

    def test_missing_file_is_input_error(self, tmp_path):
        assert run("verify", tmp_path / "nope.json", "--task", "cUm", "--m", 2,
                   "--d", 2) == cli.EXIT_INPUT_ERROR

    def test_unknown_build_name_is_input_error(self, tmp_path):
        assert run("build", "nonsense", "--d", 2,
                   "--out", tmp_path / "x.json") == cli.EXIT_INPUT_ERROR

    def test_model_violation_exit_code(self, tmp_path):
        # a program that postselects the flipped state onto zero has
        # vanishing success probability on the first basis state for every
        # oracle, which the eps estimator reports as a model violation
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        proj = np.diag([1.0, 0.0]).astype(complex)
        alg = mo.OracleAlgorithm(
            "broken", 2, la.RegisterLayout.of([2], ["task"]),
            (mo.FixedStep(x, (0,)),), projector=(proj, (0,)))
        ir = tmp_path / "broken.json"
        mo.write_ir(alg, ir)
        code = run("verify", ir, "--task", "inverse", "--check", "eps",
                   "--d", 2, "--samples", 2)
        assert code == cli.EXIT_MODEL_VIOLATION

    def test_reports_deterministic(self, tmp_path):
        ir = tmp_path / "dong.json"
        run("build", "dong", "--d", 2, "--out", ir)
        rep1, rep2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run("verify", ir, "--task", "cUm", "--m", 2, "--d", 2, "--samples", 4,
            "--seed", 5, "--out", rep1)
        run("verify", ir, "--task", "cUm", "--m", 2, "--d", 2, "--samples", 4,
            "--seed", 5, "--out", rep2)
        assert rep1.read_text() == rep2.read_text()


class TestProbe:
    def test_dong_probe(self, tmp_path):
        ir = tmp_path / "dong.json"
        run("build", "dong", "--d", 2, "--out", ir)
        base = tmp_path / "probe"
        code = run("probe", ir, "--m", 2, "--d", 2, "--K", 256, "--out", base)
        assert code == 0
        rep = json.loads((tmp_path / "probe.json").read_text())
        assert rep["winding"] == 2 and rep["valid"]
        with open(tmp_path / "probe.csv") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["t", "re_f", "im_f", "unwrapped_phase"]
        assert len(rows) == 257

    def test_root_composed_probe_reports_divisibility_violation(self, tmp_path):
        base = tmp_path / "probe"
        code = run("probe", "root-composed", "--m", 1, "--d", 2, "--K", 256, "--out", base)
        assert code == cli.EXIT_CHECK_FAILED
        rep = json.loads((tmp_path / "probe.json").read_text())
        assert rep["valid"] and rep["winding"] == 1
        assert not rep["divisibility_ok"]

    def test_constant_circuit_probe(self, tmp_path):
        base = tmp_path / "probe"
        code = run("probe", "constant-circuit", "--m", 0, "--d", 2, "--out", base)
        assert code == 0
        rep = json.loads((tmp_path / "probe.json").read_text())
        assert rep["winding"] == 0 and rep["valid"]

    def test_bad_k_rejected(self, tmp_path):
        assert run("probe", "constant-circuit", "--m", 0, "--d", 2, "--K", 100,
                   "--out", tmp_path / "p") == cli.EXIT_INPUT_ERROR


class TestBuScan:
    def test_refinement_report(self, tmp_path):
        out = tmp_path / "bu.json"
        code = run("bu-scan", "--d", 2, "--resolution", 4, "--refinements", 3, "--out", out)
        assert code == 0
        rep = json.loads(out.read_text())
        mins = [lv["min_abs"] for lv in rep["levels"]]
        assert mins == sorted(mins, reverse=True)
        assert all(lv["oddness_residual"] < 1e-12 for lv in rep["levels"])

    def test_odd_d_rejected(self, tmp_path):
        assert run("bu-scan", "--d", 3, "--out", tmp_path / "bu.json") == cli.EXIT_INPUT_ERROR


class TestSweep:
    def test_transpose_diag_sweep_prob_constant(self, tmp_path):
        ir = tmp_path / "transp.json"
        run("build", "transpose", "--d", 2, "--out", ir)
        out = tmp_path / "sweep.csv"
        code = run("sweep", ir, "--task", "transpose", "--grid", "diag:16",
                   "--d", 2, "--out", out)
        assert code == 0
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 16
        for row in rows:
            assert abs(float(row["success_prob"]) - 0.25) < 1e-10
            assert float(row["residual"]) < 1e-9

    def test_empty_grid_header_only(self, tmp_path):
        ir = tmp_path / "transp.json"
        run("build", "transpose", "--d", 2, "--out", ir)
        out = tmp_path / "sweep.csv"
        assert run("sweep", ir, "--task", "transpose", "--grid", "diag:0",
                   "--d", 2, "--out", out) == 0
        with open(out) as f:
            rows = list(csv.reader(f))
        assert rows == [["param", "success_prob", "residual", "phase"]]

    def test_root_composed_eps_sweep_is_flat(self, tmp_path):
        # computed truth: the root composition is pointwise exact on the
        # whole loop, so the eps column stays at numerical zero (no spike at
        # the branch-cut parameter)
        out = tmp_path / "sweep.csv"
        code = run("sweep", "root-composed", "--task", "cUm", "--m", 1, "--d", 2,
                   "--check", "eps", "--grid", "loop:16", "--out", out)
        assert code == 0
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 16
        assert max(float(r["eps"]) for r in rows) <= 1e-9

    def test_bad_grid_rejected(self, tmp_path):
        ir = tmp_path / "transp.json"
        run("build", "transpose", "--d", 2, "--out", ir)
        assert run("sweep", ir, "--task", "transpose", "--grid", "bogus",
                   "--out", tmp_path / "s.csv") == cli.EXIT_INPUT_ERROR


class TestThreadBudget:
    def test_parallel_map_matches_serial(self, monkeypatch):
        from uctrl._util import parallel_map
        items = list(range(20))
        monkeypatch.setenv("UCTRL_THREADS", "4")
        assert parallel_map(lambda x: x * x, items) == [x * x for x in items]
        monkeypatch.setenv("UCTRL_THREADS", "not-a-number")
        assert parallel_map(lambda x: x + 1, items) == [x + 1 for x in items]
