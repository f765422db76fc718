import json
import subprocess
import sys

import numpy as np
import pytest

from conic_nmf import (
    ConeSet,
    NoConvergence,
    check_geometric_assumption,
    generate,
)
from conic_nmf import cli
from conic_nmf.bench import build_generator_config
from conic_nmf.io import read_matrix, write_matrix

SMALL = ["--F", "100", "--K", "5", "--N", "1000", "--layout", "dense"]


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def dataset(tmp_path):
    prefix = tmp_path / "data"
    assert run("generate", "--out", prefix, *SMALL) == 0
    return prefix


class TestGenerate:
    def test_files_and_meta(self, dataset):
        meta = json.loads(dataset.with_suffix(".meta.json").read_text())
        assert meta["F"] == 100 and meta["N"] == 1000 and meta["K"] == 5
        assert meta["assumption_holds"] is True
        labels = dataset.with_suffix(".labels").read_text().split()
        assert len(labels) == 1000

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            assert run("generate", "--out", tmp_path / name, *SMALL, "--seed", 3) == 0
        for ext in (".csv", ".labels", ".meta.json"):
            assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()

    def test_round_trip_bit_exact(self, dataset):
        params = dict(F="100", K="5", N="1000", layout="dense")
        V = generate(build_generator_config(params)).V
        assert np.array_equal(read_matrix(dataset.with_suffix(".csv")), V)

    def test_empty(self, tmp_path):
        assert run("generate", "--out", tmp_path / "e", *SMALL[:4], "--N", 0) == 0
        assert (tmp_path / "e.csv").read_text() == ""

    def test_experiment_configuration(self, tmp_path):
        assert run("generate", "--out", tmp_path / "x", "--N", 50) == 0
        meta = json.loads((tmp_path / "x.meta.json").read_text())
        cones = ConeSet.from_arrays(np.array(meta["bases"]), meta["alphas"])
        assert cones.F == 1600 and cones.K == 40
        assert check_geometric_assumption(cones)[0]

    def test_config_file_and_override(self, tmp_path):
        cfg = tmp_path / "g.cfg"
        cfg.write_text("F = 30\nK = 3\nN = 20\nalpha = 0.05\nseed = 1\n")
        assert run("generate", "--config", cfg, "--out", tmp_path / "o", "--N", 7) == 0
        meta = json.loads((tmp_path / "o.meta.json").read_text())
        assert meta["F"] == 30 and meta["N"] == 7 and meta["seed"] == 1

    def test_bad_parameter(self, tmp_path):
        assert run("generate", "--out", tmp_path / "o", "--F", 3, "--K", 5) == 2
        assert run("generate", "--out", tmp_path / "o", "--F", "x") == 2


class TestFactorize:
    def test_cr1_within_bound(self, dataset, tmp_path):
        out = tmp_path / "out"
        assert run("factorize", dataset.with_suffix(".csv"), "--K", 5, "--outdir", out) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["relative_error"] <= np.sin(0.2)
        assert len(report["sigmas"]) == 5 and sum(report["cluster_sizes"]) == 1000
        W, H = read_matrix(out / "W.csv"), read_matrix(out / "H.csv")
        V = read_matrix(dataset.with_suffix(".csv"))
        err = np.linalg.norm(V - W @ H) / np.linalg.norm(V)
        assert abs(err - report["relative_error"]) <= 1e-12

    def test_mult_from_cr1_init(self, dataset, tmp_path):
        csv = dataset.with_suffix(".csv")
        run("factorize", csv, "--K", 5, "--outdir", tmp_path / "c")
        cr1 = json.loads((tmp_path / "c" / "report.json").read_text())["relative_error"]
        assert run("factorize", csv, "--K", 5, "--solver", "mult", "--init", "cr1",
                   "--iters", 5, "--outdir", tmp_path / "m") == 0
        report = json.loads((tmp_path / "m" / "report.json").read_text())
        assert abs(report["trace"][0] - cr1) <= 0.01 * cr1
        assert len(report["trace"]) == 6
        lines = (tmp_path / "m" / "trace.csv").read_text().splitlines()
        assert lines[0] == "iteration,error" and len(lines) == 7

    def test_seeded_runs_identical(self, dataset, tmp_path):
        csv = dataset.with_suffix(".csv")
        for name in ("a", "b"):
            run("factorize", csv, "--K", 5, "--solver", "hals", "--init", "rand",
                "--iters", 3, "--seed", 9, "--outdir", tmp_path / name)
        for f in ("W.csv", "H.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_report_path(self, dataset, tmp_path):
        rep = tmp_path / "custom.json"
        assert run("factorize", dataset.with_suffix(".csv"), "--K", 5,
                   "--outdir", tmp_path / "o", "--report", rep) == 0
        assert "relative_error" in json.loads(rep.read_text())

    def test_bad_path(self, tmp_path):
        assert run("factorize", tmp_path / "missing.csv", "--K", 2,
                   "--outdir", tmp_path) == 2

    def test_negative_input(self, tmp_path):
        write_matrix(tmp_path / "n.csv", [[1.0, -1.0], [1.0, 1.0]])
        assert run("factorize", tmp_path / "n.csv", "--K", 1, "--outdir", tmp_path) == 2

    def test_zero_column(self, tmp_path):
        write_matrix(tmp_path / "z.csv", [[1.0, 0.0], [1.0, 0.0]])
        assert run("factorize", tmp_path / "z.csv", "--K", 1, "--outdir", tmp_path) == 2

    def test_numerical_failure(self, tmp_path, monkeypatch):
        def fail(*args, **kwargs):
            raise NoConvergence("stalled")
        monkeypatch.setattr(cli, "factorize", fail)
        write_matrix(tmp_path / "m.csv", [[1.0, 2.0], [3.0, 4.0]])
        assert run("factorize", tmp_path / "m.csv", "--K", 1, "--outdir", tmp_path) == 3

    def test_usage_errors(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run("factorize", tmp_path / "m.csv")
        assert err.value.code == 2
        with pytest.raises(SystemExit) as err:
            run("factorize", tmp_path / "m.csv", "--K", 2, "--solver", "nnlsb")
        assert err.value.code == 2


class TestEstimateK:
    def test_diagonal(self, tmp_path, capsys):
        write_matrix(tmp_path / "d.csv", np.diag([10.0, 9, 8, 0.1, 0.05]))
        rep = tmp_path / "k.json"
        assert run("estimate-k", tmp_path / "d.csv", "--k-min", 2, "--k-max", 4,
                   "--report", rep) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["k_hat"] == 3 and out["k_min"] == 2
        assert json.loads(rep.read_text()) == out

    def test_generated(self, dataset, capsys):
        assert run("estimate-k", dataset.with_suffix(".csv"), "--k-min", 2,
                   "--k-max", 10, "--normalize") == 0
        assert json.loads(capsys.readouterr().out)["k_hat"] == 5

    def test_invalid_range(self, tmp_path):
        write_matrix(tmp_path / "d.csv", np.eye(4))
        assert run("estimate-k", tmp_path / "d.csv", "--k-min", 3, "--k-max", 2) == 2


class TestBenchmark:
    base = ["--F", 40, "--K", 3, "--N", 300, "--alpha", 0.1, "--layout", "dense",
            "--iters", 50, "--max_time", 5]

    def test_single_solver(self, tmp_path):
        rep = tmp_path / "b.json"
        assert run("benchmark", "--report", rep, *self.base, "--solvers", "cr1") == 0
        rows = json.loads(rep.read_text())["rows"]
        assert len(rows) == 1 and rows[0]["solver"] == "cr1"
        csv = (tmp_path / "b.csv").read_text().splitlines()
        assert csv[0].startswith("N,seed,solver") and len(csv) == 2

    def test_rows_sorted(self, tmp_path):
        rep = tmp_path / "b.json"
        assert run("benchmark", "--report", rep, *self.base, "--N", "300,200",
                   "--seeds", 2, "--solvers", "mult,cr1", "--inits", "rand,nndsvd") == 0
        rows = json.loads(rep.read_text())["rows"]
        keys = [(r["N"], r["seed"], r["solver"], r["init"]) for r in rows]
        assert keys == sorted(keys) and len(rows) == 2 * 2 * 3
        summary = json.loads(rep.read_text())["summary"]
        assert len(summary["mult/rand/N=300"]["relative_error"]) == 2

    def test_time_to_cr1(self, tmp_path):
        rep = tmp_path / "b.json"
        run("benchmark", "--report", rep, *self.base, "--solvers", "cr1,hals")
        rows = {r["solver"]: r for r in json.loads(rep.read_text())["rows"]}
        hals = rows["hals"]
        if hals["relative_error"] <= rows["cr1"]["relative_error"]:
            assert hals["time_to_cr1"] != "inf"
        else:
            assert hals["time_to_cr1"] == "inf"

    def test_empty_solver_list(self, tmp_path):
        assert run("benchmark", "--report", tmp_path / "b.json", *self.base,
                   "--solvers", "") == 2

    def test_unknown_solver(self, tmp_path):
        assert run("benchmark", "--report", tmp_path / "b.json", *self.base,
                   "--solvers", "nnlsb") == 2

    def test_worker_pool_matches_serial(self, tmp_path, monkeypatch):
        args = [*self.base, "--seeds", 2, "--solvers", "cr1"]
        monkeypatch.setenv("CONIC_NMF_THREADS", "1")
        run("benchmark", "--report", tmp_path / "s.json", *args)
        monkeypatch.setattr("conic_nmf.bench.os.cpu_count", lambda: 2)
        monkeypatch.setenv("CONIC_NMF_THREADS", "2")
        run("benchmark", "--report", tmp_path / "p.json", *args)
        strip = lambda rows: [{k: v for k, v in r.items() if k not in ("wall_clock", "time_to_cr1")}
                              for r in rows]
        s = json.loads((tmp_path / "s.json").read_text())["rows"]
        p = json.loads((tmp_path / "p.json").read_text())["rows"]
        assert strip(s) == strip(p)


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "conic_nmf.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "0.1.0"


def test_no_command():
    with pytest.raises(SystemExit) as err:
        cli.main([])
    assert err.value.code == 2
