import csv
import io
import json

import numpy as np
import pytest
from golden_cases import CASES, DATA, golden, run_case, run_cli

from grfields.cli import main
from grfields.covariance import SchoenbergSeries, check_positive_definite, covariance_matrix
from grfields.fieldsim import read_pgm
from grfields.rng import DEFAULT_SEED


def rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


def meta(text):
    return dict(ln[2:].split("=", 1) for ln in text.splitlines() if ln.startswith("# ") and "=" in ln)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    assert run_case(name) == golden(name)


class TestEvalCov:
    def test_six_rows_first_is_variance(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["eval-cov", "--model", str(DATA / "matern.json"), "--out", str(out)]) == 0
        table = rows(out.read_text())
        assert table[0] == ["lag", "value"]
        assert len(table) == 7
        assert float(table[1][1]) == 1.7

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"family": "matern", "nu": ')
        assert main(["eval-cov", "--model", str(bad)]) == 2
        assert "malformed JSON" in capsys.readouterr().err

    def test_invalid_model_value(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"family": "matern", "nu": -1, "kappa": 1, "sigma2": 1, "d": 1}')
        assert main(["eval-cov", "--model", str(bad)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["eval-cov", "--model", str(tmp_path / "nope.json")]) == 2

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_same_config_twice(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["eval-cov", "--model", str(DATA / "berg_porcu.json"), "--lags=-0.5,0.5", "--times", "0,1"]
        main([*args, "--out", str(a)])
        main([*args, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestSample:
    def test_seed_echo_default(self, capsys):
        assert main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "4"]) == 0
        assert meta(capsys.readouterr().out)["seed"] == str(DEFAULT_SEED)

    def test_seed_echo(self, capsys):
        main(["sample", "--model", str(DATA / "matern.json"), "--grid", "40", "--spacing", "0.5", "--seed", "123"])
        out = capsys.readouterr().out
        assert meta(out)["seed"] == "123"
        assert len(rows(out)) == 41

    def test_seeds_differ(self, capsys):
        main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "4", "--seed", "1"])
        a = capsys.readouterr().out
        main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "4", "--seed", "2"])
        b = capsys.readouterr().out
        assert rows(a) != rows(b)

    def test_pgm_dimensions(self, tmp_path):
        out = tmp_path / "f.csv"
        assert main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "12", "--format", "pgm", "--out", str(out)]) == 0
        pixels, comments = read_pgm(tmp_path / "f.pgm")
        assert pixels.shape == (12, 12)
        assert comments[0].startswith("# min=")
        assert pixels.min() == 0 and pixels.max() == 255

    def test_pgm_per_sample(self, tmp_path):
        out = tmp_path / "f.csv"
        model = tmp_path / "m.json"
        model.write_text(json.dumps({"family": "matern", "nu": 0.5, "kappa": 1.0, "sigma2": 1.0, "d": 2}))
        args = ["sample", "--model", str(model), "--grid", "32", "--samples", "2", "--format", "pgm", "--out", str(out)]
        assert main(args) == 0
        assert read_pgm(tmp_path / "f_0.pgm")[0].shape == (32, 32)
        assert read_pgm(tmp_path / "f_1.pgm")[0].shape == (32, 32)

    def test_pgm_needs_2d(self, tmp_path):
        out = tmp_path / "f.csv"
        args = ["sample", "--model", str(DATA / "matern.json"), "--grid", "40", "--spacing", "0.5", "--format", "pgm"]
        assert main([*args, "--out", str(out)]) == 2

    def test_infeasible_grid(self, capsys):
        assert main(["sample", "--model", str(DATA / "matern.json"), "--grid", "8"]) == 2
        assert "tail mass" in capsys.readouterr().err
        assert main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "1"]) == 2

    def test_sphere_fibonacci(self, capsys):
        assert main(["sample", "--model", str(DATA / "schoenberg.json"), "--grid", "20"]) == 0
        table = rows(capsys.readouterr().out)
        assert table[0] == ["x", "y", "z", "value"] and len(table) == 21

    def test_no_model(self):
        assert main(["sample"]) == 2


class TestKrige:
    def test_observed_columns(self, tmp_path, capsys):
        assert main(["krige", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", "--observed", str(DATA / "observed.csv")]) == 0
        table = rows(capsys.readouterr().out)
        assert table[0] == ["vertex", "mean", "variance"]
        assert len(table) == 1 + 36 - 3

    def test_precision_file_matches_gmrf(self, tmp_path, capsys):
        mtx = tmp_path / "q.csv"
        main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", "--format", "mm", "--out", str(mtx)])
        capsys.readouterr()
        args = ["--observed", str(DATA / "observed.csv"), "--targets", "1,8,35"]
        main(["krige", "--precision", str(tmp_path / "q.mtx"), *args])
        a = capsys.readouterr().out
        main(["krige", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", *args])
        assert a == capsys.readouterr().out

    def test_overlap_is_input_error(self):
        args = ["krige", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", "--observed", str(DATA / "observed.csv")]
        assert main([*args, "--targets", "9"]) == 2
        assert main([*args, "--targets", "99"]) == 2


class TestValidate:
    def test_valid_matern_passes(self, capsys):
        assert main(["validate", "--model", str(DATA / "matern.json")]) == 0
        out = capsys.readouterr().out
        assert out.startswith("PASS") and "FAIL" not in out

    def test_negative_coefficient_names_index(self, capsys):
        assert main(["validate", "--model", str(DATA / "schoenberg_negative.json")]) == 1
        out = capsys.readouterr().out
        assert out.startswith("FAIL") and "coefficient index 2" in out

    def test_gram_report_matches_check(self, tmp_path, capsys):
        pts = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [0.6, 0.8, 0]])
        G = covariance_matrix(SchoenbergSeries(2, (0.3, 0.5, 0.2)), pts, "sphere_cosine")
        path = tmp_path / "g.csv"
        np.savetxt(path, G, delimiter=",")
        res = check_positive_definite(np.loadtxt(path, delimiter=","))
        code = main(["validate", "--matrix", str(path)])
        out = capsys.readouterr().out
        assert code == (0 if res.positive_definite else 1)
        assert f"min eigenvalue {res.min_eigenvalue:.6e}" in out

    def test_indefinite_matrix_fails(self, tmp_path, capsys):
        path = tmp_path / "g.csv"
        np.savetxt(path, np.array([[1.0, 2.0], [2.0, 1.0]]), delimiter=",")
        assert main(["validate", "--matrix", str(path)]) == 1
        assert capsys.readouterr().out.startswith("FAIL")

    def test_dempster_battery(self, capsys):
        assert main(["validate", "--gmrf", str(DATA / "gmrf.json"), "--grid", "4"]) == 0
        out = capsys.readouterr().out
        assert "precision of order 16 factors" in out and "120/120 pairs" in out

    def test_nothing_to_validate(self):
        assert main(["validate"]) == 2


class TestBench:
    def test_single_size_has_no_slope(self, capsys):
        assert main(["bench", "--sizes", "16", "--repeats", "5"]) == 0
        out = capsys.readouterr().out
        assert out.rstrip().endswith("# slope_sparse=NA, slope_dense=NA")
        table = rows(out)
        assert table[0] == ["n", "backend", "seconds", "nnz"]
        assert [r[1] for r in table[1:]] == ["sparse", "dense"]

    def test_summary_and_stable_columns(self, capsys):
        main(["bench", "--sizes", "16,36", "--backend", "sparse"])
        a = rows(capsys.readouterr().out)
        main(["bench", "--sizes", "16,36", "--backend", "sparse", "--repeats", "10"])
        b = rows(capsys.readouterr().out)
        strip = lambda t: [[r[0], r[1], r[3]] for r in t]  # noqa: E731
        assert strip(a) == strip(b)

    def test_sizes_must_increase(self):
        assert main(["bench", "--sizes", "36,16"]) == 2
        assert main(["bench", "--sizes", "15"]) == 2


class TestCompare:
    def test_header_and_lag0(self, capsys):
        assert main(["compare", "--model", str(DATA / "matern_2d.json"), "--grid", "32"]) == 0
        table = rows(capsys.readouterr().out)
        assert table[0] == ["lag", "analytic", "estimated", "abs_error", "se"]
        assert float(table[1][0]) == 0 and float(table[1][3]) == 0
        assert max(float(r[3]) for r in table[1:]) <= 0.05

    def test_inconsistent_smoothness(self, tmp_path, capsys):
        model = tmp_path / "m.json"
        model.write_text(json.dumps({"family": "matern", "nu": 1.5, "kappa": 0.3535533905932738, "sigma2": 1.0, "d": 2}))
        assert main(["compare", "--model", str(model), "--gmrf", str(DATA / "gmrf.json")]) == 2
        err = capsys.readouterr().err
        assert "nu=1.5" in err and "nu=1.0" in err

    def test_whittle_within_three_se(self, capsys):
        args = ["compare", "--route", "whittle", "--model", str(DATA / "matern.json"), "--grid", "40", "--spacing", "0.5"]
        assert main(args) == 0
        table = rows(capsys.readouterr().out)[1:]
        assert len(table) == 10
        assert all(float(r[3]) <= 3 * float(r[4]) for r in table)


def test_writes_only_configured_paths(tmp_path):
    out = tmp_path / "f.csv"
    main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", "--format", "pgm", "--out", str(out)])
    main(["sample", "--gmrf", str(DATA / "gmrf.json"), "--grid", "6", "--format", "mm", "--out", str(out)])
    main(["eval-cov", "--model", str(DATA / "matern.json"), "--out", str(tmp_path / "c.csv")])
    assert sorted(p.name for p in tmp_path.iterdir()) == ["c.csv", "f.csv", "f.mtx", "f.pgm"]


class TestThreads:
    def test_bad_thread_setting(self, monkeypatch):
        monkeypatch.setenv("FIELDS_THREADS", "zero")
        assert main(["eval-cov", "--model", str(DATA / "matern.json")]) == 2

    def test_subprocess_exit_codes(self, tmp_path):
        assert run_cli(["eval-cov", "--model", "{d}/matern.json"], tmp_path).returncode == 0
        assert run_cli(["validate", "--model", "{d}/schoenberg_negative.json"], tmp_path).returncode == 1
        assert run_cli(["eval-cov"], tmp_path, threads=0).returncode == 2
