import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stablear import cli
from stablear.exceptions import InputError


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "stablear.cli", *args],
                          capture_output=True, text=True, env=env)


class TestReadSeries:
    def test_header_skip(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("x\n1.0\n2.0\n")
        assert np.array_equal(cli.read_series(str(p)), [1.0, 2.0])

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1.0\nfoo\n")
        with pytest.raises(InputError, match="line 2"):
            cli.read_series(str(p))

    def test_rejects_nan(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1.0\nnan\n")
        with pytest.raises(InputError, match="line 2"):
            cli.read_series(str(p))

    def test_empty(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("")
        with pytest.raises(InputError):
            cli.read_series(str(p))

    def test_crlf(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_bytes(b"value\r\n1.5\r\n-2.25\r\n")
        assert np.array_equal(cli.read_series(str(p)), [1.5, -2.25])

    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        vals = rng.standard_cauchy(200)
        p = tmp_path / "r.csv"
        cli.write_series(vals, str(p))
        back = cli.read_series(str(p))
        assert np.array_equal(back, vals)


class TestJson:
    def test_seventeen_digits_roundtrip(self):
        vals = [1 / 3, np.pi, 1e-300, -2.5e300, 0.1]
        s = cli.dumps_json(vals)
        assert json.loads(s) == vals

    def test_deterministic(self):
        doc = {"b": [1.0, 2.5], "a": "x"}
        assert cli.dumps_json(doc) == cli.dumps_json(doc)


class TestExitCodes:
    def test_missing_file(self):
        r = run_cli(["fit", "--input", "does-not-exist.csv", "--p", "1",
                     "--out", "x.json"])
        assert r.returncode == 1
        assert "does-not-exist.csv" in r.stderr
        assert r.stderr.startswith("error[")

    def test_bad_flag(self):
        r = run_cli(["fit", "--nope"])
        assert r.returncode == 1

    def test_stable_pdf_print(self):
        r = run_cli(["stable", "pdf", "--alpha", "1", "--beta", "0",
                     "--sigma", "1", "--mu", "0", "--z", "0"])
        assert r.returncode == 0
        assert r.stdout.strip() == "0.3183098862"

    def test_version(self):
        r = run_cli(["--version"])
        assert r.returncode == 0
        assert r.stdout.strip().count(".") == 2


class TestDeterminism:
    def test_simulate_byte_identical(self, tmp_path):
        args = ["simulate", "--p", "1", "--s", "1", "--theta", "2.0",
                "--alpha", "1.5", "--n", "200", "--seed", "7"]
        r1 = run_cli(args + ["--out", str(tmp_path / "a.csv")])
        r2 = run_cli(args + ["--out", str(tmp_path / "b.csv")])
        assert r1.returncode == r2.returncode == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        ja = (tmp_path / "a.csv.json").read_text()
        jb = (tmp_path / "b.csv.json").read_text()
        assert ja.replace("a.csv", "X") == jb.replace("b.csv", "X")

    def test_sample_thread_env_ignored(self, tmp_path):
        args = ["stable", "sample", "--alpha", "1.5", "--beta", "0.5",
                "--sigma", "1", "--mu", "0", "--n", "500", "--seed", "3"]
        r1 = run_cli(args, env_extra={"STABLE_AR_THREADS": "1"})
        r2 = run_cli(args, env_extra={"STABLE_AR_THREADS": "4"})
        assert r1.stdout == r2.stdout


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """simulate -> fit once, shared by the chained-command tests."""
    d = tmp_path_factory.mktemp("pipe")
    series = str(d / "series.csv")
    fitj = str(d / "fit.json")
    r = run_cli(["simulate", "--p", "1", "--s", "1", "--theta", "2.0",
                 "--alpha", "1.5", "--n", "300", "--seed", "11",
                 "--out", series])
    assert r.returncode == 0
    r = run_cli(["fit", "--input", series, "--p", "1", "--profile", "test",
                 "--starts", "60", "--shortlist", "3", "--seed", "2",
                 "--out", fitj])
    assert r.returncode == 0, r.stderr
    return d, series, fitj


class TestPipeline:
    def test_fit_schema(self, pipeline):
        _, _, fitj = pipeline
        doc = json.load(open(fitj))
        for key in ("p", "s", "theta", "phi", "tau", "loglik", "se_tau",
                    "seed", "manifest"):
            assert key in doc
        assert set(doc["tau"]) == {"alpha", "beta", "sigma", "mu"}
        man = doc["manifest"]
        for key in ("subcommand", "flags", "seed", "version",
                    "input_checksum", "timestamp"):
            assert key in man
        assert man["subcommand"] == "fit"

    def test_bootstrap_rejects_large_m(self, pipeline):
        d, series, fitj = pipeline
        r = run_cli(["bootstrap", "--input", series, "--fit", fitj,
                     "--m", "300", "--B", "5", "--seed", "1",
                     "--out", str(d / "b.json")])
        assert r.returncode == 1
        assert "error[domain]" in r.stderr

    def test_bootstrap_output(self, pipeline):
        d, series, fitj = pipeline
        out = str(d / "boot.json")
        r = run_cli(["bootstrap", "--input", series, "--fit", fitj,
                     "--m", "60", "--B", "25", "--seed", "1", "--out", out])
        assert r.returncode == 0, r.stderr
        doc = json.load(open(out))
        assert len(doc["phi_ci"]) == 1
        assert len(doc["converged"]) == 25

    def test_diagnose_outputs(self, pipeline):
        d, series, fitj = pipeline
        out = str(d / "rep.json")
        plots = str(d / "plots")
        r = run_cli(["diagnose", "--input", series, "--fit", fitj,
                     "--max-lag", "8", "--M", "150", "--seed", "4",
                     "--out", out, "--plot-dir", plots])
        assert r.returncode == 0, r.stderr
        doc = json.load(open(out))
        assert doc["acf"][0] == 1.0
        for name in ("acf.csv", "pacf.csv", "absacf.csv", "sqacf.csv",
                     "qq.csv"):
            assert os.path.exists(os.path.join(plots, name))
        qq = open(os.path.join(plots, "qq.csv")).read().splitlines()
        assert qq[0] == "theoretical,empirical"
        assert len(qq) == 300 - 1 + 1  # header + n - p rows
