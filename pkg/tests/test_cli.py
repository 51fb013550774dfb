"""End-to-end tests of the command-line interface."""

import hashlib
import json

import numpy as np
import pytest

from skyrme_blowup.cli import main


def write_config(path, text):
    path.write_text(text)
    return str(path)


def run_cli(*args):
    return main(list(args))


def test_profile_csv(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[profile]\nd = 5\nsamples = 101\n")
    out = tmp_path / "out"
    assert run_cli("profile", "--config", cfg, "--out", str(out)) == 0
    lines = (out / "profile.csv").read_text().splitlines()
    assert lines[0] == "rho,angle,angle_over_radius,slope"
    assert len(lines) == 102  # header + 101 samples
    last = [float(v) for v in lines[-1].split(",")]
    assert last[0] == pytest.approx(np.sqrt(5.0), abs=1e-10)
    assert last[1] == pytest.approx(np.pi, abs=1e-10)


def test_run_record_manifest(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[profile]\nsamples = 11\n")
    out = tmp_path / "out"
    assert run_cli("profile", "--config", cfg, "--out", str(out)) == 0
    record = json.loads((out / "run_record.json").read_text())
    assert record["config"] == {"profile": {"samples": "11"}}
    digest = hashlib.sha256((out / "profile.csv").read_bytes()).hexdigest()
    assert record["outputs"]["profile.csv"] == digest


def test_negative_lambda_is_config_error(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[model]\nlambda = -0.5\n")
    out = tmp_path / "out"
    assert run_cli("evolve-sim", "--config", cfg, "--out", str(out)) == 1
    # no artifacts are written on a config error
    assert not list(out.glob("*")) if out.exists() else True


def test_missing_config_file(tmp_path):
    assert run_cli("profile", "--config", str(tmp_path / "nope.ini")) == 1


def test_bad_value_type(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[profile]\nsamples = eleven\n")
    assert run_cli("profile", "--config", cfg, "--out",
                   str(tmp_path / "o")) == 1


def test_wrong_similarity_domain(tmp_path):
    cfg = write_config(tmp_path / "c.ini",
                       "[grid]\nr_max = 2.0\nn = 128\n")
    assert run_cli("evolve-sim", "--config", cfg, "--out",
                   str(tmp_path / "o")) == 1


def test_verify_rhs(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[verify-rhs]\nseed = 1\n")
    out = tmp_path / "out"
    assert run_cli("verify-rhs", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "verify_rhs.json").read_text())
    assert report["pass"]
    assert report["series_error_strong_field"] < 1e-10


def test_verify_coeffs(tmp_path):
    cfg = write_config(tmp_path / "c.ini",
                       "[verify-coeffs]\nn_samples = 64\ntol = 1e-6\n")
    out = tmp_path / "out"
    assert run_cli("verify-coeffs", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "verify_coeffs.json").read_text())
    assert report["pass"]


def test_spectrum_report(tmp_path):
    cfg = write_config(tmp_path / "c.ini",
                       "[spectrum]\nn_coarse = 96\nn_fine = 144\n")
    out = tmp_path / "out"
    assert run_cli("spectrum", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "spectrum.json").read_text())
    assert report["n_unstable"] == 1
    assert report["unstable"][0] == pytest.approx(1.0, abs=1e-4)
    assert report["symmetry_mode_residual"] < 1e-6
    # the eigenmode CSV has one row per collocation node
    lines = (out / "unstable_mode.csv").read_text().splitlines()
    assert len(lines) == 98


def test_evolve_report(tmp_path):
    cfg = write_config(tmp_path / "c.ini", (
        "[model]\nmodel = semilinear\n"
        "[grid]\nr_max = 1.0\nn = 256\n"
        "[evolve]\nt_end = 0.8\nstride = 32\n"
    ))
    out = tmp_path / "out"
    assert run_cli("evolve", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "blowup_report.json").read_text())
    assert report["detected"]
    assert report["exponent_fit"] == pytest.approx(-1.0, abs=0.02)
    series = (out / "origin_gradient.csv").read_text().splitlines()
    assert series[0] == "t,origin_gradient"
    assert len(series) > 100


def test_check_residual(tmp_path):
    cfg = write_config(tmp_path / "c.ini", (
        "[model]\nmodel = strong_field\n"
        "[grid]\nr_max = 1.0\nn = 256\n"
        "[check-residual]\nt_end = 0.1\n"
    ))
    out = tmp_path / "out"
    assert run_cli("check-residual", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "residual.json").read_text())
    assert report["equation"] == "strong_field"
    assert report["residual"] < 1e-2


def test_deterministic_rerun_identical(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[profile]\nsamples = 51\n")
    o1, o2 = tmp_path / "a", tmp_path / "b"
    for o in (o1, o2):
        assert run_cli("profile", "--config", cfg, "--out", str(o),
                       "--deterministic") == 0
    for name in ("profile.csv", "run_record.json"):
        assert (o1 / name).read_bytes() == (o2 / name).read_bytes()


def test_out_env_override(tmp_path, monkeypatch):
    cfg = write_config(tmp_path / "c.ini", "[profile]\nsamples = 11\n")
    target = tmp_path / "from_env"
    monkeypatch.setenv("SKYRME_BLOWUP_OUT", str(target))
    assert run_cli("profile", "--config", cfg) == 0
    assert (target / "profile.csv").exists()


def test_sweep_summary(tmp_path):
    cfg = write_config(tmp_path / "c.ini", (
        "[grid]\nr_max = 1.0\nn = 128\n"
        "[shoot]\nbracket_lo = 0.995\nbracket_hi = 1.005\ntol = 1e-4\n"
        "tau_horizon = 4.0\nseed = 7\namplitude = 1e-4\n"
        "[sweep]\nlambda_grid = 0.0, 0.05\n"
    ))
    out = tmp_path / "out"
    assert run_cli("sweep", "--config", cfg, "--out", str(out),
                   "--workers", "2") == 0
    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0] == "lambda,T_star,omega_fit,exponent_fit,status"
    assert len(lines) == 3
    for line, lam in zip(lines[1:], (0.0, 0.05)):
        vals = line.split(",")
        assert float(vals[0]) == lam
        assert float(vals[1]) == pytest.approx(1.0, abs=1e-3)
        assert float(vals[3]) == pytest.approx(-1.0, abs=0.02)
        assert vals[4] == "ok"
    assert (out / "cell_00_lam_0" / "shooting_result.json").exists()


def test_sweep_partial_failure_recorded(tmp_path):
    # the second cell's bracket cannot straddle the blowup time after the
    # lambda shift, so it fails while the first still completes
    cfg = write_config(tmp_path / "c.ini", (
        "[grid]\nr_max = 1.0\nn = 128\n"
        "[shoot]\nbracket_lo = 1.002\nbracket_hi = 1.005\ntol = 1e-3\n"
        "tau_horizon = 3.0\nseed = 7\namplitude = 1e-4\n"
        "[sweep]\nlambda_grid = 0.0\n"
    ))
    out = tmp_path / "out"
    assert run_cli("sweep", "--config", cfg, "--out", str(out)) == 0
    lines = (out / "summary.csv").read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].split(",")[4].startswith("failed")


def test_sweep_empty_grid_is_config_error(tmp_path):
    cfg = write_config(tmp_path / "c.ini", "[sweep]\nlambda_grid =\n")
    assert run_cli("sweep", "--config", cfg, "--out",
                   str(tmp_path / "o")) == 1
