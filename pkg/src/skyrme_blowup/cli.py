"""Command-line interface: reproducible runs with persisted artifacts.

Usage: skyrme-blowup <command> --config <path> [--out DIR] [--workers N]
[--deterministic].  Commands: profile, verify-rhs, verify-coeffs, evolve,
evolve-sim, shoot, spectrum, check-residual, sweep.  Series go to CSV,
reports to JSON; every run writes a record with a config snapshot and a
sha256 manifest of its outputs.  Exit codes: 0 success, 1 config error,
2 numerical failure.
"""

import argparse
import configparser
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import coeffs, diagnostics, kernels, model, physical, similarity, spectral
from .profile import (
    ProfileDomainError,
    profile_constants,
    profile_angle,
    angle_over_radius,
    profile_angle_slope,
)

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("skyrme-blowup")
except Exception:  # pragma: no cover - metadata missing in odd installs
    VERSION = "unknown"

OUT_ENV = "SKYRME_BLOWUP_OUT"

COMMANDS = (
    "profile",
    "verify-rhs",
    "verify-coeffs",
    "evolve",
    "evolve-sim",
    "shoot",
    "spectrum",
    "check-residual",
    "sweep",
)


class ConfigError(Exception):
    pass


class NumericalFailure(Exception):
    pass


# ---------------------------------------------------------------- config


def load_config(path: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cfg


def _get(cfg, section, key, cast=float, default=None):
    try:
        raw = cfg.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is None:
            raise ConfigError(f"missing config field [{section}] {key}")
        return default
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def _model_params(cfg) -> model.ModelParams:
    alpha = _get(cfg, "model", "alpha", float, 0.0)
    beta = _get(cfg, "model", "beta", float, 1.0)
    lam = _get(cfg, "model", "lambda", float, 0.0)
    name = _get(cfg, "model", "model", str, "strong_field")
    if lam < 0.0:
        raise ConfigError("[model] lambda must be nonnegative")
    if alpha < 0.0 or beta < 0.0:
        raise ConfigError("[model] alpha and beta must be nonnegative")
    try:
        kind = model.Model(name)
    except ValueError:
        raise ConfigError(f"[model] model {name!r} not recognized")
    try:
        return model.ModelParams(alpha, beta, lam, kind)
    except ValueError as exc:
        raise ConfigError(f"[model] {exc}") from exc


def _grid(cfg, section="grid") -> physical.RadialGrid:
    r_max = _get(cfg, section, "r_max", float, 1.0)
    n = _get(cfg, section, "n", int, 512)
    try:
        return physical.RadialGrid(r_max, n)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from exc


def _config_snapshot(cfg) -> dict:
    return {s: dict(cfg.items(s)) for s in cfg.sections()}


# ------------------------------------------------------------- artifacts


def _write_csv(path: str, header: list[str], columns: list[np.ndarray]):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in zip(*columns):
            f.write(",".join(f"{v:.12e}" for v in row) + "\n")


def _write_json(path: str, payload: dict):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# -------------------------------------------------------------- commands


def cmd_profile(cfg, outdir):
    d = _get(cfg, "profile", "d", int, 5)
    samples = _get(cfg, "profile", "samples", int, 101)
    if samples < 2:
        raise ConfigError("[profile] samples must be >= 2")
    try:
        p = profile_constants(d)
    except ProfileDomainError as exc:
        raise ConfigError(f"[profile] {exc}") from exc
    rho = np.linspace(0.0, p.rho_star, samples)
    # the slope diverges at rho_star itself
    slope = np.empty_like(rho)
    slope[:-1] = profile_angle_slope(p, rho[:-1])
    slope[-1] = np.inf
    path = os.path.join(outdir, "profile.csv")
    _write_csv(
        path,
        ["rho", "angle", "angle_over_radius", "slope"],
        [rho, profile_angle(p, rho), angle_over_radius(p, rho), slope],
    )
    return [path]


def cmd_verify_rhs(cfg, outdir):
    # internal consistency of the source terms: series vs trigonometric
    # branches near the matching threshold, and profile stationarity
    rng = np.random.default_rng(_get(cfg, "verify-rhs", "seed", int, 0))
    x = rng.uniform(0.9e-2, 1.1e-2, 512) * rng.choice([-1.0, 1.0], 512)
    r = rng.uniform(0.5, 1.5, 512)
    wm_series = (4.0 * x - 2.0 * np.sin(2.0 * x)) / r**3
    err_wm = np.max(np.abs(model.wave_maps_source(x, r) - wm_series)
                    / np.maximum(np.abs(wm_series), 1e-30))

    z2 = rng.uniform(-0.5, 0.5, 512)
    z3 = rng.uniform(-0.5, 0.5, 512)
    direct = (
        -np.cos(x) / np.sin(x) * (z3**2 - z2**2) / r
        - 2.0 * (1.0 - x * np.cos(x) / np.sin(x)) * z2 / r**2
        - (1.5 * np.sin(2.0 * x) - 2.0 * x - x**2 * np.cos(x) / np.sin(x))
        / r**3
    )
    got = model.strong_field_source(x, z2, z3, r)
    err_sf = np.max(np.abs(got - direct) / np.maximum(np.abs(direct), 1e-30))

    grid = physical.RadialGrid(1.0, 512)
    res = diagnostics.residual_check(
        "similarity_stationary", grid.nodes,
        state=(np.zeros(513), np.zeros(513)),
    )
    tol = _get(cfg, "verify-rhs", "tol", float, 1e-8)
    ok = err_wm <= tol and err_sf <= tol
    path = os.path.join(outdir, "verify_rhs.json")
    _write_json(path, {
        "series_error_wave_maps": err_wm,
        "series_error_strong_field": err_sf,
        "profile_stationarity_residual": float(res),
        "tolerance": tol,
        "pass": bool(ok),
    })
    if not ok:
        raise NumericalFailure("source-term branches disagree beyond tolerance")
    return [path]


def cmd_verify_coeffs(cfg, outdir):
    n_samples = _get(cfg, "verify-coeffs", "n_samples", int, 200)
    tol = _get(cfg, "verify-coeffs", "tol", float, 1e-6)
    seed = _get(cfg, "verify-coeffs", "seed", int, 0)
    report = coeffs.verify_coefficients_fd(n_samples=n_samples, tol=tol,
                                           seed=seed)
    path = os.path.join(outdir, "verify_coeffs.json")
    _write_json(path, report)
    if not report["pass"]:
        raise NumericalFailure("coefficient finite-difference check failed")
    return [path]


def cmd_evolve(cfg, outdir):
    params = _model_params(cfg)
    grid = _grid(cfg)
    t_end = _get(cfg, "evolve", "t_end", float, 0.9)
    cfl = _get(cfg, "evolve", "cfl", float, 0.4)
    stride = _get(cfg, "evolve", "stride", int, 16)
    T_init = _get(cfg, "evolve", "t_blowup_init", float, 1.0)
    if not 0.0 < t_end < T_init:
        raise ConfigError("[evolve] t_end must lie in (0, t_blowup_init)")
    if params.model is model.Model.SEMILINEAR:
        init = physical.exact_blowup_semilinear(grid, 0.0, T_init)
        traj = physical.evolve_semilinear(params, grid, init, t_end, cfl=cfl,
                                          stride=stride)
    else:
        init = physical.exact_blowup_angle(grid, 0.0, T_init)
        traj = physical.evolve_physical(params, grid, init, t_end, cfl=cfl,
                                        stride=stride)
    series = os.path.join(outdir, "origin_gradient.csv")
    _write_csv(series, ["t", "origin_gradient"],
               [traj.origin_times, traj.origin_gradient])
    snaps = os.path.join(outdir, "snapshots.csv")
    t_col, r_col, f_col, ft_col = [], [], [], []
    for s in traj.states:
        t_col.append(np.full_like(grid.nodes, s.t))
        r_col.append(grid.nodes)
        f_col.append(s.field)
        ft_col.append(s.field_t)
    _write_csv(snaps, ["t", "r", "field", "field_t"],
               [np.concatenate(c) for c in (t_col, r_col, f_col, ft_col)])
    rep = physical.fit_blowup_rate(traj)
    report = os.path.join(outdir, "blowup_report.json")
    _write_json(report, {
        "detected": rep.detected,
        "T_fit": rep.T_fit,
        "c_fit": rep.c_fit,
        "exponent_fit": rep.exponent_fit,
        "residual": rep.residual,
        "window": list(rep.window),
        "truncated": traj.truncated,
        "reason": traj.reason,
    })
    return [series, snaps, report]


def cmd_evolve_sim(cfg, outdir):
    lam = _get(cfg, "model", "lambda", float, 0.0)
    if lam < 0.0:
        raise ConfigError("[model] lambda must be nonnegative")
    grid = _grid(cfg)
    if abs(grid.r_max - 1.0) > 1e-12:
        raise ConfigError("[grid] similarity runs need r_max = 1")
    T = _get(cfg, "evolve-sim", "t_blowup", float, 1.0)
    tau_end = _get(cfg, "evolve-sim", "tau_end", float, 6.0)
    seed = _get(cfg, "evolve-sim", "seed", int, 0)
    amplitude = _get(cfg, "evolve-sim", "amplitude", float, 1e-4)
    cfl = _get(cfg, "evolve-sim", "cfl", float, 0.4)
    stride = _get(cfg, "evolve-sim", "stride", int, 64)
    if not 0.5 <= T <= 1.5:
        raise ConfigError("[evolve-sim] t_blowup must lie in [0.5, 1.5]")

    r = np.linspace(0.0, 2.0, 4 * grid.n + 1)
    v1, v2 = similarity.synthesize_perturbation(r, seed, amplitude)
    p1, p2 = similarity.initial_data(grid.nodes, T, r, v1, v2)
    traj = similarity.evolve_similarity(p1, p2, grid, tau_end, sigma0=lam * T,
                                        cfl=cfl, stride=stride)
    proj = spectral.export_projection(96)
    taus, coeffs_series = similarity.projection_history(traj, grid, proj)
    series = os.path.join(outdir, "norm_series.csv")
    _write_csv(series, ["tau", "norm", "unstable_coeff"],
               [taus, traj.norms, coeffs_series])
    report = os.path.join(outdir, "similarity_report.json")
    _write_json(report, {
        "divergent": traj.divergent,
        "reason": traj.reason,
        "final_tau": float(traj.taus[-1]),
    })
    return [series, report]


def cmd_shoot(cfg, outdir):
    lam = _get(cfg, "model", "lambda", float, 0.0)
    if lam < 0.0:
        raise ConfigError("[model] lambda must be nonnegative")
    grid = _grid(cfg)
    if abs(grid.r_max - 1.0) > 1e-12:
        raise ConfigError("[grid] shooting needs r_max = 1")
    lo = _get(cfg, "shoot", "bracket_lo", float, 0.95)
    hi = _get(cfg, "shoot", "bracket_hi", float, 1.05)
    tol = _get(cfg, "shoot", "tol", float, 1e-6)
    tau_horizon = _get(cfg, "shoot", "tau_horizon", float, 6.0)
    seed = _get(cfg, "shoot", "seed", int, 0)
    amplitude = _get(cfg, "shoot", "amplitude", float, 0.0)
    if not (0.8 <= lo < hi <= 1.2):
        raise ConfigError("[shoot] bracket must satisfy 0.8 <= lo < hi <= 1.2")
    if tol <= 0.0:
        raise ConfigError("[shoot] tol must be positive")

    r = np.linspace(0.0, 2.0, 4 * grid.n + 1)
    v1, v2 = similarity.synthesize_perturbation(r, seed, amplitude)
    try:
        res = similarity.shoot_blowup_time(v1, v2, r, lam, lo, hi, grid=grid,
                                           tau_horizon=tau_horizon, tol=tol)
    except physical.SolverError as exc:
        raise NumericalFailure(str(exc)) from exc
    taus, coeffs_series = res.projection_history
    series = os.path.join(outdir, "projection_history.csv")
    _write_csv(series, ["tau", "unstable_coeff"], [taus, coeffs_series])
    report = os.path.join(outdir, "shooting_result.json")
    _write_json(report, {
        "T_star": res.T_star,
        "bracket": list(res.bracket),
        "iterations": res.iterations,
        "lambda": res.lam,
        "converged": res.converged,
    })
    return [series, report]


def cmd_spectrum(cfg, outdir):
    n_coarse = _get(cfg, "spectrum", "n_coarse", int, 128)
    n_fine = _get(cfg, "spectrum", "n_fine", int, 192)
    match_tol = _get(cfg, "spectrum", "match_tol", float, 1e-3)
    if n_coarse < 32 or n_fine < int(1.5 * n_coarse):
        raise ConfigError("[spectrum] need n_coarse >= 32, n_fine >= 1.5x")
    spec = spectral.compute_spectrum(n_coarse, n_fine, match_tol)
    residual = spectral.symmetry_mode_residual(
        spectral.assemble_generator(n_coarse)
    )
    proj = spectral.export_projection(n_coarse)
    report = os.path.join(outdir, "spectrum.json")
    _write_json(report, {
        "resolved": [[z.real, z.imag] for z in spec.resolved],
        "unstable": [spec.unstable.real, spec.unstable.imag],
        "n_unstable": int(spec.unstable_list.size),
        "gap": spec.gap,
        "symmetry_mode_residual": float(residual),
        "n_pair": list(spec.n_pair),
    })
    m = proj.gen.n + 1
    modes = os.path.join(outdir, "unstable_mode.csv")
    _write_csv(modes, ["rho", "phi1", "phi2"],
               [proj.gen.rho, np.real(proj.right[:m]), np.real(proj.right[m:])])
    return [report, modes]


def cmd_check_residual(cfg, outdir):
    params = _model_params(cfg)
    grid = _grid(cfg)
    t_end = _get(cfg, "check-residual", "t_end", float, 0.2)
    cfl = _get(cfg, "check-residual", "cfl", float, 0.4)
    if params.model is model.Model.SEMILINEAR:
        equation = "semilinear"
        init = physical.exact_blowup_semilinear(grid, 0.0)
        traj = physical.evolve_semilinear(params, grid, init, t_end, cfl=cfl,
                                          stride=1)
    else:
        equation = ("strong_field"
                    if params.model is model.Model.STRONG_FIELD else "full")
        init = physical.exact_blowup_angle(grid, 0.0)
        traj = physical.evolve_physical(params, grid, init, t_end, cfl=cfl,
                                        stride=1)
    if traj.truncated:
        raise NumericalFailure(f"evolution truncated: {traj.reason}")
    s0, s1, s2 = traj.states[-3], traj.states[-2], traj.states[-1]
    dt = s1.t - s0.t
    res = diagnostics.residual_check(
        equation, grid.nodes,
        snapshots=(s0.field, s1.field, s2.field), dt=dt, params=params,
    )
    path = os.path.join(outdir, "residual.json")
    _write_json(path, {"equation": equation, "residual": float(res),
                       "t": s1.t, "n": grid.n})
    return [path]


def _sweep_cell(args):
    (lam, base_snapshot, outdir, deterministic) = args
    cfg = configparser.ConfigParser()
    cfg.read_dict(base_snapshot)
    if not cfg.has_section("model"):
        cfg.add_section("model")
    cfg.set("model", "lambda", repr(lam))
    cfg.set("model", "model", "semilinear")
    os.makedirs(outdir, exist_ok=True)
    row = {"lambda": lam, "status": "ok", "T_star": np.nan,
           "omega_fit": np.nan, "exponent_fit": np.nan}
    try:
        files = cmd_shoot(cfg, outdir)
        with open(os.path.join(outdir, "shooting_result.json")) as f:
            row["T_star"] = json.load(f)["T_star"]
        # decay rate of the tuned similarity run
        grid = _grid(cfg)
        r = np.linspace(0.0, 2.0, 4 * grid.n + 1)
        seed = _get(cfg, "shoot", "seed", int, 0)
        amplitude = _get(cfg, "shoot", "amplitude", float, 0.0)
        v1, v2 = similarity.synthesize_perturbation(r, seed, amplitude)
        p1, p2 = similarity.initial_data(grid.nodes, row["T_star"], r, v1, v2)
        traj = similarity.evolve_similarity(
            p1, p2, grid, _get(cfg, "shoot", "tau_horizon", float, 6.0),
            sigma0=lam * row["T_star"], stride=64,
        )
        taus = np.array([s.tau for s in traj.states])
        fit = diagnostics.fit_exponential_decay(taus, traj.norms,
                                                window=(1.0, taus[-1]))
        row["omega_fit"] = -fit.exponent
        # physical blowup-rate exponent for the same coupling
        pg = physical.RadialGrid(1.0, grid.n)
        params = model.ModelParams(0.0, 1.0, lam, model.Model.SEMILINEAR)
        ptraj = physical.evolve_semilinear(
            params, pg, physical.exact_blowup_semilinear(pg, 0.0), 0.95,
            cfl=0.4, stride=4,
        )
        rep = physical.fit_blowup_rate(ptraj)
        row["exponent_fit"] = rep.exponent_fit
        _write_record(cfg, outdir, files, 0.0 if deterministic else None)
    except (ConfigError, NumericalFailure, physical.SolverError,
            diagnostics.DiagnosticsError) as exc:
        row["status"] = f"failed: {exc}"
    return row


def cmd_sweep(cfg, outdir, workers, deterministic):
    raw = _get(cfg, "sweep", "lambda_grid", str)
    try:
        lams = [float(x) for x in raw.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"[sweep] bad lambda_grid: {raw!r}")
    if not lams:
        raise ConfigError("[sweep] lambda_grid must be nonempty")
    for lam in lams:
        if lam < 0.0:
            raise ConfigError("[sweep] lambda values must be nonnegative")
    snapshot = _config_snapshot(cfg)
    jobs = [
        (lam, snapshot, os.path.join(outdir, f"cell_{i:02d}_lam_{lam:g}"),
         deterministic)
        for i, lam in enumerate(lams)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    summary = os.path.join(outdir, "summary.csv")
    with open(summary, "w") as f:
        f.write("lambda,T_star,omega_fit,exponent_fit,status\n")
        for row in rows:
            f.write(
                f"{row['lambda']:.12e},{row['T_star']:.12e},"
                f"{row['omega_fit']:.12e},{row['exponent_fit']:.12e},"
                f"{row['status']}\n"
            )
    return [summary]


# ------------------------------------------------------------ run record


def _write_record(cfg, outdir, files, wall_time):
    record = {
        "config": _config_snapshot(cfg),
        "version": VERSION,
        "wall_time_seconds": wall_time if wall_time is not None else 0.0,
        "outputs": {os.path.basename(p): _sha256(p) for p in sorted(files)},
    }
    _write_json(os.path.join(outdir, "run_record.json"), record)


def run(command: str, cfg, outdir: str, workers: int,
        deterministic: bool) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    t0 = time.monotonic()
    if command == "profile":
        files = cmd_profile(cfg, outdir)
    elif command == "verify-rhs":
        files = cmd_verify_rhs(cfg, outdir)
    elif command == "verify-coeffs":
        files = cmd_verify_coeffs(cfg, outdir)
    elif command == "evolve":
        files = cmd_evolve(cfg, outdir)
    elif command == "evolve-sim":
        files = cmd_evolve_sim(cfg, outdir)
    elif command == "shoot":
        files = cmd_shoot(cfg, outdir)
    elif command == "spectrum":
        files = cmd_spectrum(cfg, outdir)
    elif command == "check-residual":
        files = cmd_check_residual(cfg, outdir)
    elif command == "sweep":
        files = cmd_sweep(cfg, outdir, workers, deterministic)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown command {command!r}")
    wall = 0.0 if deterministic else time.monotonic() - t0
    _write_record(cfg, outdir, files, wall)
    return files


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="skyrme-blowup",
        description="self-similar blowup laboratory for the radial Skyrme "
                    "field (kernel backend: %s)" % kernels.backend,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="INI config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--deterministic", action="store_true",
                        help="zero out wall times so records are byte-stable")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        outdir = args.out or os.environ.get(OUT_ENV) or os.path.join(
            "runs", args.command
        )
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        run(args.command, cfg, outdir, args.workers, args.deterministic)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, physical.SolverError,
            diagnostics.DiagnosticsError, model.ModelDomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
