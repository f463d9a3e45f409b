"""Command-line driver: ``largesol check-ko | solve | verify | sweep``.

Exit status
-----------
0   success (check-ko: condition satisfied)
1   a solver failed; the report records where
2   a check failed or was violated (check-ko: condition violated)
3   inconclusive (check-ko verdict, or continuation schedule exhausted)
64  malformed configuration or command line; nothing is written
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from . import symmetry as sym
from .config import load_config
from .errors import ConfigError, DomainError, LargeSolError, SolverError
from .field2d import PolarField, continuation_2d, polar_grid
from .grids import radial_grid
from .keller_osserman import INCONCLUSIVE, SATISFIED, VIOLATED, check_bu_condition, check_keller_osserman
from .nonlinearity import split_asymptotic
from .radial import (
    RadialProfile,
    blowup_rate_fit,
    continuation,
    default_grid,
    solve_annulus_radial,
    solve_large_continuation,
    solve_truncated,
    solve_w_transform,
)
from .serialization import (
    make_report,
    read_csv,
    write_field_csv,
    write_json,
    write_profile_csv,
    write_two_column,
)

log = logging.getLogger("largesol")

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64

CROSS_METHOD_TOL = 1e-4
CROSS_METHOD_REGION = 0.95
BLOWUP_EXPONENT_TOL = 0.02
BLOWUP_CONSTANT_TOL = 0.05


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    common.add_argument("--workers", metavar="N", type=int, default=1, help="parallel sweep members")
    common.add_argument(
        "--allow-no-blowup",
        action="store_true",
        help="solve at the fixed level continuation.k when no large solution exists",
    )
    common.add_argument("--seed", metavar="N", type=int, help="override the config seed")
    common.add_argument(
        "--grid-refine", metavar="J", type=int, default=0, help="double n_r and n_theta J times"
    )
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _ArgumentParser(prog="largesol", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("check-ko", parents=[common], help="Keller-Osserman test for the configured g")
    sub.add_parser("solve", parents=[common], help="compute a large solution and write field files")
    v = sub.add_parser("verify", parents=[common], help="run symmetry and barrier checks on field files")
    v.add_argument("fields", nargs="*", help="field CSV files (default: OUT/field.csv and its levels)")
    v.add_argument("--reference", metavar="PATH", help="radial profile U_R for the sandwich check")
    sub.add_parser("sweep", parents=[common], help="run a parameter grid and tabulate results")
    return p


def _resolve_config(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = load_config(args.config, overrides=overrides)
    if args.grid_refine < 0:
        raise ConfigError("--grid-refine must be nonnegative")
    if args.grid_refine:
        f = 2**args.grid_refine
        cfg = cfg.with_overrides(**{"grid.n_r": cfg["grid.n_r"] * f, "grid.n_theta": cfg["grid.n_theta"] * f})
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    return cfg


def _check(name, passed, values=None, tolerances=None, message=None, status=None):
    entry = {
        "name": name,
        "status": status or ("pass" if passed else "fail"),
        "values": values or {},
        "tolerances": tolerances or {},
    }
    if message:
        entry["message"] = message
    return entry


def _skipped(name, reason):
    return _check(name, None, status="skipped", message=reason)


def _finish(out, name, report, started):
    write_json(out / name, report)
    stamps = {"command": report.get("command"), "started": started, "finished": _now()}
    write_json(out / "timestamps.json", stamps)


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _newton_stats(info):
    return {k: info[k] for k in ("iterations", "backtracks", "residual", "converged_by") if k in info}


# ---------------------------------------------------------------------------
# check-ko


def cmd_check_ko(cfg, out, args):
    started = _now()
    nl = cfg.nonlinearity()
    rep = check_keller_osserman(nl, T_max=cfg.get("ko.T_max"), margin=cfg["ko.margin"])
    d = rep.to_dict()
    tol = d.pop("tolerances")
    checks = [_check("keller_osserman", rep.verdict == SATISFIED, d, tol, status=rep.verdict)]
    constants = {"truncated_integral": rep.truncated_integral, "log_exponent": rep.log_exponent}
    if rep.verdict == SATISFIED:
        bu = check_bu_condition(nl)
        checks.append(_check("bu_condition", None, bu.to_dict(), {"plateau_tol": 0.01}, status=bu.verdict))
        constants["bu_sup"] = bu.sup
    out.mkdir(parents=True, exist_ok=True)
    report = make_report("check-ko", cfg.echo(), checks, constants, ["ko_report.json"])
    _finish(out, "ko_report.json", report, started)
    print(f"keller-osserman: {rep.verdict}")
    return {SATISFIED: EXIT_OK, VIOLATED: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[rep.verdict]


# ---------------------------------------------------------------------------
# solve


def _radial_grid_for(cfg, nl, k_max):
    R, r_in, n_r = cfg["geometry.R"], cfg["geometry.r_in"], cfg["grid.n_r"]
    if cfg["grid.grading"] == "uniform":
        return radial_grid(R, n_r, r_in=r_in)
    return default_grid(nl, R, n_r, k_max, r_in=r_in)


def _relative_gap(a: RadialProfile, b: RadialProfile, fraction):
    """max |a - b| / max |b| over b's nodes with r <= fraction * R."""
    mask = b.grid.r <= fraction * b.R
    r = b.grid.r[mask]
    va = a.interpolator()(r) if a.grid is not b.grid else a.u_values[mask]
    vb = b.u_values[mask]
    return float(np.max(np.abs(va - vb)) / np.max(np.abs(vb)))


def _blowup_expectation(nl):
    if nl.family != "power" or nl.params.get("c", 1.0) != 1.0 or nl.params["q"] <= 1.0:
        return None
    q = nl.params["q"]
    return 2.0 / (q - 1.0), (2.0 * (q + 1.0) / (q - 1.0) ** 2) ** (1.0 / (q - 1.0))


def _fit_check(prof, nl, window):
    try:
        fit = blowup_rate_fit(prof, window=window)
    except DomainError as exc:
        return _skipped("blowup_rate", str(exc)), None
    values = {
        "exponent": fit.exponent,
        "constant": fit.constant,
        "residual": fit.residual,
        "poor_fit": fit.poor_fit,
        "n_points": fit.n_points,
        "d_range": list(fit.d_range),
    }
    expect = _blowup_expectation(nl)
    tols = {"window": window, "exponent_relative": BLOWUP_EXPONENT_TOL, "constant_relative": BLOWUP_CONSTANT_TOL}
    if expect is None:
        return _check("blowup_rate", None, values, tols, status="measured"), fit
    beta, C = expect
    values.update(expected_exponent=beta, expected_constant=C)
    ok = abs(fit.exponent - beta) <= BLOWUP_EXPONENT_TOL * beta and abs(fit.constant - C) <= BLOWUP_CONSTANT_TOL * C
    return _check("blowup_rate", ok, values, tols), fit


def _continuation_check(name, prof):
    flags = prof.info.get("flags", {})
    status = "pass" if flags.get("converged") else ("fail" if flags.get("unbounded_growth") else "inconclusive")
    levels = prof.info.get("levels", [])
    values = {"flags": flags, "k_final": prof.k_level, "levels": len(levels)}
    if levels:
        values["final_interior_change"] = levels[-1].get("interior_change")
        values["max_newton_iterations"] = max(r.get("iterations", 0) for r in levels)
        values["max_residual"] = max(r.get("residual", 0.0) for r in levels)
    return _check(name, None, values, {"stop_tol": prof.info.get("stop_tol")}, status=status)


def _solve_radial(cfg, nl, fixed_k, out):
    R, r_in, N = cfg["geometry.R"], cfg["geometry.r_in"], cfg["problem.N"]
    sched = cfg["continuation.schedule"]
    stop_tol = cfg["continuation.stop_tol"]
    checks, constants, files = [], {}, []
    inner = cfg["geometry.inner_mean"] if cfg.is_annulus else 0.0
    if fixed_k:
        k = cfg["continuation.k"]
        grid = _radial_grid_for(cfg, nl, k)
        prof = solve_truncated(nl, R, N, k, grid=grid, r_in=r_in, inner_value=inner)
        write_profile_csv(out / "profile_truncated.csv", prof)
        files.append("profile_truncated.csv")
        checks.append(_check("truncated_solve", True, _newton_stats(prof.info), {"newton_tol": 1e-12}))
        constants["u_min"] = float(prof.u_values.min())
        return checks, constants, files
    grid = _radial_grid_for(cfg, nl, max(sched))
    if cfg.is_annulus:
        prof = solve_annulus_radial(nl, r_in, R, N, inner, k_schedule=sched, stop_tol=stop_tol, grid=grid)
        write_profile_csv(out / "profile_annulus.csv", prof)
        files.append("profile_annulus.csv")
        checks.append(_continuation_check("continuation", prof))
        mono = sym.monotonicity_check(prof)
        checks.append(_check("monotonicity", mono.passed, mono.details["monotonicity"], {"tol": mono.details["monotonicity"]["tol"]}))
        return checks, constants, files
    methods = cfg["solver.methods"]
    cont = None
    if "continuation" in methods:
        cont = solve_large_continuation(nl, R, N, sched, stop_tol=stop_tol, grid=grid)
        write_profile_csv(out / "profile_continuation.csv", cont)
        files.append("profile_continuation.csv")
        checks.append(_continuation_check("continuation", cont))
        constants["u_center_continuation"] = float(cont.u_values[0])
        fc, fit = _fit_check(cont, nl, cfg["fit.window"])
        checks.append(fc)
        if fit is not None:
            constants["blowup_exponent"] = fit.exponent
            constants["blowup_constant"] = fit.constant
    if "w_transform" in methods:
        try:
            wp = solve_w_transform(nl, R, N, grid=grid, fallback_profile=cont)
        except (SolverError, DomainError) as exc:
            checks.append(_check("w_transform", False, message=str(exc), status="error"))
            wp = None
        if wp is not None:
            write_profile_csv(out / "profile_w_transform.csv", wp)
            files.append("profile_w_transform.csv")
            info = {k: wp.info[k] for k in ("scheme", "m", "r_star") if k in wp.info}
            info.update(_newton_stats(wp.info))
            checks.append(_check("w_transform", True, info, {"newton_tol": 1e-12}))
            constants["u_center_w_transform"] = float(wp.u_values[0])
            if cont is not None:
                gap = _relative_gap(wp, cont, CROSS_METHOD_REGION)
                constants["cross_method_gap"] = gap
                checks.append(
                    _check(
                        "cross_method_gap",
                        gap <= CROSS_METHOD_TOL,
                        {"gap": gap, "region": CROSS_METHOD_REGION},
                        {"max_relative_gap": CROSS_METHOD_TOL},
                    )
                )
    return checks, constants, files


def _polar_grid_for(cfg, nl, k_max):
    R, r_in = cfg["geometry.R"], cfg["geometry.r_in"]
    n_r, n_t = cfg["grid.n_r"], cfg["grid.n_theta"]
    if cfg["grid.grading"] == "uniform":
        return polar_grid(R, n_r, n_t, r_in=r_in)
    return polar_grid(R, n_r, n_t, r_in=r_in, nl=nl, k_max=k_max)


def _solve_polar(cfg, nl, fixed_k, out):
    sched = [cfg["continuation.k"]] if fixed_k else cfg["continuation.schedule"]
    grid = _polar_grid_for(cfg, nl, max(sched))
    inner = cfg.inner_data(grid.theta_nodes) if cfg.is_annulus else None
    init, seed, amp = cfg["solver.init"], cfg["seed"], cfg["solver.amplitude"]
    checks, constants, files = [], {}, []
    levels = continuation_2d(nl, grid, sched, inner_data=inner, init=init, seed=seed, amplitude=amp)
    for j, f in enumerate(levels):
        name = f"field_level{j}.csv"
        write_field_csv(out / name, f)
        files.append(name)
    write_field_csv(out / "field.csv", levels[-1])
    files.append("field.csv")
    top = levels[-1]
    stats = [_newton_stats(f.info) for f in levels]
    checks.append(
        _check(
            "newton",
            True,
            {"k": [f.boundary_k for f in levels], "per_level": stats},
            {"newton_tol": 1e-12},
        )
    )
    constants["u_min"] = float(top.values.min())
    constants["k_top"] = top.boundary_k
    if not cfg.is_annulus and not fixed_k:
        try:
            split = split_asymptotic(nl, cfg.get("nonlinearity.M"))
            U, _ = continuation(split.g_inf, grid.radial, 2, sched, stop_tol=0.0)
        except (DomainError, SolverError) as exc:
            checks.append(_skipped("reference_profile", f"no U_R reference: {exc}"))
        else:
            write_profile_csv(out / "profile_U_R.csv", U)
            files.append("profile_U_R.csv")
            constants["M"] = split.M
    return checks, constants, files


def _ko_verdict(cfg, nl):
    """KO verdict for solve and sweep; "undefined" when g <= 0 on the tail (e.g. g ≡ 0)."""
    try:
        ko = check_keller_osserman(nl, T_max=cfg.get("ko.T_max"), margin=cfg["ko.margin"])
    except DomainError as exc:
        return "undefined", {"verdict": "undefined", "message": str(exc)}
    return ko.verdict, {"verdict": ko.verdict, "log_exponent": ko.log_exponent}


def cmd_solve(cfg, out, args):
    started = _now()
    nl = cfg.nonlinearity()
    verdict, values = _ko_verdict(cfg, nl)
    fixed_k = verdict != SATISFIED
    out.mkdir(parents=True, exist_ok=True)
    checks = [_check("keller_osserman", None, values, {"margin": cfg["ko.margin"]}, status=verdict)]
    if fixed_k and not args.allow_no_blowup:
        msg = f"Keller-Osserman {verdict}: no large solution to compute; pass --allow-no-blowup to solve at continuation.k"
        report = make_report("solve", cfg.echo(), checks, {}, ["solve_report.json"], {"error": msg})
        _finish(out, "solve_report.json", report, started)
        print(msg, file=sys.stderr)
        return EXIT_FAIL
    runner = _solve_polar if cfg["solver.field"] == "polar" else _solve_radial
    extra = {"mode": "fixed_k" if fixed_k else "large_solution"}
    code = EXIT_OK
    try:
        more, constants, files = runner(cfg, nl, fixed_k, out)
    except (SolverError, DomainError) as exc:
        more, constants, files = [_check("solver", False, message=str(exc), status="error")], {}, []
        extra["error"] = str(exc)
        code = EXIT_SOLVER
    checks += more
    statuses = {c["status"] for c in more}
    if code == EXIT_OK:
        if "fail" in statuses or "error" in statuses:
            code = EXIT_FAIL
        elif "inconclusive" in statuses:
            code = EXIT_INCONCLUSIVE
            extra["inconclusive"] = True
    report = make_report("solve", cfg.echo(), checks, constants, files + ["solve_report.json"], extra)
    _finish(out, "solve_report.json", report, started)
    print(f"solve: {'ok' if code == 0 else 'exit ' + str(code)}; {len(files)} files written to {out}")
    return code


# ---------------------------------------------------------------------------
# verify

DISK_CHECKS = ("angular_variation", "moving_plane", "monotonicity", "sandwich", "radial_blowup")
ANNULUS_CHECKS = ("monotonicity", "gnn_hypothesis", "tangential_bound", "second_tangential_bound", "radial_blowup")
POLAR_ONLY = ("angular_variation", "moving_plane", "gnn_hypothesis", "sandwich", "tangential_bound",
              "second_tangential_bound", "radial_blowup")


def _diag_entry(rep):
    d = rep.to_dict()
    return _check(d["name"], d["passed"], {"constants": d["constants"], "details": d["details"],
                                          "violations": d["violations"][:20]}, d["tolerances"])


def _run_check(name, cfg, f, levels, reference, nl):
    g = f.grid
    M = cfg.get("nonlinearity.M", nl.b_monotone)
    tol = cfg["checks.tol"]
    if name == "angular_variation":
        rep = sym.angular_variation(f)
        disc = cfg.get("checks.disc_error")
        vtol = cfg.get("checks.variation_tol")
        if vtol is None:
            interior = f.values[g.r_nodes <= sym.EXCLUDE_FRACTION * g.R]
            vtol = 5.0 * disc if disc is not None else 1e-8 * float(np.max(np.abs(interior)))
        ok = rep.sup_variation <= vtol
        return _check(name, ok, {"sup_variation": rep.sup_variation}, {"variation_tol": vtol})
    if name == "moving_plane":
        rep = sym.moving_plane_check(f, disc_error=cfg.get("checks.disc_error"))
        d = rep.details["moving_plane"]
        vals = {k: v for k, v in d.items() if k not in ("tol_refl", "derivative_tol", "lambda_samples")}
        vals["violations"] = rep.to_dict()["moving_plane_violations"][:20]
        return _check(name, rep.passed, vals, {"tol_refl": d["tol_refl"], "derivative_tol": d["derivative_tol"]})
    if name == "monotonicity":
        rep = sym.monotonicity_check(f)
        d = rep.details["monotonicity"]
        return _check(name, rep.passed, d, {"tol": d["tol"]})
    if name == "gnn_hypothesis":
        rep = sym.gnn_hypothesis_check(f, threshold=cfg["checks.rho_threshold"])
        d = rep.details["gnn_hypothesis"]
        return _check(name, rep.passed, d, {"threshold": d["threshold"]})
    if name == "sandwich":
        if g.r_in > 0.0:
            return _skipped(name, "sandwich bound applies to disk fields")
        if reference is None:
            return _check(name, False, status="error",
                          message="sandwich needs the radial reference U_R: pass --reference or keep profile_U_R.csv beside the field")
        split = split_asymptotic(nl, cfg.get("nonlinearity.M"))
        return _diag_entry(dg.sandwich_check(f, reference, split))
    if name in ("tangential_bound", "second_tangential_bound"):
        if g.r_in == 0.0:
            return _skipped(name, "tangential bounds apply to annulus fields")
        if name == "tangential_bound":
            return _diag_entry(dg.tangential_bound_check(f, M, cfg.get("checks.r0"), tol=tol))
        return _diag_entry(dg.second_tangential_bound_check(f, M, cfg.get("checks.r0"), tol=tol,
                                                            two_sided=cfg["checks.two_sided"]))
    if name == "radial_blowup":
        if len(levels) < 3:
            return _skipped(name, f"needs at least 3 continuation levels, got {len(levels)}")
        return _diag_entry(dg.radial_blowup_check(levels, probe=cfg["checks.probe"]))
    raise ConfigError(f"unknown check {name!r}")


def _default_fields(out):
    main = out / "field.csv"
    if not main.exists():
        return []
    levels = sorted(out.glob("field_level*.csv"), key=lambda p: int(p.stem[len("field_level"):]))
    return [main] + levels


def cmd_verify(cfg, out, args):
    started = _now()
    nl = cfg.nonlinearity()
    paths = [Path(p) for p in args.fields] or _default_fields(out)
    if not paths:
        print(f"verify: no field files given and none found in {out}", file=sys.stderr)
        return EXIT_FAIL
    loaded = [read_csv(p, N=cfg["problem.N"]) for p in paths]
    main = loaded[0]
    levels = sorted([x for x in loaded[1:] if isinstance(x, PolarField)], key=lambda f: f.boundary_k)
    ref_path = Path(args.reference) if args.reference else paths[0].parent / "profile_U_R.csv"
    reference = read_csv(ref_path, N=2) if ref_path.exists() else None
    if reference is not None and not isinstance(reference, RadialProfile):
        raise DomainError(f"{ref_path}: reference must be a radial profile")
    annulus = main.grid.r_in > 0.0
    names = cfg["checks.run"] or list(ANNULUS_CHECKS if annulus else DISK_CHECKS)
    checks = []
    for name in names:
        if isinstance(main, RadialProfile):
            if name in POLAR_ONLY:
                checks.append(_skipped(name, "needs a two-dimensional field"))
                continue
            rep = sym.monotonicity_check(main)
            d = rep.details["monotonicity"]
            checks.append(_check(name, rep.passed, d, {"tol": d["tol"]}))
            continue
        try:
            checks.append(_run_check(name, cfg, main, levels, reference, nl))
        except (DomainError, SolverError) as exc:
            checks.append(_check(name, False, message=str(exc), status="error"))
    constants = {}
    for c in checks:
        cons = c["values"].get("constants") if isinstance(c["values"], dict) else None
        if cons:
            constants.update({k: v for k, v in cons.items() if k in ("K0", "L_star", "L_tilde_star", "C_boundary", "r0")})
    failed = [c["name"] for c in checks if c["status"] in ("fail", "error")]
    out.mkdir(parents=True, exist_ok=True)
    extra = {"inputs": [p.name for p in paths], "passed": not failed}
    report = make_report("verify", cfg.echo(), checks, constants, ["verify_report.json"], extra)
    _finish(out, "verify_report.json", report, started)
    for c in checks:
        print(f"{c['name']}: {c['status']}")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# sweep

TABLE_COLUMNS = ["index", "param", "value", "status", "ko_verdict", "exponent", "constant",
                 "fit_residual", "u_center", "violations", "rho_final", "message"]


def _sweep_member(index, values, allow_no_blowup):
    """Run one sweep member; never raises.  Returns (row, plot series)."""
    from .config import build_config

    row = {c: "" for c in TABLE_COLUMNS}
    row["index"] = index
    series = {}
    try:
        cfg = build_config(values)
        nl = cfg.nonlinearity()
        verdict, _ = _ko_verdict(cfg, nl)
        row["ko_verdict"] = verdict
        fixed_k = verdict != SATISFIED
        if fixed_k and not allow_no_blowup:
            row["status"] = "failed"
            row["message"] = f"keller-osserman {verdict}"
            return row, series
        if cfg["solver.field"] == "radial":
            R, N = cfg["geometry.R"], cfg["problem.N"]
            sched = [cfg["continuation.k"]] if fixed_k else cfg["continuation.schedule"]
            grid = _radial_grid_for(cfg, nl, max(sched))
            if cfg.is_annulus:
                prof = solve_annulus_radial(nl, cfg["geometry.r_in"], R, N, cfg["geometry.inner_mean"],
                                            k_schedule=sched, stop_tol=cfg["continuation.stop_tol"], grid=grid)
            elif fixed_k:
                prof = solve_truncated(nl, R, N, sched[0], grid=grid)
            else:
                prof = solve_large_continuation(nl, R, N, sched, stop_tol=cfg["continuation.stop_tol"], grid=grid)
            row["u_center"] = float(prof.u_values[0])
            series["r_u"] = (prof.grid.r, prof.u_values)
            if not fixed_k:
                try:
                    fit = blowup_rate_fit(prof, window=cfg["fit.window"])
                    row.update(exponent=fit.exponent, constant=fit.constant, fit_residual=fit.residual)
                except DomainError as exc:
                    row["message"] = str(exc)
            flags = prof.info.get("flags", {})
            row["status"] = "ok" if fixed_k or flags.get("converged") else "inconclusive"
        else:
            sched = [cfg["continuation.k"]] if fixed_k else cfg["continuation.schedule"]
            grid = _polar_grid_for(cfg, nl, max(sched))
            inner = cfg.inner_data(grid.theta_nodes) if cfg.is_annulus else None
            f = continuation_2d(nl, grid, sched, inner_data=inner, init=cfg["solver.init"],
                                seed=cfg["seed"], amplitude=cfg["solver.amplitude"])[-1]
            series["r_u"] = (grid.r_nodes, f.values.mean(axis=1))
            row["u_center"] = float(f.values[0].mean())
            if cfg.is_annulus:
                rep = sym.gnn_hypothesis_check(f, threshold=cfg["checks.rho_threshold"])
                d = rep.details["gnn_hypothesis"]
                series["r_rho"] = (d["r"], d["rho"])
                row["rho_final"] = d["rho_final"]
            else:
                rep = sym.moving_plane_check(f, disc_error=cfg.get("checks.disc_error"))
                d = rep.details["moving_plane"]
                counts = np.add(d["violations_per_lambda_plus"], d["violations_per_lambda_minus"])
                series["lambda_violations"] = (d["lambda_samples"], counts)
                row["violations"] = d["violation_count"]
            row["status"] = "ok"
    except (LargeSolError, ValueError, ArithmeticError) as exc:
        row["status"] = "failed"
        row["message"] = f"{type(exc).__name__}: {exc}"
    return row, series


def _fmt_cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def cmd_sweep(cfg, out, args):
    started = _now()
    param = cfg.get("sweep.param")
    values = cfg["sweep.values"]
    if values and param is None:
        raise ConfigError("sweep.values given without sweep.param")
    base = {k: v for k, v in cfg.values.items() if v is not None and not k.startswith("sweep.")}
    members = []
    for v in values:
        m = dict(base)
        m[param] = v
        members.append(m)
    out.mkdir(parents=True, exist_ok=True)
    if args.workers > 1 and len(members) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            futures = [ex.submit(_sweep_member, i, m, args.allow_no_blowup) for i, m in enumerate(members)]
            results = [fu.result() for fu in futures]
    else:
        results = [_sweep_member(i, m, args.allow_no_blowup) for i, m in enumerate(members)]
    files = ["sweep_table.csv", "sweep_report.json"]
    with open(out / "sweep_table.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for (row, series), v in zip(results, values):
            row["param"], row["value"] = param, v
            w.writerow([_fmt_cell(row[c]) for c in TABLE_COLUMNS])
            headers = {"r_u": "r u", "r_rho": "r rho", "lambda_violations": "lambda violations"}
            for key, (x, y) in sorted(series.items()):
                name = f"sweep{row['index']}_{key}.dat"
                write_two_column(out / name, x, y, headers[key])
                files.append(name)
    rows = [r for r, _ in results]
    checks = [
        _check(f"member_{r['index']}", r["status"] == "ok", {k: r[k] for k in TABLE_COLUMNS},
               {"fit_window": cfg["fit.window"], "stop_tol": cfg["continuation.stop_tol"]},
               status=None if r["status"] in ("ok", "failed") else r["status"])
        for r in rows
    ]
    n_failed = sum(r["status"] == "failed" for r in rows)
    report = make_report("sweep", cfg.echo(), checks, {"members": len(rows), "failed": n_failed}, files)
    _finish(out, "sweep_report.json", report, started)
    print(f"sweep: {len(rows)} members, {n_failed} failed")
    return EXIT_OK


COMMANDS = {"check-ko": cmd_check_ko, "solve": cmd_solve, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"largesol: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        print(f"largesol: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"largesol: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
