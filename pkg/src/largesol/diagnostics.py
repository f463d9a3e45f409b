"""Quantitative boundary estimates: sandwich bounds, tangential decay, radial blow-up.

Barriers
--------
φ(r) = (R^2 - r^2) / (2N) solves -Δφ = 1 with φ(R) = 0, and

    P(r) = (r^{2-N} - R^{2-N}) / (r_0^{2-N} - R^{2-N})   (N > 2),
    P(r) = log(r/R) / log(r_0/R)                         (N = 2)

is harmonic with P(r_0) = 1, P(R) = 0.  Tangential differences of a solution
satisfy a linear equation with nonnegative zeroth-order coefficient wherever
u >= M, so the maximum principle bounds them by their size on r = r_0 times P.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .field2d import PolarField, gradient_decomposition, theta_second_difference
from .grids import RadialGrid, radial_grid
from .radial import RadialProfile, continuation

DEFAULT_TOL = 0.02


@dataclass(frozen=True)
class Barrier:
    R: float
    N: int
    r0: float

    def __post_init__(self):
        if not 0.0 < self.r0 < self.R:
            raise DomainError("need 0 < r0 < R")

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        # factored form keeps relative accuracy next to R
        return (self.R - r) * (self.R + r) / (2.0 * self.N)

    def P(self, r):
        r = np.asarray(r, dtype=float)
        if self.N == 2:
            return np.log(r / self.R) / math.log(self.r0 / self.R)
        e = 2.0 - self.N
        return (r**e - self.R**e) / (self.r0**e - self.R**e)

    def discrete_residuals(self, n_r):
        """max |Δ_h φ + 1| on a ball grid and max |Δ_h P| on the (r0, R) annulus grid."""
        ball = radial_grid(self.R, n_r)
        res_phi = ball.apply_laplacian(self.phi(ball.r), self.N, 0.0) + 1.0
        ann = radial_grid(self.R, n_r, r_in=self.r0)
        res_p = ann.apply_laplacian(self.P(ann.r), self.N, 0.0, 1.0)
        return float(np.max(np.abs(res_phi))), float(np.max(np.abs(res_p)))


@dataclass
class DiagnosticReport:
    name: str
    passed: bool
    constants: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "constants": self.constants,
            "tolerances": self.tolerances,
            "details": self.details,
            "violation_count": len(self.violations),
            "violations": self.violations[:200],
        }


def _on_same_nodes(U, f):
    return U.grid.n == f.grid.n_r and np.array_equal(U.grid.r, f.grid.r_nodes)


def sandwich_check(f: PolarField, U_R: RadialProfile, split, tol=None, k0=None):
    """U_R - K0 φ - tol <= u <= U_R + K0 φ + tol at every node.

    ``U_R`` is the radial solution for g_inf at the same boundary level.  K0 is
    sup |g_tilde| over [min(min u, a_convex), M] unless given.
    """
    if not math.isclose(U_R.k_level, f.boundary_k, rel_tol=1e-12):
        raise DomainError(f"k-levels differ: U_R at {U_R.k_level}, field at {f.boundary_k}")
    if f.grid.r_in != 0.0:
        raise DomainError("sandwich_check is stated on the disk")
    base = split.base
    lo = min(float(f.values.min()), base.a_convex)
    K0 = split.k0(lo) if k0 is None else float(k0)
    r = f.grid.r_nodes
    if _on_same_nodes(U_R, f):
        U = U_R.u_values
        mode = "same grid"
    else:
        U = U_R.interpolator()(r)
        mode = "interpolated"
    bar = Barrier(f.grid.R, 2, 0.5 * f.grid.R)
    phi = bar.phi(r)
    if tol is None:
        # identical stencils make the discrete comparison exact up to solver round-off
        tol_n = 1e-9 * (1.0 + np.abs(U)) if mode == "same grid" else 1e-5 * (1.0 + np.abs(U))
    else:
        tol_n = np.full(r.shape, float(tol))
    upper = (U + K0 * phi + tol_n)[:, None]
    lower = (U - K0 * phi - tol_n)[:, None]
    over = f.values - upper
    under = lower - f.values
    worst = float(max(over.max(), under.max()))
    bad = np.argwhere((over > 0) | (under > 0))
    return DiagnosticReport(
        "sandwich",
        passed=bad.size == 0,
        constants={"K0": K0, "M": split.M, "K0_range": [lo, split.M]},
        tolerances={"tol_max": float(np.max(tol_n)), "mode": mode},
        details={"max_deficit": worst, "max_abs_u_minus_U": float(np.max(np.abs(f.values - U[:, None])))},
        violations=[[int(i), int(j)] for i, j in bad[:200]],
    )


def select_r0(f: PolarField, M, r0=None):
    """Smallest ring with min_θ u >= M, starting from r0 if given.  Returns (index, note)."""
    r = f.grid.r_nodes
    mins = f.values.min(axis=1)
    start = 0 if r0 is None else int(np.searchsorted(r, r0 - 1e-14 * f.grid.R))
    ok = np.nonzero(mins[start:] >= M)[0]
    if ok.size == 0:
        raise DomainError("no ring has min_θ u >= M")
    i0 = start + int(ok[0])
    note = None
    if r0 is not None and i0 != start:
        note = f"r0 advanced from {r[start]:.6g} to {r[i0]:.6g} so that min_θ u >= M"
    return i0, note


def _annulus_setup(f, M, r0):
    if f.grid.r_in <= 0.0:
        raise DomainError("tangential bounds are checked on annulus fields")
    i0, note = select_r0(f, M, r0)
    r = f.grid.r_nodes
    bar = Barrier(f.grid.R, 2, float(r[i0]))
    return i0, note, bar


def tangential_bound_check(f: PolarField, M, r0=None, tol=DEFAULT_TOL, band=0.1):
    """|∂u/∂θ| <= L* P(r) (1 + tol) for r >= r0, with L* = max_θ |∂u/∂θ| at r0.

    Also reports C = max |∂u/∂θ| / (R - r) on the outer ``band`` fraction.
    """
    i0, note, bar = _annulus_setup(f, M, r0)
    r = f.grid.r_nodes
    _, tang = gradient_decomposition(f)
    u_th = np.abs(tang * r[:, None])
    L = float(u_th[i0].max())
    P = bar.P(r)[:, None]
    bound = L * P * (1.0 + tol)
    sel = np.arange(r.size) >= i0
    excess = u_th - bound
    bad = np.argwhere(sel[:, None] & (excess > 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(P[sel] > 0, u_th[sel] / (L * P[sel]), 0.0) if L > 0 else np.zeros_like(u_th[sel])
    outer = r >= (1.0 - band) * f.grid.R
    C = float(np.max(u_th[outer].max(axis=1) / (f.grid.R - r[outer]))) if np.any(outer) else math.nan
    details = {"max_ratio": float(ratio.max()), "rings_checked": int(sel.sum())}
    if note:
        details["r0_note"] = note
    return DiagnosticReport(
        "tangential_bound",
        passed=bad.size == 0,
        constants={"L_star": L, "r0": bar.r0, "C_boundary": C},
        tolerances={"relative": tol},
        details=details,
        violations=[[int(i), int(j)] for i, j in bad[:200]],
    )


def second_tangential_bound_check(f: PolarField, M, r0=None, tol=DEFAULT_TOL, two_sided=False):
    """One-sided u_θθ <= L̃* P(r) (1 + tol) for r >= r0, L̃* = max_θ u_θθ at r0.

    ``two_sided=True`` checks |u_θθ| against the same bound.  Only the upper
    bound is a theorem; the two-sided mode exists as a negative control.
    """
    i0, note, bar = _annulus_setup(f, M, r0)
    r = f.grid.r_nodes
    d2 = theta_second_difference(f)
    Lt = float(d2[i0].max())
    P = bar.P(r)[:, None]
    bound = Lt * P * (1.0 + tol)
    lhs = np.abs(d2) if two_sided else d2
    sel = np.arange(r.size) >= i0
    excess = lhs - bound
    bad = np.argwhere(sel[:, None] & (excess > 0))
    scale = max(abs(Lt), 1e-300)
    slack = float(np.max((lhs[sel] - Lt * P[sel]) / scale))
    details = {"max_slack": slack, "max_excess": float(excess[sel].max()), "min_u_thth": float(d2[sel].min())}
    if note:
        details["r0_note"] = note
    return DiagnosticReport(
        "second_tangential_bound_two_sided" if two_sided else "second_tangential_bound",
        passed=bad.size == 0,
        constants={"L_tilde_star": Lt, "r0": bar.r0},
        tolerances={"relative": tol, "two_sided": two_sided},
        details=details,
        violations=[[int(i), int(j)] for i, j in bad[:200]],
    )


def _probe_derivatives(obj, probe):
    if isinstance(obj, PolarField):
        r = obj.grid.r_nodes
        i = int(np.argmin(np.abs(r - probe * obj.grid.R)))
        du_r, _ = gradient_decomposition(obj)
        ring = du_r[i]
        return float(r[i]), float(ring.min()), float(ring.max()), float(obj.boundary_k)
    if isinstance(obj, RadialProfile):
        r = obj.grid.r
        i = int(np.argmin(np.abs(r - probe * obj.R)))
        v = float(obj.du_values[i])
        return float(r[i]), v, v, float(obj.k_level)
    raise TypeError("expected PolarField or RadialProfile")


def radial_blowup_check(levels, probe=0.97, rel_tol=1e-12):
    """Growth of min_θ ∂_r u at the probe ring along a continuation sequence.

    Passes when the minimum radial derivative strictly increases from level
    to level and the non-uniformity (max - min)/min of ∂_r u on the ring does
    not increase.
    """
    if len(levels) < 3:
        raise DomainError("radial_blowup_check needs at least 3 continuation levels")
    rows = [_probe_derivatives(x, probe) for x in levels]
    ks = [row[3] for row in rows]
    mins = np.array([row[1] for row in rows])
    maxs = np.array([row[2] for row in rows])
    with np.errstate(divide="ignore", invalid="ignore"):
        unif = np.where(mins > 0, (maxs - mins) / mins, np.inf)
    incr = np.diff(mins)
    increasing = bool(np.all(incr > rel_tol * np.abs(mins[1:])))
    uniform_ok = bool(np.all(np.diff(unif) <= rel_tol * (1.0 + np.abs(unif[:-1])))) or bool(np.all(unif == 0))
    return DiagnosticReport(
        "radial_blowup",
        passed=increasing and uniform_ok,
        constants={"probe_r": rows[0][0]},
        tolerances={"relative": rel_tol},
        details={
            "k": ks,
            "min_radial_derivative": mins.tolist(),
            "growth_ratios": (mins[1:] / mins[:-1]).tolist(),
            "uniformity_ratio": unif.tolist(),
            "strictly_increasing": increasing,
            "uniformity_nonincreasing": uniform_ok,
            "trend_flag": None if increasing else "non-monotone or saturated trend",
        },
    )


def minimal_comparison_z(split, r0, R, N, inner_min, field=None, n_r=1024, k_schedule=None):
    """The minimal radial solution z for g_inf on r0 < r < R with z(r0) = inner_min.

    With ``field`` given, z is computed on the field's own rings beyond r0 and
    at its boundary level, and u >= z is verified nodewise.  The flux integral
    ∫ s^{N-1} g_inf(z) over the annulus is recorded at every level.
    """
    g_inf = split.g_inf
    if field is not None:
        r = field.grid.r_nodes
        sel = r > r0 * (1.0 + 1e-14)
        grid = RadialGrid(r[sel], R, r0)
        k_top = field.boundary_k
    else:
        grid = radial_grid(R, n_r, r_in=r0)
        sel = None
        k_top = 1e8
    if k_schedule is None:
        k_schedule = [x for x in (10.0**j for j in range(1, 40)) if x < k_top] + [k_top]
    vol = grid.volumes(N)
    integrals = []

    def record(prof):
        integrals.append((prof.k_level, float(np.sum(vol * g_inf.g(prof.u_values)))))

    prof, records = continuation(g_inf, grid, N, k_schedule, stop_tol=0.0, inner_value=inner_min, on_level=record)
    info = dict(prof.info)
    info["levels"] = records
    info["flux_integrals"] = integrals
    if len(integrals) >= 2 and integrals[0][1] > 0:
        info["integral_growth"] = integrals[-1][1] / integrals[0][1]
    if field is not None:
        u = field.values[sel]
        z = prof.u_values[:, None]
        tol = 1e-9 * (1.0 + np.abs(z))
        bad = np.argwhere(u < z - tol)
        info["comparison"] = {
            "passed": bad.size == 0,
            "violations": [[int(i), int(j)] for i, j in bad[:200]],
            "min_gap": float((u - z).min()),
            "interior_min_gap": float((u - z)[:-1].min()) if u.shape[0] > 1 else math.nan,
        }
    return RadialProfile(grid, int(N), prof.u_values, prof.du_values, "annulus", prof.k_level, float(inner_min), None, info)
