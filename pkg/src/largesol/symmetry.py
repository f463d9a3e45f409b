"""Discrete symmetry and monotonicity checks: angular variation, moving planes, ∂_r u > 0."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from .field2d import PolarField, gradient_decomposition
from .radial import RadialProfile

EXCLUDE_FRACTION = 0.98
MAX_RECORDED = 200

FULL_BALL = "full_ball_minus_origin"
OUTER_HALF = "outer_half_annulus"


@dataclass
class SymmetryReport:
    """Results of one or more symmetry checks.

    Violation entries carry positive deficits.  ``verdicts`` maps check names
    to True (pass), False (fail) or "skipped"; ``details`` holds measured
    quantities and the tolerances they were judged against.
    """

    angular_variation_profile: np.ndarray | None = None
    sup_variation: float | None = None
    moving_plane_violations: list = field(default_factory=list)
    monotonicity_violations: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def merge(self, other):
        out = SymmetryReport(
            self.angular_variation_profile if other.angular_variation_profile is None else other.angular_variation_profile,
            self.sup_variation if other.sup_variation is None else other.sup_variation,
            self.moving_plane_violations + other.moving_plane_violations,
            self.monotonicity_violations + other.monotonicity_violations,
            {**self.verdicts, **other.verdicts},
            {**self.details, **other.details},
        )
        return out

    @property
    def passed(self):
        return all(v is True for v in self.verdicts.values() if v != "skipped")

    def to_dict(self):
        d = {"verdicts": dict(self.verdicts), "details": _jsonable(self.details)}
        if self.sup_variation is not None:
            d["sup_variation"] = self.sup_variation
        d["moving_plane_violations"] = [
            {"lambda": lam, "direction": s, "x": list(x), "deficit": dfc}
            for lam, s, x, dfc in self.moving_plane_violations[:MAX_RECORDED]
        ]
        d["monotonicity_violations"] = [
            {"node": list(n), "value": v} for n, v in self.monotonicity_violations[:MAX_RECORDED]
        ]
        return d


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def angular_variation(f: PolarField, exclude=EXCLUDE_FRACTION):
    """Per-ring range max_θ u - min_θ u and its sup over r <= exclude * R."""
    prof = f.ring_range()
    mask = f.grid.r_nodes <= exclude * f.grid.R
    sup = float(prof[mask].max()) if np.any(mask) else 0.0
    return SymmetryReport(
        angular_variation_profile=prof,
        sup_variation=sup,
        details={"angular_variation": {"sup": sup, "exclude_fraction": exclude, "rings": int(mask.sum())}},
    )


def _field_spline(f, r_max):
    """Bicubic spline of u(r, θ) with mirrored rings across the centre and periodic θ padding."""
    g = f.grid
    r = g.r_nodes
    keep = r <= r_max
    r, u = r[keep], f.values[keep]
    nt = g.n_theta
    th = g.theta_nodes
    pad = 3
    th_ext = np.concatenate((th[-pad:] - 2 * np.pi, th, th[:pad] + 2 * np.pi))

    def wrap(a):
        return np.concatenate((a[:, -pad:], a, a[:, :pad]), axis=1)

    if g.r_in == 0.0:
        mirrored = np.roll(u, -nt // 2, axis=1)[::-1]
        r_ext = np.concatenate((-r[::-1], r))
        u_ext = np.vstack((mirrored, u))
    else:
        r_ext = np.concatenate(([g.r_in], r))
        u_ext = np.vstack((np.asarray(f.inner_data)[None, :], u))
    return interpolate.RectBivariateSpline(r_ext, th_ext, wrap(u_ext), kx=3, ky=3)


def _to_polar(x1, x2):
    r = np.hypot(x1, x2)
    th = np.mod(np.arctan2(x2, x1), 2 * np.pi)
    return r, th


def reflection_scan(u_fn, lam, x1, x2, tol):
    """Points of Σ_λ = {x1 > λ} among (x1, x2) where u(2λ - x1, x2) > u(x) + tol.

    Returns (mask, deficit) with deficit = u(x_λ) - u(x) - tol at flagged points.
    """
    sel = x1 > lam
    ux = u_fn(x1[sel], x2[sel])
    ur = u_fn(2 * lam - x1[sel], x2[sel])
    deficit = ur - ux - tol
    mask = np.zeros_like(x1, dtype=bool)
    mask[np.nonzero(sel)[0][deficit > 0]] = True
    full = np.zeros_like(x1)
    full[sel] = deficit
    return mask, full


def moving_plane_check(
    f: PolarField, lambda_samples=None, tol_refl=None, disc_error=None, resolution=None, derivative_tol=None
):
    """Reflection inequalities u(x_λ) <= u(x) + tol_refl on Σ_λ, for planes normal to ±e1.

    Parameters
    ----------
    lambda_samples : array_like, optional
        Plane positions in (0, R); default 32 uniform values in (0.02R, 0.9R).
    tol_refl : float, optional
        Reflection tolerance.  When omitted it is 5 * ``disc_error`` (the grid
        refinement delta); without either it falls back to 1e-9 * max |u|.
    resolution : int, optional
        Cartesian points per diameter; defaults to n_r.

    Notes
    -----
    The ring band r > 0.98R is excluded: it is not resampled, so no
    violation can be reported there.
    """
    g = f.grid
    R = g.R
    if lambda_samples is None:
        lambda_samples = np.linspace(0.02 * R, 0.9 * R, 32)
    lams = np.asarray(lambda_samples, dtype=float)
    # the spline stops at the last interior ring, so samples must stay inside it
    r_cut = min(EXCLUDE_FRACTION * R, float(g.r_nodes[-1]))
    spl = _field_spline(f, float(g.r_nodes[np.searchsorted(g.r_nodes, r_cut)]))
    u_max = float(np.max(np.abs(f.values[g.r_nodes <= r_cut])))
    if tol_refl is None:
        if disc_error is not None:
            tol_refl, source = 5.0 * float(disc_error), "5x discretization error"
        else:
            tol_refl, source = 1e-9 * u_max, "1e-9 max|u| (no discretization error supplied)"
    else:
        source = "given"
    if derivative_tol is None:
        derivative_tol = tol_refl
    n = int(resolution or g.n_r)
    xs = np.linspace(-r_cut, r_cut, n)
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    inside = np.hypot(X1, X2) < r_cut
    x1, x2 = X1[inside], X2[inside]

    def u_fn(a, b):
        r, th = _to_polar(a, b)
        return spl.ev(r, th)

    violations = []
    counts = {}
    worst = 0.0
    for sign in (1.0, -1.0):
        for lam in lams:
            mask, deficit = reflection_scan(lambda a, b: u_fn(sign * a, b), lam, sign * x1, x2, tol_refl)
            c = int(mask.sum())
            counts[(sign, float(lam))] = c
            if c:
                worst = max(worst, float(deficit[mask].max()))
                idx = np.nonzero(mask)[0]
                for j in idx[np.argsort(-deficit[idx])][:10]:
                    violations.append((float(lam), "+e1" if sign > 0 else "-e1", (float(x1[j]), float(x2[j])), float(deficit[j])))
    # ∂u/∂x1 on the half disk x1 > 0 (and -∂u/∂x1 on x1 < 0 for the mirrored direction)
    r, th = _to_polar(x1, x2)
    ur = spl.ev(r, th, dx=1)
    ut = spl.ev(r, th, dy=1)
    dx1 = ur * np.cos(th) - ut * np.sin(th) / np.maximum(r, 1e-300)
    right = (x1 > 0) & (r > 0)
    left = (x1 < 0) & (r > 0)
    bad_right = right & (dx1 < -derivative_tol)
    bad_left = left & (-dx1 < -derivative_tol)
    deriv_viol = int(bad_right.sum() + bad_left.sum())
    n_viol = sum(counts.values())
    return SymmetryReport(
        moving_plane_violations=violations,
        verdicts={"moving_plane": n_viol == 0, "x1_derivative": deriv_viol == 0},
        details={
            "moving_plane": {
                "tol_refl": tol_refl,
                "tol_source": source,
                "lambda_samples": lams.tolist(),
                "violation_count": n_viol,
                "violations_per_lambda_plus": [counts[(1.0, float(l))] for l in lams],
                "violations_per_lambda_minus": [counts[(-1.0, float(l))] for l in lams],
                "worst_deficit": worst,
                "excluded_band": [r_cut, R],
                "cartesian_points": int(x1.size),
                "derivative_violations": deriv_viol,
                "derivative_tol": derivative_tol,
                "min_dx1_on_right_half": float(dx1[right].min()) if np.any(right) else None,
            }
        },
    )


def monotonicity_check(obj, region=None, tol=None):
    """Discrete ∂_r u > -tol on the region.

    ``region`` defaults to the whole ball minus the origin for balls and to the
    outer half r >= (R + r_in)/2 for annuli.  For annuli the minimum derivative
    on the inner half is reported but never judged.
    """
    if isinstance(obj, RadialProfile):
        r = obj.grid.r
        r_in = obj.grid.r_in
        du = obj.du_values[:, None]
        R = obj.R
        scale_u = np.abs(obj.u_values)
    elif isinstance(obj, PolarField):
        r = obj.grid.r_nodes
        r_in = obj.grid.r_in
        du, _ = gradient_decomposition(obj)
        R = obj.grid.R
        scale_u = np.abs(obj.values)
    else:
        raise TypeError("monotonicity_check takes a RadialProfile or a PolarField")
    if region is None:
        region = FULL_BALL if r_in == 0.0 else OUTER_HALF
    if region == FULL_BALL:
        sel = r > 0.0
    elif region == OUTER_HALF:
        sel = r >= 0.5 * (R + r_in)
    else:
        raise ValueError(f"unknown region {region!r}")
    if tol is None:
        tol = 1e-9 * (1.0 + float(np.max(scale_u[sel])))
    bad = np.argwhere((du < -tol) & sel[:, None])
    viol = [((int(i), int(j)), float(du[i, j])) for i, j in bad]
    details = {
        "region": region,
        "tol": tol,
        "min_derivative": float(du[sel].min()),
        "nodes_checked": int(sel.sum() * du.shape[1]),
    }
    if r_in > 0.0 and np.any(~sel):
        details["inner_half_min_derivative"] = float(du[~sel].min())
    return SymmetryReport(
        monotonicity_violations=viol,
        verdicts={"monotonicity": not viol},
        details={"monotonicity": details},
    )


def gnn_hypothesis_check(f: PolarField, band=(0.8, EXCLUDE_FRACTION), last=10, threshold=0.05):
    """Ratio ρ(r) = max_θ |∇_τ u| / min_θ ∂_r u on the rings of the band.

    Passes when ρ does not increase over the last ``last`` rings and ρ at the
    outermost ring of the band (r <= 0.98R) is below ``threshold``.
    """
    g = f.grid
    r = g.r_nodes
    sel = (r > band[0] * g.R) & (r <= band[1] * g.R)
    du_r, du_t = gradient_decomposition(f)
    min_r = du_r[sel].min(axis=1)
    max_t = np.abs(du_t[sel]).max(axis=1)
    hyp_violation = bool(np.any(min_r <= 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(min_r > 0, max_t / min_r, np.inf)
    tail = rho[-last:]
    with np.errstate(invalid="ignore"):
        decreasing = bool(np.all(np.diff(tail) <= 1e-12 * np.abs(tail[:-1]))) if tail.size > 1 else True
    final = float(rho[-1]) if rho.size else math.nan
    ok = (not hyp_violation) and decreasing and final < threshold
    return SymmetryReport(
        verdicts={"gnn_hypothesis": ok},
        details={
            "gnn_hypothesis": {
                "r": r[sel].tolist(),
                "rho": rho.tolist(),
                "rho_final": final,
                "threshold": threshold,
                "decreasing_on_last": last,
                "decreasing": decreasing,
                "radial_derivative_nonpositive": hyp_violation,
            }
        },
    )
