"""Radial large solutions of Δu = g(u) on balls and annuli.

Two independent routes are provided.  Continuation drives a finite boundary
datum k through an increasing schedule and approximates the minimal large
solution as the monotone limit.  The transform route solves the bounded
problem for w = F(u),

    w'' + (N-1)/r w' = b(w) (w'^2 - 1),   w'(0) = 0,   w(R) = 0,

and maps back nodewise.  Their agreement is the discrete face of uniqueness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import interpolate, linalg

from .errors import DomainError, SolverError
from .grids import RadialGrid, radial_grid
from .keller_osserman import ko_satisfied, tail_integral
from .newton import damped_newton
from .transform import FTable, _closed_form

CONTINUATION = "continuation"
W_TRANSFORM = "w_transform"
ANNULUS = "annulus"

DEFAULT_SCHEDULE = tuple(10.0**j for j in range(1, 9))
# relative interior change between levels; truncation error decays like 1/k
STOP_TOL = 1e-5
NEWTON_TOL = 1e-12
# |w'| is held below 1 by this much when evaluating b(w)(w'^2 - 1)
SLOPE_CLAMP = 1e-12


@dataclass(frozen=True)
class RadialProfile:
    """A radial solution sampled at the interior nodes of a RadialGrid.

    ``k_level`` is the outer Dirichlet value (``inf`` for the transform route)
    and ``inner_value`` the Dirichlet value at r_in for annuli.
    """

    grid: RadialGrid = field(repr=False)
    N: int
    u_values: np.ndarray = field(repr=False)
    du_values: np.ndarray = field(repr=False)
    method: str
    k_level: float
    inner_value: float = math.nan
    w_values: np.ndarray | None = field(default=None, repr=False)
    info: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def R(self):
        return self.grid.R

    @property
    def r_nodes(self):
        return self.grid.r

    def interpolator(self):
        """Cubic spline of u over the nodes (no extrapolation past the end nodes)."""
        return interpolate.CubicSpline(self.grid.r, self.u_values)

    def interior_mask(self, fraction):
        return self.grid.r <= fraction * self.grid.R


def _ab_matrix(lower, diag, upper):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return ab


def _banded_solve(ab, F):
    return linalg.solve_banded((1, 1), ab, F, check_finite=False)


def _fixed_k_system(nl, grid, N, k, inner):
    lo, di, up = grid.laplacian(N)

    def residual(u):
        Lu = grid.apply_laplacian(u, N, k, inner)
        F = Lu - nl.g(u)
        return F, _ab_matrix(lo, di - nl.dg(u), up)

    def scale(u):
        nb = np.abs(di * u)
        nb[1:] += np.abs(lo[1:] * u[:-1])
        nb[:-1] += np.abs(up[:-1] * u[1:])
        nb[-1] += abs(up[-1] * k)
        nb[0] += abs(lo[0] * inner)
        return 1.0 + np.abs(nl.g(u)) + nb

    return residual, scale


def _solve_fixed(nl, grid, N, k, u0, inner=0.0, max_iter=200):
    residual, scale = _fixed_k_system(nl, grid, N, k, inner)
    u, info = damped_newton(residual, _banded_solve, u0, scale=scale, tol=NEWTON_TOL, max_iter=max_iter)
    F, _ = residual(u)
    info["residual_abs"] = float(np.max(np.abs(F)))
    info["residual_tol"] = 1e-10 * (1.0 + abs(float(nl.g(k))))
    info.pop("history", None)
    return u, info


def _profile(grid, N, u, k, method, inner=math.nan, info=None, w=None):
    inner_d = None if grid.is_disk else inner
    du = grid.derivative(u, k, inner_d) if math.isfinite(k) else None
    return RadialProfile(grid, N, u, du, method, float(k), float(inner), w, info or {})


def grading_ratio(n_r):
    """Cell growth factor 1 + 20/n_r: the layer resolution refines with n_r, keeping second order."""
    return 1.0 + 20.0 / n_r


def _layer_width(nl, k):
    """Distance over which the 1D large solution falls from ∞ to k (nan if undefined)."""
    if not ko_satisfied(nl) or k <= nl.a_convex:
        return math.nan
    try:
        return float(tail_integral(nl, k))
    except (OverflowError, ValueError):
        return math.nan


def default_grid(nl, R, n_r, k_max, r_in=0.0, ratio=None):
    """Grid graded toward R down to a quarter of the boundary-layer width at k_max."""
    if ratio is None:
        ratio = grading_ratio(n_r)
    if not ko_satisfied(nl) or not math.isfinite(k_max):
        return radial_grid(R, n_r, r_in=r_in)
    k_max = min(k_max, nl.overflow_level(1e300))
    width = _layer_width(nl, max(k_max, nl.a_convex + 1.0))
    if not (math.isfinite(width) and width > 0.0):
        return radial_grid(R, n_r, r_in=r_in)
    # the local 1D layer scales like the distance; floor keeps spacing above round-off of R
    h_min = min(max(0.25 * width * R, 1e-12 * R), (R - r_in) / n_r)
    return radial_grid(R, n_r, r_in=r_in, ratio=ratio, h_min=h_min)


def solve_truncated(nl, R, N, k, n_r=256, grid=None, u0=None, r_in=0.0, inner_value=0.0):
    """Radial solution with finite boundary datum u(R) = k.

    Parameters
    ----------
    nl : Nonlinearity
    R : float
        Outer radius.
    N : int
        Space dimension (>= 2).
    k : float
        Boundary value.
    n_r : int
        Number of interior nodes, used when ``grid`` is not given.
    grid : RadialGrid, optional
    u0 : ndarray, optional
        Initial guess; defaults to the constant k, a supersolution whenever g >= 0.
    r_in, inner_value : float
        Inner radius and Dirichlet value for annuli.

    Returns
    -------
    RadialProfile
        ``info`` carries Newton statistics.

    Raises
    ------
    SolverError
        If Newton fails; the last iterate is attached.
    DomainError
        If g is not finite at k.
    """
    if not math.isfinite(k):
        raise DomainError("solve_truncated needs a finite boundary value")
    if n_r < 64 and grid is None:
        raise DomainError("n_r must be at least 64")
    if not np.isfinite(nl.g(k)):
        raise DomainError(f"g({k}) is not finite")
    if N < 2 or int(N) != N:
        raise DomainError("N must be an integer >= 2")
    grid = grid or radial_grid(R, n_r, r_in=r_in)
    if u0 is None:
        start = max(k, inner_value) if not grid.is_disk else k
        u0 = np.full(grid.n, float(start))
    u, info = _solve_fixed(nl, grid, int(N), float(k), u0, inner_value)
    return _profile(grid, int(N), u, k, ANNULUS if not grid.is_disk else CONTINUATION, inner_value, info)


def _interior_change(u_new, u_old, mask):
    d = np.abs(u_new[mask] - u_old[mask])
    return float(np.max(d / (1.0 + np.abs(u_new[mask]))))


def continuation(
    nl, grid, N, k_schedule, stop_tol=STOP_TOL, inner_value=0.0, interior=0.9, max_bisect=12, on_level=None
):
    """Run the k-schedule on a fixed grid, warm-starting each level.

    Returns the final profile and a list of per-level records.  A level that
    Newton cannot reach from the previous one is approached through geometric
    midpoints.  ``on_level(profile)`` is called after every scheduled level.
    """
    ks = [float(k) for k in k_schedule]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k_schedule must be strictly increasing")
    cap = nl.overflow_level(1e300)
    capped = [k for k in ks if k < cap]
    if len(capped) < len(ks):
        capped.append(cap)
    ks = capped
    mask = grid.r <= interior * grid.R
    if not np.any(mask):
        mask = np.zeros(grid.n, bool)
        mask[0] = True
    records = []
    u_prev, k_prev, prof = None, None, None
    for k in ks:
        targets = [k]
        depth = 0
        while targets:
            kt = targets[-1]
            try:
                if u_prev is None:
                    prof = solve_truncated(nl, grid.R, N, kt, grid=grid, inner_value=inner_value)
                else:
                    # lift the previous level by the boundary jump, keeping the interior
                    prof = solve_truncated(nl, grid.R, N, kt, grid=grid, u0=u_prev, inner_value=inner_value)
            except SolverError:
                if u_prev is None or depth >= max_bisect:
                    raise
                depth += 1
                targets.append(math.sqrt(k_prev * kt))
                continue
            targets.pop()
            if kt != k:
                u_prev, k_prev = prof.u_values, kt
        u = prof.u_values
        rec = {"k": k, "iterations": prof.info["iterations"], "residual": prof.info["residual"], "bisections": depth}
        if u_prev is not None:
            rec["interior_change"] = _interior_change(u, u_prev, mask)
            rec["interior_change_abs"] = float(np.max(np.abs(u[mask] - u_prev[mask])))
            rec["monotone"] = bool(np.all(u >= u_prev - 1e-9 * (1.0 + np.abs(u))))
        records.append(rec)
        if on_level is not None:
            on_level(prof)
        u_prev, k_prev = u, k
        change = rec.get("interior_change")
        if change is not None and change <= stop_tol:
            break
    return prof, records


def _continuation_flags(records, stop_tol):
    changes = [r["interior_change"] for r in records if "interior_change" in r]
    converged = bool(changes) and changes[-1] <= stop_tol
    # growth is judged on absolute changes: relative ones saturate for u ~ k
    changes = [r["interior_change_abs"] for r in records if "interior_change_abs" in r]
    monotone = all(r.get("monotone", True) for r in records)
    unbounded = False
    if not converged and len(changes) >= 2:
        # shrinking changes mean slow convergence; non-shrinking ones mean the interior grows with k
        tail = changes[-3:]
        unbounded = all(b >= a for a, b in zip(tail, tail[1:]))
    return {
        "converged": converged,
        "inconclusive": not converged,
        "unbounded_growth": unbounded,
        "monotone_in_k": monotone,
    }


def solve_large_continuation(
    nl, R, N, k_schedule=DEFAULT_SCHEDULE, n_r=1024, stop_tol=STOP_TOL, grid=None, ratio=None
):
    """Minimal large solution on B_R as the limit of the k-continuation.

    The returned profile's ``info`` holds ``levels`` (per-level records) and
    ``flags``: converged, inconclusive (schedule exhausted), unbounded_growth
    (interior keeps moving with k, as when the Keller-Osserman condition
    fails) and monotone_in_k.
    """
    grid = grid or default_grid(nl, R, n_r, max(k_schedule), ratio=ratio)
    prof, records = continuation(nl, grid, N, k_schedule, stop_tol)
    flags = _continuation_flags(records, stop_tol)
    flags["ko_satisfied"] = bool(ko_satisfied(nl))
    info = dict(prof.info)
    info.update(levels=records, flags=flags, stop_tol=stop_tol, layer_width=_layer_width(nl, prof.k_level))
    return replace(prof, method=CONTINUATION, info=info)


def solve_annulus_radial(
    nl, r_in, R, N, inner_value, n_r=1024, k_schedule=DEFAULT_SCHEDULE, stop_tol=STOP_TOL, grid=None, ratio=None
):
    """Annulus r_in < r < R with u(r_in) = inner_value and blow-up at R."""
    if not 0.0 < r_in < R:
        raise DomainError("need 0 < r_in < R")
    if not math.isfinite(inner_value):
        raise DomainError("inner_value must be finite")
    grid = grid or default_grid(nl, R, n_r, max(k_schedule), r_in=r_in, ratio=ratio)
    prof, records = continuation(nl, grid, N, k_schedule, stop_tol, inner_value=inner_value)
    flags = _continuation_flags(records, stop_tol)
    info = dict(prof.info)
    info.update(levels=records, flags=flags, stop_tol=stop_tol, layer_width=_layer_width(nl, prof.k_level))
    return replace(prof, method=ANNULUS, info=info)


class ClosedFormF:
    """F, its inverse and b for g = c s^q anchored at m = 0."""

    def __init__(self, c, q):
        self.c, self.q, self.m = c, q, 0.0
        self.K = math.sqrt((q + 1.0) / (2.0 * c)) * 2.0 / (q - 1.0)
        self.w_min, self.w_max = 0.0, math.inf

    def F(self, v):
        return self.K * np.asarray(v, dtype=float) ** ((1.0 - self.q) / 2.0)

    def inverse(self, w):
        return (np.asarray(w, dtype=float) / self.K) ** (2.0 / (1.0 - self.q))

    def b_and_db(self, w):
        v = self.inverse(w)
        c, q = self.c, self.q
        b = c * v**q / np.sqrt(2.0 * c * v ** (q + 1.0) / (q + 1.0))
        return b, b * b - c * q * v ** (q - 1.0), v


def f_map(nl, m, w_min=1e-10):
    """Closed form when available, else a tabulated F anchored at m."""
    cf = _closed_form(nl, m)
    if cf is not None:
        return ClosedFormF(*cf)
    return FTable(nl, m, w_min)


def _w_system(fm, grid, N, inner_w=None):
    lo, di, up = grid.laplacian(N)
    x = grid.extended() if not grid.is_disk else np.concatenate(([-grid.r[0]], grid.r, [grid.R]))
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    den = h1 * h2 * (h1 + h2)
    alpha = -(h2**2) / den
    beta = (h2**2 - h1**2) / den
    gamma = h1**2 / den
    if grid.is_disk:
        # mirror node: w(-r_0) = w(r_0)
        beta = beta.copy()
        beta[0] += alpha[0]
        alpha = alpha.copy()
        alpha[0] = 0.0
    w_in = 0.0 if inner_w is None else inner_w

    def slope(w):
        d = beta * w
        d[1:] += alpha[1:] * w[:-1]
        d[:-1] += gamma[:-1] * w[1:]
        d[0] += alpha[0] * w_in
        return d

    def residual(w):
        Lw = grid.apply_laplacian(w, N, 0.0, w_in)
        d = slope(w)
        clamped = np.clip(d, -1.0 + SLOPE_CLAMP, 1.0 - SLOPE_CLAMP)
        factor = clamped * clamped - 1.0
        b, db, _ = fm.b_and_db(w)
        F = Lw - b * factor
        active = (np.abs(d) < 1.0 - SLOPE_CLAMP).astype(float)
        dfac = 2.0 * clamped * active
        diag = di - db * factor - b * dfac * beta
        lower = lo - b * dfac * alpha
        upper = up - b * dfac * gamma
        return F, _ab_matrix(lower, diag, upper)

    def scale(w):
        b, _, _ = fm.b_and_db(w)
        nb = np.abs(di * w)
        nb[1:] += np.abs(lo[1:] * w[:-1])
        nb[:-1] += np.abs(up[:-1] * w[1:])
        return 1.0 + b + nb

    return residual, scale, slope


def _solve_w(fm, grid, N, w0, inner_w=None):
    w_top = fm.w_max if math.isfinite(fm.w_max) else np.inf
    w_bot = max(fm.w_min, 0.0)
    floor = np.nextafter(w_bot, np.inf) if w_bot == 0.0 else w_bot

    def project(w):
        return np.clip(w, floor, w_top)

    residual, scale, slope = _w_system(fm, grid, N, inner_w)
    w, info = damped_newton(residual, _banded_solve, w0, scale=scale, project=project, tol=NEWTON_TOL)
    info.pop("history", None)
    info["at_upper_bound"] = bool(np.any(w >= w_top))
    dw = slope(w)
    # Dirichlet value imposed at R in the residual and the slope stencil
    info["w_outer"] = 0.0
    info["max_abs_slope"] = float(np.max(np.abs(dw)))
    return w, info, dw


def solve_w_transform(nl, R, N, n_r=1024, m_init=None, grid=None, fallback_profile=None):
    """Large solution through the bounded transformed problem.

    H̃ is anchored at m = m_init (default: the monotonicity threshold).  The
    transform is exact for any anchor not above the solution, so m is kept
    fixed; when the solution reaches the anchor (w hits sup F) or Newton
    fails, the matched scheme runs instead: the transform on an outer annulus
    [r*, R] with inner data taken from the continuation profile.

    Returns
    -------
    RadialProfile
        ``w_values`` holds w at the nodes; ``info['scheme']`` is ``ball`` or
        ``matched``; ``info['m']`` the anchor.
    """
    if not ko_satisfied(nl):
        raise DomainError("the transform needs the Keller-Osserman condition")
    m = float(nl.b_monotone if m_init is None else m_init)
    if m < nl.b_monotone:
        raise DomainError("m_init must not lie below the monotonicity threshold")
    grid = grid or radial_grid(R, n_r)
    fm = f_map(nl, m, w_min=1e-3 * float(grid.R - grid.r[-1]))
    # distance-like start: w' = -r/R reaches -1 only at the boundary
    w0 = (grid.R**2 - grid.r**2) / (2.0 * grid.R)
    if math.isfinite(fm.w_max):
        w0 = np.minimum(w0, 0.5 * fm.w_max)
    try:
        w, info, dw = _solve_w(fm, grid, N, w0)
        ok = not info["at_upper_bound"]
    except SolverError as exc:
        info, ok = {"error": str(exc)}, False
    if ok:
        u = fm.inverse(w)
        info.update(scheme="ball", m=m)
        prof = RadialProfile(grid, int(N), u, None, W_TRANSFORM, math.inf, math.nan, w, info)
        return replace(prof, du_values=_du_from_w(fm, w, dw))
    return _matched(nl, grid, N, m, fm, fallback_profile, info)


def _du_from_w(fm, w, dw):
    # u = F^{-1}(w), so u' = w' / F'(u) = -w' sqrt(2 H̃(u))
    b, _, v = fm.b_and_db(w)
    if isinstance(fm, ClosedFormF):
        two_h = 2.0 * fm.c * v ** (fm.q + 1.0) / (fm.q + 1.0)
    else:
        two_h = 2.0 * fm.Htilde(v)
    return -dw * np.sqrt(two_h)


def _matched(nl, grid, N, m, fm, base, failed_info):
    if base is None:
        base = solve_large_continuation(nl, grid.R, N, grid=grid)
    u_base = base.u_values
    above = np.nonzero(u_base >= m + 1e-6 * (1.0 + abs(m)))[0]
    # r*: first node after which the profile stays above the anchor
    start = int(above[0]) if above.size else None
    if start is None or not np.all(u_base[start:] >= m) or start >= grid.n - 8:
        raise SolverError("matched scheme impossible: continuation profile never clears the anchor", info=failed_info)
    r_star = float(base.grid.r[start])
    outer = RadialGrid(grid.r[start + 1 :], grid.R, r_star)
    w_star = float(fm.F(u_base[start]))
    w0 = np.minimum(fm.F(u_base[start + 1 :]), w_star)
    w_out, info, dw = _solve_w(fm, outer, N, w0, inner_w=w_star)
    u = np.concatenate((u_base[: start + 1], fm.inverse(w_out)))
    w = np.concatenate((np.full(start + 1, np.nan), w_out))
    du = base.du_values.copy()
    du[start + 1 :] = _du_from_w(fm, w_out, dw)
    info.update(scheme="matched", m=m, r_star=r_star, ball_attempt=failed_info)
    return RadialProfile(grid, int(N), u, du, W_TRANSFORM, math.inf, math.nan, w, info)


def maximal_solution_bracket(nl, R, N, shrink_schedule=None, n_r=1024, k_schedule=DEFAULT_SCHEDULE, minimal=None):
    """Large solutions on B_{R'} for R' increasing to R, compared on r <= 0.9 R.

    The profiles decrease in R' toward the maximal solution.  The returned gap
    is relative, max |u_{R'} - u_min| / max |u_min| on r <= 0.9 R; the absolute
    value is kept in ``info["bracket"]``.
    """
    if shrink_schedule is None:
        shrink_schedule = [R * (1.0 - 10.0**-j) for j in range(1, 5)]
    rs = [float(x) for x in shrink_schedule]
    if any(b <= a for a, b in zip(rs, rs[1:])) or rs[-1] >= R or rs[0] <= 0:
        raise DomainError("shrink_schedule must increase strictly inside (0, R)")
    if minimal is None:
        minimal = solve_large_continuation(nl, R, N, k_schedule, n_r=n_r)
    base = minimal.grid
    probe = base.r[base.r <= 0.9 * rs[0]]
    u_min_probe = minimal.u_values[: probe.size]
    stages, prev, ordered, above_min = [], None, True, True
    last = None
    for Rp in rs:
        prof = solve_large_continuation(nl, Rp, N, k_schedule, grid=base.scaled(Rp / R))
        vals = prof.interpolator()(probe)
        if prev is not None and np.any(vals > prev + 1e-9 * (1.0 + np.abs(prev))):
            ordered = False
        if np.any(vals < u_min_probe - 1e-9 * (1.0 + np.abs(u_min_probe))):
            above_min = False
        stages.append({"R_prime": Rp, "u_center": float(prof.u_values[0])})
        prev, last = vals, prof
    mask = base.r <= 0.9 * R
    final_vals = last.interpolator()(np.minimum(base.r[mask], last.grid.r[-1]))
    gap_abs = float(np.max(np.abs(final_vals - minimal.u_values[mask])))
    gap = gap_abs / float(np.max(np.abs(minimal.u_values[mask])))
    info = dict(last.info)
    info["bracket"] = {
        "stages": stages,
        "ordered": ordered,
        "minimal_below_maximal": above_min,
        "gap": gap,
        "gap_abs": gap_abs,
    }
    return replace(last, info=info), gap


@dataclass(frozen=True)
class BlowupFit:
    exponent: float
    constant: float
    residual: float
    poor_fit: bool
    n_points: int
    d_range: tuple


def blowup_rate_fit(p, window=0.01, truncation_fraction=1e-3, poor_fit_threshold=0.05):
    """Fit u ~ C (R - r)^(-β) on the band R - r <= window R.

    Nodes where the finite boundary datum is felt are dropped: those closer to
    R than 100 layer widths when the profile records one, else those with u
    above ``truncation_fraction * k``.  The residual is the RMS misfit
    of log u relative to the RMS variation of log u across the band, so a
    straight log-log law gives ~0 and curvature (as for exponential g) shows
    up as a few percent.
    """
    if not 0.0 < window < 0.1:
        raise DomainError("window must lie in (0, 0.1): the fit band is inside (0.9 R, R)")
    d = p.R - p.r_nodes
    u = p.u_values
    sel = (d <= window * p.R) & (u > 0)
    width = p.info.get("layer_width", math.nan)
    if math.isfinite(width):
        sel &= d >= 100.0 * width
    elif math.isfinite(p.k_level):
        sel &= u <= truncation_fraction * p.k_level
    if np.count_nonzero(sel) < 5:
        raise DomainError("fewer than 5 usable nodes in the fit window")
    x, y = np.log(d[sel]), np.log(u[sel])
    slope, icpt = np.polyfit(x, y, 1)
    fit = slope * x + icpt
    spread = float(np.sqrt(np.mean((y - y.mean()) ** 2)))
    resid = float(np.sqrt(np.mean((y - fit) ** 2)) / spread) if spread > 0 else math.inf
    return BlowupFit(
        exponent=float(-slope),
        constant=float(math.exp(icpt)),
        residual=resid,
        poor_fit=resid > poor_fit_threshold,
        n_points=int(np.count_nonzero(sel)),
        d_range=(float(d[sel].min()), float(d[sel].max())),
    )


def profile_residual(p, nl):
    """Scaled nodewise residual of (u' r^{N-1})' = r^{N-1} g(u) for a finite-k profile."""
    if not math.isfinite(p.k_level):
        raise DomainError("residual needs a finite boundary value")
    inner = 0.0 if p.grid.is_disk else p.inner_value
    residual, scale = _fixed_k_system(nl, p.grid, p.N, p.k_level, inner)
    F, _ = residual(p.u_values)
    return np.abs(F) / scale(p.u_values)


def energy_check(p, nl, m, eps=None):
    """Check 0 <= u' <= (1 + eps) sqrt(2 H̃(u)) at nodes with u >= m.

    Returns (passed, worst ratio u'/sqrt(2H̃), number of nodes checked).
    """
    if eps is None:
        eps = 5.0 * 1e-3
    u, du = p.u_values, p.du_values
    sel = u > m
    if not np.any(sel):
        return True, 0.0, 0
    two_h = np.array([2.0 * nl.integral(m, float(s)) for s in u[sel]])
    ratio = du[sel] / np.sqrt(two_h)
    ok = bool(np.all(du[sel] >= -1e-9 * (1.0 + np.abs(du[sel]))) and np.all(ratio <= 1.0 + eps))
    return ok, float(np.max(ratio)), int(np.count_nonzero(sel))
