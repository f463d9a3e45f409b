"""Two-dimensional solves of Δu = g(u) on disks and annuli in polar coordinates.

The radial part of the stencil is the finite-volume operator of
:mod:`largesol.grids` with N = 2 and the angular part is the periodic second
difference scaled by 1/r_i^2.  The stencil is invariant under rotation by
whole nodes, and a θ-independent field sees exactly the 1D radial scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .errors import DomainError, SolverError
from .grids import RadialGrid
from .newton import damped_newton
from .radial import NEWTON_TOL, continuation, default_grid

RADIAL_LIFT = "radial_lift"
CONSTANT = "constant"
PERTURBED = "perturbed"


@dataclass(frozen=True)
class PolarGrid:
    radial: RadialGrid = field(repr=False)
    n_theta: int

    def __post_init__(self):
        if self.n_theta < 16 or self.n_theta % 2:
            raise DomainError("n_theta must be even and at least 16")

    @property
    def r_in(self):
        return self.radial.r_in

    @property
    def R(self):
        return self.radial.R

    @property
    def n_r(self):
        return self.radial.n

    @property
    def r_nodes(self):
        return self.radial.r

    @property
    def theta_nodes(self):
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def dtheta(self):
        return 2.0 * np.pi / self.n_theta

    @property
    def shape(self):
        return (self.n_r, self.n_theta)

    def mesh(self):
        return np.meshgrid(self.r_nodes, self.theta_nodes, indexing="ij")

    def refined(self, nl=None, k_max=None):
        """Both counts doubled, keeping the grading rule."""
        return polar_grid(self.R, 2 * self.n_r, 2 * self.n_theta, r_in=self.r_in, nl=nl, k_max=k_max)


def polar_grid(R, n_r=256, n_theta=128, r_in=0.0, nl=None, k_max=None, ratio=None):
    """Offset polar grid, graded toward R when a nonlinearity and k_max are given."""
    if nl is not None and k_max is not None:
        rg = default_grid(nl, R, n_r, k_max, r_in=r_in, ratio=ratio)
    else:
        from .grids import radial_grid

        rg = radial_grid(R, n_r, r_in=r_in)
    return PolarGrid(rg, int(n_theta))


@dataclass(frozen=True)
class PolarField:
    """u(r_i, θ_j) on a PolarGrid with its Dirichlet data.

    ``outer_data`` / ``inner_data`` are per-θ boundary values; for PDE solves
    the outer one is the constant ``boundary_k``.
    """

    grid: PolarGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    boundary_k: float
    inner_data: np.ndarray | None = field(default=None, repr=False)
    outer_data: np.ndarray | None = field(default=None, repr=False)
    info: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise DomainError(f"values have shape {v.shape}, grid expects {self.grid.shape}")
        object.__setattr__(self, "values", v)
        if self.grid.r_in > 0.0 and self.inner_data is None:
            raise DomainError("annulus fields need inner_data")

    @property
    def outer_values(self):
        if self.outer_data is not None:
            return np.asarray(self.outer_data, dtype=float)
        return np.full(self.grid.n_theta, float(self.boundary_k))

    @classmethod
    def from_function(cls, grid, fn):
        """Sample fn(r, θ) at the nodes and on the boundary circles (synthetic fields)."""
        rr, tt = grid.mesh()
        th = grid.theta_nodes
        outer = np.asarray(fn(np.full_like(th, grid.R), th), dtype=float)
        inner = np.asarray(fn(np.full_like(th, grid.r_in), th), dtype=float) if grid.r_in > 0 else None
        return cls(grid, fn(rr, tt), float(np.mean(outer)), inner, outer, {"synthetic": True})

    @classmethod
    def radial_lift(cls, grid, u_radial, k, inner_value=None):
        vals = np.repeat(np.asarray(u_radial, dtype=float)[:, None], grid.n_theta, axis=1)
        inner = None if inner_value is None else np.full(grid.n_theta, float(inner_value))
        return cls(grid, vals, float(k), inner)

    def rotated(self, shift):
        """Rotate by a whole number of θ nodes."""
        inner = None if self.inner_data is None else np.roll(self.inner_data, shift)
        outer = None if self.outer_data is None else np.roll(self.outer_data, shift)
        return PolarField(self.grid, np.roll(self.values, shift, axis=1), self.boundary_k, inner, outer, dict(self.info))

    def ring_range(self):
        return self.values.max(axis=1) - self.values.min(axis=1)


def _operator(grid):
    """Sparse Laplacian on the flattened (i_r, i_θ) unknowns plus boundary coupling vectors."""
    nr, nt = grid.shape
    lo, di, up = grid.radial.laplacian(2)
    ang = 1.0 / (grid.r_nodes**2 * grid.dtheta**2)
    idx = np.arange(nr * nt).reshape(nr, nt)
    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(np.broadcast_to(v, r.shape).ravel())

    diag = (di - 2.0 * ang)[:, None] * np.ones((1, nt))
    add(idx, idx, diag)
    add(idx[1:], idx[:-1], lo[1:, None])
    add(idx[:-1], idx[1:], up[:-1, None])
    add(idx, np.roll(idx, -1, axis=1), ang[:, None])
    add(idx, np.roll(idx, 1, axis=1), ang[:, None])
    A = sparse.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(nr * nt, nr * nt)
    )
    return A, lo[0], up[-1]


def apply_laplacian(f):
    """Discrete Δu of a field including its boundary data (interior nodes)."""
    grid = f.grid
    A, c_in, c_out = _operator(grid)
    out = (A @ f.values.ravel()).reshape(grid.shape)
    out[-1] += c_out * f.outer_values
    if f.inner_data is not None:
        out[0] += c_in * np.asarray(f.inner_data)
    return out


def _solve(nl, grid, k, u0, inner):
    nr, nt = grid.shape
    A, c_in, c_out = _operator(grid)
    bvec = np.zeros(grid.shape)
    bvec[-1] += c_out * k
    if inner is not None:
        bvec[0] += c_in * inner
    bvec = bvec.ravel()
    absA = abs(A)
    absb = np.abs(bvec)

    def residual(x):
        return A @ x + bvec - nl.g(x), x

    def solve(x, F):
        J = A - sparse.diags(nl.dg(x), format="csc")
        return splinalg.splu(J.tocsc()).solve(F)

    def scale(x):
        return 1.0 + np.abs(nl.g(x)) + absA @ np.abs(x) + absb

    x, info = damped_newton(residual, solve, u0.ravel(), scale=scale, tol=NEWTON_TOL)
    F, _ = residual(x)
    info.pop("history", None)
    info["residual_abs"] = float(np.max(np.abs(F)))
    info["residual_tol"] = 1e-9 * (1.0 + abs(float(nl.g(k))))
    return x.reshape(nr, nt), info


def _smooth_noise(grid, seed, modes=4):
    rng = np.random.default_rng(seed)
    rr, tt = grid.mesh()
    s = (rr - grid.r_in) / (grid.R - grid.r_in)
    out = np.zeros(grid.shape)
    for m in range(1, modes + 1):
        a, b = rng.normal(size=2)
        c = rng.normal()
        out += (a * np.cos(m * tt) + b * np.sin(m * tt) + c) / m * np.sin(np.pi * s)
    return out / np.max(np.abs(out))


def radial_solution(nl, grid, k, inner_value=0.0, k_schedule=None):
    """Radial continuation on the grid's own radial nodes (N = 2), ending at k."""
    if k_schedule is None:
        k_schedule = [x for x in (10.0**j for j in range(1, 40)) if x < k] + [float(k)]
    prof, _ = continuation(nl, grid.radial, 2, k_schedule, stop_tol=0.0, inner_value=inner_value)
    return prof.u_values


def initial_guess(nl, grid, k, init=RADIAL_LIFT, seed=0, amplitude=0.3, inner_value=0.0):
    """Initial field: radial lift, constant k, or the lift times (1 + amplitude * smooth noise)."""
    if init == CONSTANT:
        return np.full(grid.shape, float(k))
    lift = np.repeat(radial_solution(nl, grid, k, inner_value)[:, None], grid.n_theta, axis=1)
    if init == RADIAL_LIFT:
        return lift
    if init == PERTURBED:
        return lift * (1.0 + amplitude * _smooth_noise(grid, seed))
    raise DomainError(f"unknown init {init!r}")


def solve_disk(nl, grid, k, init=RADIAL_LIFT, seed=0, amplitude=0.3, u0=None):
    """Damped Newton for Δu = g(u) in the disk with u = k on the boundary circle.

    Parameters
    ----------
    init : {"radial_lift", "constant", "perturbed"}
        Initial guess; ignored when ``u0`` is given.
    seed, amplitude : int, float
        Perturbation controls for ``init="perturbed"``.

    Returns
    -------
    PolarField
        ``info`` carries Newton statistics and the init used.
    """
    if grid.r_in != 0.0:
        raise DomainError("solve_disk needs a disk grid (r_in = 0)")
    if not np.isfinite(nl.g(k)):
        raise DomainError(f"g({k}) is not finite")
    x0 = initial_guess(nl, grid, k, init, seed, amplitude) if u0 is None else np.asarray(u0, dtype=float)
    vals, info = _solve(nl, grid, float(k), x0, None)
    info.update(init=init if u0 is None else "given", seed=seed, amplitude=amplitude)
    return PolarField(grid, vals, float(k), None, None, info)


def solve_annulus_2d(nl, grid, k, inner_data, u0=None, init=RADIAL_LIFT, seed=0, amplitude=0.3):
    """As solve_disk on an annulus with Dirichlet data ``inner_data`` on r = r_in."""
    if not grid.r_in > 0.0:
        raise DomainError("solve_annulus_2d needs r_in > 0")
    inner = np.asarray(inner_data, dtype=float)
    if inner.shape != (grid.n_theta,) or not np.all(np.isfinite(inner)):
        raise DomainError("inner_data must hold one finite value per θ node")
    if u0 is None:
        x0 = initial_guess(nl, grid, k, init, seed, amplitude, inner_value=float(np.mean(inner)))
        # blend the inner ring toward the θ-dependent data
        x0 = x0 + (inner - inner.mean())[None, :] * _decay(grid)[:, None]
    else:
        x0 = np.asarray(u0, dtype=float)
    vals, info = _solve(nl, grid, float(k), x0, inner)
    info.update(init=init if u0 is None else "given")
    return PolarField(grid, vals, float(k), inner, None, info)


def _decay(grid):
    s = (grid.r_nodes - grid.r_in) / (grid.R - grid.r_in)
    return (1.0 - s) ** 2


def continuation_2d(nl, grid, k_schedule, inner_data=None, init=RADIAL_LIFT, seed=0, amplitude=0.3):
    """Solve at each k in turn, warm-starting from the previous level's field.

    The jump in boundary data is spread with the radial continuation
    increment, so each Newton solve starts close to its solution.
    """
    fields = []
    prev = None
    inner_mean = None if inner_data is None else float(np.mean(inner_data))
    for k in k_schedule:
        if prev is None:
            u0 = None
        else:
            ur_old = radial_solution(nl, grid, prev.boundary_k, inner_mean or 0.0)
            ur_new = radial_solution(nl, grid, k, inner_mean or 0.0)
            u0 = prev.values + (ur_new - ur_old)[:, None]
        try:
            if inner_data is None:
                f = solve_disk(nl, grid, k, init, seed, amplitude, u0=u0)
            else:
                f = solve_annulus_2d(nl, grid, k, inner_data, u0=u0, init=init, seed=seed, amplitude=amplitude)
        except SolverError:
            if u0 is None:
                raise
            # fall back to a fresh start at this level
            if inner_data is None:
                f = solve_disk(nl, grid, k, init, seed, amplitude)
            else:
                f = solve_annulus_2d(nl, grid, k, inner_data, init=init, seed=seed, amplitude=amplitude)
        fields.append(f)
        prev = f
    return fields


def gradient_decomposition(f):
    """Radial derivative and tangential derivative (1/r) ∂u/∂θ by centred differences.

    The radial difference uses the Dirichlet rings at r_in and R, and for
    disks the value across the centre, u(-r_0, θ) = u(r_0, θ + π).
    """
    grid = f.grid
    r = grid.r_nodes
    nt = grid.n_theta
    u = f.values
    if grid.r_in == 0.0:
        x = np.concatenate(([-r[0]], r, [grid.R]))
        first = np.roll(u[0], -nt // 2)[None, :]
    else:
        x = np.concatenate(([grid.r_in], r, [grid.R]))
        first = np.asarray(f.inner_data)[None, :]
    v = np.vstack((first, u, f.outer_values[None, :]))
    h1 = (x[1:-1] - x[:-2])[:, None]
    h2 = (x[2:] - x[1:-1])[:, None]
    du_dr = (h1**2 * v[2:] - h2**2 * v[:-2] + (h2**2 - h1**2) * v[1:-1]) / (h1 * h2 * (h1 + h2))
    du_dth = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * grid.dtheta)
    return du_dr, du_dth / r[:, None]


def theta_second_difference(f):
    """(u_{j+1} - 2 u_j + u_{j-1}) / Δθ^2 on every ring."""
    u = f.values
    return (np.roll(u, -1, axis=1) - 2.0 * u + np.roll(u, 1, axis=1)) / f.grid.dtheta**2


def field_residual(nl, f):
    """Nodewise Δ_h u - g(u) for a solved field."""
    return apply_laplacian(f) - nl.g(f.values)


def probe_values(f, radii):
    """θ-averaged u at arbitrary radii by cubic interpolation of the ring means."""
    from scipy.interpolate import CubicSpline

    means = f.values.mean(axis=1)
    return CubicSpline(f.grid.r_nodes, means)(np.asarray(radii, dtype=float))


def max_angle_index(n_theta, angle):
    return int(round(angle / (2.0 * math.pi) * n_theta)) % n_theta
