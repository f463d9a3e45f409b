"""Offset radial grids and the finite-volume radial Laplacian.

Unknowns sit at cell centres strictly inside (r_in, R); the Dirichlet value
lives on the outer boundary R (and on r_in for annuli).  For a disk the first
cell starts at the origin, whose face has zero area, so u'(0) = 0 needs no
ghost node.

The operator is written in flux form with faces at node midpoints,

    (L u)_i = [f_+^{N-1} (u_{i+1} - u_i)/Δ_+ - f_-^{N-1} (u_i - u_{i-1})/Δ_-] / V_i,
    V_i = (f_+^N - f_-^N) / N,

which makes L φ = -1 exact for φ = (R^2 - r^2)/(2N) on any node layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError


@dataclass(frozen=True)
class RadialGrid:
    """Interior nodes on (r_in, R) with Dirichlet ends.

    ``r_in == 0`` denotes a disk or ball; the origin is then a zero-area face
    rather than a boundary.
    """

    r: np.ndarray = field(repr=False)
    R: float
    r_in: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size < 2:
            raise DomainError("a radial grid needs at least two nodes")
        if not (r[0] > self.r_in and r[-1] < self.R and np.all(np.diff(r) > 0)):
            raise DomainError("grid nodes must be strictly increasing inside (r_in, R)")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n(self):
        return self.r.size

    @property
    def is_disk(self):
        return self.r_in == 0.0

    def extended(self):
        """Nodes with the Dirichlet end points attached (origin excluded for disks)."""
        if self.is_disk:
            return np.append(self.r, self.R)
        return np.concatenate(([self.r_in], self.r, [self.R]))

    def faces(self):
        """Left and right face radii of each control volume."""
        x = self.extended()
        mid = 0.5 * (x[1:] + x[:-1])
        if self.is_disk:
            left = np.concatenate(([0.0], mid[:-1]))
            right = mid
        else:
            left = mid[:-1]
            right = mid[1:]
        return left, right

    def spacing(self):
        """Distances to the left and right neighbours (left of a disk's first node is unused)."""
        x = self.extended()
        d = np.diff(x)
        if self.is_disk:
            left = np.concatenate(([np.inf], d[:-1]))
            right = d
        else:
            left = d[:-1]
            right = d[1:]
        return left, right

    def volumes(self, N):
        fl, fr = self.faces()
        return (fr**N - fl**N) / N

    def laplacian(self, N):
        """Tridiagonal coefficients (lower, diag, upper) of the radial Laplacian.

        ``lower[0]`` couples node 0 to the inner Dirichlet value (zero for a
        disk) and ``upper[-1]`` couples the last node to the outer one.
        """
        fl, fr = self.faces()
        dl, dr = self.spacing()
        vol = (fr**N - fl**N) / N
        lower = fl ** (N - 1) / dl / vol
        upper = fr ** (N - 1) / dr / vol
        if self.is_disk:
            lower[0] = 0.0
        return lower, -(lower + upper), upper

    def apply_laplacian(self, u, N, outer, inner=0.0):
        lo, di, up = self.laplacian(N)
        out = di * u
        out[1:] += lo[1:] * u[:-1]
        out[:-1] += up[:-1] * u[1:]
        out[-1] += up[-1] * outer
        out[0] += lo[0] * inner
        return out

    def derivative(self, u, outer, inner=None):
        """Second-order centred derivative on the non-uniform nodes.

        For disks the mirror value u(-r_0) = u(r_0) closes the first node.
        """
        u = np.asarray(u, dtype=float)
        if self.is_disk:
            x = np.concatenate(([-self.r[0]], self.r, [self.R]))
            v = np.concatenate(([u[0]], u, [outer]))
        else:
            x = np.concatenate(([self.r_in], self.r, [self.R]))
            v = np.concatenate(([inner], u, [outer]))
        h1 = x[1:-1] - x[:-2]
        h2 = x[2:] - x[1:-1]
        return (h1**2 * v[2:] - h2**2 * v[:-2] + (h2**2 - h1**2) * v[1:-1]) / (h1 * h2 * (h1 + h2))

    def scaled(self, factor):
        """The same layout on the ball of radius factor * R."""
        return RadialGrid(self.r * factor, self.R * factor, self.r_in * factor)


def _graded_spacings(length, weights, ratio, h_min):
    """Node spacings listed from the outer boundary inward.

    ``weights`` says how much of each spacing lies inside the interval (the
    spacing between a disk's first node and its mirror image counts half).
    """
    n = weights.size
    geo = h_min * ratio ** np.arange(n)

    def total(H):
        return float(np.dot(weights, np.minimum(geo, H)))

    if total(np.inf) <= length:
        # too few nodes to reach a plateau: stretch the geometric run instead
        return geo * (length / total(np.inf))
    if total(h_min) >= length:
        return np.full(n, length / weights.sum())
    H = optimize.brentq(lambda H: total(H) - length, h_min, length, xtol=1e-15 * length)
    d = np.minimum(geo, H)
    return d * (length / total(H))


def radial_grid(R, n_r, r_in=0.0, ratio=None, h_min=None):
    """Offset grid on (r_in, R), optionally graded geometrically toward R.

    Each Dirichlet end sits one local spacing from its neighbouring node, so
    the uniform ball grid is r_i = (i + 1/2) Δr with Δr = R / (n_r + 1/2) and
    the uniform annulus grid is r_i = r_in + (i + 1) Δr.

    Parameters
    ----------
    R, r_in : float
        Outer and inner radius; ``r_in = 0`` gives a ball.
    n_r : int
        Number of unknowns.
    ratio : float, optional
        Growth factor of consecutive spacings moving inward from R.  ``None``
        or 1 gives the uniform grid.
    h_min : float, optional
        Spacing between the outermost node and R when graded.
    """
    if not R > r_in >= 0.0:
        raise DomainError(f"need 0 <= r_in < R (r_in={r_in}, R={R})")
    if n_r < 2:
        raise DomainError("n_r must be at least 2")
    length = R - r_in
    # n_r + 1 spacings, outer boundary first
    weights = np.ones(n_r + 1)
    if r_in == 0.0:
        weights[-1] = 0.5
    if ratio is None or ratio == 1.0 or h_min is None:
        d = np.full(n_r + 1, length / weights.sum())
    else:
        if ratio < 1.0 or h_min <= 0.0:
            raise DomainError("grading needs ratio >= 1 and h_min > 0")
        d = _graded_spacings(length, weights, ratio, min(h_min, length / weights.sum()))
    r = R - np.cumsum(d[:-1])
    r = r[::-1]
    return RadialGrid(r, float(R), float(r_in))
