"""The map v ↦ w = F(v) = ∫_v^∞ (2 H̃(s))^{-1/2} ds and its inverse.

H̃(s) = ∫_m^s g is the primitive anchored at a level m below the solution, so
that H̃ >= 0 on the range of the solution.  F sends a large solution v to a
bounded w with w = 0 on the boundary, solving

    Δw = b(w) (|Dw|^2 - 1),   b(w) = g(v) / sqrt(2 H̃(v)).

Quadrature is done in y = log(s - m): the substitution removes both the
inverse-square-root singularity of H̃ at s = m (integrand ~ e^{y/2}) and the
long algebraic tail (integrand ~ e^{-y (q-1)/2} for powers).
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, interpolate, optimize

from .errors import DivergenceError, DomainError
from .keller_osserman import ko_satisfied


def _closed_form(nl, m):
    """(c, q) when F has the closed form for g = c s^q anchored at m = 0."""
    mono = nl.monomial()
    if mono is None or m != 0.0:
        return None
    c, q = mono
    if q <= 1.0:
        return None
    return c, q


def log_Htilde(nl, s, m):
    """log ∫_m^s g, stable for s close to m and for s beyond double range."""
    if s <= m:
        raise DomainError("H̃ needs s > m")
    return nl.log_integral(m, s)


def _require_ko(nl):
    if not ko_satisfied(nl):
        raise DivergenceError(f"Keller-Osserman condition not satisfied for {nl!r}; F diverges")


def _integrand_y(nl, m):
    def f(y):
        if y >= 700.0:
            # s - m = e^y overflows; m is negligible against s there
            try:
                lh = nl.log_G_at_log(y, lower=m)
            except OverflowError:
                return 0.0
        elif math.exp(y) < 1e-12 * (1.0 + abs(m)):
            # H̃(m + t) = g(m) t + O(t^2); m + t is not distinguishable from m
            return math.exp(0.5 * y) / math.sqrt(2.0 * gm) if gm > 0 else 0.0
        else:
            lh = log_Htilde(nl, m + math.exp(y), m)
        return math.exp(y - 0.5 * (math.log(2.0) + lh))

    gm = float(nl.g(m))
    return f


def transform_F(nl, v, m):
    """F(v) = ∫_v^∞ (2 H̃(s))^{-1/2} ds with H̃ anchored at m."""
    if v < m:
        raise DomainError(f"transform_F needs v >= m (v={v}, m={m})")
    _require_ko(nl)
    cf = _closed_form(nl, m)
    if cf is not None:
        c, q = cf
        if v == 0.0:
            return math.inf
        return math.sqrt((q + 1.0) / (2.0 * c)) * 2.0 / (q - 1.0) * v ** ((1.0 - q) / 2.0)
    f = _integrand_y(nl, m)
    y0 = -math.inf if v == m else math.log(v - m)
    with warnings.catch_warnings():
        # the requested tolerance sits near double precision; roundoff notices are expected
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, y0, math.inf, epsabs=0.0, epsrel=1e-12, limit=500)
    return val


def F_sup(nl, m):
    """sup F = F(m+), possibly infinite."""
    cf = _closed_form(nl, m)
    if cf is not None:
        return math.inf
    gm = float(nl.g(m))
    # an anchor at a computed root of g carries round-off in g(m)
    noise = 1e-12 * max(1.0, abs(m) * abs(float(nl.dg(m))))
    if gm < -noise:
        raise DomainError(f"g(m) = {gm} < 0: H̃ is negative just above m")
    if gm <= noise:
        # H̃ vanishes to second order at m: the integral diverges at the lower end
        return math.inf
    return transform_F(nl, m, m)


def inverse_F(nl, w, m):
    """v with F(v) = w, by bracketed root search in log(v - m)."""
    if not w > 0.0:
        raise DomainError("inverse_F needs w > 0 (w = 0 corresponds to v = ∞)")
    _require_ko(nl)
    cf = _closed_form(nl, m)
    if cf is not None:
        c, q = cf
        k = math.sqrt((q + 1.0) / (2.0 * c)) * 2.0 / (q - 1.0)
        return (w / k) ** (2.0 / (1.0 - q))
    sup = F_sup(nl, m)
    if w >= sup:
        raise DomainError(f"w = {w} exceeds sup F = {sup}")

    def phi(y):
        return transform_F(nl, m + math.exp(y), m) - w

    scale = max(1.0, abs(m))
    lo = hi = math.log(scale)
    step = 1.0
    while phi(lo) < 0.0:
        lo -= step
        step *= 2.0
        if lo < -700:
            raise DomainError("could not bracket inverse_F from below")
    step = 1.0
    while phi(hi) > 0.0:
        hi += step
        step *= 2.0
        if hi > 1e4:
            raise DomainError("could not bracket inverse_F from above")
    y = optimize.brentq(phi, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=300)
    return m + math.exp(y)


def coefficient_b(nl, w, m):
    """b(w) = g(v) / sqrt(2 H̃(v)) at v = inverse_F(w)."""
    v = inverse_F(nl, w, m)
    return float(nl.g(v)) * math.exp(-0.5 * (math.log(2.0) + log_Htilde(nl, v, m)))


class FTable:
    """Tabulated F on a grid in y = log(v - m), for vectorized use inside solvers.

    ``w_min`` is the smallest w the table must cover; the table extends in y
    until F drops below it.
    """

    def __init__(self, nl, m, w_min, v_lo=None, dy=0.02):
        _require_ko(nl)
        self.nl, self.m = nl, float(m)
        scale = max(1.0, abs(m))
        if v_lo is None:
            v_lo = self.m + 1e-8 * scale
        y_lo = math.log(v_lo - self.m)
        f = _integrand_y(nl, self.m)
        # grow the upper end until F(y_hi) < w_min / 10
        y_hi = math.log(scale) + 2.0
        while True:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                tail, _ = integrate.quad(f, y_hi, math.inf, epsabs=0.0, epsrel=1e-12, limit=500)
            if tail < 0.1 * w_min:
                break
            if y_hi > 690.0:
                raise DomainError(
                    f"F stays above w = {w_min} for all representable v; the transform cannot be tabulated"
                )
            y_hi += 2.0
        n = int(math.ceil((y_hi - y_lo) / dy)) + 1
        y = np.linspace(y_lo, y_hi, n)
        gx, gw = np.polynomial.legendre.leggauss(8)
        Fv = np.empty(n)
        Fv[-1] = tail
        for j in range(n - 2, -1, -1):
            a, b = y[j], y[j + 1]
            pts = 0.5 * (a + b) + 0.5 * (b - a) * gx
            Fv[j] = Fv[j + 1] + 0.5 * (b - a) * sum(wi * f(p) for wi, p in zip(gw, pts))
        self.y = y
        self.logF = np.log(Fv)
        self._logH = interpolate.CubicSpline(y, [log_Htilde(nl, self.m + math.exp(t), self.m) for t in y])
        self._spl = interpolate.CubicSpline(y, self.logF)
        self._dspl = self._spl.derivative()
        self.w_max = float(Fv[0])
        self.w_min = float(Fv[-1])

    def F(self, v):
        y = np.log(np.asarray(v, dtype=float) - self.m)
        return np.exp(self._spl(y))

    def inverse(self, w):
        """Vectorized inverse by safeguarded Newton on the monotone spline."""
        w = np.asarray(w, dtype=float)
        if np.any(w > self.w_max) or np.any(w < self.w_min):
            raise DomainError("w outside the tabulated range of F")
        target = np.log(w)
        lo = np.full(w.shape, self.y[0])
        hi = np.full(w.shape, self.y[-1])
        y = np.interp(-target, -self.logF, self.y)
        for _ in range(60):
            val = self._spl(y) - target
            lo = np.where(val > 0, y, lo)
            hi = np.where(val <= 0, y, hi)
            d = self._dspl(y)
            step = np.where(d < 0, val / d, 0.0)
            y_new = y - step
            bad = (y_new <= lo) | (y_new >= hi) | ~np.isfinite(y_new)
            y_new = np.where(bad, 0.5 * (lo + hi), y_new)
            if np.all(np.abs(y_new - y) <= 1e-14 * (1.0 + np.abs(y))):
                y = y_new
                break
            y = y_new
        return self.m + np.exp(y)

    def Htilde(self, v):
        return np.exp(self._logH(np.log(np.asarray(v, dtype=float) - self.m)))

    def b_and_db(self, w):
        """b(w) and db/dw = b^2 - g'(v), evaluated at v = inverse(w)."""
        v = self.inverse(w)
        two_h = 2.0 * self.Htilde(v)
        b = self.nl.g(v) / np.sqrt(two_h)
        db = b * b - self.nl.dg(v)
        return b, db, v
