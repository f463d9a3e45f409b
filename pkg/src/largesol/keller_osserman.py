"""Numerical Keller-Osserman test and the boundedness diagnostic for blow-up rescaling.

The improper integral ∫^∞ G(t)^{-1/2} dt cannot be evaluated to infinity, so
the verdict is read off the decay of the integrand over the last decade before
a truncation point T_max.  A plain log-log slope cannot separate
``t^{-1} (ln t)^{-γ}`` tails with γ slightly above or below 1 at any desk-scale
T_max, so the decision uses the logarithmic exponent

    γ = -d log(t f(t)) / d log(log t),

which is +∞ for power tails faster than 1/t, finite for power-log tails and
-∞ for slower power tails.  The integral converges iff γ > 1; convergence is
only reported when it is demonstrated with ``margin`` to spare.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

# Integrand decaying faster than t^-10 over a decade is treated as exponential.
SUPERPOWER_SLOPE = -10.0
# RMS residual of a quadratic fit of log f vs log t above this means the tail is not regular.
OSCILLATION_RESIDUAL = 1e-3


@dataclass(frozen=True)
class KOReport:
    verdict: str
    truncated_integral: float
    tail_exponent: float
    T_max: float
    log_exponent: float
    fit_residual: float
    t_lower: float
    margin: float
    notes: tuple = ()

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "truncated_integral": self.truncated_integral,
            "tail_exponent": self.tail_exponent,
            "log_exponent": self.log_exponent,
            "fit_residual": self.fit_residual,
            "T_max": self.T_max,
            "t_lower": self.t_lower,
            "margin": self.margin,
            "tolerances": {
                "margin": self.margin,
                "oscillation_residual": OSCILLATION_RESIDUAL,
                "superpower_slope": SUPERPOWER_SLOPE,
            },
            "notes": list(self.notes),
        }


def _lower_limit(nl):
    """First point past the thresholds where G^{-1/2} is finite and g > 0."""
    base = max(nl.a_convex, nl.b_monotone)
    t = max(2.0 * base, base + 1.0)
    for _ in range(60):
        if float(nl.g(t)) > 0 and t > nl.a_convex:
            return t
        t = 2.0 * t + 1.0
    raise DomainError("g is not positive anywhere on the sampled tail")


def _log_integrand(nl, t):
    return -0.5 * np.array([nl.log_G(float(x)) for x in np.atleast_1d(t)])


def truncated_ko_integral(nl, t_lo, T):
    """∫_{t_lo}^{T} G(t)^{-1/2} dt (integrated in log t)."""

    def f(x):
        t = math.exp(x)
        return math.exp(x - 0.5 * nl.log_G(t))

    val, _ = integrate.quad(f, math.log(t_lo), math.log(T), epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def check_keller_osserman(nl, T_max=None, margin=0.05, n_samples=96):
    """Decide whether ∫_a^∞ G(t)^{-1/2} dt converges."""
    if T_max is None:
        T_max = 1e8 * max(nl.a_convex, 1.0)
    if T_max < 100.0 * max(nl.a_convex, 1.0):
        raise DomainError("T_max must be at least 100 * max(a_convex, 1)")
    t = np.geomspace(T_max / 10.0, T_max, n_samples)
    gt = nl.g(t)
    if np.any(~np.isfinite(gt)):
        # exp-type growth overflows long before T_max: shrink the window to the representable range
        t_cap = nl.overflow_level(1e300)
        t = np.geomspace(t_cap / 10.0, t_cap, n_samples)
        gt = nl.g(t)
    if np.any(gt <= 0):
        raise DomainError("g <= 0 on the tail window; Keller-Osserman test undefined")
    t_lo = _lower_limit(nl)
    logf = _log_integrand(nl, t)
    x = np.log(t)
    slope = float(np.polyfit(x, logf, 1)[0])
    quad_coef = np.polyfit(x, logf, 2)
    resid = float(np.sqrt(np.mean((np.polyval(quad_coef, x) - logf) ** 2)))
    notes = []
    if slope < SUPERPOWER_SLOPE:
        verdict = SATISFIED
        gamma = math.inf
        notes.append("super-power (exponential-type) decay of the integrand")
    elif resid > OSCILLATION_RESIDUAL:
        verdict = INCONCLUSIVE
        gamma = math.nan
        notes.append("integrand tail is irregular; log-log fit residual above threshold")
    else:
        lx = np.log(x)
        gamma = -float(np.polyfit(lx, x + logf, 1)[0])
        verdict = SATISFIED if gamma > 1.0 + margin else VIOLATED
    try:
        ti = truncated_ko_integral(nl, t_lo, float(t[-1]))
    except (OverflowError, ValueError):
        ti = math.nan
    return KOReport(
        verdict=verdict,
        truncated_integral=ti,
        tail_exponent=slope,
        T_max=float(t[-1]),
        log_exponent=gamma,
        fit_residual=resid,
        t_lower=t_lo,
        margin=margin,
        notes=tuple(notes),
    )


def ko_satisfied(nl):
    """Cached Keller-Osserman verdict (default truncation and margin); False when undefined."""
    cache = nl._cache
    if "ko" not in cache:
        try:
            cache["ko"] = check_keller_osserman(nl).verdict == SATISFIED
        except DomainError:
            cache["ko"] = False
    return cache["ko"]


@dataclass(frozen=True)
class BoundednessReport:
    verdict: str
    sup: float
    growing: bool
    s: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "sampled_sup": self.sup,
            "growing": self.growing,
            "last_value": float(self.values[-1]),
        }


def tail_integral(nl, s):
    """∫_s^∞ (2 G(ξ))^{-1/2} dξ, integrated in log ξ."""

    def f(x):
        try:
            lg = nl.log_G_at_log(x)
        except OverflowError:
            return 0.0
        return math.exp(x - 0.5 * (math.log(2.0) + lg))

    val, _ = integrate.quad(f, math.log(s), math.inf, epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def check_bu_condition(nl, s_max=1e12, n_samples=37, plateau_tol=0.01):
    """Sample s ↦ g(s)/√G(s) · ∫_s^∞ (2G)^{-1/2} on a geometric grid up to s_max.

    ``bounded`` when the last three decades of the sample move by at most
    ``plateau_tol`` upward; ``inconclusive`` (with ``growing``) when the sample
    is still increasing at s_max.
    """
    s_lo = _lower_limit(nl)
    cap = nl.overflow_level(1e300)
    s_max = min(s_max, cap / 2.0)
    s = np.geomspace(s_lo, s_max, n_samples)
    vals = np.empty_like(s)
    for i, si in enumerate(s):
        gs = float(nl.g(si))
        vals[i] = gs * math.exp(-0.5 * nl.log_G(si)) * tail_integral(nl, si)
    tail = vals[s >= s_max / 1e3]
    growth = (tail[-1] - tail[0]) / abs(tail[0])
    increasing = bool(np.all(np.diff(tail) > 0))
    growing = increasing and growth > plateau_tol
    verdict = INCONCLUSIVE if growing else "bounded"
    return BoundednessReport(verdict, float(np.max(vals)), growing, s, vals)
