"""Reaction terms g for -Δu + g(u) = 0.

A :class:`Nonlinearity` is a value object: a family tag, its parameters and
the two thresholds ``a_convex`` (g positive and convex beyond it) and
``b_monotone`` (g positive and nondecreasing beyond it).  All evaluators are
vectorized over numpy arrays.

Families
--------
power        c * sign(s) |s|^q                       (q >= 1)
exponential  c * exp(s)
power_log    s * (ln s)^alpha for s > 1, else 0       (alpha >= 1)
polynomial   sum_i c_i s^i
cubic_minus_linear  s^3 - lam * s
tabulated    monotone cubic (PCHIP) interpolant of samples
clamped      g_base(max(s, M)), the convex constant extension used by
             :func:`split_asymptotic`
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, optimize

from .errors import DomainError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)

FAMILIES = (
    "power",
    "exponential",
    "power_log",
    "polynomial",
    "cubic_minus_linear",
    "tabulated",
    "clamped",
    "callable",
)

TOL_CONVEX = 1e-8
TOL_MONO = 1e-8


def _as_array(s):
    return np.asarray(s, dtype=float)


class Nonlinearity:
    """Reaction term g with thresholds and primitives.

    Construct through the family helpers (:func:`power`, :func:`exponential`,
    ...) rather than directly.
    """

    def __init__(self, family, params, a_convex, b_monotone, *, func=None, dfunc=None):
        if family not in FAMILIES:
            raise DomainError(f"unknown nonlinearity family {family!r}")
        if a_convex < 0:
            raise DomainError("a_convex must be >= 0")
        if b_monotone < a_convex:
            raise DomainError("b_monotone must be >= a_convex")
        self.family = family
        self.params = dict(params)
        self.a_convex = float(a_convex)
        self.b_monotone = float(b_monotone)
        self._func = func
        self._dfunc = dfunc
        self._cache = {}
        if family == "polynomial" or family == "cubic_minus_linear":
            self._poly = np.polynomial.Polynomial(self._coeffs())
            self._dpoly = self._poly.deriv()
            self._ipoly = self._poly.integ()
        if family == "tabulated":
            s = np.asarray(self.params["s"], dtype=float)
            gv = np.asarray(self.params["g"], dtype=float)
            self._pchip = interpolate.PchipInterpolator(s, gv, extrapolate=True)
            self._dpchip = self._pchip.derivative()
            self._ipchip = self._pchip.antiderivative()

    # -- identity -----------------------------------------------------------
    def _key(self):
        items = []
        for k in sorted(self.params):
            v = self.params[k]
            if isinstance(v, Nonlinearity):
                v = v._key()
            elif isinstance(v, (list, tuple, np.ndarray)):
                v = tuple(float(x) for x in np.ravel(v))
            items.append((k, v))
        return (self.family, tuple(items), self.a_convex, self.b_monotone, id(self._func))

    def __eq__(self, other):
        return isinstance(other, Nonlinearity) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        shown = {k: v for k, v in self.params.items() if k not in ("s", "g")}
        return (
            f"Nonlinearity({self.family}, {shown}, a={self.a_convex:g}, "
            f"b={self.b_monotone:g})"
        )

    def __getstate__(self):
        if self.family == "callable":
            raise TypeError("callable nonlinearities cannot be pickled")
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state

    def describe(self):
        """JSON-friendly description (family, parameters, thresholds)."""
        out = {"family": self.family}
        for k, v in self.params.items():
            if isinstance(v, Nonlinearity):
                out[k] = v.describe()
            elif isinstance(v, (list, tuple, np.ndarray)):
                out[k] = [float(x) for x in np.ravel(v)]
            else:
                out[k] = v
        out["a"] = self.a_convex
        out["b"] = self.b_monotone
        return out

    def _coeffs(self):
        if self.family == "cubic_minus_linear":
            return [0.0, -float(self.params["lam"]), 0.0, 1.0]
        return [float(c) for c in self.params["coeffs"]]

    # -- evaluation ---------------------------------------------------------
    def g(self, s):
        s = _as_array(s)
        fam = self.family
        with np.errstate(over="ignore", invalid="ignore"):
            if fam == "power":
                q, c = self.params["q"], self.params.get("c", 1.0)
                return c * np.sign(s) * np.abs(s) ** q
            if fam == "exponential":
                return self.params.get("c", 1.0) * np.exp(s)
            if fam == "power_log":
                al = self.params["alpha"]
                safe = np.where(s > 1.0, s, 2.0)
                return np.where(s > 1.0, safe * np.log(safe) ** al, 0.0)
            if fam in ("polynomial", "cubic_minus_linear"):
                return self._poly(s)
            if fam == "tabulated":
                return self._pchip(s)
            if fam == "clamped":
                base, M = self.params["base"], self.params["M"]
                return base.g(np.maximum(s, M))
            return np.asarray(self._func(s), dtype=float)

    def dg(self, s):
        """Derivative g'(s) (one-sided where g has a kink)."""
        s = _as_array(s)
        fam = self.family
        with np.errstate(over="ignore", invalid="ignore"):
            if fam == "power":
                q, c = self.params["q"], self.params.get("c", 1.0)
                return c * q * np.abs(s) ** (q - 1.0)
            if fam == "exponential":
                return self.params.get("c", 1.0) * np.exp(s)
            if fam == "power_log":
                al = self.params["alpha"]
                safe = np.where(s > 1.0, s, 2.0)
                ln = np.log(safe)
                return np.where(s > 1.0, ln**al + al * ln ** (al - 1.0), 0.0)
            if fam in ("polynomial", "cubic_minus_linear"):
                return self._dpoly(s)
            if fam == "tabulated":
                return self._dpchip(s)
            if fam == "clamped":
                base, M = self.params["base"], self.params["M"]
                return np.where(s > M, base.dg(np.maximum(s, M)), 0.0)
            if self._dfunc is not None:
                return np.asarray(self._dfunc(s), dtype=float)
            h = 1e-6 * np.maximum(1.0, np.abs(s))
            return (self.g(s + h) - self.g(s - h)) / (2 * h)

    def __call__(self, s):
        return self.g(s)

    # -- primitives ---------------------------------------------------------
    def has_closed_primitive(self):
        return self.family in ("power", "exponential", "polynomial", "cubic_minus_linear", "tabulated")

    def _primitive(self, s):
        s = _as_array(s)
        fam = self.family
        with np.errstate(over="ignore"):
            if fam == "power":
                q, c = self.params["q"], self.params.get("c", 1.0)
                return c * np.abs(s) ** (q + 1.0) / (q + 1.0)
            if fam == "exponential":
                return self.params.get("c", 1.0) * np.exp(s)
            if fam in ("polynomial", "cubic_minus_linear"):
                return self._ipoly(s)
            if fam == "tabulated":
                return self._ipchip(s)
        raise NotImplementedError

    def _gauss(self, lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * float(np.dot(_GL_W, self.g(mid + half * _GL_X)))

    def _quad(self, lo, hi):
        if lo > 0 and hi / lo > 10.0:
            def f(x):
                s = math.exp(x)
                return float(self.g(s)) * s

            val, _ = integrate.quad(f, math.log(lo), math.log(hi), epsabs=0.0, epsrel=1e-12, limit=400)
            return val
        pts = None
        if self.family == "power_log" and lo < 1.0 < hi:
            pts = [1.0]
        val, _ = integrate.quad(
            lambda x: float(self.g(x)), lo, hi, epsabs=0.0, epsrel=1e-12, limit=400, points=pts
        )
        return val

    def integral(self, lo, hi):
        """∫_lo^hi g(s) ds to about 1e-12 relative accuracy."""
        lo, hi = float(lo), float(hi)
        if hi == lo:
            return 0.0
        if hi < lo:
            return -self.integral(hi, lo)
        if self.family == "clamped":
            base, M = self.params["base"], self.params["M"]
            gM = float(base.g(M))
            left = gM * (min(hi, M) - lo) if lo < M else 0.0
            right = base.integral(max(lo, M), hi) if hi > M else 0.0
            return left + right
        if self.family == "power_log" and hi <= 1.0:
            return 0.0
        if self.family == "power_log":
            lo = max(lo, 1.0)
            if (hi - lo) > 1e-2 * (1.0 + lo + hi):
                with np.errstate(over="ignore"):
                    return float(np.exp(self._power_log_log_integral(math.log(lo), math.log(hi))))
        short = (hi - lo) <= 1e-2 * (1.0 + abs(lo) + abs(hi))
        if short:
            # Subdivide so that 20-point Gauss-Legendre is exact to rounding.
            edges = np.linspace(lo, hi, 5)
            return sum(self._gauss(x0, x1) for x0, x1 in zip(edges[:-1], edges[1:]))
        if self.has_closed_primitive():
            return float(self._primitive(hi) - self._primitive(lo))
        return self._quad(lo, hi)

    def _power_log_log_integral(self, Y, X):
        # log ∫_Y^X e^{2y} y^alpha dy, scaled by e^{-2X} to stay representable
        al = self.params["alpha"]
        lo = max(Y, X - 40.0)
        val, _ = integrate.quad(
            lambda y: math.exp(2.0 * (y - X)) * y**al, lo, X, epsabs=0.0, epsrel=1e-13, limit=400
        )
        return 2.0 * X + math.log(val)

    def log_integral(self, lo, hi):
        """log ∫_lo^hi g for positive integrals, overflow-safe for exponentials."""
        if self.family == "exponential" and hi > lo:
            c = self.params.get("c", 1.0)
            return math.log(c) + hi + math.log1p(-math.exp(lo - hi))
        if self.family == "power_log" and hi > max(lo, 1.0) * 2.0:
            return self._power_log_log_integral(math.log(max(lo, 1.0)), math.log(hi))
        if self.family == "power" and 0.0 <= lo < hi:
            q, c = self.params["q"], self.params.get("c", 1.0)
            # c (hi^{q+1} - lo^{q+1}) / (q+1) without forming hi^{q+1}
            return math.log(c / (q + 1.0)) + (q + 1.0) * math.log(hi) + math.log1p(-((lo / hi) ** (q + 1.0)))
        val = self.integral(lo, hi)
        if not val > 0:
            raise DomainError(f"integral of g over [{lo}, {hi}] is not positive ({val})")
        return math.log(val)

    def G(self, t):
        """Primitive G(t) = ∫_a^t g with a = a_convex."""
        if t < self.a_convex:
            raise DomainError(f"G(t) needs t >= a_convex = {self.a_convex}, got {t}")
        return self.integral(self.a_convex, t)

    def log_G(self, t):
        return self.log_integral(self.a_convex, t)

    def log_G_at_log(self, x, lower=None):
        """log ∫_lower^{e^x} g, valid even when e^x overflows a double.

        ``lower`` defaults to ``a_convex``.  Past x = 700 the leading asymptotic
        term is used (relative error below 1e-250 for the algebraic families).
        """
        lower = self.a_convex if lower is None else lower
        if x < 700.0:
            return self.log_integral(lower, math.exp(x))
        fam = self.family
        if fam == "power":
            q, c = self.params["q"], self.params.get("c", 1.0)
            return math.log(c / (q + 1.0)) + (q + 1.0) * x
        if fam == "exponential":
            raise OverflowError("exponential primitive is not representable at this scale")
        if fam == "power_log":
            return self._power_log_log_integral(math.log(max(lower, 1.0)), x)
        if fam in ("polynomial", "cubic_minus_linear"):
            coeffs = self._coeffs()
            n = max(i for i, c in enumerate(coeffs) if c != 0)
            return math.log(coeffs[n] / (n + 1.0)) + (n + 1.0) * x
        if fam == "clamped":
            return self.params["base"].log_G_at_log(x, lower=max(lower, self.params["M"]))
        if fam == "tabulated":
            pp = self._pchip
            c = pp.c[:, -1]
            x0 = pp.x[-2]
            for j, cj in enumerate(c):
                if cj != 0.0:
                    deg = len(c) - 1 - j
                    # leading term cj (s - x0)^deg, s ~ e^x
                    return math.log(abs(cj) / (deg + 1.0)) + (deg + 1.0) * x
        raise OverflowError(f"no asymptotic primitive for family {fam}")

    def monomial(self):
        """(c, q) when g(s) = c s^q on [0, ∞), else None."""
        if self.family == "power":
            return float(self.params.get("c", 1.0)), float(self.params["q"])
        if self.family == "polynomial":
            nz = [(i, c) for i, c in enumerate(self._coeffs()) if c != 0.0]
            if len(nz) == 1 and nz[0][0] >= 1:
                return float(nz[0][1]), float(nz[0][0])
        return None

    def lipschitz_window(self, lo, hi, n=2049):
        """Estimated Lipschitz constant of g on [lo, hi] (sampled sup of |g'|)."""
        if hi < lo:
            lo, hi = hi, lo
        s = np.linspace(lo, hi, n)
        return float(np.max(np.abs(self.dg(s))))

    def overflow_level(self, limit=1e250):
        """Largest s (up to 1e300) with |g(s)| <= limit."""
        if abs(float(self.g(1e300))) <= limit:
            return 1e300
        lo, hi = max(1.0, self.b_monotone), 1e300
        if abs(float(self.g(lo))) > limit:
            return lo
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if abs(float(self.g(mid))) <= limit:
                lo = mid
            else:
                hi = mid
            if hi / lo < 1 + 1e-6:
                break
        return lo


# ---------------------------------------------------------------------------
# family constructors

def power(q, c=1.0, a=0.0, b=None):
    if q < 1.0:
        raise DomainError("power family needs q >= 1 (local Lipschitz continuity)")
    if c <= 0:
        raise DomainError("power family needs c > 0")
    return Nonlinearity("power", {"q": float(q), "c": float(c)}, a, a if b is None else b)


def linear(c=1.0):
    return power(1.0, c)


def exponential(c=1.0, a=0.0, b=None):
    if c <= 0:
        raise DomainError("exponential family needs c > 0")
    return Nonlinearity("exponential", {"c": float(c)}, a, a if b is None else b)


def power_log(alpha, a=1.0, b=None):
    if alpha < 1.0:
        raise DomainError("power_log family needs alpha >= 1")
    return Nonlinearity("power_log", {"alpha": float(alpha)}, a, a if b is None else b)


def _largest_real_root(poly):
    if poly.degree() < 1 or np.all(poly.coef == 0):
        return -math.inf
    roots = poly.roots()
    real = roots[np.abs(roots.imag) <= 1e-9 * (1 + np.abs(roots.real))].real
    return float(real.max()) if real.size else -math.inf


def polynomial(coeffs, a=None, b=None):
    """g(s) = sum_i coeffs[i] s^i; thresholds default to the polynomial's own."""
    coeffs = [float(c) for c in coeffs]
    p = np.polynomial.Polynomial(coeffs)
    if a is None:
        a = max(0.0, _largest_real_root(p.deriv(2)))
    if b is None:
        b = max(a, _largest_real_root(p), _largest_real_root(p.deriv()))
    return Nonlinearity("polynomial", {"coeffs": coeffs}, a, b)


def cubic_minus_linear(lam):
    """g(s) = s^3 - lam s, convex on [0, ∞), positive and increasing beyond sqrt(lam)."""
    lam = float(lam)
    b = math.sqrt(lam) if lam > 0 else 0.0
    return Nonlinearity("cubic_minus_linear", {"lam": lam}, 0.0, b)


def tabulated(s, g, a, b, s_check=None):
    """Monotone cubic interpolant of samples; the thresholds are verified."""
    s = np.asarray(s, dtype=float)
    g = np.asarray(g, dtype=float)
    if s.ndim != 1 or s.shape != g.shape or s.size < 3 or np.any(np.diff(s) <= 0):
        raise DomainError("tabulated nonlinearity needs >= 3 strictly increasing samples")
    nl = Nonlinearity("tabulated", {"s": s.tolist(), "g": g.tolist()}, a, b)
    bad = threshold_violations(nl, s_max=s_check if s_check is not None else float(s[-1]))
    if bad:
        raise DomainError("tabulated nonlinearity fails threshold checks: " + "; ".join(bad))
    return nl


def from_callable(func, a, b, dfunc=None, name="callable"):
    """Wrap an arbitrary vectorized callable (library use only, not picklable)."""
    return Nonlinearity("callable", {"name": name}, a, b, func=func, dfunc=dfunc)


def from_dict(spec):
    """Build a nonlinearity from a flat description (as produced by ``describe``)."""
    spec = dict(spec)
    fam = spec.pop("family", None)
    a = spec.pop("a", None)
    b = spec.pop("b", None)
    kw = {}
    if a is not None:
        kw["a"] = float(a)
    if b is not None:
        kw["b"] = float(b)
    if fam == "power":
        return power(float(spec["q"]), float(spec.get("c", 1.0)), **kw)
    if fam == "linear":
        return power(1.0, float(spec.get("c", 1.0)), **kw)
    if fam == "exponential":
        return exponential(float(spec.get("c", 1.0)), **kw)
    if fam == "power_log":
        return power_log(float(spec["alpha"]), **kw)
    if fam == "polynomial":
        coeffs = spec["coeffs"]
        if isinstance(coeffs, str):
            coeffs = [float(c) for c in coeffs.split(",")]
        return polynomial(coeffs, **kw)
    if fam == "zero":
        return polynomial([0.0], a=kw.get("a", 0.0), b=kw.get("b", 0.0))
    if fam == "cubic_minus_linear":
        return cubic_minus_linear(float(spec["lam"]))
    if fam == "tabulated":
        return tabulated(spec["s"], spec["g"], kw.get("a", 0.0), kw.get("b", kw.get("a", 0.0)))
    raise DomainError(f"unknown or unsupported nonlinearity family {fam!r}")


# ---------------------------------------------------------------------------

def eval_G(nl, t):
    """G(t) = ∫_{a_convex}^t g(s) ds."""
    return nl.G(t)


def threshold_violations(nl, s_max=None, n=400):
    """Sampled check of the convexity / monotonicity / positivity claims.

    Returns human-readable descriptions of every failure (empty when the
    thresholds hold on the sampled window).
    """
    a, b = nl.a_convex, nl.b_monotone
    if s_max is None:
        s_max = max(1e3, 10.0 * (b + 1.0))
    out = []
    s = a + (s_max - a) * np.linspace(0.0, 1.0, n) ** 3
    h = max(1e-4, 1e-3 * (s_max - a) / n)
    c = s[(s - h >= a) & (s + h <= s_max)]
    gm, g0, gp = nl.g(c - h), nl.g(c), nl.g(c + h)
    # overflowed samples (exponential families) give nan and are skipped
    with np.errstate(invalid="ignore"):
        second = gp - 2 * g0 + gm
        scale = np.abs(gp) + 2 * np.abs(g0) + np.abs(gm)
        bad = second < -TOL_CONVEX * np.maximum(scale, 1e-300)
    if np.any(bad):
        out.append(f"convexity fails beyond a={a:g} near s={c[bad][0]:.6g}")
    sb = b + (s_max - b) * np.linspace(0.0, 1.0, n) ** 3
    sb = sb[sb > b]
    gb = nl.g(sb)
    if np.any(gb <= 0):
        out.append(f"g not positive beyond b={b:g} near s={sb[gb <= 0][0]:.6g}")
    with np.errstate(invalid="ignore"):
        d = np.diff(gb)
    if np.any(d < -TOL_MONO * (np.abs(gb[1:]) + np.abs(gb[:-1]))):
        out.append(f"g not nondecreasing beyond b={b:g}")
    return out


@dataclass(frozen=True)
class SplitNonlinearity:
    """g = g_inf + g_tilde with g_inf convex nondecreasing and g_tilde = 0 on [M, ∞)."""

    base: Nonlinearity
    g_inf: Nonlinearity
    M: float
    K0_bound: float | None = None

    def g_tilde(self, s):
        s = _as_array(s)
        gM = float(self.base.g(self.M))
        return np.where(s >= self.M, 0.0, self.base.g(s) - gM)

    def k0(self, lo, hi=None, n=4001):
        """sup |g_tilde| over [lo, hi]; hi defaults to M (g_tilde vanishes beyond)."""
        hi = self.M if hi is None else min(hi, self.M)
        if hi <= lo:
            return 0.0
        s = np.linspace(lo, hi, n)
        vals = np.abs(self.g_tilde(s))
        j = int(np.argmax(vals))
        best = float(vals[j])
        left, right = s[max(j - 1, 0)], s[min(j + 1, n - 1)]
        if right > left:
            res = optimize.minimize_scalar(
                lambda x: -abs(float(self.g_tilde(x))),
                bounds=(left, right),
                method="bounded",
                options={"xatol": 1e-13 * (1 + abs(left))},
            )
            best = max(best, -float(res.fun))
        return best

    def with_k0(self, lo, hi=None):
        return SplitNonlinearity(self.base, self.g_inf, self.M, self.k0(lo, hi))


def split_asymptotic(nl, M=None):
    """Split g = g_inf + g_tilde with the constant extension of g below M.

    ``M`` defaults to ``b_monotone``.  Fails if g(M) < 0 or g decreases to the
    right of M, since the extension would then not be convex nondecreasing.
    """
    M = nl.b_monotone if M is None else float(M)
    gM = float(nl.g(M))
    # M is often a computed root of g: allow round-off below zero
    if gM < -1e-12 * max(1.0, abs(M) * abs(float(nl.dg(M)))):
        raise DomainError(f"g(M) = {gM:g} < 0; constant extension would not be admissible")
    h = 1e-6 * max(1.0, abs(M))
    right = (float(nl.g(M + h)) - gM) / h
    if right < -TOL_MONO * max(1.0, abs(gM) / h):
        raise DomainError(f"right divided difference of g at M={M:g} is negative")
    g_inf = Nonlinearity("clamped", {"base": nl, "M": M}, M, M)
    return SplitNonlinearity(nl, g_inf, M)
