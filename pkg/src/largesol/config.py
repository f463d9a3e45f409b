"""Run configuration: flat ``section.key = value`` text with environment overrides.

Example::

    # cubic on the unit ball
    nonlinearity.family = power
    nonlinearity.q = 3
    geometry.R = 1
    problem.N = 3
    grid.n_r = 2048

Lines starting with ``#`` are comments.  Every key must appear in
:data:`SCHEMA`; unknown keys and malformed values raise :class:`ConfigError`
before anything is solved.  An environment variable ``LARGESOL_<SECTION>__<KEY>``
(double underscore for the dot, any case) overrides the file.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .nonlinearity import from_dict

ENV_PREFIX = "LARGESOL_"


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    return [float(t) for t in items]


def _strings(text):
    if isinstance(text, (list, tuple)):
        return [str(x) for x in text]
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _bool(text):
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _str(text):
    return str(text).strip()


# key -> (parser, default); None default means "absent unless given"
SCHEMA = {
    "nonlinearity.family": (_str, "power"),
    "nonlinearity.q": (float, None),
    "nonlinearity.c": (float, None),
    "nonlinearity.alpha": (float, None),
    "nonlinearity.lam": (float, None),
    "nonlinearity.coeffs": (_floats, None),
    "nonlinearity.s": (_floats, None),
    "nonlinearity.g": (_floats, None),
    "nonlinearity.a": (float, None),
    "nonlinearity.b": (float, None),
    "nonlinearity.M": (float, None),
    "geometry.kind": (_str, "disk"),
    "geometry.R": (float, 1.0),
    "geometry.r_in": (float, 0.0),
    "geometry.inner_mean": (float, 2.0),
    "geometry.inner_amplitude": (float, 0.0),
    "geometry.inner_peak": (float, 0.0),
    "problem.N": (int, 2),
    "grid.n_r": (int, 1024),
    "grid.n_theta": (int, 128),
    "grid.grading": (_str, "auto"),
    "continuation.schedule": (_floats, [10.0**j for j in range(1, 9)]),
    "continuation.stop_tol": (float, 1e-5),
    "continuation.k": (float, 1e3),
    "solver.field": (_str, "radial"),
    "solver.methods": (_strings, ["continuation", "w_transform"]),
    "solver.init": (_str, "radial_lift"),
    "solver.amplitude": (float, 0.3),
    "ko.T_max": (float, None),
    "ko.margin": (float, 0.05),
    "checks.run": (_strings, None),
    "checks.tol": (float, 0.02),
    "checks.disc_error": (float, None),
    "checks.variation_tol": (float, None),
    "checks.r0": (float, None),
    "checks.probe": (float, 0.97),
    "checks.rho_threshold": (float, 0.05),
    "checks.two_sided": (_bool, False),
    "fit.window": (float, 0.01),
    "sweep.param": (_str, None),
    "sweep.values": (_strings, []),
    "seed": (int, 0),
}

GEOMETRIES = ("disk", "annulus")
FIELDS = ("radial", "polar")
METHODS = ("continuation", "w_transform")
INITS = ("radial_lift", "constant", "perturbed")
GRADINGS = ("auto", "uniform")
CHECKS = (
    "angular_variation",
    "moving_plane",
    "monotonicity",
    "gnn_hypothesis",
    "sandwich",
    "tangential_bound",
    "second_tangential_bound",
    "radial_blowup",
)


def parse_text(text, source="<config>"):
    """Split config text into a raw ``{key: str}`` mapping."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (p.strip() for p in s.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _canonical(key):
    """Schema key matching ``key`` case-insensitively, or None."""
    if key in SCHEMA:
        return key
    low = key.lower()
    for k in SCHEMA:
        if k.lower() == low:
            return k
    return None


def env_overrides(environ=None):
    """Config keys set through ``LARGESOL_<SECTION>__<KEY>`` variables."""
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if not name.upper().startswith(ENV_PREFIX):
            continue
        dotted = name[len(ENV_PREFIX):].replace("__", ".")
        key = _canonical(dotted)
        if key is None:
            raise ConfigError(f"environment variable {name} does not name a config key")
        out[key] = value
    return out


@dataclass(frozen=True)
class RunConfig:
    """A validated configuration; ``values`` holds every schema key after defaults."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def nonlinearity(self):
        spec = {k.split(".", 1)[1]: v for k, v in self.values.items() if k.startswith("nonlinearity.") and v is not None}
        spec.pop("M", None)
        return from_dict(spec)

    def echo(self):
        """Resolved key/value pairs, sorted, with absent keys dropped."""
        return {k: self.values[k] for k in sorted(self.values) if self.values[k] is not None}

    def with_overrides(self, **updates):
        raw = dict(self.values)
        raw.update(updates)
        return build_config(raw)

    @property
    def is_annulus(self):
        return self.values["geometry.kind"] == "annulus"

    def inner_data(self, theta):
        """Inner boundary values m + A cos θ, or m + A exp(κ (cos θ - 1)) when κ = inner_peak > 0."""
        m = self.values["geometry.inner_mean"]
        amp = self.values["geometry.inner_amplitude"]
        kappa = self.values["geometry.inner_peak"]
        if kappa > 0.0:
            return m + amp * np.exp(kappa * (np.cos(theta) - 1.0))
        return m + amp * np.cos(theta)


def build_config(raw):
    """Validate a mapping of strings (or already typed values) into a :class:`RunConfig`."""
    vals = {k: d for k, (_, d) in SCHEMA.items()}
    for key, value in raw.items():
        canon = _canonical(key)
        if canon is None:
            raise ConfigError(f"unknown config key {key!r}")
        parser = SCHEMA[canon][0]
        if value is None:
            vals[canon] = value
            continue
        try:
            vals[canon] = parser(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {canon}: {value!r} ({exc})") from None
    _validate(vals)
    return RunConfig(vals)


def _choice(vals, key, allowed):
    if vals[key] not in allowed:
        raise ConfigError(f"{key} must be one of {', '.join(allowed)}; got {vals[key]!r}")


def _validate(v):
    _choice(v, "geometry.kind", GEOMETRIES)
    _choice(v, "solver.field", FIELDS)
    _choice(v, "solver.init", INITS)
    _choice(v, "grid.grading", GRADINGS)
    for m in v["solver.methods"]:
        if m not in METHODS:
            raise ConfigError(f"solver.methods: unknown method {m!r}")
    if v["checks.run"] is not None:
        for c in v["checks.run"]:
            if c not in CHECKS:
                raise ConfigError(f"checks.run: unknown check {c!r}")
    R, r_in = v["geometry.R"], v["geometry.r_in"]
    if not (math.isfinite(R) and R > 0):
        raise ConfigError("geometry.R must be positive")
    if v["geometry.kind"] == "annulus":
        if not 0.0 < r_in < R:
            raise ConfigError("annulus needs 0 < geometry.r_in < geometry.R")
    elif r_in != 0.0:
        raise ConfigError("geometry.r_in must be 0 for a disk")
    if v["problem.N"] < 1:
        raise ConfigError("problem.N must be at least 1")
    if v["solver.field"] == "polar" and v["problem.N"] != 2:
        raise ConfigError("polar fields are two-dimensional: set problem.N = 2")
    if v["grid.n_r"] < 8:
        raise ConfigError("grid.n_r must be at least 8")
    if v["grid.n_theta"] < 16 or v["grid.n_theta"] % 2:
        raise ConfigError("grid.n_theta must be even and at least 16")
    sched = v["continuation.schedule"]
    if not sched or any(not (math.isfinite(k) and k > 0) for k in sched):
        raise ConfigError("continuation.schedule must be a nonempty list of positive levels")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise ConfigError("continuation.schedule must increase strictly")
    if not v["continuation.stop_tol"] >= 0:
        raise ConfigError("continuation.stop_tol must be nonnegative")
    if not 0.0 < v["checks.probe"] < 1.0:
        raise ConfigError("checks.probe must lie in (0, 1)")
    if not 0.0 < v["fit.window"] < 0.1:
        raise ConfigError("fit.window must lie in (0, 0.1)")
    if v["sweep.param"] is not None and _canonical(v["sweep.param"]) is None:
        raise ConfigError(f"sweep.param {v['sweep.param']!r} is not a config key")
    spec = {k.split(".", 1)[1]: x for k, x in v.items() if k.startswith("nonlinearity.") and x is not None}
    spec.pop("M", None)
    try:
        from_dict(spec)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"nonlinearity: {exc}") from None


def load_config(path=None, environ=None, overrides=None):
    """Read a config file, apply environment and explicit overrides, validate."""
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        raw.update(parse_text(text, str(path)))
    raw.update(env_overrides(environ))
    raw.update(overrides or {})
    return build_config(raw)
