"""CSV field files, JSON reports and two-column plot data.

Field CSV layout::

    r_in,R,n_r,n_theta,k
    0.5,1.0,256,128,1000000.0
    i_r,i_theta,r,theta,u
    0,0,0.50195...,0.0,2.49...
    ...

Node rows come in (i_r, i_θ) order.  Boundary data are stored as extra rows
with ``i_r = -1`` (the inner circle r = r_in, annuli only) and ``i_r = n_r``
(the outer circle r = R).  A radial profile is written in the same layout with
``n_theta = 1`` and θ = 0.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .field2d import PolarField, PolarGrid
from .grids import RadialGrid
from .radial import RadialProfile

SCHEMA_VERSION = "1.0"
META_COLUMNS = ["r_in", "R", "n_r", "n_theta", "k"]
NODE_COLUMNS = ["i_r", "i_theta", "r", "theta", "u"]


def _fmt(x):
    return repr(float(x))


def _write_rows(path, meta, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(META_COLUMNS)
        w.writerow(meta)
        w.writerow(NODE_COLUMNS)
        w.writerows(rows)


def write_field_csv(path, f: PolarField):
    g = f.grid
    r, th = g.r_nodes, g.theta_nodes
    meta = [_fmt(g.r_in), _fmt(g.R), g.n_r, g.n_theta, _fmt(f.boundary_k)]
    rows = []
    if f.inner_data is not None:
        rows += [[-1, j, _fmt(g.r_in), _fmt(th[j]), _fmt(v)] for j, v in enumerate(f.inner_data)]
    for i in range(g.n_r):
        ri = _fmt(r[i])
        rows += [[i, j, ri, _fmt(th[j]), _fmt(f.values[i, j])] for j in range(g.n_theta)]
    rows += [[g.n_r, j, _fmt(g.R), _fmt(th[j]), _fmt(v)] for j, v in enumerate(f.outer_values)]
    _write_rows(path, meta, rows)


def write_profile_csv(path, p: RadialProfile):
    g = p.grid
    meta = [_fmt(g.r_in), _fmt(g.R), g.n, 1, _fmt(p.k_level)]
    rows = []
    if g.r_in > 0.0:
        rows.append([-1, 0, _fmt(g.r_in), "0.0", _fmt(p.inner_value)])
    rows += [[i, 0, _fmt(ri), "0.0", _fmt(u)] for i, (ri, u) in enumerate(zip(g.r, p.u_values))]
    rows.append([g.n, 0, _fmt(g.R), "0.0", _fmt(p.k_level)])
    _write_rows(path, meta, rows)


def read_csv(path, N=2):
    """Load a field file as a PolarField, or as a RadialProfile when n_theta = 1.

    Raises
    ------
    DomainError
        If the file does not follow the field layout.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DomainError(f"cannot read field file {path}: {exc.strerror}") from None
    if len(rows) < 4 or rows[0] != META_COLUMNS or rows[2] != NODE_COLUMNS:
        raise DomainError(f"{path}: not a field file (bad header)")
    try:
        r_in, R = float(rows[1][0]), float(rows[1][1])
        n_r, n_t = int(rows[1][2]), int(rows[1][3])
        k = float(rows[1][4])
        body = np.array([[float(x) for x in row] for row in rows[3:]])
    except (ValueError, IndexError):
        raise DomainError(f"{path}: malformed numeric entry") from None
    if body.ndim != 2 or body.shape[1] != 5:
        raise DomainError(f"{path}: node rows need 5 columns")
    ir = body[:, 0].astype(int)
    it = body[:, 1].astype(int)
    nodes = (ir >= 0) & (ir < n_r)
    if nodes.sum() != n_r * n_t:
        raise DomainError(f"{path}: expected {n_r * n_t} node rows, found {int(nodes.sum())}")
    vals = np.full((n_r, n_t), np.nan)
    vals[ir[nodes], it[nodes]] = body[nodes, 4]
    r = np.full(n_r, np.nan)
    r[ir[nodes]] = body[nodes, 2]
    if np.isnan(vals).any():
        raise DomainError(f"{path}: duplicate or missing nodes")
    inner = body[ir == -1]
    outer = body[ir == n_r]
    try:
        grid = RadialGrid(r, R, r_in)
    except DomainError as exc:
        raise DomainError(f"{path}: {exc}") from None
    inner_vals = inner[np.argsort(inner[:, 1]), 4] if inner.size else None
    if r_in > 0.0 and (inner_vals is None or inner_vals.size != n_t):
        raise DomainError(f"{path}: annulus file lacks inner boundary rows")
    if n_t == 1:
        inner_value = float(inner_vals[0]) if inner_vals is not None else math.nan
        du = grid.derivative(vals[:, 0], k, None if r_in == 0.0 else inner_value)
        return RadialProfile(grid, int(N), vals[:, 0], du, "file", k, inner_value, None, {"source": path.name})
    outer_vals = outer[np.argsort(outer[:, 1]), 4] if outer.size else None
    if outer_vals is not None and outer_vals.size != n_t:
        raise DomainError(f"{path}: outer boundary rows incomplete")
    pg = PolarGrid(grid, n_t)
    return PolarField(pg, vals, k, inner_vals, outer_vals, {"source": path.name})


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings "nan", "inf", "-inf"."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj):
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def make_report(command, config_echo, checks, constants, files, extra=None):
    """Assemble a report; ``checks`` entries carry name, status, values and tolerances."""
    rep = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config_echo,
        "checks": checks,
        "constants": constants,
        "files": sorted(files),
    }
    if extra:
        rep.update(extra)
    return rep


def write_two_column(path, x, y, header):
    """Plain ``x y`` text for plotting tools."""
    data = np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
    np.savetxt(path, data, fmt="%.17g", header=header, comments="# ")
