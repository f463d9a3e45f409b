"""Damped Newton iteration with Armijo backtracking on the scaled residual norm."""
from __future__ import annotations

import numpy as np

from .errors import SolverError

ARMIJO_C = 1e-4


def damped_newton(
    residual,
    solve,
    u0,
    scale=None,
    project=None,
    tol=1e-12,
    step_tol=1e-13,
    max_iter=200,
    max_backtracks=40,
):
    """Solve residual(u) = 0.

    Parameters
    ----------
    residual : callable
        ``residual(u) -> (F, J)``; ``J`` is passed through to ``solve``.
    solve : callable
        ``solve(J, F) -> delta`` with ``J delta = F``; the update is ``u - t delta``.
    scale : callable, optional
        ``scale(u) -> s`` with s > 0 nodewise; convergence and the merit
        function use F / s.  Defaults to 1.
    project : callable, optional
        Applied to every trial iterate (e.g. to enforce bounds).
    tol : float
        Convergence when max |F / s| <= tol.
    step_tol : float
        Convergence when a full step satisfies |delta| <= step_tol (1 + |u|)
        nodewise and the residual has stopped decreasing meaningfully.

    Returns
    -------
    u : ndarray
    info : dict
        iterations, backtracks, residual (scaled sup-norm), converged_by.
    """
    u = np.array(u0, dtype=float)
    if project is not None:
        u = project(u)
    F, J = residual(u)
    s = scale(u) if scale is not None else 1.0
    total_bt = 0
    history = []
    for it in range(max_iter + 1):
        if not np.all(np.isfinite(F)):
            raise SolverError("non-finite residual", last_iterate=u, info={"iterations": it})
        rn = float(np.max(np.abs(F / s)))
        history.append(rn)
        if rn <= tol:
            return u, _info(it, total_bt, rn, "residual", history)
        if it == max_iter:
            break
        try:
            delta = solve(J, F)
        except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
            raise SolverError(f"linear solve failed: {exc}", last_iterate=u, info={"iterations": it}) from exc
        if not np.all(np.isfinite(delta)):
            raise SolverError("non-finite Newton step", last_iterate=u, info={"iterations": it})
        merit0 = 0.5 * float(np.sum((F / s) ** 2))
        t = 1.0
        for bt in range(max_backtracks + 1):
            trial = u - t * delta
            if project is not None:
                trial = project(trial)
            with np.errstate(over="ignore", invalid="ignore"):
                F_new, J_new = residual(trial)
            if np.all(np.isfinite(F_new)):
                merit = 0.5 * float(np.sum((F_new / s) ** 2))
                if merit <= (1.0 - 2.0 * ARMIJO_C * t) * merit0:
                    break
            t *= 0.5
        else:
            small = np.all(np.abs(delta) <= step_tol * (1.0 + np.abs(u)))
            if small:
                # at round-off level no step can reduce the merit further
                return u, _info(it, total_bt, rn, "step", history)
            raise SolverError(
                "line search failed after maximum backtracking",
                last_iterate=u,
                info=_info(it, total_bt, rn, None, history),
            )
        total_bt += bt
        step_small = t == 1.0 and np.all(np.abs(delta) <= step_tol * (1.0 + np.abs(u)))
        u, F, J = trial, F_new, J_new
        if scale is not None:
            s = scale(u)
        if step_small:
            rn = float(np.max(np.abs(F / s)))
            history.append(rn)
            return u, _info(it + 1, total_bt, rn, "step", history)
    raise SolverError(
        f"Newton did not converge in {max_iter} iterations",
        last_iterate=u,
        info=_info(max_iter, total_bt, history[-1], None, history),
    )


def _info(it, bt, rn, how, history):
    return {
        "iterations": it,
        "backtracks": bt,
        "residual": rn,
        "converged_by": how,
        "history": history,
    }
