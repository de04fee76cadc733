"""Adaptive integration with sign-change event detection on dense output."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

RTOL = 1e-10
ATOL = 1e-10
MAX_STEP = math.pi / 100
EVENT_XTOL = 1e-12


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # shape (dim, len(t))
    events: list[tuple[float, np.ndarray]] = field(default_factory=list)
    status: str = "ok"


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_max: float,
    event: Callable[[float, np.ndarray], float] | None = None,
    direction: int = 0,
    stop_after: int | None = None,
    guard: Callable[[np.ndarray], bool] | None = None,
    rtol: float = RTOL,
    atol: float = ATOL,
    max_step: float = MAX_STEP,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from 0 with DOP853.

    ``event`` zeros are located only at strict sign changes between
    accepted steps (a zero exactly at the start is ignored), then refined
    by Brent's method on the dense interpolant. ``direction`` +1 keeps
    upward crossings only, -1 downward only. ``guard`` returning False
    aborts with status ``"left-domain"``.
    """
    solver = DOP853(rhs, 0.0, np.asarray(y0, dtype=float), t_max, rtol=rtol, atol=atol, max_step=max_step)
    ts, ys = [0.0], [solver.y.copy()]
    found: list[tuple[float, np.ndarray]] = []
    g_prev = event(0.0, solver.y) if event else None
    status = "ok"
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            status = f"failed: {msg}"
            break
        ts.append(solver.t)
        ys.append(solver.y.copy())
        if guard is not None and not guard(solver.y):
            status = "left-domain"
            break
        if event is None:
            continue
        g_new = event(solver.t, solver.y)
        crossed = g_prev * g_new < 0
        if crossed and direction:
            crossed = (g_new - g_prev) * direction > 0
        if crossed:
            dense = solver.dense_output()
            te = brentq(lambda s: event(s, dense(s)), solver.t_old, solver.t, xtol=EVENT_XTOL, rtol=4 * np.finfo(float).eps)
            found.append((te, dense(te)))
            if stop_after is not None and len(found) >= stop_after:
                ts[-1], ys[-1] = te, dense(te)
                break
        if g_new != 0.0:
            g_prev = g_new
    else:
        if solver.status == "failed":
            status = "failed"
    if status == "ok" and stop_after is not None and len(found) < stop_after:
        status = "no-event"
    return Trajectory(np.array(ts), np.array(ys).T, found, status)


def geodesic_rhs(christoffel: Callable[[np.ndarray], np.ndarray]) -> Callable[[float, np.ndarray], np.ndarray]:
    """ODE right side ``x'' = -G(x)(x', x')`` for a 2D connection.

    ``christoffel(x)`` must return an array ``G[k, i, j]``.
    """

    def rhs(_t, y):
        x, v = y[:2], y[2:]
        G = christoffel(x)
        acc = -np.einsum("kij,i,j->k", G, v, v)
        return np.concatenate([v, acc])

    return rhs
