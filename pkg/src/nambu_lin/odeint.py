"""Adaptive Dormand-Prince 5(4) integrator.

Used for the Moser radial flow and the holonomy trajectories.  Kept small and
explicit so the numeric checks elsewhere can compare it against scipy's
independent DOP853 implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["IntegrationError", "OdeSolution", "dopri45"]

# Butcher tableau (Dormand & Prince 1980)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class IntegrationError(RuntimeError):
    pass


@dataclass
class OdeSolution:
    t: np.ndarray  # accepted times, shape (m,)
    y: np.ndarray  # states, shape (m, dim)
    nfev: int

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]


def dopri45(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: float | None = None,
    max_step: float = np.inf,
    max_steps: int = 1_000_000,
    t_eval_points: np.ndarray | None = None,
) -> OdeSolution:
    """Integrate ``y' = fun(t, y)`` over ``t_span`` with local error control.

    ``t_eval_points`` forces the integrator to land exactly on those times
    (they are added as step boundaries), which keeps output free of
    interpolation error.
    """
    t0, t1 = map(float, t_span)
    y = np.array(y0, dtype=float)
    direction = 1.0 if t1 >= t0 else -1.0
    stops = [] if t_eval_points is None else sorted(float(s) for s in t_eval_points if (s - t0) * direction > 0)
    if direction < 0:
        stops = stops[::-1]
    stops.append(t1)

    ts = [t0]
    ys = [y.copy()]
    nfev = 0
    t = t0
    k1 = np.asarray(fun(t, y), dtype=float)
    nfev += 1
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.linalg.norm(y / scale) / np.sqrt(y.size)
        d1 = np.linalg.norm(k1 / scale) / np.sqrt(y.size)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, abs(t1 - t0)) if t1 != t0 else 0.0
    else:
        h = abs(h0)
    h = min(h, max_step)

    stop_iter = iter(stops)
    target = next(stop_iter)
    steps = 0
    while True:
        if (target - t) * direction <= 0:
            try:
                target = next(stop_iter)
            except StopIteration:
                break
            continue
        steps += 1
        if steps > max_steps:
            raise IntegrationError(f"exceeded {max_steps} steps at t={t}")
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t}")
        remaining = abs(target - t)
        last = h >= remaining
        h_try = remaining if last else h
        hs = h_try * direction
        k = [k1]
        for i in range(1, 7):
            yi = y + hs * sum(a * kj for a, kj in zip(_A[i], k))
            k.append(np.asarray(fun(t + _C[i] * hs, yi), dtype=float))
        nfev += 6
        y_new = y + hs * sum(b * kj for b, kj in zip(_B5, k) if b)
        err = hs * sum(e * kj for e, kj in zip(_E, k))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = np.sqrt(np.mean((err / scale) ** 2))
        if not np.isfinite(err_norm):
            h = h_try * 0.2
            continue
        if err_norm <= 1.0:
            t = target if last else t + hs
            y = y_new
            k1 = k[6]  # first-same-as-last
            ts.append(t)
            ys.append(y.copy())
            factor = 5.0 if err_norm == 0 else min(5.0, 0.9 * err_norm ** -0.2)
            # a step shortened to hit a stop does not shrink the proposal
            h = min(max(h_try * factor, h if last else 0.0), max_step)
        else:
            h = h_try * max(0.2, 0.9 * err_norm ** -0.2)
    return OdeSolution(np.array(ts), np.array(ys), nfev)
