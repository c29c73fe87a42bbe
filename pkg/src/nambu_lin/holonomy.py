"""Numeric holonomy witness for a non-unimodular coorder-1 structure.

The structure is dual to the integrable 1-form

    alpha = df + g(f) / (x1^2 + x2^2) * (x2 dx1 - x1 dx2),

with ``f = (x1^2 + x2^2 - x3^2 - ... - xn^2) / 2`` and a bump g vanishing on
``(-inf, 0]`` and positive on ``(0, inf)``.  Its Hamiltonian field
``X = P(dx3, ..., dxn, .)`` satisfies ``X f = -g(f)`` and rotates the
(x1, x2)-plane at unit rate, so orbits with f > 0 spiral towards the cone
``f = 0``.  The linear model (g = 0) preserves f.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .exterior import DiffForm, MultiVector, exact_form
from .nambu import NambuCandidate, hamiltonian_vf, multivector_from_dual
from .odeint import dopri45
from .poly import Poly

__all__ = [
    "default_bump",
    "CounterexampleSpec",
    "TrajectoryRecord",
    "SpiralMetrics",
    "alpha_form",
    "symbolic_field",
    "counterexample_field",
    "integrate_trajectory",
    "compare_f_ode",
    "spiral_metrics",
    "linear_model_orbit",
]


def default_bump(x: float) -> float:
    return float(np.exp(-1.0 / x)) if x > 0 else 0.0


@dataclass(frozen=True)
class CounterexampleSpec:
    n: int = 3
    bump: Callable[[float], float] = default_bump
    orientation: int = 1  # +1 gives dtheta/dt = -1

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("the counterexample lives in dimension n >= 3")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def f(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * (x[0] ** 2 + x[1] ** 2 - float(np.sum(x[2:] ** 2)))


def alpha_form(n: int) -> DiffForm:
    """``df + G (x2 dx1 - x1 dx2)`` with G = g(f)/rho^2 held as a parameter variable (index n)."""
    ring = n + 1
    xs = Poly.variables(ring)
    f = (xs[0] ** 2 + xs[1] ** 2 - sum((xs[i] ** 2 for i in range(2, n)), Poly.zero(ring))) * Fraction(1, 2)
    G = xs[n]
    rot = DiffForm(n, 1, {(0,): xs[1] * G, (1,): -xs[0] * G}, nvars=ring)
    return exact_form(f, n) + rot


@functools.lru_cache(maxsize=8)
def symbolic_field(n: int) -> MultiVector:
    """Hamiltonian field ``P(dx3, ..., dxn, .)`` of the dual of alpha, in Q[x, G]."""
    P = multivector_from_dual(alpha_form(n))
    ring = n + 1
    return hamiltonian_vf(NambuCandidate(P), [Poly.var(ring, i) for i in range(2, n)])


@functools.lru_cache(maxsize=8)
def _field_tables(n: int):
    # X^j = sum_terms c * x^a * G^b, flattened for fast float evaluation
    X = symbolic_field(n)
    tables = []
    for j in range(n):
        p = X[(j,)]
        tables.append([(float(c), np.array(e[:n]), e[n]) for e, c in p.items()])
    return tables


def counterexample_field(spec: CounterexampleSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ValueError(f"point must have length {spec.n}")
    gf = spec.bump(spec.f(x))
    rho2 = x[0] ** 2 + x[1] ** 2
    if rho2 == 0.0:
        if gf != 0.0:
            raise ZeroDivisionError("field is singular on the x3-axis where g(f) != 0")
        G = 0.0
    else:
        G = gf / rho2
    out = np.zeros(spec.n)
    for j, terms in enumerate(_field_tables(spec.n)):
        out[j] = sum(c * np.prod(x ** a) * G**b for c, a, b in terms)
    return spec.orientation * out


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    points: np.ndarray
    f_values: np.ndarray
    theta: np.ndarray
    spec: CounterexampleSpec = field(default_factory=CounterexampleSpec)

    def __len__(self):
        return len(self.times)


def _record(spec, sol_t, sol_y) -> TrajectoryRecord:
    pts = np.asarray(sol_y)
    fv = np.array([spec.f(p) for p in pts])
    theta = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0])) if len(pts) else np.array([])
    return TrajectoryRecord(np.asarray(sol_t), pts, fv, theta, spec)


def integrate_trajectory(spec: CounterexampleSpec, x0, T: float, tol: float = 1e-12,
                         max_step: float = 0.25) -> TrajectoryRecord:
    """Adaptive integration of the counterexample field, recording every accepted step."""
    x0 = np.asarray(x0, dtype=float)
    if x0[0] == 0 and x0[1] == 0 and spec.bump(spec.f(x0)) != 0:
        raise ValueError("starting point on the singular axis")
    sol = dopri45(lambda t, y: counterexample_field(spec, y), (0.0, T), x0,
                  rtol=tol, atol=tol, max_step=max_step)
    return _record(spec, sol.t, sol.y)


def compare_f_ode(spec: CounterexampleSpec, f0: float, times: np.ndarray) -> np.ndarray:
    """Independent 1-D solution of ``f' = -g(f)`` at the given times (scipy DOP853)."""
    times = np.asarray(times, dtype=float)
    if len(times) == 0:
        return times
    sol = solve_ivp(lambda t, y: [-spec.orientation * spec.bump(y[0])], (times[0], times[-1]), [f0],
                    method="DOP853", t_eval=times, rtol=1e-13, atol=1e-16)
    return sol.y[0]


@dataclass(frozen=True)
class SpiralMetrics:
    theta_rate: float
    f_monotone: bool
    f_strictly_decreasing: bool
    f_ode_residual: float
    theta_excursion: float
    f_drop: float


def spiral_metrics(tr: TrajectoryRecord) -> SpiralMetrics:
    if len(tr) < 2:
        return SpiralMetrics(float("nan"), True, False, 0.0, 0.0, 0.0)
    slope = float(np.polyfit(tr.times, tr.theta, 1)[0])
    df = np.diff(tr.f_values)
    ref = compare_f_ode(tr.spec, tr.f_values[0], tr.times)
    return SpiralMetrics(
        theta_rate=slope,
        f_monotone=bool(np.all(df <= 0)),
        f_strictly_decreasing=bool(np.all(df < 0)),
        f_ode_residual=float(np.max(np.abs(tr.f_values - ref))),
        theta_excursion=float(np.max(tr.theta) - np.min(tr.theta)),
        f_drop=float(tr.f_values[0] - tr.f_values[-1]),
    )


def _no_bump(x: float) -> float:
    return 0.0


def linear_model_orbit(x0, T: float, tol: float = 1e-12, orientation: int = 1) -> TrajectoryRecord:
    """Orbit of the Hamiltonian field of the linear model (g = 0): a rotation preserving f."""
    x0 = np.asarray(x0, dtype=float)
    spec = CounterexampleSpec(n=len(x0), bump=_no_bump, orientation=orientation)
    return integrate_trajectory(spec, x0, T, tol)
