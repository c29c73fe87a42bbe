"""Linearization of coorder-1 Nambu structures with a closed dual form.

Pipeline: closed dual 1-form -> potential g -> Morse data and signature ->
normal form ``k(f) * Pi_l`` (supplied) -> Moser coefficient r_t(f) -> radial
flow -> pullback check ``Phi_1^* (k(f) Pi_l) = Pi_l``.

The Morse-lemma step that produces ``(k, f)`` from ``(g, mu)`` is not
computed here; the Moser stage takes the normal form as input.

All symbolic objects in the Moser stage live in the ring Q[x1..xn, t], with t
as a trailing parameter variable.
"""

from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .exterior import (
    MultiVector,
    basis_tuples,
    contract_covector,
    d,
    euler_field,
    eval_multivector,
    exact_form,
    lie_derivative,
    schouten,
)
from .linalg import Signature
from .nambu import (
    NambuCandidate,
    NambuError,
    is_nambu,
    is_unimodular,
    dual_form,
    homotopy_potential,
    linear_part,
    morse_check,
    nondegenerate_type1,
)
from .odeint import dopri45
from .poly import Poly, RationalFunc

__all__ = [
    "LinearizeError",
    "FlowBlowUpError",
    "PotentialData",
    "MoserSpec",
    "MoserCoefficient",
    "ScalarFlow",
    "FlowSample",
    "Stage",
    "LinearizeReport",
    "homotopy_potential",
    "potential_from",
    "normal_form_quadratic",
    "linear_model",
    "moser_family",
    "derive_rt",
    "printed_rt",
    "moser_residual",
    "scalar_flow",
    "flow_map",
    "full_flow",
    "flow_jacobian_fd",
    "pullback_multivector",
    "pullback_residual",
    "sample_grid",
    "linearize_report",
]


class LinearizeError(NambuError):
    """A hypothesis of the linearization pipeline fails."""


class FlowBlowUpError(LinearizeError):
    """The Moser coefficient's denominator reaches zero along the flow."""


# potential


@dataclass(frozen=True)
class PotentialData:
    g: Poly
    h: Poly
    signature: Signature
    congruence: list
    hessian: list
    diagonal: list


def potential_from(c: NambuCandidate, h: Poly | int = 1) -> PotentialData:
    if c.coorder != 1:
        raise LinearizeError("potential recovery needs coorder 1")
    if not isinstance(h, Poly):
        h = Poly.const(c.P.nvars, h)
    uni = is_unimodular(c, h)
    if not uni:
        raise LinearizeError("dual form is not closed for the supplied density")
    w = dual_form(c, h)
    try:
        g = homotopy_potential(w)
    except NambuError as exc:
        raise LinearizeError(str(exc)) from exc
    if exact_form(g, c.n) != w:
        raise AssertionError("homotopy potential does not reproduce the dual form")
    try:
        m = morse_check(g, c.n)
    except NambuError as exc:
        raise LinearizeError(str(exc)) from exc
    return PotentialData(g, h, m.signature, m.congruence, m.hessian, m.diagonal)


# Moser stage


@dataclass(frozen=True)
class MoserSpec:
    """Normal-form data ``(n, signature, k)`` with ``Pi = k(f) Pi_l``."""

    n: int
    signature: Signature
    k: Poly

    def __post_init__(self):
        if self.n < 3:
            raise LinearizeError("the Moser stage needs n >= 3")
        sig = self.signature
        if not isinstance(sig, Signature):
            sig = Signature(*sig)
            object.__setattr__(self, "signature", sig)
        if sig.pos + sig.neg != self.n or sig.pos < 0 or sig.neg < 0:
            raise LinearizeError(f"signature {sig} must have pos + neg = n = {self.n}")
        k = self.k if isinstance(self.k, Poly) else Poly.const(1, self.k)
        if k.num_vars != 1:
            raise LinearizeError("k must be univariate")
        if k.constant_term() != 1:
            raise LinearizeError("k(0) must equal 1")
        object.__setattr__(self, "k", k)


def normal_form_quadratic(n: int, signature: Signature, nvars: int | None = None) -> Poly:
    ring = n if nvars is None else nvars
    f = Poly.zero(ring)
    for i in range(n):
        f = f + Poly.var(ring, i, 2) * (Fraction(1, 2) if i < signature.pos else Fraction(-1, 2))
    return f


def linear_model(spec: MoserSpec) -> MultiVector:
    """Nondegenerate Type 1 structure with ``iota_{Pi_l} mu_std = df``."""
    return nondegenerate_type1(spec.n, spec.n - 1, spec.signature.pos)


def _ring_objects(spec: MoserSpec):
    n = spec.n
    ring = n + 1
    T = Poly.var(ring, n)
    f = normal_form_quadratic(n, spec.signature, ring)
    Pl = linear_model(spec).with_params(1)
    kf = spec.k.compose([f])
    return ring, T, f, Pl, kf


def moser_family(spec: MoserSpec) -> MultiVector:
    """``Pi_t = (1 + t (k(f) - 1)) Pi_l`` with t the last ring variable."""
    ring, T, f, Pl, kf = _ring_objects(spec)
    return Pl.scale(1 + T * (kf - 1))


def _multiplier(R: MultiVector, Pl: MultiVector) -> Poly:
    """The polynomial m with ``R = m * Pl``; raises if R is not proportional to Pl."""
    if R.is_zero():
        return Poly.zero(R.nvars)
    idx, base = next(iter(Pl.items()))
    try:
        m = R[idx].divide_exact(base)
    except ArithmeticError:
        raise LinearizeError("residual is not proportional to the linear model") from None
    if Pl.scale(m) != R:
        raise LinearizeError("residual is not proportional to the linear model")
    return m


def _as_function_of_f(p: Poly, n: int, signature: Signature, f: Poly) -> Poly:
    """Rewrite a polynomial in (x, t) that depends on x only through f as a polynomial in (f, t)."""
    sigma = 1 if signature.pos > 0 else -1
    terms: dict[tuple[int, int], Fraction] = {}
    for e, c in p.items():
        if any(e[1:n]):
            continue  # read off along the x1-axis, where f = sigma * x1^2 / 2
        if e[0] % 2:
            raise LinearizeError("expression is not a function of f")
        m = e[0] // 2
        # x1^(2m) = (2 sigma f)^m
        key = (m, e[n])
        terms[key] = terms.get(key, Fraction(0)) + c * (2 * sigma) ** m
    out = Poly(2, terms)
    ring = p.num_vars
    if out.compose([f, Poly.var(ring, n)]) != p:
        raise LinearizeError("expression is not a function of f")
    return out


@dataclass(frozen=True)
class MoserCoefficient:
    """``r_t(f) = num(f, t) / den(f, t)`` solving the Moser equation."""

    spec: MoserSpec
    r: RationalFunc
    lie_euler_factor: Poly  # a(f, t) with L_E Pi_t = a * Pi_l
    printed_residual_zero: bool
    printed_r: RationalFunc

    @property
    def den_at_origin(self) -> Fraction:
        return self.r.den.constant_term()


def printed_rt(spec: MoserSpec) -> RationalFunc:
    """The coefficient with denominator ``(n-2)(1 + t(1 - k(f))) - 2 t f k'(f)``."""
    F, T = Poly.variables(2)
    kf = spec.k.compose([F])
    kpf = spec.k.diff(0).compose([F])
    den = (1 + T * (1 - kf)) * (spec.n - 2) - 2 * T * F * kpf
    return RationalFunc(("f", "t"), kf - 1, den)


@functools.lru_cache(maxsize=64)
def derive_rt(spec: MoserSpec) -> MoserCoefficient:
    """Solve ``L_{r E} Pi_t + d/dt Pi_t = 0`` for r = r_t(f).

    ``L_{r(f) E} Pi_t = r L_E Pi_t`` because ``iota_{df} Pi_t = 0``; both facts
    are checked on the way.  The equation then reads ``r a + (k(f) - 1) = 0``
    where ``L_E Pi_t = a Pi_l``.
    """
    n = spec.n
    ring, T, f, Pl, kf = _ring_objects(spec)
    Pt = Pl.scale(1 + T * (kf - 1))
    if contract_covector(exact_form(f, n), Pt):
        raise AssertionError("df does not annihilate the Moser family")
    a = _multiplier(lie_derivative(euler_field(n, ring), Pt), Pl)
    dt = _multiplier(Pt.map_coeffs(lambda p: p.diff(n)), Pl)
    a_ft = _as_function_of_f(a, n, spec.signature, f)
    dt_ft = _as_function_of_f(dt, n, spec.signature, f)
    # r = -dt / a; keep den(0, t) = n - 2 > 0
    num, den = dt_ft, -a_ft
    if den.constant_term() < 0:
        num, den = -num, -den
    r = RationalFunc(("f", "t"), num, den)
    if moser_residual(spec, r):
        raise AssertionError("derived coefficient does not solve the Moser equation")
    printed = printed_rt(spec)
    return MoserCoefficient(spec, r, a_ft, moser_residual(spec, printed).is_zero(), printed)


def moser_residual(spec: MoserSpec, r: RationalFunc) -> Poly:
    """Cleared residual of ``L_{rE} Pi_t + d/dt Pi_t`` as a multiple of Pi_l.

    With r = N/D the Schouten bracket is expanded without assuming anything
    about Pi_t:  ``D^2 [rE, P] = D [N E, P] - N [D E, P] + N D [E, P]``.
    Returns the polynomial m (in x and t) with ``D^2 (residual) = m * Pi_l``.
    """
    n = spec.n
    ring, T, f, Pl, kf = _ring_objects(spec)
    Pt = Pl.scale(1 + T * (kf - 1))
    N, D = r.compose([f, T])
    E = euler_field(n, ring)
    bracket = (
        schouten(E.scale(N), Pt).scale(D)
        - schouten(E.scale(D), Pt).scale(N)
        + schouten(E, Pt).scale(N * D)
    )
    total = bracket + Pt.map_coeffs(lambda p: p.diff(n)).scale(D * D)
    return _multiplier(total, Pl)


# numeric flow


class _FastPoly2:
    """Float evaluator for a bivariate polynomial."""

    def __init__(self, p: Poly):
        self.terms = [(float(c), e[0], e[1]) for e, c in p.items()]

    def __call__(self, u, v):
        return sum(c * u**i * v**j for c, i, j in self.terms)


@dataclass
class ScalarFlow:
    t: np.ndarray
    c: np.ndarray
    lam: np.ndarray
    dlam_dc: np.ndarray

    @property
    def final(self):
        return self.c[-1], self.lam[-1], self.dlam_dc[-1]


def _rt_evaluators(r: RationalFunc):
    num, den = _FastPoly2(r.num), _FastPoly2(r.den)
    dnum, dden = _FastPoly2(r.num.diff(0)), _FastPoly2(r.den.diff(0))
    return num, den, dnum, dden


def scalar_flow(r: MoserCoefficient | RationalFunc, c0: float, tol: float = 1e-10) -> ScalarFlow:
    """Integrate the radial reduction of the flow of ``r_t(f) E`` on t in [0, 1].

    State ``(c, lam, u, v)`` with ``c = f(x(t))``, ``x(t) = lam x0``,
    ``u = dc/dc0`` and ``v = dlam/dc0``.
    """
    rf = r.r if isinstance(r, MoserCoefficient) else r
    num, den, dnum, dden = _rt_evaluators(rf)
    d0 = den(0.0, 0.0)
    if d0 == 0:
        raise FlowBlowUpError("denominator vanishes at the origin")

    def rhs(t, y):
        c, lam, u, v = y
        D = den(c, t)
        if D * d0 <= 0:
            raise FlowBlowUpError(f"denominator of r_t changes sign at t={t:.6g}, f={c:.6g}")
        N = num(c, t)
        rv = N / D
        rc = (dnum(c, t) * D - N * dden(c, t)) / (D * D)
        return np.array([2 * rv * c, rv * lam, 2 * (rv + c * rc) * u, rc * u * lam + rv * v])

    sol = dopri45(rhs, (0.0, 1.0), [c0, 1.0, 1.0, 0.0], rtol=tol, atol=tol * 1e-2)
    return ScalarFlow(sol.t, sol.y[:, 0], sol.y[:, 1], sol.y[:, 3])


@dataclass(frozen=True)
class FlowSample:
    x0: np.ndarray
    lam: float
    dlam_dc: float
    image: np.ndarray
    jacobian: np.ndarray
    residual: float | None = None


def _grad_f(spec: MoserSpec, x: np.ndarray) -> np.ndarray:
    signs = np.array([1.0] * spec.signature.pos + [-1.0] * spec.signature.neg)
    return signs * x


def _f_value(spec: MoserSpec, x: np.ndarray) -> float:
    return 0.5 * float(np.dot(_grad_f(spec, x), x))


def flow_map(spec: MoserSpec, x0, tol: float = 1e-10) -> FlowSample:
    """Time-one map of ``r_t(f) E`` at x0 together with its Jacobian."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (spec.n,):
        raise ValueError(f"x0 must have length {spec.n}")
    coeff = derive_rt(spec)
    _, lam, dlam = scalar_flow(coeff, _f_value(spec, x0), tol).final
    jac = lam * np.eye(spec.n) + dlam * np.outer(x0, _grad_f(spec, x0))
    return FlowSample(x0, float(lam), float(dlam), lam * x0, jac)


def full_flow(spec: MoserSpec, x0, rtol: float = 1e-12) -> np.ndarray:
    """Unreduced time-one map: integrate ``x' = r_t(f(x)) x`` in n dimensions (scipy DOP853)."""
    coeff = derive_rt(spec)
    num, den, _, _ = _rt_evaluators(coeff.r)

    def rhs(t, x):
        c = _f_value(spec, x)
        return num(c, t) / den(c, t) * x

    sol = solve_ivp(rhs, (0.0, 1.0), np.asarray(x0, dtype=float), method="DOP853", rtol=rtol, atol=1e-15)
    if not sol.success:
        raise FlowBlowUpError(sol.message)
    return sol.y[:, -1]


def flow_jacobian_fd(spec: MoserSpec, x0, h: float = 1e-4, tol: float = 1e-13) -> np.ndarray:
    """Central finite differences of the time-one map."""
    x0 = np.asarray(x0, dtype=float)
    n = spec.n
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        plus = flow_map(spec, x0 + e, tol).image
        minus = flow_map(spec, x0 - e, tol).image
        jac[:, j] = (plus - minus) / (2 * h)
    return jac


def pullback_multivector(components: np.ndarray, jacobian: np.ndarray, degree: int) -> np.ndarray:
    """Pull back multivector components given at Phi(x) to x: apply the degree-th
    exterior power of the inverse Jacobian, built from its minors."""
    n = jacobian.shape[0]
    inv = np.linalg.inv(jacobian)
    basis = basis_tuples(n, degree)
    if degree == 0:
        return np.asarray(components, dtype=float).copy()
    lam = np.array([[np.linalg.det(inv[np.ix_(I, J)]) for J in basis] for I in basis])
    return lam @ np.asarray(components, dtype=float)


@functools.lru_cache(maxsize=64)
def _linear_model_cached(spec: MoserSpec) -> MultiVector:
    return linear_model(spec)


def pullback_residual(spec: MoserSpec, x0, tol: float = 1e-10, sample: FlowSample | None = None) -> float:
    """Max-norm of ``Phi_1^*(k(f) Pi_l)(x0) - Pi_l(x0)``."""
    s = flow_map(spec, x0, tol) if sample is None else sample
    Pl = _linear_model_cached(spec)
    y = s.image
    ky = spec.k.eval([_f_value(spec, y)])
    at_image = float(ky) * eval_multivector(Pl, y)
    if abs(np.linalg.det(s.jacobian)) < 1e-300:
        raise LinearizeError("singular Jacobian of the flow")
    pulled = pullback_multivector(at_image, s.jacobian, spec.n - 1)
    return float(np.max(np.abs(pulled - eval_multivector(Pl, s.x0)), initial=0.0))


def sample_grid(n: int, radius: float = 0.2, per_axis: int = 3) -> list[np.ndarray]:
    axis = np.linspace(-radius, radius, per_axis)
    return [np.array(p) for p in itertools.product(axis, repeat=n)]


def _grid_for(n: int, samples: int, radius: float) -> list[np.ndarray]:
    per_axis = max(2, int(round(samples ** (1.0 / n))))
    pts = sample_grid(n, radius, per_axis)
    return pts[:samples] if samples < len(pts) else pts


# full pipeline report


@dataclass
class Stage:
    name: str
    verdict: bool
    witness: Any = None
    stats: dict = field(default_factory=dict)


@dataclass
class LinearizeReport:
    verdict: str
    stages: list[Stage]
    max_residual: float | None = None
    potential: PotentialData | None = None
    coefficient: MoserCoefficient | None = None
    samples: list[FlowSample] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict in ("linearized", "hypotheses verified")


VERDICT_LINEARIZED = "linearized"
VERDICT_HYPOTHESES = "hypotheses verified"
VERDICT_NOT_UNIMODULAR = "not unimodular w.r.t. supplied volume"
VERDICT_DEGENERATE = "degenerate linear part - Main Theorem inapplicable"
VERDICT_NOT_NAMBU = "not a Nambu structure"
VERDICT_BAD_INPUT = "hypotheses not met"
VERDICT_FAILED = "linearization check failed"


def linearize_report(
    c: NambuCandidate,
    h: Poly | int = 1,
    k: Poly | None = None,
    samples: int = 27,
    tol: float = 1e-10,
    radius: float = 0.2,
    threshold: float = 1e-7,
) -> LinearizeReport:
    """Run the whole pipeline and collect per-stage verdicts."""
    stages: list[Stage] = []
    timings: dict[str, float] = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        finally:
            timings[name] = time.perf_counter() - t0

    if c.coorder != 1 or c.n < 3:
        stages.append(Stage("input", False, stats={"n": c.n, "q": c.q}))
        return LinearizeReport(VERDICT_BAD_INPUT, stages, timings=timings)
    vanish = all(not p.truncate(0, c.n) for _, p in c.P.items())
    stages.append(Stage("input", vanish, stats={"n": c.n, "q": c.q}))
    if not vanish:
        return LinearizeReport(VERDICT_BAD_INPUT, stages, timings=timings)

    nambu = timed("nambu", lambda: is_nambu(c, h if isinstance(h, Poly) else None))
    stages.append(Stage("nambu", nambu.ok, nambu.witness))
    if not nambu:
        return LinearizeReport(VERDICT_NOT_NAMBU, stages, timings=timings)

    uni = timed("unimodular", lambda: is_unimodular(c, h))
    stages.append(Stage("unimodular", uni.ok, uni.witness))
    if not uni:
        return LinearizeReport(VERDICT_NOT_UNIMODULAR, stages, timings=timings)

    try:
        pot = timed("potential", lambda: potential_from(c, h))
    except LinearizeError as exc:
        stages.append(Stage("morse", False, str(exc)))
        return LinearizeReport(VERDICT_DEGENERATE, stages, timings=timings)
    stages.append(Stage("potential", True, stats={"g": pot.g}))
    stages.append(Stage("morse", True, stats={"signature": pot.signature, "diagonal": pot.diagonal}))
    lin = linear_part(c)
    stages.append(Stage("linear_part", True, stats={"linear_part": lin}))

    if k is None:
        return LinearizeReport(VERDICT_HYPOTHESES, stages, potential=pot, timings=timings)

    spec = MoserSpec(c.n, pot.signature, k)
    coeff = timed("derive_rt", lambda: derive_rt(spec))
    stages.append(Stage("derive_rt", True, stats={
        "r": coeff.r, "printed_denominator_solves": coeff.printed_residual_zero,
    }))
    res = timed("moser_residual", lambda: moser_residual(spec, coeff.r))
    stages.append(Stage("moser_residual", res.is_zero(), None if res.is_zero() else res))

    def sweep():
        out = []
        scale = radius
        for x0 in _grid_for(c.n, samples, radius):
            while True:
                try:
                    s = flow_map(spec, x0 * (scale / radius), tol)
                    break
                except FlowBlowUpError:
                    scale /= 2  # shrink the neighbourhood until the flow exists
                    if scale < radius * 1e-6:
                        raise
            out.append(replace(s, residual=pullback_residual(spec, s.x0, tol, sample=s)))
        return out, scale

    try:
        flow_samples, used_radius = timed("pullback", sweep)
    except FlowBlowUpError as exc:
        stages.append(Stage("pullback", False, str(exc)))
        return LinearizeReport(VERDICT_FAILED, stages, potential=pot, coefficient=coeff, timings=timings)
    max_res = max((s.residual for s in flow_samples), default=0.0)
    stages.append(Stage("pullback", max_res <= threshold, stats={
        "samples": len(flow_samples), "radius": used_radius, "max_residual": max_res, "tol": tol,
    }))
    ok = res.is_zero() and max_res <= threshold
    return LinearizeReport(
        VERDICT_LINEARIZED if ok else VERDICT_FAILED,
        stages,
        max_residual=max_res,
        potential=pot,
        coefficient=coeff,
        samples=flow_samples,
        timings=timings,
    )
