"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from nambu_lin.exterior import (
    DiffForm,
    MultiVector,
    contract_covector,
    d,
    exact_form,
    interior,
    schouten,
    wedge,
)
from nambu_lin.frontend import parse, serialize
from nambu_lin.holonomy import CounterexampleSpec, integrate_trajectory, linear_model_orbit, spiral_metrics
from nambu_lin.linalg import matmul, sylvester_signature, transpose, Signature
from nambu_lin.linearize import (
    MoserSpec,
    derive_rt,
    flow_map,
    full_flow,
    linearize_report,
    moser_residual,
    potential_from,
    printed_rt,
    pullback_residual,
    sample_grid,
)
from nambu_lin.nambu import (
    SL2,
    NambuCandidate,
    classify_3d_algebra,
    fundamental_identity_residual,
    hessian_at_origin,
    is_nambu,
    is_unimodular,
    jacobi_residual,
    lie_poisson,
    linear_type1,
    multivector_from_dual,
    type1_specs,
)
from nambu_lin.poly import Poly

RESULTS: dict[str, tuple[bool, str]] = {}


def report(name: str, ok: bool, detail: str) -> None:
    RESULTS[name] = (ok, detail)
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    capman = getattr(sys, "_acceptance_capsys", None)
    if capman is not None:
        with capman.disabled():
            print("\n" + line)
    else:
        print(line)


@pytest.fixture(autouse=True)
def _show_lines(capsys):
    sys._acceptance_capsys = capsys
    yield
    sys._acceptance_capsys = None


# random exact objects


def rand_frac(rng, lo=-4, hi=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, 3))


def rand_poly(rng, n, max_degree=2, terms=3, min_degree=0):
    out = {}
    for _ in range(terms):
        deg = rng.randint(min_degree, max_degree)
        e = [0] * n
        for _ in range(deg):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = rand_frac(rng)
    return Poly(n, out)


def rand_graded(rng, cls, n, k, max_degree=2):
    idxs = list(combinations(range(n), k))
    chosen = rng.sample(idxs, min(len(idxs), rng.randint(1, 3)))
    return cls(n, k, {i: rand_poly(rng, n, max_degree) for i in chosen})


# 1. exterior calculus laws


def exterior_laws():
    checked = 0
    for n in range(1, 5):
        xs = Poly.variables(n)
        monos = [Poly.const(n, 1)] + xs + [a * b for a, b in combinations(xs + xs[:1], 2)]
        forms = [DiffForm(n, k, {idx: m}) for k in range(n + 1)
                 for idx in combinations(range(n), k) for m in monos]
        covs = [DiffForm.basis(n, idx) for k in range(n + 1) for idx in combinations(range(n), k)]
        vecs = [MultiVector.basis(n, idx) for k in range(n + 1) for idx in combinations(range(n), k)]
        for w in forms:
            if w.degree <= n - 2 and not d(d(w)).is_zero():
                return False, f"d(d w) != 0 for {w}"
            checked += 1
        for a in covs:
            for b in covs:
                if wedge(a, b) != wedge(b, a).scale((-1) ** (a.degree * b.degree)):
                    return False, f"wedge sign fails for {a}, {b}"
                checked += 1
        for X in vecs:
            for w in covs:
                if X.degree <= w.degree:
                    for g in xs:
                        if interior(X.scale(g), w) != interior(X, w).scale(g):
                            return False, "interior not function-linear"
                        checked += 1
        for X in vecs:
            if X.degree == 0:
                continue
            for g in monos:
                # [X, g] = X(g) for a vector field, [P, g] = P(dg, ...) in general
                if schouten(X, MultiVector(n, 0, {(): g})) != contract_covector(exact_form(g, n), X):
                    return False, f"[P, g] anchor fails for {X}, {g}"
                checked += 1
    rng = random.Random(20240601)
    for _ in range(200):
        n = rng.randint(2, 4)
        p, q = rng.randint(0, n - 1), rng.randint(0, n - 1)
        a = rand_graded(rng, DiffForm, n, p)
        b = rand_graded(rng, DiffForm, n, q)
        g = rand_poly(rng, n)
        if not d(d(a)).is_zero():
            return False, "random d(d a) != 0"
        if p + q <= n and wedge(a, b) != wedge(b, a).scale((-1) ** (p * q)):
            return False, "random wedge graded commutativity fails"
        if p >= 1:
            X = rand_graded(rng, MultiVector, n, 1)
            if interior(X.scale(g), a) != interior(X, a).scale(g) or interior(X, a.scale(g)) != interior(X, a).scale(g):
                return False, "random interior linearity fails"
        P = rand_graded(rng, MultiVector, n, rng.randint(1, n))
        if schouten(P, MultiVector(n, 0, {(): g})) != contract_covector(exact_form(g, n), P):
            return False, "random [P, g] anchor fails"
        Y = rand_graded(rng, MultiVector, n, 1)
        if schouten(Y, MultiVector(n, 0, {(): g})) != MultiVector(n, 0, {(): sum(
                (c * g.diff(i) for (i,), c in Y.items()), Poly.zero(n))}):
            return False, "random [X, g] = X(g) fails"
        checked += 1
    return True, f"{checked} exact checks"


def test_exterior_calculus_laws():
    t0 = time.perf_counter()
    ok, detail = exterior_laws()
    dt = time.perf_counter() - t0
    ok = ok and dt < 30
    report("1 exterior-calculus laws", ok, f"{detail}, {dt:.1f}s (limit 30s)")
    assert ok


# 2. duality soundness on the Type 1 grid


def test_type1_duality_soundness():
    t0 = time.perf_counter()
    specs = list(type1_specs(5))
    bad = []
    for spec in specs:
        c = NambuCandidate(linear_type1(spec))
        if not is_nambu(c):
            bad.append((spec, "is_nambu"))
            continue
        xs = Poly.variables(spec.n)
        for tup in combinations(range(spec.n), spec.q - 1):
            if fundamental_identity_residual(c, [xs[i] for i in tup]):
                bad.append((spec, tup))
                break
    dt = time.perf_counter() - t0
    ok = not bad and len(specs) >= 50 and dt < 120
    report("2 duality soundness", ok, f"{len(specs)} Type 1 specs, {len(bad)} failures, {dt:.1f}s (limit 120s)")
    assert ok, bad[:3]


# 3. Poisson cross-validation


def random_bivector(rng):
    """Linear + quadratic bivector in n=3; every other one is Poisson, dual to a*dF."""
    if rng.random() < 0.5:
        F = rand_poly(rng, 3, 2, 4, min_degree=2)
        a = 1 + rand_poly(rng, 3, 1, 2, min_degree=1)
        P = multivector_from_dual(exact_form(F, 3).scale(a))
        if not P.is_zero():
            return P
    comps = {}
    for idx in combinations(range(3), 2):
        comps[idx] = rand_poly(rng, 3, 2, 3, min_degree=1)
    return MultiVector(3, 2, comps)


def test_poisson_cross_validation():
    rng = random.Random(7)
    agree = poisson = 0
    disagreements = []
    for _ in range(50):
        c = NambuCandidate(random_bivector(rng))
        a = bool(is_nambu(c))
        b = jacobi_residual(c).is_zero()
        poisson += b
        if a == b:
            agree += 1
        else:
            disagreements.append(c.P)
    ok = agree == 50 and 0 < poisson < 50
    report("3 Poisson cross-validation", ok, f"{agree}/50 agree ({poisson} Poisson, {50 - poisson} not)")
    assert ok, disagreements[:2]


# 4. Moser symbolic identity


def test_moser_symbolic_identity():
    u = Poly.var(1, 0)
    ks = {"1": Poly.const(1, 1), "1+u": 1 + u, "1-u/2": 1 - u / 2, "1+u^2": 1 + u**2}
    zero = 0
    printed = {}
    for name, k in ks.items():
        for n in (3, 4, 5):
            spec = MoserSpec(n, Signature(n, 0), k)
            if moser_residual(spec, derive_rt(spec).r).is_zero():
                zero += 1
            printed[(name, n)] = moser_residual(spec, printed_rt(spec)).is_zero()
    ok = zero == 12
    printed_ok = sorted({name for (name, _), v in printed.items() if v})
    report("4 Moser symbolic identity", ok,
           f"derived r_t exact zero in {zero}/12 cases; printed denominator zero only for k in {printed_ok}")
    assert ok


# 5. pullback verification at desk scale


def test_pullback_residuals_desk_scale():
    u = Poly.var(1, 0)
    t0 = time.perf_counter()
    worst_res = worst_flow = 0.0
    cases = 0
    for k in (1 + u, 1 - u / 2):
        for n in (3, 4):
            for sig in ((n, 0), (2, n - 2)):
                spec = MoserSpec(n, sig, k)
                for x0 in sample_grid(n, 0.2, 3):
                    s = flow_map(spec, x0, 1e-10)
                    worst_res = max(worst_res, pullback_residual(spec, x0, 1e-10, sample=s))
                    worst_flow = max(worst_flow, float(np.max(np.abs(s.image - full_flow(spec, x0)))))
                    cases += 1
    dt = time.perf_counter() - t0
    ok = worst_res <= 1e-7 and worst_flow <= 1e-9 and dt < 60
    report("5 pullback at desk scale", ok,
           f"{cases} samples, max residual {worst_res:.2e} (<=1e-7), flow gap {worst_flow:.2e} (<=1e-9), "
           f"{dt:.1f}s (limit 60s)")
    assert ok


# 6. potential recovery and signature invariance


def random_invertible(rng, n):
    while True:
        a = [[rand_frac(rng, -3, 3) for _ in range(n)] for _ in range(n)]
        if sylvester_signature(matmul(transpose(a), a)).rank == n:
            return a


def random_potential(rng, n):
    while True:
        q = rand_poly(rng, n, 2, 4, min_degree=2).homogeneous_part(2)
        diag = [rand_frac(rng) or Fraction(1) for _ in range(n)]
        q = q + sum((Poly.var(n, i, 2) * diag[i] for i in range(n)), Poly.zero(n))
        G = q + rand_poly(rng, n, 5, 4, min_degree=3)
        if sylvester_signature(hessian_at_origin(G, n)).rank == n:
            return G


def test_potential_recovery():
    rng = random.Random(11)
    recovered = invariant = 0
    for _ in range(20):
        n = rng.randint(3, 4)
        G = random_potential(rng, n)
        pot = potential_from(NambuCandidate(multivector_from_dual(exact_form(G, n))))
        recovered += pot.g == G
        sig = pot.signature
        for _ in range(5):
            A = random_invertible(rng, n)
            xs = Poly.variables(n)
            images = [sum((xs[j] * A[i][j] for j in range(n)), Poly.zero(n)) for i in range(n)]
            H = G.compose(images)
            pot2 = potential_from(NambuCandidate(multivector_from_dual(exact_form(H, n))))
            invariant += pot2.g == H and pot2.signature == sig
    ok = recovered == 20 and invariant == 100
    report("6 potential recovery", ok, f"{recovered}/20 exact recoveries, {invariant}/100 congruences keep the signature")
    assert ok


# 7. sl(2) pipeline


def test_sl2_pipeline():
    P = lie_poisson(SL2)
    c = NambuCandidate(P)
    uni = bool(is_unimodular(c))
    pot = potential_from(c)
    label, ksig = classify_3d_algebra(SL2)
    rep = linearize_report(c, 1, Poly.const(1, 1))
    ok = (uni and pot.signature.unordered() == (2, 1) and label == "sl2" and ksig == Signature(2, 1)
          and rep.verdict == "linearized" and rep.max_residual <= 1e-12)
    report("7 sl(2) pipeline", ok,
           f"unimodular={uni}, potential signature {pot.signature}, algebra {label} Killing {ksig}, "
           f"verdict '{rep.verdict}', residual {rep.max_residual:.1e}")
    assert ok


# 8. holonomy witness


def test_holonomy_witness():
    t0 = time.perf_counter()
    tr = integrate_trajectory(CounterexampleSpec(), [1.0, 0.0, 0.0], 50.0)
    m = spiral_metrics(tr)
    lin = linear_model_orbit([1.0, 0.0, 0.0], 100.0)
    drift = float(np.max(np.abs(lin.f_values - lin.f_values[0])))
    dt = time.perf_counter() - t0
    ok = (m.f_strictly_decreasing and bool(np.all(tr.f_values > 0)) and m.f_ode_residual <= 1e-8
          and abs(m.theta_rate + 1) <= 1e-6 and m.theta_excursion > 4 * np.pi and drift <= 1e-9 and dt < 10)
    report("8 holonomy witness", ok,
           f"f {tr.f_values[0]:.3f}->{tr.f_values[-1]:.4f} strictly decreasing={m.f_strictly_decreasing}, "
           f"ODE gap {m.f_ode_residual:.1e}, theta slope {m.theta_rate:.9f}, excursion {m.theta_excursion:.1f}, "
           f"linear drift {drift:.1e}, {dt:.1f}s (limit 10s)")
    assert ok


# 9. frontend round trip and CLI contract


def test_frontend_and_cli(tmp_path, monkeypatch, capsys):
    rng = random.Random(5)
    good = 0
    for i in range(500):
        n = rng.randint(1, 4)
        kind = i % 3
        if kind == 0:
            v = rand_poly(rng, n, 4, rng.randint(0, 5))
            back = parse(serialize(v), "poly", dim=n)
        else:
            cls = DiffForm if kind == 1 else MultiVector
            k = rng.randint(0, n)
            v = rand_graded(rng, cls, n, k, 3) if k else cls(n, 0, {(): rand_poly(rng, n)})
            back = parse(serialize(v), "form" if kind == 1 else "multivector", dim=n, degree=k)
        good += back == v and type(back) is type(v)
    import test_cli

    codes = 0
    for name, (argv, expected) in test_cli.CASES.items():
        code, *_ = test_cli._run(tmp_path, monkeypatch, capsys, argv)
        codes += code == expected
        (tmp_path / "report.json").unlink(missing_ok=True)
    commands = {argv[0] for argv, _ in test_cli.CASES.values() if argv}
    ok = good == 500 and codes == len(test_cli.CASES) and {"check", "dual", "unimodular", "classify",
                                                             "linearize", "holonomy", "verify-rt"} <= commands
    report("9 frontend and CLI", ok, f"{good}/500 round trips, {codes}/{len(test_cli.CASES)} CLI exit codes as golden")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
