from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nambu_lin.exterior import MultiVector, eval_multivector, exact_form
from nambu_lin.linalg import Signature
from nambu_lin.linearize import (
    VERDICT_DEGENERATE,
    VERDICT_HYPOTHESES,
    VERDICT_LINEARIZED,
    VERDICT_NOT_NAMBU,
    VERDICT_NOT_UNIMODULAR,
    LinearizeError,
    MoserSpec,
    derive_rt,
    flow_jacobian_fd,
    flow_map,
    full_flow,
    linear_model,
    linearize_report,
    moser_family,
    moser_residual,
    normal_form_quadratic,
    potential_from,
    printed_rt,
    pullback_multivector,
    pullback_residual,
    sample_grid,
    scalar_flow,
)
from nambu_lin.nambu import NambuCandidate, dual_form, nondegenerate_type1
from nambu_lin.poly import Poly, RationalFunc

u = Poly.var(1, 0)
ONE = Poly.const(1, 1)
KS = [ONE, 1 + u, 1 - u / 2, 1 + u**2]


def normal_form(n, sig, k):
    spec = MoserSpec(n, sig, k)
    f = normal_form_quadratic(n, spec.signature)
    return linear_model(spec).scale(k.compose([f]))


def test_spec_validation():
    with pytest.raises(LinearizeError):
        MoserSpec(2, Signature(2, 0), ONE)
    with pytest.raises(LinearizeError):
        MoserSpec(3, Signature(2, 0), ONE)
    with pytest.raises(LinearizeError):
        MoserSpec(3, Signature(3, 0), 2 + u)


def test_linear_model_dual_is_df():
    spec = MoserSpec(4, (2, 2), ONE)
    f = normal_form_quadratic(4, spec.signature)
    assert dual_form(NambuCandidate(linear_model(spec))) == exact_form(f, 4)


def test_family_endpoints():
    spec = MoserSpec(3, (2, 1), 1 + u)
    fam = moser_family(spec)
    at0 = fam.map_coeffs(lambda p: p.subs({3: 0}))
    at1 = fam.map_coeffs(lambda p: p.subs({3: 1}))
    assert at0 == linear_model(spec).with_params(1)
    assert at1 == normal_form(3, (2, 1), 1 + u).with_params(1)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("k", KS, ids=["1", "1+u", "1-u/2", "1+u^2"])
def test_derived_coefficient_solves_moser_equation(n, k):
    for pos in (n, 2):
        spec = MoserSpec(n, Signature(pos, n - pos), k)
        coeff = derive_rt(spec)
        assert moser_residual(spec, coeff.r).is_zero()
        assert coeff.den_at_origin == n - 2


def test_derived_coefficient_values():
    f, t = Poly.variables(2)
    coeff = derive_rt(MoserSpec(3, (3, 0), 1 + u))
    assert coeff.r == RationalFunc(("f", "t"), f, 1 - f * t)
    coeff = derive_rt(MoserSpec(5, (5, 0), 1 + u**2))
    assert coeff.r == RationalFunc(("f", "t"), f**2, 3 - f**2 * t)


def test_printed_denominator_outcome():
    # agrees with the derived coefficient only when k is constant
    for n in (3, 4, 5):
        for k in KS:
            spec = MoserSpec(n, (n, 0), k)
            ok = moser_residual(spec, printed_rt(spec)).is_zero()
            assert ok == (k == ONE)
            assert derive_rt(spec).printed_residual_zero == ok


def test_scalar_flow_identity_and_origin():
    spec = MoserSpec(3, (3, 0), ONE)
    c, lam, dlam = scalar_flow(derive_rt(spec), 0.01).final
    assert (c, lam, dlam) == (0.01, 1.0, 0.0)
    spec = MoserSpec(3, (3, 0), 1 + u)
    c, lam, dlam = scalar_flow(derive_rt(spec), 0.0).final
    assert c == 0.0 and lam == 1.0


def test_scalar_flow_closed_form():
    # n=4, k=1+u: r = f/2, so c' = c^2 and lambda(1) = (1 - c0)^(-1/2)
    spec = MoserSpec(4, (4, 0), 1 + u)
    c0 = 0.04
    c, lam, dlam = scalar_flow(derive_rt(spec), c0, 1e-12).final
    assert c == pytest.approx(c0 / (1 - c0), rel=1e-11)
    assert lam == pytest.approx((1 - c0) ** -0.5, rel=1e-11)
    assert dlam == pytest.approx(0.5 * (1 - c0) ** -1.5, rel=1e-9)


def test_scalar_flow_against_scipy():
    spec = MoserSpec(3, (3, 0), 1 + u)
    c0 = 0.005
    # r = f / (1 - f t)
    sol = solve_ivp(lambda t, y: [2 * y[0] ** 2 / (1 - y[0] * t), y[0] / (1 - y[0] * t) * y[1]],
                    (0, 1), [c0, 1.0], method="DOP853", rtol=1e-13, atol=1e-16)
    c, lam, _ = scalar_flow(derive_rt(spec), c0).final
    assert lam == pytest.approx(1.0050506338833467, abs=1e-12)
    assert abs(lam - sol.y[1, -1]) <= 1e-11
    assert abs(c - sol.y[0, -1]) <= 1e-11


def test_flow_map_identity_for_constant_k():
    s = flow_map(MoserSpec(3, (3, 0), ONE), [0.1, -0.2, 0.05])
    np.testing.assert_array_equal(s.image, [0.1, -0.2, 0.05])
    np.testing.assert_array_equal(s.jacobian, np.eye(3))


def test_flow_fixes_origin_and_cone():
    spec = MoserSpec(3, (2, 1), 1 + u)
    assert np.all(flow_map(spec, np.zeros(3)).image == 0)
    x0 = np.array([0.1, 0.0, 0.1])  # f = 0
    np.testing.assert_allclose(flow_map(spec, x0).image, x0, atol=1e-15)


@pytest.mark.parametrize("sig", [(3, 0), (2, 1)])
def test_flow_map_radial_and_matches_unreduced_flow(sig):
    spec = MoserSpec(3, sig, 1 - u / 2)
    for x0 in sample_grid(3, 0.2, 3):
        s = flow_map(spec, x0)
        assert s.lam > 0
        assert np.max(np.abs(s.image - full_flow(spec, x0))) <= 1e-9


def test_flow_jacobian_matches_finite_differences():
    spec = MoserSpec(3, (2, 1), 1 + u)
    x0 = np.array([0.15, -0.1, 0.05])
    jac = flow_map(spec, x0).jacobian
    fd = flow_jacobian_fd(spec, x0)
    assert np.max(np.abs(jac - fd)) <= 1e-6 * np.max(np.abs(jac))


def test_pullback_under_scaling():
    # pulling Pi_l back along x -> 2x gives Pi_l / 2
    P = nondegenerate_type1(3, 2, 3)
    x0 = np.array([0.3, -0.1, 0.2])
    at_image = eval_multivector(P, 2 * x0)
    pulled = pullback_multivector(at_image, 2 * np.eye(3), 2)
    np.testing.assert_allclose(pulled, 0.5 * eval_multivector(P, x0), rtol=1e-15)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("k", [1 + u, 1 - u / 2], ids=["1+u", "1-u/2"])
def test_pullback_residual_small(n, k):
    for sig in [(n, 0), (2, n - 2)]:
        spec = MoserSpec(n, sig, k)
        res = max(pullback_residual(spec, x0) for x0 in sample_grid(n, 0.2, 3))
        assert res <= 1e-7


def test_potential_from_recovers_quadratic():
    P = normal_form(3, (2, 1), 1 + u)
    pot = potential_from(NambuCandidate(P))
    f = normal_form_quadratic(3, Signature(2, 1))
    assert pot.g == f + f**2 / 2
    assert pot.signature == Signature(2, 1)


def test_report_linearized():
    P = normal_form(3, (3, 0), 1 + u)
    rep = linearize_report(NambuCandidate(P), 1, 1 + u)
    assert rep.verdict == VERDICT_LINEARIZED
    assert rep.max_residual <= 1e-7
    assert len(rep.samples) == 27
    names = [s.name for s in rep.stages]
    assert names[:4] == ["input", "nambu", "unimodular", "potential"]


def test_report_hypotheses_only():
    rep = linearize_report(NambuCandidate(normal_form(3, (3, 0), 1 + u)), 1, None)
    assert rep.verdict == VERDICT_HYPOTHESES and rep.ok


def test_report_not_unimodular_with_witness():
    x1, x2, x3 = Poly.variables(3)
    P = nondegenerate_type1(3, 2, 3)
    rep = linearize_report(NambuCandidate(P), 1 + x1, None)
    assert rep.verdict == VERDICT_NOT_UNIMODULAR
    assert not rep.stages[-1].witness.is_zero()


def test_report_degenerate():
    x1, x2, x3 = Poly.variables(3)
    P = MultiVector(3, 2, {(0, 1): x3})
    rep = linearize_report(NambuCandidate(P), 1, None)
    assert rep.verdict == VERDICT_DEGENERATE


def test_report_not_nambu():
    x1, x2, x3 = Poly.variables(3)
    P = MultiVector(3, 2, {(1, 2): x1, (0, 1): x1 * x2 + x3})
    rep = linearize_report(NambuCandidate(P), 1, None)
    assert rep.verdict == VERDICT_NOT_NAMBU
