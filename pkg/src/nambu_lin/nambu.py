"""Nambu structures: duality test, Hamiltonian fields, unimodularity, linear models.

The decision procedure works through the dual form ``w = iota_P mu``: a
multivector P is Nambu iff for every multivector xi of degree ``deg w - 1``
both ``iota_xi w ^ w`` and ``iota_xi w ^ dw`` vanish.  Since contraction is
function-linear in xi it is enough to run xi over constant basis multivectors.

The test is only used for order q >= 3 or coorder 1.  For bivectors of
coorder >= 2 it characterizes decomposability, which is stronger than the
Jacobi identity; use :func:`jacobi_residual` there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Sequence

from .exterior import (
    DiffForm,
    MultiVector,
    VolumeDensity,
    basis_tuples,
    contract_covector,
    d,
    exact_form,
    interior,
    lie_derivative,
    schouten,
    wedge,
)
from .linalg import Signature, congruence_diagonalize, nullspace
from .poly import Poly

__all__ = [
    "NambuError",
    "Verdict",
    "NambuCandidate",
    "LinearType1Spec",
    "LinearType2Spec",
    "StructureConstants",
    "NondegenerateData",
    "dual_form",
    "multivector_from_dual",
    "is_integrable",
    "is_nambu",
    "jacobi_residual",
    "hamiltonian_vf",
    "fundamental_identity_residual",
    "is_unimodular",
    "unimodular_densities",
    "linear_type1",
    "linear_type2",
    "nondegenerate_type1",
    "type1_specs",
    "linear_part",
    "homotopy_potential",
    "nondeg_signature",
    "hessian_at_origin",
    "morse_check",
    "lie_poisson",
    "isotropy_constants",
    "killing_form",
    "classify_3d_algebra",
    "SL2",
    "SO3",
]


class NambuError(ValueError):
    """Input outside the regime a Nambu operation is defined for."""


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome plus an optional witness explaining a failure."""

    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class NambuCandidate:
    P: MultiVector

    def __post_init__(self):
        if not isinstance(self.P, MultiVector):
            raise TypeError("candidate must wrap a MultiVector")
        if not 1 <= self.P.degree <= self.P.n - 1:
            raise NambuError(f"order {self.P.degree} must lie in [1, n-1] for n = {self.P.n}")

    @property
    def n(self) -> int:
        return self.P.n

    @property
    def q(self) -> int:
        return self.P.degree

    @property
    def coorder(self) -> int:
        return self.P.n - self.P.degree


def _density(c: NambuCandidate, mu) -> VolumeDensity:
    if mu is None:
        return VolumeDensity(c.n, Poly.const(c.P.nvars, 1))
    if isinstance(mu, VolumeDensity):
        if mu.n != c.n:
            raise ValueError(f"dimension mismatch: structure n={c.n}, volume n={mu.n}")
        return mu
    return VolumeDensity(c.n, mu if isinstance(mu, Poly) else Poly.const(c.P.nvars, mu))


def dual_form(c: NambuCandidate, mu: VolumeDensity | Poly | None = None) -> DiffForm:
    """``iota_P (h dx1^...^dxn)``, a form of degree n - q."""
    return interior(c.P, _density(c, mu).form())


def multivector_from_dual(w: DiffForm) -> MultiVector:
    """The (n-1)-vector P with ``iota_P mu_std = w`` for a 1-form w."""
    if w.degree != 1:
        raise NambuError("expected a 1-form")
    n = w.n
    mu = VolumeDensity(n, Poly.const(w.nvars, 1)).form()
    comps = {}
    for i in range(n):
        idx = tuple(j for j in range(n) if j != i)
        # iota of the basis (n-1)-vector is +-dx_i
        (_, sign), = interior(MultiVector.basis(n, idx, w.nvars), mu).items()
        coeff = w[(i,)]
        if coeff:
            comps[idx] = coeff * sign
    return MultiVector(n, n - 1, comps, nvars=w.nvars)


def is_integrable(w: DiffForm) -> Verdict:
    """Check ``iota_xi w ^ w = 0`` and ``iota_xi w ^ dw = 0`` for basis xi.

    On failure the witness is ``(xi_index, condition, offending form)`` with
    condition ``"wedge"`` or ``"dwedge"``.
    """
    p = w.degree
    if p < 1:
        raise NambuError("integrability is defined for forms of positive degree")
    dw = d(w)
    for idx in basis_tuples(w.n, p - 1):
        xi = MultiVector.basis(w.n, idx, w.nvars)
        a = interior(xi, w)
        first = wedge(a, w)
        if first:
            return Verdict(False, (idx, "wedge", first), f"iota_xi w ^ w != 0 for xi = {idx}")
        second = wedge(a, dw)
        if second:
            return Verdict(False, (idx, "dwedge", second), f"iota_xi w ^ dw != 0 for xi = {idx}")
    return Verdict(True)


def is_nambu(c: NambuCandidate, mu: VolumeDensity | Poly | None = None) -> Verdict:
    if c.q == 2 and c.coorder >= 2:
        raise NambuError("the duality test decides decomposability for bivectors of coorder >= 2; "
                         "use jacobi_residual for the Poisson condition")
    return is_integrable(dual_form(c, mu))


def jacobi_residual(c: NambuCandidate) -> MultiVector:
    """``[P, P]``; zero exactly when the bivector P is Poisson."""
    if c.q != 2:
        raise NambuError(f"jacobi_residual needs a bivector, got degree {c.q}")
    return schouten(c.P, c.P)


def hamiltonian_vf(c: NambuCandidate, fs: Sequence[Poly]) -> MultiVector:
    """``P(df1, ..., df_{q-1}, .)``."""
    if len(fs) != c.q - 1:
        raise NambuError(f"need {c.q - 1} Hamiltonians, got {len(fs)}")
    X = c.P
    for f in fs:
        if not isinstance(f, Poly):
            f = Poly.const(c.P.nvars, f)
        X = contract_covector(exact_form(f, c.n), X)
    return X


def fundamental_identity_residual(c: NambuCandidate, fs: Sequence[Poly]) -> MultiVector:
    return lie_derivative(hamiltonian_vf(c, fs), c.P)


def is_unimodular(c: NambuCandidate, h: Poly | int = 1) -> Verdict:
    """Whether ``d iota_P (h mu_std) = 0``; the witness is the nonzero exterior derivative."""
    if not isinstance(h, Poly):
        h = Poly.const(c.P.nvars, h)
    if h.constant_term() == 0:
        raise NambuError("density must not vanish at the origin")
    dw = d(dual_form(c, h))
    if dw:
        return Verdict(False, dw, "d(iota_P mu) != 0")
    return Verdict(True)


def _monomials(n: int, nvars: int, max_degree: int) -> list[Poly]:
    out = []
    for deg in range(max_degree + 1):
        for combo in _compositions(deg, n):
            exp = tuple(combo) + (0,) * (nvars - n)
            out.append(Poly(nvars, {exp: 1}))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def unimodular_densities(c: NambuCandidate, max_degree: int) -> list[Poly]:
    """Basis of polynomial h (degree <= max_degree) with ``d iota_P (h mu_std) = 0``.

    A density usable as a volume form exists in this class iff some returned
    basis element has a nonzero constant term.
    """
    monos = _monomials(c.n, c.P.nvars, max_degree)
    w = dual_form(c)
    images = [d(w.scale(m)) for m in monos]
    keys = sorted({(idx, e) for img in images for idx, p in img.items() for e, _ in p.items()})
    row_of = {k: i for i, k in enumerate(keys)}
    rows = [[Fraction(0)] * len(monos) for _ in keys]
    for j, img in enumerate(images):
        for idx, p in img.items():
            for e, coef in p.items():
                rows[row_of[(idx, e)]][j] = coef
    basis = nullspace(rows, ncols=len(monos))
    return [sum((m * v for m, v in zip(monos, vec) if v), Poly.zero(c.P.nvars)) for vec in basis]


# linear normal forms


@dataclass(frozen=True)
class LinearType1Spec:
    n: int
    q: int
    r: int
    s: int
    signs: tuple[int, ...]

    def __post_init__(self):
        n, q, r, s = self.n, self.q, self.r, self.s
        if not 1 <= q <= n - 1:
            raise NambuError(f"order q={q} out of range for n={n}")
        if not 0 <= r <= q + 1:
            raise NambuError(f"r={r} must satisfy 0 <= r <= q+1")
        if not 0 <= s <= min(n - q - 1, q + 1 - r):
            raise NambuError(f"s={s} must satisfy 0 <= s <= min(n-q-1, q+1-r)")
        signs = tuple(int(e) for e in self.signs)
        if any(e not in (1, -1) for e in signs):
            raise NambuError("signs must be +1 or -1")
        used = min(r + 1, q + 1) + s
        if len(signs) == r + 1 + s and len(signs) != used:
            # the first sum is capped at q+1 terms, the surplus sign is unused
            signs = signs[: min(r + 1, q + 1)] + signs[r + 1 :]
        if len(signs) != used:
            raise NambuError(f"expected {used} signs, got {len(signs)}")
        object.__setattr__(self, "signs", signs)

    @property
    def first_terms(self) -> int:
        return min(self.r + 1, self.q + 1)


def linear_type1(spec: LinearType1Spec) -> MultiVector:
    """Type 1 linear structure; the first sum is capped at q+1 terms."""
    n, q = spec.n, spec.q
    block = tuple(range(q + 1))
    xs = Poly.variables(n)
    comps: dict[tuple[int, ...], Poly] = {}

    def add(hat: int, coeff: Poly):
        idx = tuple(i for i in block if i != hat)
        comps[idx] = comps.get(idx, Poly.zero(n)) + coeff

    m = spec.first_terms
    for i in range(m):
        add(i, xs[i] * spec.signs[i])
    for i in range(1, spec.s + 1):
        add(spec.r + i - 1, xs[q + i] * spec.signs[m + i - 1])
    return MultiVector(n, q, comps)


def nondegenerate_type1(n: int, q: int, l: int) -> MultiVector:
    """Nondegenerate Type 1 structure whose dual under the standard volume is
    ``dx_{q+2} ^ ... ^ dx_n ^ df`` with ``f = (x1^2+..+xl^2 - x_{l+1}^2 - .. - x_{q+1}^2)/2``.
    """
    if not 0 <= l <= q + 1:
        raise NambuError(f"l={l} must lie in [0, q+1]")
    f = Poly.zero(n)
    for i in range(q + 1):
        f = f + Poly.var(n, i, 2) * (Fraction(1, 2) if i < l else Fraction(-1, 2))
    target = exact_form(f, n)
    for i in reversed(range(q + 1, n)):
        target = wedge(DiffForm.basis(n, (i,)), target)
    # each Type 1 term x_i * d_{block without i} contributes a single covector slot
    signs = []
    mu = VolumeDensity(n).form()
    for i in range(q + 1):
        term = MultiVector(n, q, {tuple(j for j in range(q + 1) if j != i): Poly.var(n, i)})
        contrib = interior(term, mu)
        (idx, coeff), = contrib.items()
        signs.append(1 if target[idx] == coeff else -1)
        if target[idx] != coeff and target[idx] != -coeff:
            raise AssertionError("unexpected dual component")
    return linear_type1(LinearType1Spec(n, q, q + 1, 0, tuple(signs)))


def type1_specs(max_n: int = 5, q_values=None):
    """All Type 1 specs with n <= max_n (q >= 3 or coorder 1), signs up to overall sign."""
    from itertools import product

    for n in range(3, max_n + 1):
        qs = [q for q in range(2, n) if q >= 3 or n - q == 1] if q_values is None else q_values
        for q in qs:
            if not 1 <= q <= n - 1:
                continue
            for r in range(q + 2):
                for s in range(min(n - q - 1, q + 1 - r) + 1):
                    k = min(r + 1, q + 1) + s
                    for tail in product((1, -1), repeat=k - 1):
                        yield LinearType1Spec(n, q, r, s, (1,) + tail)


@dataclass(frozen=True)
class LinearType2Spec:
    n: int
    q: int
    b: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        size = self.n - self.q + 1
        b = tuple(tuple(Fraction(v) for v in row) for row in self.b)
        if len(b) != size or any(len(row) != size for row in b):
            raise NambuError(f"b must be {size}x{size} for n={self.n}, q={self.q}")
        if not 1 <= self.q <= self.n - 1:
            raise NambuError(f"order q={self.q} out of range for n={self.n}")
        object.__setattr__(self, "b", b)


def linear_type2(spec: LinearType2Spec) -> MultiVector:
    """``d1 ^ ... ^ d_{q-1} ^ sum_{i,j>=q} b_i^j x_j d_i`` (b indexed from q)."""
    n, q = spec.n, spec.q
    base = q - 1
    comps = {}
    for a, row in enumerate(spec.b):
        i = base + a
        coeff = sum((Poly.var(n, base + c) * v for c, v in enumerate(row) if v), Poly.zero(n))
        if coeff:
            comps[tuple(range(q - 1)) + (i,)] = coeff
    return MultiVector(n, q, comps)


def linear_part(c: NambuCandidate | MultiVector) -> MultiVector:
    P = c.P if isinstance(c, NambuCandidate) else c
    for idx, p in P.items():
        if p.truncate(0, P.n):
            raise NambuError(f"structure does not vanish at the origin (component {idx})")
    return P.map_coeffs(lambda p: _homogeneous_in(p, P.n, 1))


def _homogeneous_in(p: Poly, n: int, degree: int) -> Poly:
    return Poly(p.num_vars, {e: c for e, c in p.items() if sum(e[:n]) == degree})


# signature of nondegenerate linear parts


@dataclass(frozen=True)
class NondegenerateData:
    """Quadratic potential F of a closed dual form with its inertia and normalizing congruence.

    ``congruence^T * hessian * congruence`` is diagonal with ``pos`` positive
    entries first; over the rationals the diagonal entries are only defined up
    to positive square factors.
    """

    F: Poly
    hessian: list[list[Fraction]]
    signature: Signature
    congruence: list[list[Fraction]]
    diagonal: list[Fraction] = field(default_factory=list)


def hessian_at_origin(g: Poly, n: int) -> list[list[Fraction]]:
    return [[g.diff(i).diff(j).truncate(0, n).constant_term() for j in range(n)] for i in range(n)]


def morse_check(g: Poly, n: int) -> NondegenerateData:
    """Check g(0)=0, dg(0)=0 and nondegenerate Hessian; return inertia data."""
    if g.truncate(0, n).constant_term() != 0:
        raise NambuError("potential does not vanish at the origin")
    if any(g.diff(i).truncate(0, n) for i in range(n)):
        raise NambuError("origin is not a critical point")
    hess = hessian_at_origin(g, n)
    s, diag = congruence_diagonalize(hess)
    if any(v == 0 for v in diag):
        raise NambuError("singular Hessian: linear part is degenerate")
    sig = Signature(sum(v > 0 for v in diag), sum(v < 0 for v in diag))
    return NondegenerateData(g, hess, sig, s, diag)


def homotopy_potential(w: DiffForm) -> Poly:
    """Antiderivative g with g(0)=0 of a closed 1-form, via the radial homotopy.

    On monomials the rule is ``x^a dx_i -> x_i x^a / (|a| + 1)``.
    """
    if w.degree != 1:
        raise NambuError("expected a 1-form")
    if d(w):
        raise NambuError("dual form is not closed")
    n = w.n
    terms: dict[tuple[int, ...], Fraction] = {}
    for (i,), a in w.items():
        for e, c in a.items():
            ne = list(e)
            ne[i] += 1
            key = tuple(ne)
            terms[key] = terms.get(key, Fraction(0)) + c / (sum(e[:n]) + 1)
    return Poly(w.nvars, terms)


def nondeg_signature(P_l: MultiVector | NambuCandidate) -> NondegenerateData:
    P = P_l.P if isinstance(P_l, NambuCandidate) else P_l
    if P.degree != P.n - 1:
        raise NambuError("signature classification needs coorder 1")
    for _, p in P.items():
        if any(sum(e[: P.n]) != 1 for e, _ in p.items()):
            raise NambuError("structure is not linear")
    w = interior(P, VolumeDensity(P.n, Poly.const(P.nvars, 1)).form())
    F = homotopy_potential(w)
    return morse_check(F, P.n)


# Lie-Poisson structures and isotropy algebras


@dataclass(frozen=True)
class StructureConstants:
    """``c[k][i][j]`` is the coefficient of e_k in [e_i, e_j] (0-based)."""

    c: tuple

    def __post_init__(self):
        c = tuple(tuple(tuple(Fraction(v) for v in row) for row in mat) for mat in self.c)
        dim = len(c)
        if any(len(mat) != dim or any(len(row) != dim for row in mat) for mat in c):
            raise ValueError("structure constants must be dim x dim x dim")
        for k in range(dim):
            for i in range(dim):
                for j in range(dim):
                    if c[k][i][j] != -c[k][j][i]:
                        raise ValueError("structure constants must be antisymmetric in (i, j)")
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return len(self.c)

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict[tuple[int, int], dict[int, object]]):
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), image in brackets.items():
            for k, v in image.items():
                c[k][i][j] = Fraction(v)
                c[k][j][i] = -Fraction(v)
        return cls(c)

    def bracket(self, i: int, j: int) -> list[Fraction]:
        return [self.c[k][i][j] for k in range(self.dim)]

    def jacobi_defect(self) -> list[tuple[int, int, int, int, Fraction]]:
        """Nonzero components of [[e_i,e_j],e_k] + cyclic."""
        m = self.dim
        c = self.c
        bad = []
        for i, j, k in combinations(range(m), 3):
            for l in range(m):
                val = sum(
                    c[a][i][j] * c[l][a][k] + c[a][j][k] * c[l][a][i] + c[a][k][i] * c[l][a][j]
                    for a in range(m)
                )
                if val:
                    bad.append((i, j, k, l, val))
        return bad

    def is_zero(self) -> bool:
        return all(v == 0 for mat in self.c for row in mat for v in row)


SL2 = StructureConstants.from_brackets(3, {(0, 1): {2: 1}, (2, 0): {0: 2}, (2, 1): {1: -2}})
SO3 = StructureConstants.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def lie_poisson(cs: StructureConstants) -> MultiVector:
    """``sum_{i<j,k} c^k_ij x_k d_i ^ d_j`` on the dual of the algebra."""
    if cs.jacobi_defect():
        raise NambuError("structure constants violate the Jacobi identity")
    n = cs.dim
    comps = {}
    for i, j in combinations(range(n), 2):
        coeff = sum((Poly.var(n, k) * cs.c[k][i][j] for k in range(n) if cs.c[k][i][j]), Poly.zero(n))
        if coeff:
            comps[(i, j)] = coeff
    return MultiVector(n, 2, comps)


def isotropy_constants(pi: MultiVector | NambuCandidate) -> StructureConstants:
    """Structure constants of the isotropy algebra of a bivector at the origin."""
    P = pi.P if isinstance(pi, NambuCandidate) else pi
    if P.degree != 2:
        raise NambuError("isotropy algebra needs a bivector")
    lin = linear_part(P)
    n = P.n
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), p in lin.items():
        for k in range(n):
            e = [0] * P.nvars
            e[k] = 1
            v = p.coeff(e)
            c[k][i][j] = v
            c[k][j][i] = -v
    return StructureConstants(c)


def killing_form(cs: StructureConstants) -> list[list[Fraction]]:
    m = cs.dim
    c = cs.c
    # (ad_a)^k_j = c^k_{a j};  K_ab = tr(ad_a ad_b)
    return [
        [sum(c[k][a][j] * c[j][b][k] for j in range(m) for k in range(m)) for b in range(m)]
        for a in range(m)
    ]


def classify_3d_algebra(cs: StructureConstants) -> tuple[str, Signature]:
    """Label a 3-dimensional Lie algebra as abelian, so3, sl2 or other via its Killing form."""
    if cs.dim != 3:
        raise NambuError("classification covers 3-dimensional algebras only")
    if cs.jacobi_defect():
        raise NambuError("structure constants violate the Jacobi identity")
    _, diag = congruence_diagonalize(killing_form(cs))
    sig = Signature(sum(v > 0 for v in diag), sum(v < 0 for v in diag))
    if cs.is_zero():
        return "abelian", sig
    if sig.rank == 3 and sig.pos == 2 and sig.neg == 1:
        return "sl2", sig
    if sig.neg == 3:
        return "so3", sig
    return "other", sig
