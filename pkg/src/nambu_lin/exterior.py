"""Exterior calculus on coordinate n-space with polynomial coefficients.

Multivector fields and differential forms are stored sparsely as maps from
strictly increasing 0-based index tuples to :class:`~nambu_lin.poly.Poly`
coefficients.  The coefficient ring may carry extra trailing variables beyond
the n coordinates; these act as parameters (for instance a time variable) and
are never differentiated by ``d``, the Schouten bracket or the Lie derivative.

Conventions
-----------
* Contraction: ``(iota_{X1^...^Xk} w)(Y...) = w(X1, ..., Xk, Y...)``, so a basis
  multivector is contracted one vector at a time starting with its first factor.
* Schouten bracket: normalized so that ``[X, Q]`` is the Lie derivative for a
  vector field ``X`` and ``[P, g] = iota_{dg} P`` for a function ``g``.  With
  these anchors the bracket is graded symmetric as ``[P, Q] = (-1)^{pq} [Q, P]``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .poly import Poly

Index = tuple[int, ...]

__all__ = [
    "MultiVector",
    "DiffForm",
    "VolumeDensity",
    "basis_tuples",
    "merge_sign",
    "wedge",
    "d",
    "interior",
    "contract_covector",
    "schouten",
    "lie_derivative",
    "eval_multivector",
    "eval_form",
    "euler_field",
    "coordinate_vector",
    "coordinate_covector",
    "exact_form",
]


def basis_tuples(n: int, k: int) -> list[Index]:
    return list(combinations(range(n), k))


def merge_sign(a: Index, b: Index) -> tuple[int, Index | None]:
    """Sign and sorted tuple of the concatenation ``a + b``; (0, None) on repeats."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    # count inversions between the two blocks; each block is already sorted
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def _remove_at(idx: Index, i: int) -> tuple[int, Index | None]:
    """Sign and remainder when the entry ``i`` is pulled to the front of ``idx``."""
    if i not in idx:
        return 0, None
    pos = idx.index(i)
    return (-1 if pos % 2 else 1), idx[:pos] + idx[pos + 1 :]


class _Graded:
    kind = "graded"
    __slots__ = ("n", "degree", "nvars", "_comps")

    def __init__(self, n: int, degree: int, comps: Mapping[Sequence[int], Poly] | None = None,
                 nvars: int | None = None):
        if not 0 <= degree <= n:
            raise ValueError(f"degree {degree} out of range for dimension {n}")
        clean: dict[Index, Poly] = {}
        ring = nvars
        for idx, p in (comps or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} does not have length {degree}")
            if any(i < 0 or i >= n for i in idx):
                raise ValueError(f"index tuple {idx} out of range for dimension {n}")
            if len(set(idx)) != len(idx):
                continue
            if not isinstance(p, Poly):
                p = Poly.const(n if ring is None else ring, p)
            if ring is None:
                ring = p.num_vars
            elif p.num_vars != ring:
                raise ValueError("all coefficients must share one polynomial ring")
            # sort the index tuple, tracking the permutation sign
            s = sorted(idx)
            sign = _perm_sign(idx)
            key = tuple(s)
            val = clean.get(key, Poly.zero(ring)) + (p if sign > 0 else -p)
            if val:
                clean[key] = val
            else:
                clean.pop(key, None)
        ring = n if ring is None else ring
        if ring < n:
            raise ValueError(f"coefficient ring has {ring} variables, need at least {n}")
        self.n = n
        self.degree = degree
        self.nvars = ring
        self._comps = dict(sorted(clean.items()))

    @classmethod
    def _raw(cls, n, degree, comps, nvars):
        obj = object.__new__(cls)
        obj.n = n
        obj.degree = degree
        obj.nvars = nvars
        obj._comps = dict(sorted((k, v) for k, v in comps.items() if v))
        return obj

    @classmethod
    def zero(cls, n: int, degree: int, nvars: int | None = None):
        return cls._raw(n, degree, {}, n if nvars is None else nvars)

    @classmethod
    def basis(cls, n: int, idx: Sequence[int], nvars: int | None = None):
        ring = n if nvars is None else nvars
        return cls(n, len(idx), {tuple(idx): Poly.const(ring, 1)}, nvars=ring)

    @property
    def comps(self) -> dict[Index, Poly]:
        return dict(self._comps)

    def items(self):
        return self._comps.items()

    def __getitem__(self, idx) -> Poly:
        return self._comps.get(tuple(idx), Poly.zero(self.nvars))

    def is_zero(self) -> bool:
        return not self._comps

    def __bool__(self):
        return bool(self._comps)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n or other.nvars != self.nvars:
            raise ValueError("dimension mismatch")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        if not isinstance(other, _Graded):
            return NotImplemented
        self._check(other)
        out = dict(self._comps)
        for k, v in other._comps.items():
            out[k] = out[k] + v if k in out else v
        return self._raw(self.n, self.degree, out, self.nvars)

    def __neg__(self):
        return self._raw(self.n, self.degree, {k: -v for k, v in self._comps.items()}, self.nvars)

    def __sub__(self, other):
        if not isinstance(other, _Graded):
            return NotImplemented
        return self + (-other)

    def scale(self, g) -> "_Graded":
        """Multiply every coefficient by a function (Poly) or constant."""
        return self._raw(self.n, self.degree, {k: v * g for k, v in self._comps.items()}, self.nvars)

    def __mul__(self, g):
        if isinstance(g, _Graded):
            return NotImplemented
        return self.scale(g)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.n, self.degree, self.nvars, self._comps) == (other.n, other.degree, other.nvars, other._comps)

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.degree, frozenset(self._comps.items())))

    def map_coeffs(self, fn):
        out = {k: fn(v) for k, v in self._comps.items()}
        nv = next(iter(out.values())).num_vars if out else self.nvars
        return self._raw(self.n, self.degree, out, nv)

    def linear_part(self):
        return self.map_coeffs(lambda p: p.homogeneous_part(1))

    def subs(self, values):
        return self.map_coeffs(lambda p: p.subs(values))

    def with_params(self, extra: int):
        """Embed the coefficients into a ring with ``extra`` trailing parameter variables."""
        ring = self.nvars + extra
        return self._raw(self.n, self.degree, {k: v.embed(ring) for k, v in self._comps.items()}, ring)

    def __repr__(self):
        from .frontend import serialize

        return f"{type(self).__name__}(n={self.n}, degree={self.degree}, {serialize(self)!r})"


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class MultiVector(_Graded):
    """Degree-q multivector field; ``(1, 2)`` stands for ``d/dx2 ^ d/dx3``."""

    kind = "vector"
    __slots__ = ()

    @property
    def q(self) -> int:
        return self.degree


class DiffForm(_Graded):
    """Degree-p differential form; ``(0, 2)`` stands for ``dx1 ^ dx3``."""

    kind = "form"
    __slots__ = ()

    @property
    def p(self) -> int:
        return self.degree


class VolumeDensity:
    """The volume form ``h * dx1 ^ ... ^ dxn`` with h(0) != 0."""

    __slots__ = ("n", "h")

    def __init__(self, n: int, h: Poly | int = 1):
        if not isinstance(h, Poly):
            h = Poly.const(n, h)
        if h.num_vars < n:
            raise ValueError("density must be a polynomial in at least n variables")
        if h.constant_term() == 0:
            raise ValueError("volume density must not vanish at the origin")
        self.n = n
        self.h = h

    def form(self) -> DiffForm:
        return DiffForm(self.n, self.n, {tuple(range(self.n)): self.h}, nvars=self.h.num_vars)


def coordinate_vector(n: int, i: int, nvars: int | None = None) -> MultiVector:
    return MultiVector.basis(n, (i,), nvars)


def coordinate_covector(n: int, i: int, nvars: int | None = None) -> DiffForm:
    return DiffForm.basis(n, (i,), nvars)


def euler_field(n: int, nvars: int | None = None) -> MultiVector:
    ring = n if nvars is None else nvars
    return MultiVector(n, 1, {(i,): Poly.var(ring, i) for i in range(n)}, nvars=ring)


def _same_space(a: _Graded, b: _Graded):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.nvars != b.nvars:
        raise ValueError(f"coefficient ring mismatch: {a.nvars} vs {b.nvars} variables")


def wedge(a: _Graded, b: _Graded) -> _Graded:
    """Wedge product of two forms or two multivectors."""
    if type(a) is not type(b):
        raise TypeError("wedge needs two forms or two multivectors")
    _same_space(a, b)
    deg = a.degree + b.degree
    cls = type(a)
    if deg > a.n:
        return cls.zero(a.n, a.n, a.nvars)
    out: dict[Index, Poly] = {}
    for ia, pa in a.items():
        for ib, pb in b.items():
            s, idx = merge_sign(ia, ib)
            if not s:
                continue
            term = pa * pb
            if s < 0:
                term = -term
            out[idx] = out[idx] + term if idx in out else term
    return cls._raw(a.n, deg, out, a.nvars)


def d(w: DiffForm) -> DiffForm:
    """Exterior derivative (coordinates only; parameter variables are constants)."""
    if w.degree == w.n:
        return DiffForm.zero(w.n, w.n, w.nvars)
    out: dict[Index, Poly] = {}
    for idx, p in w.items():
        for i in range(w.n):
            if i in idx:
                continue
            dp = p.diff(i)
            if not dp:
                continue
            s, new = merge_sign((i,), idx)
            term = dp if s > 0 else -dp
            out[new] = out[new] + term if new in out else term
    return DiffForm._raw(w.n, w.degree + 1, out, w.nvars)


def exact_form(g: Poly, n: int) -> DiffForm:
    """The 1-form dg."""
    return d(DiffForm(n, 0, {(): g}, nvars=g.num_vars))


def _contract_basis(vec_idx: Index, form_idx: Index) -> tuple[int, Index | None]:
    sign = 1
    rest = form_idx
    for i in vec_idx:
        s, rest = _remove_at(rest, i)
        if not s:
            return 0, None
        sign *= s
    return sign, rest


def interior(xi: MultiVector, w: DiffForm) -> DiffForm:
    """``iota_xi w``: feed the factors of xi into the first slots of w."""
    if not isinstance(xi, MultiVector) or not isinstance(w, DiffForm):
        raise TypeError("interior needs a multivector and a form")
    _same_space(xi, w)
    k, p = xi.degree, w.degree
    if k > p:
        raise ValueError(f"cannot contract a degree-{k} multivector into a {p}-form")
    out: dict[Index, Poly] = {}
    for iv, pv in xi.items():
        for iw, pw in w.items():
            s, rest = _contract_basis(iv, iw)
            if not s:
                continue
            term = pv * pw
            if s < 0:
                term = -term
            out[rest] = out[rest] + term if rest in out else term
    return DiffForm._raw(w.n, p - k, out, w.nvars)


def contract_covector(alpha: DiffForm, P: MultiVector) -> MultiVector:
    """``P(alpha, ...)``: insert a 1-form into the first slot of a multivector."""
    if alpha.degree != 1:
        raise ValueError("expected a 1-form")
    _same_space(alpha, P)
    if P.degree == 0:
        raise ValueError("cannot contract a function")
    out: dict[Index, Poly] = {}
    for (i,), a in alpha.items():
        for idx, p in P.items():
            s, rest = _remove_at(idx, i)
            if not s:
                continue
            term = a * p
            if s < 0:
                term = -term
            out[rest] = out[rest] + term if rest in out else term
    return MultiVector._raw(P.n, P.degree - 1, out, P.nvars)


def _theta_derivative(P: MultiVector, i: int, side: str) -> dict[Index, Poly]:
    """Odd derivative of P viewed as a polynomial in anticommuting theta_j."""
    out = {}
    for idx, p in P.items():
        if i not in idx:
            continue
        pos = idx.index(i)
        # left: move theta_i to the front; right: move it to the back
        moves = pos if side == "left" else len(idx) - 1 - pos
        rest = idx[:pos] + idx[pos + 1 :]
        out[rest] = p if moves % 2 == 0 else -p
    return out


def schouten(P: MultiVector, Q: MultiVector) -> MultiVector:
    """Schouten-Nijenhuis bracket, degree ``deg P + deg Q - 1``."""
    if not isinstance(P, MultiVector) or not isinstance(Q, MultiVector):
        raise TypeError("schouten needs two multivectors")
    _same_space(P, Q)
    p, q = P.degree, Q.degree
    deg = p + q - 1
    n = P.n
    if deg < 0:
        return MultiVector.zero(n, 0, P.nvars)
    if deg > n:
        return MultiVector.zero(n, n, P.nvars)
    out: dict[Index, Poly] = {}

    def acc(idx_a, ca, idx_b, cb, sign):
        s, idx = merge_sign(idx_a, idx_b)
        if not s:
            return
        term = ca * cb
        if s * sign < 0:
            term = -term
        out[idx] = out[idx] + term if idx in out else term

    for i in range(n):
        dPr = _theta_derivative(P, i, "right")
        if dPr:
            for iq, cq in Q.items():
                dq = cq.diff(i)
                if dq:
                    for ip, cp in dPr.items():
                        acc(ip, cp, iq, dq, 1)
        dQl = _theta_derivative(Q, i, "left")
        if dQl:
            for ip, cp in P.items():
                dp = cp.diff(i)
                if dp:
                    for iq, cq in dQl.items():
                        acc(ip, dp, iq, cq, -1)
    overall = -1 if (p - 1) % 2 else 1
    if overall < 0:
        out = {k: -v for k, v in out.items()}
    return MultiVector._raw(n, deg, out, P.nvars)


def lie_derivative(X: MultiVector, P: MultiVector) -> MultiVector:
    if X.degree != 1:
        raise ValueError("Lie derivative needs a vector field")
    return schouten(X, P)


def _eval_poly(p: Poly, point: np.ndarray, params: Sequence[float]):
    full = list(point) + list(params)
    return p.eval([float(v) for v in full])


def eval_multivector(P: _Graded, point, params: Sequence[float] = ()) -> np.ndarray:
    """Float components at ``point``, ordered like ``basis_tuples(n, degree)``."""
    point = np.asarray(point, dtype=float)
    if point.shape != (P.n,):
        raise ValueError(f"point must have length {P.n}")
    if len(params) != P.nvars - P.n:
        raise ValueError(f"expected {P.nvars - P.n} parameter values")
    basis = basis_tuples(P.n, P.degree)
    out = np.zeros(len(basis))
    pos = {idx: i for i, idx in enumerate(basis)}
    for idx, p in P.items():
        out[pos[idx]] = _eval_poly(p, point, params)
    return out


eval_form = eval_multivector
