"""Exact multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`.  A :class:`Poly` is an immutable
sparse map from exponent tuples to nonzero coefficients; two polynomials are
equal exactly when they are equal as mathematical objects.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]

__all__ = [
    "Poly",
    "RationalFunc",
    "poly_arith",
    "poly_diff",
    "poly_compose",
    "poly_eval",
    "grlex_key",
]


def grlex_key(exp: Exponent):
    """Sort key for graded lexicographic order (total degree first)."""
    return (sum(exp), exp)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class Poly:
    __slots__ = ("num_vars", "_terms", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, object] | None = None):
        if num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {num_vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = _as_fraction(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.num_vars = num_vars
        self._terms = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0]), reverse=True))
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, num_vars: int, terms: dict[Exponent, Fraction]) -> "Poly":
        # terms must already be clean (no zeros, right lengths)
        p = object.__new__(cls)
        p.num_vars = num_vars
        p._terms = dict(sorted(terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True))
        p._hash = None
        return p

    @classmethod
    def zero(cls, num_vars: int) -> "Poly":
        return cls._raw(num_vars, {})

    @classmethod
    def const(cls, num_vars: int, c) -> "Poly":
        c = _as_fraction(c)
        return cls._raw(num_vars, {(0,) * num_vars: c} if c else {})

    @classmethod
    def var(cls, num_vars: int, index: int, power: int = 1) -> "Poly":
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for {num_vars} variables")
        exp = [0] * num_vars
        exp[index] = power
        return cls._raw(num_vars, {tuple(exp): Fraction(1)})

    @classmethod
    def variables(cls, num_vars: int) -> list["Poly"]:
        return [cls.var(num_vars, i) for i in range(num_vars)]

    # inspection

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        """Terms in descending graded-lex order (a copy)."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff((0,) * self.num_vars)

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly._raw(self.num_vars, {e: c for e, c in self._terms.items() if sum(e) == degree})

    def truncate(self, max_degree: int, vars_upto: int | None = None) -> "Poly":
        """Drop terms whose degree in the first ``vars_upto`` variables exceeds ``max_degree``."""
        m = self.num_vars if vars_upto is None else vars_upto
        return Poly._raw(self.num_vars, {e: c for e, c in self._terms.items() if sum(e[:m]) <= max_degree})

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    # ring operations

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.num_vars != self.num_vars:
                raise ValueError(f"dimension mismatch: {self.num_vars} vs {other.num_vars} variables")
            return other
        return Poly.const(self.num_vars, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Poly.zero(self.num_vars)
            return Poly._raw(self.num_vars, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.num_vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        # division by scalars only; use divide_exact for polynomial divisors
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                return NotImplemented
            other = other.constant_term()
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Poly.const(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.num_vars == other.num_vars and self._terms == other._terms
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return self._terms == ({(0,) * self.num_vars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        from .frontend import serialize_poly

        return f"Poly({self.num_vars}, {serialize_poly(self)!r})"

    # calculus and substitution

    def diff(self, index: int) -> "Poly":
        if not 0 <= index < self.num_vars:
            raise IndexError(f"variable index {index} out of range for {self.num_vars} variables")
        out = {}
        for e, c in self._terms.items():
            k = e[index]
            if k:
                ne = e[:index] + (k - 1,) + e[index + 1 :]
                out[ne] = c * k
        return Poly._raw(self.num_vars, out)

    def gradient(self, upto: int | None = None) -> list["Poly"]:
        return [self.diff(i) for i in range(self.num_vars if upto is None else upto)]

    def __call__(self, *point):
        return self.eval(point[0] if len(point) == 1 and isinstance(point[0], (list, tuple)) else point)

    def eval(self, point: Sequence):
        """Evaluate at ``point``; exact for rational input, float otherwise."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has length {len(point)}, expected {self.num_vars}")
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        if exact:
            pt = [Fraction(v) for v in point]
            total = Fraction(0)
        else:
            pt = [float(v) for v in point]
            total = 0.0
        for e, c in self._terms.items():
            term = c if exact else float(c)
            for v, k in zip(pt, e):
                if k:
                    term = term * v**k
            total += term
        return total

    def subs(self, values: Mapping[int, "Poly | object"]) -> "Poly":
        """Substitute polynomials (same num_vars) or constants for selected variables."""
        repl = {i: (v if isinstance(v, Poly) else Poly.const(self.num_vars, v)) for i, v in values.items()}
        for v in repl.values():
            if v.num_vars != self.num_vars:
                raise ValueError("substituted polynomial must share num_vars")
        out = Poly.zero(self.num_vars)
        cache: dict[tuple[int, int], Poly] = {}
        for e, c in self._terms.items():
            kept = tuple(0 if i in repl else k for i, k in enumerate(e))
            term = Poly._raw(self.num_vars, {kept: c})
            for i, k in enumerate(e):
                if i in repl and k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = repl[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute ``images[i]`` for variable i (images may live in another ring)."""
        if len(images) != self.num_vars:
            raise ValueError(f"need {self.num_vars} images, got {len(images)}")
        if not images:
            return self
        target = images[0].num_vars
        out = Poly.zero(target)
        powers: dict[tuple[int, int], Poly] = {}
        for e, c in self._terms.items():
            term = Poly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = images[i] ** k
                    term = term * powers[(i, k)]
            out = out + term
        return out

    def embed(self, num_vars: int, positions: Sequence[int] | None = None) -> "Poly":
        """Re-index into a ring with ``num_vars`` variables; variable i goes to ``positions[i]``."""
        positions = list(range(self.num_vars)) if positions is None else list(positions)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * num_vars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            out[tuple(ne)] = c
        return Poly._raw(num_vars, out)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return next(iter(self._terms.items()))

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Multivariate division by a single divisor in graded-lex order."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead_e, lead_c = divisor.leading_term()
        quot: dict[Exponent, Fraction] = {}
        rem: dict[Exponent, Fraction] = {}
        p = self
        while p:
            e, c = p.leading_term()
            if all(a >= b for a, b in zip(e, lead_e)):
                qe = tuple(a - b for a, b in zip(e, lead_e))
                qc = c / lead_c
                quot[qe] = quot.get(qe, 0) + qc
                p = p - Poly._raw(self.num_vars, {qe: qc}) * divisor
            else:
                rem[e] = c
                p = p - Poly._raw(self.num_vars, {e: c})
        return Poly(self.num_vars, quot), Poly(self.num_vars, rem)

    def divide_exact(self, divisor: "Poly") -> "Poly":
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("division is not exact")
        return q


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.num_vars != b.num_vars:
        raise ValueError(f"dimension mismatch: {a.num_vars} vs {b.num_vars} variables")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_diff(p: Poly, var_index: int) -> Poly:
    return p.diff(var_index)


def poly_compose(k: Poly, f: Poly) -> Poly:
    """Return k(f) for univariate k."""
    if k.num_vars != 1:
        raise ValueError("outer polynomial must be univariate")
    return k.compose([f])


def poly_eval(p: Poly, point: Sequence):
    return p.eval(point)


class RationalFunc:
    """Quotient num/den of polynomials in named variables.

    No cancellation is attempted; zero-testing goes through the numerator.
    """

    __slots__ = ("vars", "num", "den")

    def __init__(self, vars: Iterable[str], num: Poly, den: Poly):
        self.vars = tuple(vars)
        if num.num_vars != len(self.vars) or den.num_vars != len(self.vars):
            raise ValueError("numerator/denominator arity must match the variable list")
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, point: Sequence):
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {tuple(point)}")
        return self.num.eval(point) / d

    __call__ = lambda self, *pt: self.eval(pt)  # noqa: E731

    def diff(self, index: int) -> "RationalFunc":
        n, d = self.num, self.den
        return RationalFunc(self.vars, n.diff(index) * d - n * d.diff(index), d * d)

    def compose(self, images: Sequence[Poly]) -> tuple[Poly, Poly]:
        """Substitute polynomials for the variables, returning (num, den)."""
        return self.num.compose(images), self.den.compose(images)

    def __eq__(self, other):
        # cross-multiplied equality, no gcd needed
        if not isinstance(other, RationalFunc) or other.vars != self.vars:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __repr__(self):
        from .frontend import serialize_poly

        names = list(self.vars)
        return f"RationalFunc(({serialize_poly(self.num, names)}) / ({serialize_poly(self.den, names)}))"
