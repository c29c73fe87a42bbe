"""Text format for polynomials, forms and multivectors.

Grammar (loosest binding first)::

    expr   := wedge (('+' | '-') wedge)*
    wedge  := prod ('^' prod)*              # exterior product
    prod   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INTEGER)*           # scalar power
    atom   := NUMBER | x<i> | dx<i> | e<i> | NAME | '(' expr ')'

``x<i>`` is the i-th coordinate (1-based), ``dx<i>`` its differential and
``e<i>`` the coordinate vector field.  A ``^`` directly followed by an integer
literal is a power, otherwise it is a wedge.  Non-scalar factors must be joined
with ``^``; ``*`` and ``/`` only scale.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exterior import DiffForm, MultiVector, _Graded, merge_sign
from .poly import Poly

__all__ = ["ParseError", "parse", "parse_poly", "parse_univariate", "serialize", "serialize_poly"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<pow>\^\s*(?=\d))
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", *_line_col(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group().strip(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


@dataclass
class _Val:
    kind: str  # "scalar", "form" or "vector"
    degree: int
    comps: dict


class _Parser:
    def __init__(self, text: str, dim: int, names: dict[str, int], nvars: int):
        self.text = text
        self.dim = dim
        self.names = names
        self.nvars = nvars
        self.toks = _lex(text)
        self.i = 0

    def err(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        return ParseError(msg, *_line_col(self.text, tok.pos))

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.peek()
        if t.kind != "op" or t.text != op:
            raise self.err(f"expected {op!r}")
        return self.take()

    def scalar(self, p: Poly) -> _Val:
        return _Val("scalar", 0, {(): p} if p else {})

    def run(self) -> _Val:
        v = self.expr()
        if self.peek().kind != "eof":
            raise self.err(f"unexpected token {self.peek().text!r}")
        return v

    def expr(self):
        left = self.wedge()
        while self.peek().kind == "op" and self.peek().text in "+-":
            tok = self.take()
            right = self.wedge()
            left = self.add(left, right, tok, negate=tok.text == "-")
        return left

    def wedge(self):
        left = self.prod()
        while self.peek().kind == "op" and self.peek().text == "^":
            tok = self.take()
            right = self.prod()
            left = self.wedge_vals(left, right, tok)
        return left

    def prod(self):
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.take()
            right = self.unary()
            if tok.text == "*":
                left = self.mul(left, right, tok)
            else:
                left = self.div(left, right, tok)
        return left

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            v = self.unary()
            if t.text == "-":
                v = _Val(v.kind, v.degree, {k: -p for k, p in v.comps.items()})
            return v
        return self.power()

    def power(self):
        base = self.atom()
        while self.peek().kind == "pow":
            tok = self.take()
            num = self.take()
            if num.kind != "num" or "." in num.text:
                raise self.err("exponent must be a non-negative integer", num)
            if base.kind != "scalar":
                raise self.err(f"power applies to scalars only, not a {base.kind} of degree {base.degree}", tok)
            p = base.comps.get((), Poly.zero(self.nvars))
            base = self.scalar(p ** int(num.text))
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return self.scalar(Poly.const(self.nvars, Fraction(t.text)))
        if t.kind == "op" and t.text == "(":
            v = self.expr()
            self.expect_op(")")
            return v
        if t.kind == "name":
            return self.name(t)
        raise self.err(f"unexpected token {t.text!r}" if t.text else "unexpected end of input", t)

    def name(self, t):
        if t.text in self.names:
            return self.scalar(Poly.var(self.nvars, self.names[t.text]))
        m = re.fullmatch(r"(x|dx|e)(\d+)", t.text)
        if not m:
            raise self.err(f"unknown symbol {t.text!r}", t)
        idx = int(m.group(2))
        if not 1 <= idx <= self.dim:
            raise self.err(f"index {idx} in {t.text!r} exceeds dimension {self.dim}", t)
        if m.group(1) == "x":
            return self.scalar(Poly.var(self.nvars, idx - 1))
        kind = "form" if m.group(1) == "dx" else "vector"
        return _Val(kind, 1, {(idx - 1,): Poly.const(self.nvars, 1)})

    def describe(self, v):
        return "scalar" if v.kind == "scalar" else f"{v.kind} of degree {v.degree}"

    def add(self, a, b, tok, negate=False):
        if a.kind != b.kind or a.degree != b.degree:
            raise self.err(f"cannot add {self.describe(a)} and {self.describe(b)}", tok)
        out = dict(a.comps)
        for k, p in b.comps.items():
            p = -p if negate else p
            s = out[k] + p if k in out else p
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _Val(a.kind, a.degree, out)

    def scale(self, v, p):
        return _Val(v.kind, v.degree, {k: c * p for k, c in v.comps.items() if c * p})

    def mul(self, a, b, tok):
        if a.kind == "scalar":
            return self.scale(b, a.comps.get((), Poly.zero(self.nvars)))
        if b.kind == "scalar":
            return self.scale(a, b.comps.get((), Poly.zero(self.nvars)))
        raise self.err(f"use '^' between non-scalar factors ({self.describe(a)} * {self.describe(b)})", tok)

    def div(self, a, b, tok):
        p = b.comps.get((), Poly.zero(self.nvars)) if b.kind == "scalar" else None
        if p is None or not p.is_constant():
            raise self.err("division only by constants", tok)
        if p.is_zero():
            raise self.err("division by zero", tok)
        return self.scale(a, Poly.const(self.nvars, 1 / p.constant_term()))

    def wedge_vals(self, a, b, tok):
        if a.kind == "scalar" and b.kind == "scalar":
            # between scalars '^' can only be a power with a literal exponent
            raise self.err("exponent must be a non-negative integer", tok)
        if a.kind == "scalar" or b.kind == "scalar":
            return self.mul(a, b, tok)
        if a.kind != b.kind:
            raise self.err(f"cannot wedge a {a.kind} with a {b.kind}", tok)
        out = {}
        for ia, pa in a.comps.items():
            for ib, pb in b.comps.items():
                s, idx = merge_sign(ia, ib)
                if not s:
                    continue
                term = pa * pb if s > 0 else -(pa * pb)
                val = out[idx] + term if idx in out else term
                if val:
                    out[idx] = val
                else:
                    out.pop(idx, None)
        return _Val(a.kind, a.degree + b.degree, out)


def parse(text: str, expected: str = "poly", dim: int | None = None, degree: int | None = None,
          names: Sequence[str] | None = None, nvars: int | None = None):
    """Parse ``text`` into a Poly, DiffForm or MultiVector.

    ``expected`` is ``"poly"``, ``"form"`` or ``"multivector"``.  ``dim`` is
    required; ``degree`` is only consulted for the literal zero.  ``names``
    adds extra scalar symbols, mapped to variables ``dim, dim+1, ...``.
    """
    if dim is None:
        raise ValueError("dimension must be given explicitly")
    extra = list(names or [])
    ring = dim + len(extra) if nvars is None else nvars
    table = {name: dim + i for i, name in enumerate(extra)}
    val = _Parser(text, dim, table, ring).run()
    if expected == "poly":
        if val.kind != "scalar":
            raise ParseError(f"expected a polynomial, got a {val.kind} of degree {val.degree}")
        return val.comps.get((), Poly.zero(ring))
    if expected not in ("form", "multivector"):
        raise ValueError(f"unknown expected kind {expected!r}")
    want = "form" if expected == "form" else "vector"
    cls = DiffForm if expected == "form" else MultiVector
    if val.kind == "scalar":
        if not val.comps and degree:
            return cls.zero(dim, degree, ring)
        return cls(dim, 0, val.comps, nvars=ring)
    if val.kind != want:
        raise ParseError(f"expected a {want}, got a {val.kind}")
    if val.degree > dim:
        if val.comps:
            raise ParseError(f"degree {val.degree} exceeds dimension {dim}")
        return cls.zero(dim, dim, ring)
    return cls(dim, val.degree, val.comps, nvars=ring)


def parse_poly(text: str, dim: int) -> Poly:
    return parse(text, "poly", dim=dim)


def parse_univariate(text: str, name: str = "f") -> Poly:
    """Parse a polynomial in one variable (``f`` and ``u`` are always accepted)."""
    table = {"f": 0, "u": 0, name: 0}
    val = _Parser(text, 0, table, 1).run()
    if val.kind != "scalar":
        raise ParseError(f"expected a polynomial in one variable, got a {val.kind}")
    return val.comps.get((), Poly.zero(1))


# serialization


def _fmt_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial(exp, names) -> str:
    parts = []
    for name, k in zip(names, exp):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def _default_names(num_vars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(num_vars)]


def _signed_terms(p: Poly, names):
    for exp, c in p.items():
        mono = _monomial(exp, names)
        mag = abs(c)
        if not mono:
            body = _fmt_fraction(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_fraction(mag)}*{mono}"
        yield (c < 0), body


def _join(signed) -> str:
    out = ""
    for neg, body in signed:
        if not out:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return out or "0"


def serialize_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else _default_names(p.num_vars)
    return _join(_signed_terms(p, names))


def serialize(value, names: Sequence[str] | None = None) -> str:
    """Canonical text; ``parse(serialize(v))`` reproduces ``v``."""
    if isinstance(value, Poly):
        return serialize_poly(value, names)
    if not isinstance(value, _Graded):
        raise TypeError(f"cannot serialize {type(value).__name__}")
    names = list(names) if names is not None else _default_names(value.nvars)
    prefix = "dx" if isinstance(value, DiffForm) else "e"
    if value.degree == 0:
        return serialize_poly(value[()], names)
    pieces = []
    for idx, p in value.items():
        basis = "^".join(f"{prefix}{i + 1}" for i in idx)
        if len(p) == 1:
            (neg, body), = _signed_terms(p, names)
            body = basis if body == "1" else f"{body}*{basis}"
            pieces.append((neg, body))
        else:
            pieces.append((False, f"({serialize_poly(p, names)})*{basis}"))
    return _join(pieces)
