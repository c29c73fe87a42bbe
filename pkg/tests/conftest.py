"""Shared hypothesis strategies for exact polynomial and exterior objects."""

from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from nambu_lin.exterior import DiffForm, MultiVector
from nambu_lin.poly import Poly

small_fracs = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def polys(draw, n, max_degree=2, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = draw(st.lists(st.integers(0, max_degree), min_size=n, max_size=n))
        if sum(exp) > max_degree:
            continue
        terms[tuple(exp)] = draw(small_fracs)
    return Poly(n, terms)


@st.composite
def graded(draw, cls, n, degree, max_degree=2, max_terms=3):
    idxs = list(combinations(range(n), degree))
    chosen = draw(st.lists(st.sampled_from(idxs), max_size=min(3, len(idxs)), unique=True))
    return cls(n, degree, {i: draw(polys(n, max_degree, max_terms)) for i in chosen})


def forms(n, degree, **kw):
    return graded(DiffForm, n, degree, **kw)


def multivectors(n, degree, **kw):
    return graded(MultiVector, n, degree, **kw)
