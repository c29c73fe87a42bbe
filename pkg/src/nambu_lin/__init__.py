"""Exact exterior calculus, Nambu-structure checks and Moser linearization for coorder-1 structures."""

from .poly import Poly, RationalFunc
from .exterior import DiffForm, MultiVector, VolumeDensity, d, interior, lie_derivative, schouten, wedge
from .linalg import Signature
from .nambu import NambuCandidate, Verdict, is_nambu, is_unimodular, dual_form
from .frontend import parse, serialize

__version__ = "0.1.0"
