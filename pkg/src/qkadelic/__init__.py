"""Exact engine for permutation-equivariant genus-0 quantum K-theory of a point.

Import the submodules directly; the names below are the most common entry points.
"""
from .lambda_ring import LambdaElement, const, tau
from .qfun import LaurentPoly, RationalQ
from .scalars import Cyclotomic, zeta

__all__ = ["Cyclotomic", "LambdaElement", "LaurentPoly", "RationalQ", "const", "tau", "zeta"]
__version__ = "0.1.0"
