"""Independent reference computations shared by the test modules."""
from fractions import Fraction

from qkadelic.lambda_ring import const
from qkadelic.qfun import LaurentPoly, RationalQ
from qkadelic.scalars import zeta

from conftest import random_lambda

SAMPLE_POINTS = [Fraction(n, d) for n, d in [(2, 1), (3, 1), (5, 7), (-4, 3), (7, 2), (11, 5), (-9, 2), (13, 3),
                                               (17, 4), (-19, 6), (23, 5), (29, 8), (-31, 7), (37, 9), (41, 10)]]


def random_ratq(rng, D=None, scalar=True):
    """Laurent numerator over prod(1 - q^k), k <= 6, at most three factors."""
    terms = {}
    for _ in range(rng.randint(1, 4)):
        c = const(Fraction(rng.randint(-5, 5), rng.randint(1, 3))) if scalar else random_lambda(rng, D or 2)
        terms[rng.randint(-2, 6)] = c
    den = tuple(sorted(rng.randint(1, 6) for _ in range(rng.randint(0, 3))))
    return RationalQ(LaurentPoly(terms), den)


def evaluate(f: RationalQ, x: Fraction):
    """f(x) for a rational x away from the roots of unity."""
    num = const(0)
    for e, c in f.num.terms.items():
        num = num + c.scale(x**e)
    den = Fraction(1)
    for k in f.den:
        den *= 1 - x**k
    return num.scale(1 / den)


def evaluate_partial_fractions(pf, x: Fraction):
    """plus(x) + sum c_j / (1 - x/eta)^j, exactly in Q(zeta)."""
    total = const(0)
    for e, c in pf.plus.terms.items():
        total = total + c.scale(x**e)
    for (m, a), coeffs in pf.polar.items():
        for j, c in enumerate(coeffs, start=1):
            if m == 1:
                total = total + c.scale(1 / (1 - x) ** j)
            else:
                base = 1 - x * zeta(m, a).inv()
                total = total + c.scale((base**j).inv())
    return total


def recombination_is_exact(f: RationalQ, pf) -> bool:
    """Both sides are rational functions of bounded degree; agreement at 15 points is equality."""
    return all(evaluate_partial_fractions(pf, x) == evaluate(f, x) for x in SAMPLE_POINTS)
