import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from qkadelic.lambda_ring import LambdaElement, adams, const, filtration_degree, lambda_exp, lambda_log, tau
from qkadelic.scalars import zeta

from conftest import lambda_elements, random_lambda


def test_truncated_ring_examples():
    assert tau(1) + tau(1) == 2 * tau(1)
    assert tau(1, D=1) * tau(1, D=1) == 0
    assert (1 + tau(1, D=3)) * (1 - tau(1, D=3)) == 1 - tau(1, D=3) ** 2


def test_adams_examples():
    assert adams(2, tau(1)) == tau(1, 2)
    assert filtration_degree(adams(2, tau(1))) == 2
    assert adams(2, tau(1) * tau(2)) == tau(1, 2) * tau(2, 2)
    assert adams(2, adams(3, tau(1))) == tau(1, 6)


def test_adams_acts_on_roots_of_unity():
    assert (tau(1) * zeta(3)).adams(2) == tau(1, 2) * zeta(3, 2)
    assert (tau(1) * Fraction(2, 3)).adams(5) == tau(1, 5) * Fraction(2, 3)


def test_filtration_degree_examples():
    assert filtration_degree(tau(1)) == 1
    assert filtration_degree(tau(2, 3)) == 3
    assert filtration_degree(1 + tau(1)) == 0
    assert filtration_degree(const(0)) == float("inf")


def test_exp_log_examples():
    x = tau(1, D=2)
    assert lambda_exp(x) == 1 + x + x * x * Fraction(1, 2)
    assert lambda_log(lambda_exp(x)) == x
    assert lambda_exp(const(0)) == 1


def test_exp_log_preconditions():
    with pytest.raises(ValueError):
        lambda_exp(1 + tau(1, D=2))
    with pytest.raises(ValueError):
        lambda_log(tau(1, D=2))


def test_exp_matches_sympy_graded_series():
    D = 4
    x = tau(1, D=D) * 3 + tau(2, 1, D) * tau(1, 1, D) - tau(1, 2, D) * Fraction(1, 2)
    t = sympy.Symbol("t")
    a, b, c = sympy.symbols("a b c")
    # a = tau1 (weight 1), b = tau2 (weight 1), c = Psi^2 tau1 (weight 2)
    expr = 3 * a * t + a * b * t**2 - sympy.Rational(1, 2) * c * t**2
    series = sympy.series(sympy.exp(expr), t, 0, D + 1).removeO().subs(t, 1)
    poly = sympy.Poly(sympy.expand(series), a, b, c)
    expected = const(0, D)
    gens = [tau(1, D=D), tau(2, D=D), tau(1, 2, D)]
    for exps, coeff in poly.terms():
        mono = const(Fraction(int(coeff.p), int(coeff.q)), D)
        for g, e in zip(gens, exps):
            for _ in range(e):
                mono = mono * g
        expected = expected + mono
    assert lambda_exp(x) == expected


def test_json_round_trip(rng):
    for _ in range(20):
        x = random_lambda(rng, 3)
        assert LambdaElement.from_json(x.to_json(), 3) == x


@given(lambda_elements(), lambda_elements(), st.integers(1, 4), st.integers(1, 4))
def test_adams_composition_and_homomorphism(x, y, a, b):
    assert x.adams(1) == x
    assert x.adams(b).adams(a) == x.adams(a * b)
    assert (x * y).adams(a) == x.adams(a) * y.adams(a)
    assert (x + y).adams(a) == x.adams(a) + y.adams(a)


@given(lambda_elements(constant=False), st.integers(2, 4))
def test_filtration_increase(x, m):
    if x:
        d = x.filtration_degree()
        y = x.adams(m)
        assert y.filtration_degree() >= d + 1
        if y:
            assert y.filtration_degree() == m * d


@given(lambda_elements(constant=False), st.integers(1, 4))
def test_exp_log_inverse(x, D):
    x = x.truncate(D)
    assert lambda_log(lambda_exp(x)) == x
    assert lambda_exp(lambda_log(1 + x)) == 1 + x
