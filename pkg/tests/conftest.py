import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from qkadelic.lambda_ring import const, tau

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")


def random_lambda(rng: random.Random, D: int, terms: int = 3, constant: bool = True):
    """A random ground-ring element built from Psi^j(tau_k) with j, k <= 3."""
    x = const(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if constant else 0, D)
    for _ in range(terms):
        mono = const(Fraction(rng.randint(-4, 4), rng.randint(1, 4)), D)
        for _ in range(rng.randint(1, 2)):
            mono = mono * tau(rng.randint(1, 3), rng.randint(1, 2), D)
        x = x + mono
    return x


@st.composite
def lambda_elements(draw, D=4, constant=True):
    return random_lambda(random.Random(draw(st.integers(0, 10**6))), D, draw(st.integers(0, 4)), constant)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, elapsed, budget) in sorted(test_acceptance.RESULTS.items()):
        terminalreporter.write_line(f"{name} {status} ({elapsed:.2f}s, budget {budget}s)")
