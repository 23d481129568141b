from fractions import Fraction

import pytest
from hypothesis import given

from qkadelic.config import EngineConfig
from qkadelic.lambda_ring import const, tau
from qkadelic.qfun import LaurentPoly, one_minus_q
from qkadelic.scalars import zeta
from qkadelic.textio import ParseError, dump_json, load_json, parse_lambda, parse_laurent, parse_scalar

from conftest import lambda_elements


def test_parse_lambda():
    assert parse_lambda("tau1") == tau(1)
    assert parse_lambda("Psi2(tau3)") == tau(3, 2)
    assert parse_lambda("1/2*Psi1(tau4)*Psi2(tau1) - 3") == tau(4) * tau(1, 2) * Fraction(1, 2) - 3
    assert parse_lambda("2 tau1 z4") == tau(1) * zeta(4) * 2
    assert parse_lambda("Psi2(tau1 + tau2)") == tau(1, 2) + tau(2, 2)
    assert parse_lambda("(1 + tau1)^2", 1) == 1 + 2 * tau(1, D=1)


def test_parse_laurent():
    assert parse_laurent("1 - q") == one_minus_q()
    assert parse_laurent("(1-q) + Psi1(tau1)") == one_minus_q() + LaurentPoly({0: tau(1)})
    assert parse_laurent("3*q^-2 + tau2*q^3") == LaurentPoly({-2: const(3), 3: tau(2)})
    assert parse_scalar("1/2 + 3*z4") == Fraction(1, 2) + 3 * zeta(4)


def test_parse_errors():
    for bad in ["tau", "1 +", "q^q", "1/(1-q)", "foo"]:
        with pytest.raises(ParseError):
            parse_laurent(bad)


@given(lambda_elements())
def test_render_parse_round_trip(x):
    assert parse_lambda(str(x), 4) == x


def test_json_is_canonical_and_exact():
    assert dump_json({"b": 1, "a": [2, "1/3"]}) == '{\n  "a": [\n    2,\n    "1/3"\n  ],\n  "b": 1\n}\n'
    with pytest.raises(TypeError):
        dump_json({"x": 0.5})
    with pytest.raises(ParseError):
        load_json('{"x": 0.5}')


def test_config_validation():
    cfg = EngineConfig()
    assert cfg.E >= cfg.D + 2
    with pytest.raises(ValueError):
        EngineConfig(D=3, E=4)
    with pytest.raises(ValueError):
        EngineConfig(R=0)
    with pytest.raises(ValueError):
        EngineConfig.from_dict({"D": 2, "bogus": 1})
    assert EngineConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.replace(R=None, M_max=5).M_max == 5
