import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qkadelic.config import EngineConfig
from qkadelic.expand import QSeries, expand_at_one
from qkadelic.lambda_ring import const, lambda_exp, tau
from qkadelic.loopspace import SequencePoint, dilaton_point, project_plus_seq
from qkadelic.qfun import LaurentPoly, RationalQ, one_minus_q, q_power, ratq_exp
from qkadelic.qk_point import (
    MembershipError,
    PtParams,
    check_theorem1_pt,
    dq_multiply,
    expected_T,
    fake_cone_membership,
    generalized_flow,
    random_params,
    reconstruct,
    string_flow,
    tangent_membership,
    theorem2_generate,
)


def inv(k, coeff=1):
    return RationalQ.inv_one_minus(k, coeff)


def test_generate_examples():
    cfg = EngineConfig(D=1, R=2, E=3)
    pt = theorem2_generate(PtParams({1: tau(1, D=1)}), cfg)
    assert pt[1] == one_minus_q() + LaurentPoly({0: tau(1, D=1)})
    assert pt[2] == one_minus_q()
    cfg = EngineConfig(D=2, R=3, E=4)
    t = {1: LaurentPoly({0: const(1), 2: tau(1)}), 3: LaurentPoly({-1: tau(2) * tau(1)}) + 1}
    pt = theorem2_generate(PtParams({}, t), cfg)
    assert all(pt[r] == RationalQ(one_minus_q()) * t.get(r, 1) for r in (1, 2, 3))
    assert theorem2_generate(PtParams(), cfg) == dilaton_point(3, cfg)


def test_generate_matches_series_oracle():
    """(1-q) exp(X) computed from the exponential series of the expansion at q = 1."""
    D, E = 2, 6
    cfg = EngineConfig(D=D, R=2, E=E)
    p = PtParams({1: tau(1, D=D) + tau(2, D=D) * 3, 2: tau(1, D=D) * tau(2, D=D)})
    pt = theorem2_generate(p, cfg)
    for r in (1, 2):
        X = RationalQ(LaurentPoly())
        for k in (1, 2):
            v = p.tau_k(k * r, D)
            if v:
                X = X + inv(k, v.adams(k) * Fraction(1, k))
        from qkadelic.expand import series_exp

        oracle = expand_at_one(one_minus_q(), E + 4) * series_exp(expand_at_one(X, E + 4))
        s = expand_at_one(pt[r], E)
        assert all(s.coefficient(e) == oracle.coefficient(e) for e in range(-3, E + 1))


def test_params_validation():
    with pytest.raises(ValueError, match="augmentation ideal"):
        PtParams({1: const(3)})
    with pytest.raises(ValueError):
        PtParams({}, {1: LaurentPoly({0: const(2)})})


def test_params_json_round_trip(rng):
    cfg = EngineConfig(D=3, R=5)
    for _ in range(10):
        p = random_params(rng, cfg)
        assert PtParams.from_json(p.to_json(), 3) == p


def test_fake_cone_examples():
    E = 4
    data = fake_cone_membership(expand_at_one(one_minus_q(), E))
    assert data.T == 0 and data.t.coeffs == {0: const(1)}
    g = one_minus_q() + LaurentPoly({0: tau(1, D=1)})
    data = fake_cone_membership(expand_at_one(g, E))
    assert data.T == tau(1, D=1) and data.t.coeffs == {0: const(1)}
    with pytest.raises(MembershipError, match="log-prefix"):
        fake_cone_membership(QSeries.from_coeffs({0: 1}, E))


def test_fake_cone_rejects_double_pole():
    D = 2
    g = RationalQ(one_minus_q()) * ratq_exp(RationalQ(LaurentPoly({0: tau(1, D=D)}), (1, 1)), D)
    with pytest.raises(MembershipError, match="pole of order 2"):
        fake_cone_membership(g.reduce(), E=6, D=D)


def test_fake_cone_series_and_exact_routes_agree(rng):
    cfg = EngineConfig(D=2, R=3, E=8)
    for _ in range(5):
        pt = theorem2_generate(random_params(rng, cfg), cfg)
        for f in pt.entries:
            exact = fake_cone_membership(f, E=8, D=2)
            series = fake_cone_membership(expand_at_one(f, 14))
            assert exact.T == series.T


def test_tangent_examples():
    assert tangent_membership(QSeries.from_coeffs({1: -1}, 4), const(0))
    assert not tangent_membership(QSeries.from_coeffs({-1: -tau(1)}, 4), const(0))
    D = 2
    f = ratq_exp(inv(1, tau(1, D=D)), D) * q_power(2)
    assert tangent_membership(expand_at_one(f.reduce(), 6), tau(1, D=D))


def test_check_examples():
    cfg = EngineConfig(D=2, R=4, E=6, M_max=3)
    cert = check_theorem1_pt(dilaton_point(4, cfg))
    assert cert.passed and all(v == 0 for v in cert.T.values())
    p = PtParams({1: tau(1, D=2), 2: tau(2, D=2) - tau(1, D=2)})
    cert = check_theorem1_pt(theorem2_generate(p, cfg))
    assert cert.passed and cert.T[1] == expected_T(p, 1, 2)
    D = 1
    cfg = EngineConfig(D=D, R=2, E=4, M_max=2)
    bad = RationalQ(one_minus_q()) + RationalQ(LaurentPoly({0: tau(1, D=D), 1: -tau(1, D=D)}), (2,))
    cert = check_theorem1_pt(dilaton_point(2, cfg).replace(1, bad))
    assert cert.failed == ["r1_zeta2_1"]
    assert cert.cells["r1_zeta2_1"].witness.coeffs


def test_check_reports_unchecked_window():
    cfg = EngineConfig(D=2, R=2, E=4, M_max=3)
    cert = check_theorem1_pt(dilaton_point(2, cfg))
    assert not cert.failed
    assert cert.unchecked_in_window == ["r1_zeta3_1", "r1_zeta3_2"]
    assert not cert.passed


def test_string_flow_examples():
    D = 2
    cfg = EngineConfig(D=D, R=3, E=5, M_max=3)
    p = PtParams({1: tau(1, D=D), 2: tau(3, D=D)})
    tp = {1: tau(2, D=D), 3: tau(1, D=D) * tau(2, D=D)}
    flowed = string_flow(theorem2_generate(p, cfg), tp)
    summed = PtParams({k: p.tau_k(k) + tp.get(k, 0) for k in (1, 2, 3)})
    assert flowed == theorem2_generate(summed, cfg)
    assert string_flow(theorem2_generate(p, cfg), {}) == theorem2_generate(p, cfg)
    assert check_theorem1_pt(flowed).passed
    with pytest.raises(ValueError):
        string_flow(theorem2_generate(p, cfg), {1: const(1)})


def test_dq_multiply_examples():
    D = 2
    cfg = EngineConfig(D=D, R=2, E=5, M_max=2)
    dil = dilaton_point(2, cfg)
    assert dq_multiply(dil, {1: 1, 2: 1}) == dil
    op = LaurentPoly({0: const(1), 1: tau(1)})
    out = dq_multiply(dil, {1: op})
    assert out[1] == RationalQ(one_minus_q()) * op
    assert check_theorem1_pt(out).passed


def test_generalized_flow_examples():
    D = 2
    cfg = EngineConfig(D=D, R=3, E=5, M_max=3)
    pt = theorem2_generate(PtParams({1: tau(2, D=D)}), cfg)
    taus = {1: tau(1, D=D), 2: tau(2, D=D) * 2, 3: tau(3, D=D)}
    assert generalized_flow(pt, {k: LaurentPoly({0: v}) for k, v in taus.items()}) == string_flow(pt, taus)
    out = generalized_flow(pt, {1: LaurentPoly({1: tau(1, D=D)})})
    assert check_theorem1_pt(out).passed
    assert generalized_flow(pt, {}) == pt
    with pytest.raises(ValueError, match="free-term"):
        generalized_flow(pt, {1: LaurentPoly({1: const(1)})})


def test_reconstruct_examples():
    D = 1
    cfg = EngineConfig(D=D, R=3, E=3)
    p, f = reconstruct(project_plus_seq(dilaton_point(3, cfg)), cfg)
    assert p == PtParams() and f == dilaton_point(3, cfg)
    targets = [one_minus_q() + LaurentPoly({0: tau(r, D=D)}) for r in (1, 2, 3)]
    p, _ = reconstruct(targets, cfg)
    assert all(p.tau_k(r) == tau(r, D=D) for r in (1, 2, 3))
    with pytest.raises(ValueError):
        reconstruct([LaurentPoly({0: const(1)})] * 3, cfg)


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_reconstruct_round_trip(seed):
    cfg = EngineConfig(D=3, R=4, E=6)
    p = random_params(random.Random(seed), cfg)
    f = theorem2_generate(p, cfg)
    p2, f2 = reconstruct(project_plus_seq(f), cfg)
    assert p2 == p.truncate(3)
    assert f2 == f


def test_verdicts_do_not_depend_on_the_choice_of_primitive_root(rng):
    """Other branches of q**(1/m) permute the primitive roots; verdicts must agree across them."""
    cfg = EngineConfig(D=2, R=6, E=6, M_max=5)
    D = cfg.D
    points = [theorem2_generate(random_params(rng, cfg), cfg) for _ in range(3)]
    for j, k in [(0, 3), (1, 4), (2, 5)]:
        eps = RationalQ(LaurentPoly({j: tau(11, D=D), j + 1: -tau(11, D=D)}), (k,))
        points.append(points[0].replace(1, points[0][1] + eps))
    for pt in points:
        cert = check_theorem1_pt(pt)
        by_root = {}
        for v in cert.cells.values():
            by_root.setdefault((v.r, v.m), set()).add(v.status)
        assert all(len(s) == 1 for s in by_root.values())
    assert not check_theorem1_pt(points[-1]).passed
