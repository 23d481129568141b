"""Points of the cone for the target X = pt: generation, membership, flows, reconstruction.

The generator produces

    f_r = (1 - q) * exp( sum_k Psi^k(tau_{kr}) / (k (1 - q^k)) ) * t_r

as exact rational functions.  The checker tests each entry against the
fake cone near q = 1 and against the twisted tangent spaces at the other
roots of unity.  Both tests are carried out on exact rational functions
and only then expanded, so no precision is lost to the nilpotent poles.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .config import EngineConfig
from .expand import EXACT, PrecisionError, QSeries, expand_adelic, expand_at_one, series_exp, series_log
from .lambda_ring import LambdaElement, const, tau
from .loopspace import SequencePoint, cell_id, primitive_roots, project_plus_seq
from .qfun import LaurentPoly, RationalQ, one_minus_q, project_plus, ratq_exp

__all__ = [
    "PtParams",
    "MembershipError",
    "FakeConeData",
    "CellVerdict",
    "ConeCertificate",
    "theorem2_generate",
    "theorem2_exponent",
    "fake_cone_membership",
    "tangent_membership",
    "check_theorem1_pt",
    "string_flow",
    "dq_multiply",
    "generalized_flow",
    "reconstruct",
    "random_params",
    "expected_T",
]


class MembershipError(ValueError):
    """An expansion is not of the form (1 - q) exp(T / (1 - q)) t."""


def _lam(x, D=None) -> LambdaElement:
    if isinstance(x, LambdaElement):
        return x.truncate(D)
    return const(Fraction(x) if isinstance(x, int) else x, D)


@dataclass
class PtParams:
    """tau: k -> element of the augmentation ideal; t: r -> Laurent polynomial with t_r - 1 there too."""

    tau: dict = field(default_factory=dict)
    t: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = {int(k): _lam(v) for k, v in self.tau.items() if v}
        self.t = {int(r): LaurentPoly.coerce(v) for r, v in self.t.items()}
        self.validate()

    def validate(self):
        for k, v in self.tau.items():
            if k < 1:
                raise ValueError(f"tau index must be >= 1, got {k}")
            if v.filtration_degree() < 1:
                raise ValueError(f"tau_{k} = {v} has a filtration-degree-0 part; tau must lie in the augmentation ideal")
        for r, v in self.t.items():
            if r < 1:
                raise ValueError(f"t index must be >= 1, got {r}")
            if (v - 1).filtration_degree() < 1:
                raise ValueError(f"t_{r} - 1 = {v - 1} has a filtration-degree-0 part; t_r must be 1 modulo the augmentation ideal")

    def tau_k(self, k: int, D=None) -> LambdaElement:
        return self.tau.get(k, const(0)).truncate(D)

    def t_r(self, r: int, D=None) -> LaurentPoly:
        return self.t.get(r, LaurentPoly.coerce(1)).truncate(D)

    def truncate(self, D) -> "PtParams":
        return PtParams({k: v.truncate(D) for k, v in self.tau.items()}, {r: v.truncate(D) for r, v in self.t.items()})

    def __eq__(self, other):
        if not isinstance(other, PtParams):
            return NotImplemented
        keys_tau = set(self.tau) | set(other.tau)
        keys_t = set(self.t) | set(other.t)
        return all(self.tau_k(k) == other.tau_k(k) for k in keys_tau) and all(
            self.t_r(r) == other.t_r(r) for r in keys_t
        )

    __hash__ = None

    def to_json(self):
        return {
            "tau": {str(k): str(v) for k, v in sorted(self.tau.items()) if v},
            "t": {str(r): str(v) for r, v in sorted(self.t.items()) if v != 1},
        }

    @classmethod
    def from_json(cls, data, D=None):
        from .textio import parse_lambda, parse_laurent

        data = data or {}
        tau_ = {int(k): parse_lambda(v, D) for k, v in (data.get("tau") or {}).items()}
        t_ = {int(r): parse_laurent(v, D) for r, v in (data.get("t") or {}).items()}
        return cls(tau_, t_)


def expected_T(p: PtParams, r: int, D: int) -> LambdaElement:
    """sum_k Psi^k(tau_{kr}) / k^2."""
    out = const(0, D)
    for k in range(1, D + 1):
        v = p.tau_k(k * r, D)
        if v:
            out = out + v.adams(k) * Fraction(1, k * k)
    return out


def theorem2_exponent(tau_of, r: int, D: int) -> RationalQ:
    """sum_{k <= D} Psi^k(tau_{kr}) / (k (1 - q^k)); Psi^k lands in filtration >= k."""
    out = RationalQ(LaurentPoly())
    for k in range(1, D + 1):
        v = tau_of(k * r)
        if v:
            out = out + RationalQ.inv_one_minus(k, v.truncate(D).adams(k) * Fraction(1, k))
    return out


def theorem2_generate(p: PtParams, config: EngineConfig) -> SequencePoint:
    p.validate()
    D = config.D
    entries = []
    for r in range(1, config.R + 1):
        X = theorem2_exponent(lambda j: p.tau_k(j, D), r, D)
        f = RationalQ(one_minus_q().truncate(D)) * ratq_exp(X, D) * p.t_r(r, D)
        entries.append(f.reduce())
    return SequencePoint(tuple(entries), config)


# -- membership ---------------------------------------------------------

@dataclass
class FakeConeData:
    """g = (1 - q) exp(T / (1 - q)) t with T in the augmentation ideal and t - 1 there too."""

    T: LambdaElement
    t: QSeries
    h: QSeries


def _fake_from_log(h: QSeries) -> FakeConeData:
    if h.prec < -1:
        raise PrecisionError("logarithm not known through u^-1; raise the working order")
    if h.lo < -1:
        raise MembershipError(f"logarithm has a pole of order {-h.lo} at q = 1 (at most 1 allowed)")
    T = -h.coefficient(-1)
    if T.filtration_degree() < 1:
        raise MembershipError(f"polar coefficient {T} is not in the augmentation ideal")
    return FakeConeData(T, series_exp(h.regular_part()), h)


def fake_cone_membership(g, E: int | None = None, D: int | None = None) -> FakeConeData:
    """Split g = (1 - q) exp(T / (1 - q)) t, or raise :class:`MembershipError`.

    ``g`` is either an expansion at q = 1 or an exact rational function;
    the latter is expanded only after the logarithm has been taken.
    """
    if isinstance(g, QSeries):
        if not g:
            raise MembershipError("log-prefix mismatch: the expansion vanishes")
        y = -g.shift(-1)  # g / (1 - q) with 1 - q = -u
        log = series_log(y)
        if not log.trivial_prefix:
            raise MembershipError(
                f"log-prefix mismatch: g/(1-q) starts with {log.scalar}*u^{log.shift}, not 1"
            )
        return _fake_from_log(log.series)
    f = RationalQ.coerce(g)
    n = RationalQ(f.num, f.den + (1,)) - 1
    if n and n.filtration_degree() < 1:
        raise MembershipError("log-prefix mismatch: g/(1-q) is not 1 modulo the augmentation ideal")
    D = D if D is not None else n.num.trunc()
    h = _ratq_log1p(n, D)
    E = E if E is not None else (D or 0) + 2
    return _fake_from_log(expand_at_one(h, E))


def _ratq_log1p(n: RationalQ, D) -> RationalQ:
    if not n:
        return n
    if D is None:
        raise ValueError("logarithm of an untruncated perturbation does not terminate")
    out = RationalQ(LaurentPoly())
    power = RationalQ(LaurentPoly.coerce(const(1, D)))
    for k in range(1, D + 1):
        power = (power * n).reduce()
        if not power:
            break
        out = out + power * Fraction((-1) ** (k + 1), k)
    return out.reduce()


def tangent_membership(g: QSeries, T: LambdaElement, m: int = 1) -> bool:
    """Whether exp(-T / (1 - q^m)) g, expanded at q = 1, is a power series."""
    if T and T.filtration_degree() < 1:
        raise ValueError("T must lie in the augmentation ideal")
    D = T.D if T.D is not None else g.D
    E = max(g.prec, 0) + 1
    mult = series_exp(expand_at_one(RationalQ.inv_one_minus(m, -T), E))
    prod = mult * g
    if prod.prec < -1:
        raise PrecisionError("product not known through u^-1; expand g to a higher order")
    return prod.is_power_series()


def _tangent_exact(f: RationalQ, T: LambdaElement, m: int, a: int, D) -> QSeries:
    """Polar part of exp(-T/(1-q^m)) f(q^(1/m)/zeta), computed without loss.

    With q = (zeta s)^m the multiplier is exp(-T/(1 - s^(m^2))), a rational
    function of s, so the whole product is expanded exactly.
    """
    if T:
        f = (f * ratq_exp(RationalQ.inv_one_minus(m * m, -T), D)).reduce()
    return expand_adelic(f, m, a, -1)


# -- checker ------------------------------------------------------------

@dataclass
class CellVerdict:
    r: int
    m: int
    a: int
    status: str  # "pass" | "fail" | "unchecked"
    in_window: bool = True
    reason: str = ""
    witness: QSeries | None = None

    @property
    def id(self) -> str:
        return cell_id(self.r, self.m, self.a)

    def to_json(self):
        out = {"status": self.status, "in_window": self.in_window}
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


@dataclass
class ConeCertificate:
    T: dict  # r -> LambdaElement or None
    t: dict  # r -> QSeries or None
    cells: dict  # cell id -> CellVerdict

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.cells.items() if v.status == "fail"]

    @property
    def unchecked_in_window(self) -> list[str]:
        return [k for k, v in self.cells.items() if v.status == "unchecked" and v.in_window]

    @property
    def unchecked(self) -> list[str]:
        return [k for k, v in self.cells.items() if v.status == "unchecked"]

    @property
    def passed(self) -> bool:
        return not self.failed and not self.unchecked_in_window

    def to_json(self):
        return {
            "passed": self.passed,
            "failed": self.failed,
            "unchecked_in_window": self.unchecked_in_window,
            "T": {str(r): (None if v is None else str(v)) for r, v in sorted(self.T.items())},
            "t": {str(r): (None if v is None else v.to_json()) for r, v in sorted(self.t.items())},
            "cells": {k: v.to_json() for k, v in sorted(self.cells.items())},
        }


def check_theorem1_pt(f: SequencePoint, M_max: int | None = None, E: int | None = None) -> ConeCertificate:
    """Verdicts for criterion (i) at every r and criterion (ii) at every (r, zeta).

    Cells with r*m > R need T_{rm}, which the finite sequence does not carry;
    they are reported as unchecked.  The first row (r = 1) is always in the
    window, so a window wider than R shows up as unchecked-in-window.
    """
    cfg = f.config
    M_max = M_max or cfg.M_max
    E = cfg.E if E is None else E
    D = cfg.D
    R = f.R
    Ts, ts, cells = {}, {}, {}
    for r, fr in enumerate(f.entries, start=1):
        cid = cell_id(r, 1, 0)
        try:
            data = fake_cone_membership(fr, E=E, D=D)
        except MembershipError as exc:
            Ts[r] = ts[r] = None
            cells[cid] = CellVerdict(r, 1, 0, "fail", reason=str(exc),
                                     witness=expand_at_one(fr, -1).polar_part())
            continue
        Ts[r], ts[r] = data.T, data.t
        cells[cid] = CellVerdict(r, 1, 0, "pass")
    for r, fr in enumerate(f.entries, start=1):
        for m in range(2, M_max + 1):
            for a in primitive_roots(m):
                v = CellVerdict(r, m, a, "unchecked", in_window=(r * m <= R or r == 1))
                cells[v.id] = v
                if r * m > R:
                    v.reason = f"needs T_{r * m} beyond R = {R}"
                    continue
                T = Ts[r * m]
                if T is None:
                    v.status, v.reason = "fail", f"criterion (i) fails at r = {r * m}"
                    continue
                polar = _tangent_exact(fr, T.adams(m), m, a, D).polar_part()
                if polar:
                    v.status, v.reason, v.witness = "fail", "twisted expansion has a pole", polar
                else:
                    v.status = "pass"
    return ConeCertificate(Ts, ts, cells)


# -- flows --------------------------------------------------------------

def _check_aug(name, v):
    if v and v.filtration_degree() < 1:
        raise ValueError(f"{name} = {v} is not in the augmentation ideal")


def string_flow(f: SequencePoint, tau_prime: dict) -> SequencePoint:
    """f_r -> exp(sum_k Psi^k(tau'_{kr}) / (k (1 - q^k))) f_r."""
    D = f.config.D
    tp = {int(k): _lam(v, D) for k, v in tau_prime.items()}
    for k, v in tp.items():
        _check_aug(f"tau'_{k}", v)

    def step(r, fr):
        X = theorem2_exponent(lambda j: tp.get(j, const(0, D)), r, D)
        return (fr * ratq_exp(X, D)).reduce() if X else fr

    return f.map(step)


def dq_multiply(f: SequencePoint, ops: dict) -> SequencePoint:
    """f_r -> D_r f_r for Laurent polynomials D_r (missing entries act as 1)."""
    D = f.config.D
    ops = {int(r): LaurentPoly.coerce(v).truncate(D) for r, v in ops.items()}
    return f.map(lambda r, fr: (fr * ops[r]).reduce() if r in ops else fr)


def generalized_flow(f: SequencePoint, ops: dict) -> SequencePoint:
    """f_r -> exp(sum_k Psi^k(D_{kr})(q^k) / (k (1 - q^k))) f_r.

    Psi^k acts on the coefficients of D_{kr} and sends q to q^k.
    """
    D = f.config.D
    ops = {int(k): LaurentPoly.coerce(v).truncate(D) for k, v in ops.items()}
    for k, v in ops.items():
        if v and v.filtration_degree() < 1:
            raise ValueError(f"free-term violation: D_{k} = {v} has coefficients outside the augmentation ideal")

    def step(r, fr):
        X = RationalQ(LaurentPoly())
        for k in range(1, D + 1):
            v = ops.get(k * r)
            if v:
                X = X + RationalQ(v.adams(k) * Fraction(1, k), (k,))
        return (fr * ratq_exp(X, D)).reduce() if X else fr

    return f.map(step)


# -- reconstruction ----------------------------------------------------

def reconstruct(targets, config: EngineConfig) -> tuple[PtParams, SequencePoint]:
    """Solve [theorem2_generate(p)]_+ = targets modulo filtration D + 1.

    Each pass corrects tau_r by the value of the residual at q = 1 and t_r by
    the remaining residual divided by (1 - q).  The linearisation at the
    dilaton point is invertible, so every pass gains at least one
    filtration order.
    """
    D = config.D
    R = config.R
    targets = [LaurentPoly.coerce(x).truncate(D) for x in targets]
    if len(targets) != R:
        raise ValueError(f"expected {R} targets, got {len(targets)}")
    base = one_minus_q()
    for r, x in enumerate(targets, start=1):
        d = x - base
        if d and d.filtration_degree() < 1:
            raise ValueError(f"target {r} is not 1 - q modulo the augmentation ideal")
    p = PtParams()
    for _ in range(D + 2):
        point = theorem2_generate(p, config)
        resid = [x - y for x, y in zip(targets, project_plus_seq(point))]
        if not any(resid):
            return p, point
        tau_new, t_new = dict(p.tau), dict(p.t)
        for r, rho in enumerate(resid, start=1):
            if not rho:
                continue
            dtau = rho.at_one()
            rest = (rho - dtau).div_one_minus(1)
            if rest is None:
                raise ArithmeticError("residual minus its value at q = 1 is not divisible by 1 - q")
            tau_new[r] = tau_new.get(r, const(0, D)) + dtau
            t_new[r] = t_new.get(r, LaurentPoly.coerce(1)) + rest
        p = PtParams(tau_new, t_new).truncate(D)
    raise ArithmeticError("reconstruction did not converge within D + 2 passes")


def random_params(rng: random.Random, config: EngineConfig, density: int = 2) -> PtParams:
    """Random parameters supported on tau_k, t_r with k, r <= R.

    Coefficients are small integers; terms are linear or quadratic in the
    generators so the generated entries stay small.
    """
    D, R = config.D, config.R

    def gen():
        k = rng.randint(1, R)
        j = 1 if D < 2 or rng.random() < 0.8 else 2
        return tau(k, j, D)

    def element():
        out = const(0, D)
        for _ in range(rng.randint(1, density)):
            c = Fraction(rng.choice([-2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))
            term = gen()
            if D >= 2 and rng.random() < 0.3:
                term = term * gen()
            out = out + term * c
        return out

    taus = {k: element() for k in range(1, R + 1) if rng.random() < 0.6}
    ts = {}
    for r in range(1, R + 1):
        if rng.random() < 0.3:
            ts[r] = LaurentPoly({rng.randint(-1, 2): element()}) + 1
    return PtParams(taus, ts)
