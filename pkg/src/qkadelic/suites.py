"""Named batches of identity checks, shared by the command line and the tests."""
from __future__ import annotations

from math import gcd

from .config import EngineConfig
from .identities import (
    FormalClass,
    ade_enumerate,
    box_delta_identity,
    expansion_lemma_check,
    hurwitz_euler,
    RamificationProfile,
    todd_twist_identity,
)
from .novikov_dq import DiffOp, NovikovSeries, ToyK, adams_on_operator, adams_on_series, op_apply

SUITES = ("hurwitz", "todd", "box-delta", "adams-ops", "expansion-lemma")

__all__ = ["SUITES", "run_suite"]


def _hurwitz(cfg, perturb):
    rows = [
        ("euler (m,m) cover is 2", hurwitz_euler(RamificationProfile(5, 0, (5, 5))) == 2),
        ("euler of genus 1 unramified is 0", hurwitz_euler(RamificationProfile(3, 1, ())) == 0),
        ("euler (2,2,2) over Z_2 is 1", hurwitz_euler(RamificationProfile(2, 0, (2, 2, 2))) == 1),
    ]
    bound = 12
    found = ade_enumerate(bound)
    expected = [RamificationProfile(1, 0, ())] + [RamificationProfile(m, 0, (m, m)) for m in range(2, bound + 1)]
    if perturb:
        expected = expected[:-1]
    rows.append((f"positive-Euler cyclic covers up to M={bound} are the A-series", found == expected))
    return rows


def _todd(cfg, perturb):
    rows = [(f"todd twist r={r} N=12", todd_twist_identity(r, 12)) for r in range(1, 6)]
    if perturb:
        rows.append(("todd twist r=2 N=12 (perturbed right side)", todd_twist_identity(2, 12, perturb=True)))
    return rows


def _box_delta(cfg, perturb):
    E = cfg.E
    classes = [
        ("P-1", FormalClass.P_minus_one(ToyK((1,)))),
        ("(P-1)+3(P-1)^2", FormalClass(ToyK((2,)), {(1,): 1, (2,): 3})),
        ("(P1-1)(P2-1)-(P2-1)", FormalClass(ToyK((1, 1)), {(1, 1): 1, (0, 1): -1})),
    ]
    rows = []
    for name, c in classes:
        for m in range(1, 4):
            for a in ([0] if m == 1 else [x for x in range(1, m) if gcd(x, m) == 1]):
                for r in (1, 2):
                    ok = box_delta_identity(c, m, a, r, E, perturb=perturb)
                    rows.append((f"box/delta c={name} zeta={m}^{a} r={r} order {E}", ok))
    return rows


def _adams_ops(cfg, perturb):
    rows = []
    ring = ToyK((1,))
    G = 12
    for k in range(1, 4):
        ok_shift = ok_T = True
        target = DiffOp.T(ring, power=k + (1 if perturb else 0))
        tagged = DiffOp.T(ring, slot=k)
        for d in range(4):
            mono = NovikovSeries.monomial(ring, G, (d,))
            shift = DiffOp.shift(ring)
            ok_shift &= adams_on_series(k, op_apply(shift, mono)) == op_apply(shift, adams_on_series(k, mono))
            ok_T &= adams_on_operator(k, tagged) == target
            ok_T &= adams_on_series(k, op_apply(tagged, mono)) == op_apply(target, adams_on_series(k, mono))
        rows.append((f"Psi^{k} fixes the plain translation on Q^d, d<=3", ok_shift))
        rows.append((f"Psi^{k}(P q^(kQd/dQ)) = T^{k} on Q^d, d<=3", ok_T))
    return rows


def _expansion_lemma(cfg, perturb):
    return [("1/(1-q^k) = -1/(k u) + (k-1)/(2k) + O(u), k<=8", expansion_lemma_check(8) != perturb)]


_RUNNERS = {
    "hurwitz": _hurwitz,
    "todd": _todd,
    "box-delta": _box_delta,
    "adams-ops": _adams_ops,
    "expansion-lemma": _expansion_lemma,
}


def run_suite(name: str, config: EngineConfig | None = None, perturb: bool = False) -> list[tuple[str, str, bool]]:
    """Rows (suite, identity, passed).  ``perturb`` injects a deliberate error to prove detection."""
    cfg = config or EngineConfig()
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {n!r}; choose from {', '.join(SUITES + ('all',))}")
        out.extend((n, label, bool(ok)) for label, ok in _RUNNERS[n](cfg, perturb))
    return out
