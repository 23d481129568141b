"""Stand-alone exact identities: cyclic covers, Todd twisting, root-of-unity multipliers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb, factorial, gcd

from .expand import EXACT, QSeries, expand_at_one, inv_one_minus_series, inverse_series
from .lambda_ring import const
from .novikov_dq import ToyK
from .qfun import RationalQ
from .scalars import Cyclotomic

__all__ = [
    "RamificationProfile",
    "FormalClass",
    "KSeries",
    "hurwitz_euler",
    "realizable",
    "ade_enumerate",
    "bernoulli_plus",
    "todd_twist_identity",
    "delta_zeta",
    "delta_exponent",
    "box_exponent",
    "box_delta_identity",
    "expansion_lemma_check",
]


# -- cyclic covers ------------------------------------------------------

@dataclass(frozen=True)
class RamificationProfile:
    """Degree-M cyclic cover of a genus-g curve with branch orders m_1..m_n."""

    M: int
    g: int = 0
    orders: tuple = ()

    def __post_init__(self):
        if self.M < 1 or self.g < 0:
            raise ValueError("need M >= 1 and g >= 0")
        orders = tuple(sorted(int(m) for m in self.orders))
        for m in orders:
            if m < 1 or self.M % m:
                raise ValueError(f"branch order {m} must be a positive divisor of M = {self.M}")
        object.__setattr__(self, "orders", orders)


def hurwitz_euler(p: RamificationProfile) -> int:
    """M (2 - 2g - n) + sum_i M / m_i."""
    return p.M * (2 - 2 * p.g - len(p.orders)) + sum(p.M // m for m in p.orders)


def _elements_of_order(M: int, m: int) -> list[int]:
    return [x for x in range(M) if M // gcd(x, M) == m]


def realizable(p: RamificationProfile, connected: bool = True) -> bool:
    """Exhaustive search for monodromies in Z_M of the given orders summing to 0.

    With ``connected`` the monodromies must also generate Z_M.  Only genus 0
    is searched; higher genus adds free generators and is not needed here.
    """
    if p.g != 0:
        raise ValueError("realizability search is implemented for genus 0")
    choices = [_elements_of_order(p.M, m) for m in p.orders]
    for combo in product(*choices):
        if sum(combo) % p.M:
            continue
        if not connected:
            return True
        span = p.M
        for x in combo:
            span = gcd(span, x)
        if gcd(span, p.M) == 1:
            return True
    return False


def ade_enumerate(M_bound: int, connected: bool = True) -> list[RamificationProfile]:
    """Realizable genus-0 profiles with positive Euler characteristic, M <= M_bound.

    Branch orders are >= 2 (order-1 points are not branch points).  Positive
    Euler characteristic forces n <= 3, since each branch point costs at
    least M/2.
    """
    if M_bound < 1:
        raise ValueError("M_bound must be >= 1")
    out = []
    for M in range(1, M_bound + 1):
        divisors = [m for m in range(2, M + 1) if M % m == 0]
        for n in range(0, 4):
            for orders in combinations_with_replacement(divisors, n):
                p = RamificationProfile(M, 0, orders)
                if hurwitz_euler(p) > 0 and realizable(p, connected):
                    out.append(p)
    return out


# -- Todd twisting ------------------------------------------------------

def bernoulli_plus(n: int) -> list[Fraction]:
    """B_0..B_n with B_1 = +1/2, so that y/(1 - e^-y) = sum B_j y^j / j!."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    if n >= 1:
        B[1] = Fraction(1, 2)
    return B


def _exp_minus_ratio(r: int, n: int) -> list[Fraction]:
    """(1 - e^{-r x}) / x, first n coefficients."""
    return [Fraction((-1) ** j * r ** (j + 1), factorial(j + 1)) for j in range(n)]


def todd_twist_identity(r: int, N: int, perturb: bool = False) -> bool:
    """x/(1-e^-x) * (1-e^-x)/(1-e^-rx) == (1/r) td(r x) through x^N.

    The left side is computed by power-series division, the right side from
    Bernoulli numbers.  ``perturb`` adds 1 to the right side at x^N.
    """
    if r < 1 or N < 1:
        raise ValueError("need r >= 1 and N >= 1")
    n = N + 1
    a = _exp_minus_ratio(1, n)
    td1 = inverse_series(a, n)
    ratio = [Fraction(0)] * n
    inv_r = inverse_series(_exp_minus_ratio(r, n), n)
    for i, x in enumerate(a):
        for j in range(n - i):
            ratio[i + j] += x * inv_r[j]
    lhs = [sum(td1[i] * ratio[j - i] for i in range(j + 1)) for j in range(n)]
    B = bernoulli_plus(N)
    rhs = [B[j] * Fraction(r) ** j / factorial(j) / r for j in range(n)]
    if perturb:
        rhs[N] += 1
    return lhs == rhs


# -- classes and toy-ring valued series ---------------------------------

@dataclass(frozen=True)
class FormalClass:
    """A toy-ring class with rational coefficients in the basis x^e, x_i = P_i - 1."""

    ring: ToyK
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(e): Fraction(c) for e, c in self.coeffs.items() if c}
        for e in clean:
            if len(e) != self.ring.s or any(x < 0 or x > n for x, n in zip(e, self.ring.N)):
                raise ValueError(f"index {e} outside the toy-ring basis")
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def P_minus_one(cls, ring: ToyK, i: int = 0) -> "FormalClass":
        return cls(ring, {tuple(int(j == i) for j in range(ring.s)): 1})

    @property
    def rank(self) -> Fraction:
        return self.coeffs.get(self.ring.zero_index, Fraction(0))

    def adams(self, k: int) -> "FormalClass":
        out = {}
        for e, c in self.coeffs.items():
            for idx, w in self.ring.adams_index(k, e).items():
                out[idx] = out.get(idx, 0) + c * w
        return FormalClass(self.ring, out)

    def __bool__(self):
        return bool(self.coeffs)


class KSeries:
    """``sum_e x^e s_e(u)``: a toy-ring combination of series in u = q - 1."""

    def __init__(self, ring: ToyK, parts=None, prec: int | None = None):
        self.ring = ring
        self.parts = dict(parts or {})
        self.prec = prec if prec is not None else min((s.prec for s in self.parts.values()), default=10**9)

    @classmethod
    def from_class(cls, c: FormalClass, s: QSeries) -> "KSeries":
        return cls(c.ring, {e: s.scale(v) for e, v in c.coeffs.items()}, s.prec)

    def _lift(self, other) -> "KSeries":
        if isinstance(other, KSeries):
            return other
        return KSeries(self.ring, {self.ring.zero_index: QSeries.from_coeffs({0: other}, EXACT)})

    def __add__(self, other):
        other = self._lift(other)
        parts = dict(self.parts)
        for e, s in other.parts.items():
            parts[e] = parts[e] + s if e in parts else s
        return KSeries(self.ring, parts, min(self.prec, other.prec))

    def __neg__(self):
        return KSeries(self.ring, {e: -s for e, s in self.parts.items()}, self.prec)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        parts = {}
        for e1, s1 in self.parts.items():
            for e2, s2 in other.parts.items():
                e = self.ring.mul_index(e1, e2)
                if e is not None:
                    p = s1 * s2
                    parts[e] = parts[e] + p if e in parts else p
        prec = min([self.prec, other.prec] + [s.prec for s in parts.values()])
        return KSeries(self.ring, parts, prec)

    def scale(self, c) -> "KSeries":
        return KSeries(self.ring, {e: s.scale(c) for e, s in self.parts.items()}, self.prec)

    def truncate(self, E: int) -> "KSeries":
        return KSeries(self.ring, {e: s.truncate(E) for e, s in self.parts.items()}, min(self.prec, E))

    def rank_part(self) -> QSeries | None:
        return self.parts.get(self.ring.zero_index)

    def is_zero(self, E: int | None = None) -> bool:
        E = self.prec if E is None else E
        return all(not s.truncate(E) for s in self.parts.values())

    def equals(self, other, E: int | None = None) -> bool:
        return (self - other).is_zero(E)

    def coefficient(self, e, p: int):
        s = self.parts.get(tuple(e))
        return s.coefficient(p).constant() if s is not None else Fraction(0)

    def to_json(self):
        return {
            "prec": self.prec,
            "parts": [[list(e), s.to_json()] for e, s in sorted(self.parts.items())],
        }


def _kseries_exp(x: KSeries) -> KSeries:
    """exp(x) for x with vanishing rank part (so x is nilpotent in the toy ring)."""
    rank = x.rank_part()
    if rank is not None and rank:
        raise ValueError("exponent has a rank part; the exponential does not truncate")
    one = KSeries(x.ring, {x.ring.zero_index: QSeries.one(x.prec, 1)}, x.prec)
    out, term = one, one
    for n in range(1, sum(x.ring.N) + 1):
        term = (term * x).scale(Fraction(1, n))
        out = out + term
    return out


def _fraction_term(c: FormalClass, coef, alpha: Fraction, weight: Fraction, E: int) -> KSeries:
    """weight * c / (1 - coef * q**alpha) expanded at q = 1."""
    s = inv_one_minus_series(coef, alpha, E)
    return KSeries.from_class(c, s.scale(weight))


def _require_nilpotent(c: FormalClass):
    if c.rank:
        raise ValueError(
            "class has a nonzero rank part; the k-sum does not truncate (only nilpotent classes are supported)"
        )


def _root(m: int, a: int):
    return Fraction(1) if m == 1 else Cyclotomic.zeta(m, a)


def _zeta_power(m, a, k):
    """zeta^-k for zeta = zeta_m^a."""
    return _root(m, (-a * k) % m)


def delta_zeta(c: FormalClass, m: int, a: int, E: int, K_bound: int = 6) -> KSeries:
    """The multiplier Delta_zeta at zeta = zeta_m^a as a toy-ring valued series at q = 1."""
    if m > 1 and gcd(a, m) != 1:
        raise ValueError(f"zeta_{m}^{a} is not primitive")
    work = E + sum(c.ring.N) + 1
    X = delta_exponent(c, m, a, work, K_bound)
    return _kseries_exp(X).truncate(E)


def delta_exponent(c: FormalClass, m: int, a: int, E: int, K_bound: int, r: int = 1) -> KSeries:
    """Exponent of Delta_zeta (r = 1) or of Psi^r(Delta_zeta), summed over k <= K_bound.

    sum_k Psi^{kr}(c) / (k (1 - zeta^-k q^{kr/m})) - Psi^{kmr}(c) / (k (1 - q^{kmr})).
    Psi^r acts on the class and on q; zeta is left fixed.
    """
    _require_nilpotent(c)
    out = KSeries(c.ring, {}, E)
    if not c:
        return out
    for k in range(1, K_bound + 1):
        out = out + _fraction_term(c.adams(k * r), _zeta_power(m, a, k), Fraction(k * r, m), Fraction(1, k), E)
        out = out - _fraction_term(c.adams(k * m * r), Fraction(1), Fraction(k * m * r), Fraction(1, k), E)
    return out


def box_exponent(c: FormalClass, m: int, a: int, r: int, E: int, K_bound: int) -> KSeries:
    """Exponent of Box_{zeta,r}: sum_k Psi^{kr}(c)/(k(1 - zeta^-k q^{kr/m})) - Psi^k(c)/(k(1 - q^k))."""
    _require_nilpotent(c)
    out = KSeries(c.ring, {}, E)
    if not c:
        return out
    for k in range(1, K_bound + 1):
        out = out + _fraction_term(c.adams(k * r), _zeta_power(m, a, k), Fraction(k * r, m), Fraction(1, k), E)
        out = out - _fraction_term(c.adams(k), Fraction(1), Fraction(k), Fraction(1, k), E)
    return out


def box_delta_identity(
    c: FormalClass, m: int, a: int, r: int, E: int, K_bound: int = 6, perturb: bool = False
) -> bool:
    """Exponent of Box_{zeta,r} Box_{1,rm}^{-1} equals that of Psi^r(Delta_zeta) through u^E.

    Both sides are summed termwise over k <= K_bound.  ``perturb`` adds a
    stray copy of the class to the left side, which must be detected.
    """
    if m > 1 and gcd(a, m) != 1:
        raise ValueError(f"zeta_{m}^{a} is not primitive")
    lhs = box_exponent(c, m, a, r, E, K_bound) - box_exponent(c, 1, 0, r * m, E, K_bound)
    rhs = delta_exponent(c, m, a, E, K_bound, r=r)
    if perturb:
        lhs = lhs + KSeries.from_class(c if c else FormalClass.P_minus_one(c.ring), QSeries.one(E))
    return lhs.equals(rhs, E)


# -- expansion lemma ----------------------------------------------------

def expansion_lemma_check(k_max: int) -> bool:
    """1/(1 - q^k) = -u^-1/k + (k-1)/(2k) + O(u) for every k <= k_max."""
    for k in range(1, k_max + 1):
        s = expand_at_one(RationalQ.inv_one_minus(k), 1)
        if s.polar_part() != QSeries.from_coeffs({-1: const(Fraction(-1, k))}, 10**9):
            return False
        if s.coefficient(0) != const(Fraction(k - 1, 2 * k)):
            return False
    return True
