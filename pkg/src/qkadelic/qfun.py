"""Laurent polynomials and rational functions of q over the ground ring.

Every denominator is a product of factors ``(1 - q**k)``, which is the only
shape that occurs for poles at roots of unity.  Rational functions are not
kept in lowest terms; equality is decided by cross-multiplication.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

from .lambda_ring import LambdaElement, const, min_trunc
from .scalars import is_scalar

__all__ = [
    "LaurentPoly",
    "RationalQ",
    "PairingSpec",
    "PartialFractions",
    "q_power",
    "one_minus_q",
    "ratq_arith",
    "substitute_power",
    "partial_fractions",
    "project_plus",
    "coeff_at_zero",
    "omega_pair",
    "omega_infinity",
    "ratq_exp",
    "den_poly",
]


def _lam(x) -> LambdaElement:
    if isinstance(x, LambdaElement):
        return x
    if is_scalar(x):
        return const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a ground-ring coefficient")


class LaurentPoly:
    """Finite sum of ``c_e q**e`` with ground-ring coefficients ``c_e``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for e, c in terms.items():
                c = _lam(c)
                if c:
                    clean[int(e)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def coerce(cls, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        return cls({0: _lam(x)})

    # -- structure ----------------------------------------------------
    def coeff(self, e: int) -> LambdaElement:
        return self.terms.get(e, const(0))

    def lo(self) -> int:
        return min(self.terms) if self.terms else 0

    def hi(self) -> int:
        return max(self.terms) if self.terms else 0

    def trunc(self):
        D = None
        for c in self.terms.values():
            D = min_trunc(D, c.D)
        return D

    def at_one(self) -> LambdaElement:
        """Value at q = 1."""
        out = const(0)
        for c in self.terms.values():
            out = out + c
        return out

    def filtration_degree(self):
        return min((c.filtration_degree() for c in self.terms.values()), default=float("inf"))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, RationalQ):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, RationalQ):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RationalQ):
            return NotImplemented
        if is_scalar(other) or isinstance(other, LambdaElement):
            return LaurentPoly({e: c * other for e, c in self.terms.items()})
        other = LaurentPoly.coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                p = c1 * c2
                if p:
                    e = e1 + e2
                    out[e] = out[e] + p if e in out else p
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def shift(self, n: int) -> "LaurentPoly":
        return LaurentPoly({e + n: c for e, c in self.terms.items()})

    def mul_one_minus(self, k: int) -> "LaurentPoly":
        """Multiply by (1 - q**k)."""
        return self - self.shift(k)

    def div_one_minus(self, k: int):
        """Exact quotient by (1 - q**k), or None when it does not divide."""
        if not self.terms:
            return self
        lo, hi = self.lo(), self.hi()
        quot = {}
        for e in range(lo, hi - k + 1):
            c = self.terms.get(e)
            prev = quot.get(e - k)
            v = c if prev is None else (prev if c is None else c + prev)
            if v is not None and v:
                quot[e] = v
        for e in range(max(lo, hi - k + 1), hi + 1):
            c = self.terms.get(e)
            prev = quot.get(e - k)
            v = c if prev is None else (prev if c is None else c + prev)
            if v is not None and v:
                return None
        return LaurentPoly(quot)

    def substitute_power(self, s: int) -> "LaurentPoly":
        return LaurentPoly({e * s: c for e, c in self.terms.items()})

    def invert_q(self) -> "LaurentPoly":
        return LaurentPoly({-e: c for e, c in self.terms.items()})

    def adams(self, k: int) -> "LaurentPoly":
        """Psi^k on coefficients together with q -> q**k."""
        return LaurentPoly({e * k: c.adams(k) for e, c in self.terms.items()})

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly({e: fn(c) for e, c in self.terms.items()})

    def truncate(self, D) -> "LaurentPoly":
        return self.map_coeffs(lambda c: c.truncate(D))

    # -- comparison / display -----------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, RationalQ):
            return NotImplemented
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return not (self - other)

    __hash__ = None

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = str(self.terms[e])
            if e == 0:
                parts.append(c)
                continue
            qs = "q" if e == 1 else f"q^{e}"
            if c == "1":
                parts.append(qs)
            elif c == "-1":
                parts.append("-" + qs)
            elif " " in c:
                parts.append(f"({c})*{qs}")
            else:
                parts.append(f"{c}*{qs}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_json(self):
        return [[e, self.terms[e].to_json()] for e in sorted(self.terms)]

    @classmethod
    def from_json(cls, data, D=None):
        return cls({int(e): LambdaElement.from_json(c, D) for e, c in data})


def q_power(e: int) -> LaurentPoly:
    return LaurentPoly({e: const(1)})


def one_minus_q(k: int = 1) -> LaurentPoly:
    return LaurentPoly({0: const(1), k: const(-1)})


def den_poly(den) -> list[Fraction]:
    """Coefficient list (lowest first) of prod (1 - q**k) over the multiset."""
    poly = [Fraction(1)]
    for k in den:
        new = poly + [Fraction(0)] * k
        for i, c in enumerate(poly):
            new[i + k] -= c
        poly = new
    return poly


def _den_counter(den) -> Counter:
    return Counter(den)


def _den_tuple(counter) -> tuple[int, ...]:
    return tuple(sorted(counter.elements()))


class RationalQ:
    """``numerator / prod_i (1 - q**k_i)``; immutable."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=()):
        num = LaurentPoly.coerce(num) if not isinstance(num, LaurentPoly) else num
        den = tuple(sorted(int(k) for k in den))
        if any(k < 1 for k in den):
            raise ValueError("denominator factors are (1 - q**k) with k >= 1")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den if num else ())

    def __setattr__(self, name, value):
        raise AttributeError("RationalQ is immutable")

    @classmethod
    def coerce(cls, x) -> "RationalQ":
        if isinstance(x, RationalQ):
            return x
        return cls(LaurentPoly.coerce(x))

    @classmethod
    def inv_one_minus(cls, k: int, coeff=1) -> "RationalQ":
        """coeff / (1 - q**k)."""
        return cls(LaurentPoly({0: _lam(coeff)}), (k,))

    # -- arithmetic ---------------------------------------------------
    def _common(self, other: "RationalQ"):
        a, b = Counter(self.den), Counter(other.den)
        union = a | b
        na = self.num
        for k, mult in (union - a).items():
            for _ in range(mult):
                na = na.mul_one_minus(k)
        nb = other.num
        for k, mult in (union - b).items():
            for _ in range(mult):
                nb = nb.mul_one_minus(k)
        return na, nb, _den_tuple(union)

    def __add__(self, other):
        try:
            other = RationalQ.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        na, nb, den = self._common(other)
        return RationalQ(na + nb, den)

    __radd__ = __add__

    def __neg__(self):
        return RationalQ(-self.num, self.den)

    def __sub__(self, other):
        try:
            other = RationalQ.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_scalar(other) or isinstance(other, LambdaElement):
            return RationalQ(self.num * other, self.den)
        try:
            other = RationalQ.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalQ(self.num * other.num, self.den + other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def scalar_mul(self, c) -> "RationalQ":
        return self * c

    def substitute_power(self, s: int) -> "RationalQ":
        if s < 1:
            raise ValueError("substitute_power needs s >= 1")
        return RationalQ(self.num.substitute_power(s), tuple(k * s for k in self.den))

    def adams(self, k: int) -> "RationalQ":
        """Psi^k on coefficients and q -> q**k."""
        return RationalQ(self.num.adams(k), tuple(j * k for j in self.den))

    def invert_q(self) -> "RationalQ":
        # 1/(1 - q^-k) = -q^k/(1 - q^k)
        num = self.num.invert_q()
        for k in self.den:
            num = -num.shift(k)
        return RationalQ(num, self.den)

    def map_coeffs(self, fn) -> "RationalQ":
        return RationalQ(self.num.map_coeffs(fn), self.den)

    def truncate(self, D) -> "RationalQ":
        return RationalQ(self.num.truncate(D), self.den)

    def reduce(self) -> "RationalQ":
        """Cancel denominator factors that divide the numerator exactly."""
        num, den = self.num, list(self.den)
        changed = True
        while changed and den:
            changed = False
            for k in sorted(set(den), reverse=True):
                qt = num.div_one_minus(k)
                if qt is not None:
                    num = qt
                    den.remove(k)
                    changed = True
                    break
        return RationalQ(num, den)

    def as_laurent(self):
        """The Laurent polynomial equal to self, or None if self has poles off 0, inf."""
        pf = project_plus(self, with_remainder=True)
        return pf[0] if not pf[1] else None

    def pole_depth_at_one(self) -> int:
        return len(self.den)

    def filtration_degree(self):
        return self.num.filtration_degree()

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        try:
            other = RationalQ.coerce(other)
        except TypeError:
            return NotImplemented
        na, nb, _ = self._common(other)
        return na == nb

    __hash__ = None

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RationalQ({self})"

    def __str__(self):
        num = str(self.num)
        if not self.den:
            return num
        facs = []
        for k, mult in sorted(Counter(self.den).items()):
            f = "(1-q)" if k == 1 else f"(1-q^{k})"
            facs.append(f if mult == 1 else f"{f}^{mult}")
        return f"{num} / {' '.join(facs)}" if " " not in num else f"({num}) / {' '.join(facs)}"

    def to_json(self):
        return {
            "numerator": self.num.to_json(),
            "denominator": [[k, m] for k, m in sorted(Counter(self.den).items())],
        }

    @classmethod
    def from_json(cls, data, D=None):
        den = []
        for k, m in data.get("denominator", []):
            den += [int(k)] * int(m)
        return cls(LaurentPoly.from_json(data["numerator"], D), den)


def ratq_arith(a, b, op: str):
    if op == "add":
        return RationalQ.coerce(a) + b
    if op == "mul":
        return RationalQ.coerce(a) * b
    if op == "scalar_mul":
        return RationalQ.coerce(a).scalar_mul(b)
    raise ValueError(f"unknown operation {op!r}")


def substitute_power(f, s: int) -> RationalQ:
    return RationalQ.coerce(f).substitute_power(s)


def ratq_exp(x: RationalQ, D: int | None = None) -> RationalQ:
    """exp(x) for x with all numerator coefficients in the augmentation ideal."""
    x = RationalQ.coerce(x)
    if x.filtration_degree() < 1:
        raise ValueError("exponent must have coefficients of filtration degree >= 1")
    D = min_trunc(D, x.num.trunc())
    if D is None and x:
        raise ValueError("exponential of an untruncated exponent does not terminate")
    out = RationalQ(LaurentPoly({0: const(1, D)}))
    power = RationalQ(LaurentPoly({0: const(1, D)}))
    n = 0
    while True:
        n += 1
        power = (power * x).reduce()
        if not power:
            return out
        out = out + power * Fraction(1, factorial(n))


# -- polarization ------------------------------------------------------

def _inv_den_series(den, n: int) -> list[Fraction]:
    """Power series at q=0 of 1/prod(1 - q**k), coefficients of q^0..q^n."""
    s = [Fraction(0)] * (n + 1)
    if n < 0:
        return []
    s[0] = Fraction(1)
    for k in den:
        for i in range(k, n + 1):
            s[i] += s[i - k]
    return s


def coeff_at_zero(f: RationalQ, n: int = 0) -> LambdaElement:
    """Coefficient of q**n in the Laurent expansion of f at q = 0."""
    f = RationalQ.coerce(f)
    if not f.num:
        return const(0)
    s = _inv_den_series(f.den, n - f.num.lo())
    out = const(0)
    for e, c in f.num.terms.items():
        j = n - e
        if 0 <= j < len(s) and s[j]:
            out = out + c * s[j]
    return out


def project_plus(f, with_remainder: bool = False):
    """Laurent-polynomial part of f along the space of proper fractions.

    With ``with_remainder`` returns ``(plus_part, proper_numerator)`` where the
    remainder is ``proper_numerator / den`` with deg(numerator) < deg(den).
    """
    f = RationalQ.coerce(f)
    if not f.den:
        return (f.num, LaurentPoly()) if with_remainder else f.num
    P = den_poly(f.den)
    num = f.num
    plus_neg = {}
    lo = num.lo()
    if lo < 0:
        s = _inv_den_series(f.den, -lo - 1)
        for e in range(lo, 0):
            c = const(0)
            for i, ci in num.terms.items():
                j = e - i
                if 0 <= j < len(s) and s[j]:
                    c = c + ci * s[j]
            if c:
                plus_neg[e] = c
    L_neg = LaurentPoly(plus_neg)
    rem = dict((num - L_neg * LaurentPoly(dict(enumerate(P)))).terms)
    if rem and min(rem) < 0:
        raise ArithmeticError("principal part at q=0 was not removed")
    degP = len(P) - 1
    lead = P[-1]
    quot = {}
    while rem and max(rem) >= degP:
        top = max(rem)
        c = rem[top] / lead
        shift = top - degP
        quot[shift] = c
        for i, p in enumerate(P):
            if p:
                e = shift + i
                v = rem.get(e, None)
                v = -(c * p) if v is None else v - c * p
                if v:
                    rem[e] = v
                else:
                    rem.pop(e, None)
    plus = L_neg + LaurentPoly(quot)
    if with_remainder:
        return plus, LaurentPoly(rem)
    return plus


@dataclass
class PartialFractions:
    """``f = plus + sum over eta of sum_j polar[eta][j-1] / (1 - q/eta)**j``.

    ``eta = zeta_m**a`` is keyed by ``(m, a)``.
    """

    plus: LaurentPoly
    polar: dict = field(default_factory=dict)
    den: tuple = ()


def _root_sectors(den):
    """Primitive roots (m, a) at which prod(1 - q^k) vanishes, with pole orders."""
    orders = {}
    for k in den:
        for m in range(1, k + 1):
            if k % m == 0:
                orders[m] = orders.get(m, 0) + 1
    out = {}
    for m, mult in sorted(orders.items()):
        for a in range(m):
            if gcd(a, m) == 1:
                out[(m, a if m > 1 else 0)] = mult
    return out


def partial_fractions(f) -> PartialFractions:
    from .expand import local_expansion

    f = RationalQ.coerce(f)
    plus, rem = project_plus(f, with_remainder=True)
    polar = {}
    if rem:
        proper = RationalQ(rem, f.den)
        for (m, a), mult in _root_sectors(f.den).items():
            # q = eta * (1 - x); principal part in x gives sum c_j / (1 - q/eta)^j
            s = local_expansion(proper, m, a, kind="partial", E=0)
            coeffs = tuple(s.coefficient(-j) for j in range(1, mult + 1))
            if any(coeffs):
                polar[(m, a)] = coeffs
    return PartialFractions(plus, polar, f.den)


# -- symplectic pairing ------------------------------------------------

@dataclass(frozen=True)
class PairingSpec:
    """Gram matrix of the coefficient pairing; the point target is ``rank=1, gram=((1,),)``."""

    rank: int = 1
    gram: tuple = ((1,),)

    def __post_init__(self):
        if len(self.gram) != self.rank or any(len(row) != self.rank for row in self.gram):
            raise ValueError("gram matrix must be rank x rank")
        for i in range(self.rank):
            for j in range(self.rank):
                if _lam(self.gram[i][j]) != _lam(self.gram[j][i]):
                    raise ValueError("gram matrix must be symmetric")

    def pair(self, a, b):
        out = 0
        for i in range(self.rank):
            for j in range(self.rank):
                g = self.gram[i][j]
                if g:
                    out = a[i] * b[j] * g + out
        return out


PT_PAIRING = PairingSpec()


def _as_vector(f, rank):
    if rank == 1 and not isinstance(f, (list, tuple)):
        return [RationalQ.coerce(f)]
    f = [RationalQ.coerce(x) for x in f]
    if len(f) != rank:
        raise ValueError("vector length does not match pairing rank")
    return f


def omega_pair(f, g, pairing: PairingSpec = PT_PAIRING) -> LambdaElement:
    """-(Res_0 + Res_inf) (f(1/q), g(q)) dq/q, computed from expansions at q = 0."""
    fv, gv = _as_vector(f, pairing.rank), _as_vector(g, pairing.rank)
    fi = [x.invert_q() for x in fv]
    gi = [x.invert_q() for x in gv]
    # Res_inf h dq/q = -[w^0] h(1/w);  Res_0 h dq/q = [q^0] h(q)
    at_inf = pairing.pair(fv, gi)
    at_zero = pairing.pair(fi, gv)
    out = const(0)
    if at_inf:
        out = out + coeff_at_zero(at_inf)
    if at_zero:
        out = out - coeff_at_zero(at_zero)
    return out


def omega_infinity(f, g, pairing: PairingSpec = PT_PAIRING) -> LambdaElement:
    """sum_r Psi^r(Omega(f_r, g_r)) / r over the common length of the sequences."""
    fe = list(getattr(f, "entries", f))
    ge = list(getattr(g, "entries", g))
    if len(fe) != len(ge):
        raise ValueError(f"sequence lengths differ: {len(fe)} != {len(ge)}")
    out = const(0)
    for r, (a, b) in enumerate(zip(fe, ge), start=1):
        out = out + omega_pair(a, b, pairing).adams(r) * Fraction(1, r)
    return out
