"""Truncated Laurent series in u = q - 1 and expansions of rational functions.

A :class:`QSeries` knows its coefficients exactly for all powers up to
``prec``.  Products track precision honestly: if ``a`` is known through
``u**pa`` and has valuation ``va`` (likewise for ``b``), the product is
known through ``min(pa + vb, pb + va)``.

Coefficients live in the ground ring tensored with Q(zeta_m).  Internally
the series is stored monomial-major: one scalar list per ground-ring
monomial, which lets products skip monomial pairs above the truncation
order without touching their coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .lambda_ring import ONE_MONO, LambdaElement, const, min_trunc, mono_adams, mono_mul
from .scalars import Cyclotomic, is_scalar, scalar_conj, scalar_inv, scalar_power_map

__all__ = [
    "QSeries",
    "LogResult",
    "PrecisionError",
    "expand_at_one",
    "expand_adelic",
    "local_expansion",
    "inv_one_minus_series",
    "series_exp",
    "series_log",
    "is_power_series",
    "default_E",
    "inverse_series",
]


# precision of exactly known series (polynomials in u)
EXACT = 10**9


class PrecisionError(ArithmeticError):
    """A series was not known to enough terms to answer the question asked."""


# -- scalar list helpers ------------------------------------------------
# A scalar series is a list whose entry i is the coefficient of u**(lo + i).

def _conv(x, y, n):
    out = [Fraction(0)] * n
    for i, a in enumerate(x[:n]):
        if not a:
            continue
        lim = n - i
        for j, b in enumerate(y[:lim]):
            if b:
                out[i + j] += a * b
    return out


def _s_inv(x, n):
    """Inverse of a unit power series x (x[0] != 0), n terms."""
    c0 = scalar_inv(x[0])
    out = [Fraction(0)] * n
    if n == 0:
        return out
    out[0] = c0
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, min(k, len(x) - 1) + 1):
            if x[j]:
                acc += x[j] * out[k - j]
        out[k] = -(acc * c0)
    return out


def inverse_series(x, n):
    """First n coefficients of 1/x for a power series x with x[0] != 0."""
    return _s_inv(x, n)


def _s_exp(a, n):
    """exp(a) for a power series with a[0] == 0, n terms."""
    out = [Fraction(0)] * n
    if n == 0:
        return out
    out[0] = Fraction(1)
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            if a[j]:
                acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def _s_log1p(w, n):
    """log(1 + w) for w[0] == 0, n terms."""
    out = [Fraction(0)] * n
    for k in range(1, n):
        acc = k * w[k] if k < len(w) else Fraction(0)
        for j in range(1, k):
            if out[j] and k - j < len(w) and w[k - j]:
                acc -= j * out[j] * w[k - j]
        out[k] = acc / k
    return out


@lru_cache(maxsize=4096)
def _binomial(alpha: Fraction, n: int) -> tuple:
    """Coefficients of (1 + u)**alpha, n terms (principal branch)."""
    out = [Fraction(1)]
    for i in range(1, n):
        out.append(out[-1] * (alpha - i + 1) / i)
    return tuple(out[:n])


def _root(m: int, a: int):
    if m == 1:
        return Fraction(1)
    return Cyclotomic.zeta(m, a)


def _spow(c, e):
    if isinstance(c, Cyclotomic):
        return c ** e
    return Fraction(c) ** e


# -- series class -------------------------------------------------------

class QSeries:
    """Laurent series in u = q - 1 with ground-ring coefficients over Q(zeta_m)."""

    __slots__ = ("lo", "prec", "terms", "m", "D")

    def __init__(self, lo: int, prec: int, terms: dict, m: int = 1, D: int | None = None):
        self.lo = lo
        self.prec = prec
        self.terms = terms
        self.m = m
        self.D = D
        self._normalize()

    def _normalize(self):
        n = self.prec - self.lo + 1
        if n <= 0:
            self.terms = {}
            self.lo = self.prec + 1
            return
        clean = {}
        for mono, lst in self.terms.items():
            if self.D is not None and mono[0] > self.D:
                continue
            lst = list(lst[:n])
            while lst and not lst[-1]:
                lst.pop()
            if lst:
                clean[mono] = lst
        if not clean:
            self.terms = {}
            self.lo = self.prec + 1
            return
        first = min(next(i for i, c in enumerate(lst) if c) for lst in clean.values())
        if first:
            clean = {mono: lst[first:] for mono, lst in clean.items()}
            self.lo += first
        self.terms = clean

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs: dict, prec: int, m: int = 1, D: int | None = None):
        """Build from ``{power: LambdaElement or scalar}``."""
        if not coeffs:
            return cls(prec + 1, prec, {}, m, D)
        lo = min(coeffs)
        n = min(prec, max(coeffs)) - lo + 1
        terms = {}
        for p, c in coeffs.items():
            if p > prec:
                continue
            if is_scalar(c):
                c = const(c)
            D = min_trunc(D, c.D)
            for mono, v in c.terms.items():
                lst = terms.setdefault(mono, [Fraction(0)] * n)
                lst[p - lo] += v
        return cls(lo, prec, terms, m, D)

    @classmethod
    def scalar(cls, lst, lo: int, prec: int, m: int = 1, D=None):
        return cls(lo, prec, {ONE_MONO: list(lst)}, m, D)

    @classmethod
    def one(cls, prec: int, m: int = 1, D=None):
        return cls(0, prec, {ONE_MONO: [Fraction(1)]}, m, D)

    # -- views ------------------------------------------------------------
    def valuation(self) -> int:
        return self.lo

    @property
    def min_order(self) -> int:
        return self.lo

    def coefficient(self, p: int) -> LambdaElement:
        if p > self.prec:
            raise PrecisionError(f"coefficient of u^{p} requested, series known through u^{self.prec}")
        i = p - self.lo
        if i < 0:
            return const(0, self.D)
        return LambdaElement({mono: lst[i] for mono, lst in self.terms.items() if i < len(lst) and lst[i]}, self.D)

    @property
    def coeffs(self) -> dict:
        out = {}
        top = self.lo + max((len(v) for v in self.terms.values()), default=0)
        for p in range(self.lo, min(self.prec + 1, top)):
            c = self.coefficient(p)
            if c:
                out[p] = c
        return out

    def __bool__(self):
        return bool(self.terms)

    def is_power_series(self) -> bool:
        if self.prec < -1:
            raise PrecisionError("series not known through the polar part")
        return not self.terms or self.lo >= 0

    def polar_part(self) -> "QSeries":
        return self._select(lambda p: p < 0, EXACT if self.prec >= -1 else self.prec)

    def regular_part(self) -> "QSeries":
        return self._select(lambda p: p >= 0, self.prec)

    def _select(self, keep, prec):
        terms = {
            mono: [c if keep(self.lo + i) else Fraction(0) for i, c in enumerate(lst)]
            for mono, lst in self.terms.items()
        }
        return QSeries(self.lo, prec, terms, self.m, self.D)

    def scalar_list(self):
        """(lo, list) of the filtration-zero part."""
        return self.terms.get(ONE_MONO)

    def split(self):
        """(filtration-zero part, augmentation-ideal part)."""
        s = {ONE_MONO: self.terms[ONE_MONO]} if ONE_MONO in self.terms else {}
        n = {k: v for k, v in self.terms.items() if k != ONE_MONO}
        return QSeries(self.lo, self.prec, s, self.m, self.D), QSeries(self.lo, self.prec, n, self.m, self.D)

    def truncate(self, prec: int) -> "QSeries":
        return QSeries(self.lo, min(prec, self.prec), dict(self.terms), self.m, self.D)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, QSeries):
            return other
        if is_scalar(other) or isinstance(other, LambdaElement):
            return QSeries.from_coeffs({0: other}, EXACT, 1, None)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        lo = min(self.lo, other.lo)
        prec = min(self.prec, other.prec)
        n = prec - lo + 1
        terms = {}
        for s in (self, other):
            off = s.lo - lo
            for mono, lst in s.terms.items():
                acc = terms.setdefault(mono, [])
                need = min(n, off + len(lst))
                if len(acc) < need:
                    acc.extend([Fraction(0)] * (need - len(acc)))
                for i, c in enumerate(lst):
                    if c and off + i < n:
                        acc[off + i] += c
        return QSeries(lo, prec, terms, lcm(self.m, other.m), min_trunc(self.D, other.D))

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.lo, self.prec, {k: [-c for c in v] for k, v in self.terms.items()}, self.m, self.D)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_scalar(other):
            return self.scale(other)
        if isinstance(other, LambdaElement):
            other = QSeries.from_coeffs({0: other}, EXACT, 1, None)
        if not isinstance(other, QSeries):
            return NotImplemented
        D = min_trunc(self.D, other.D)
        prec = min(self.prec + other.lo, other.prec + self.lo)
        lo = self.lo + other.lo
        n = min(prec - lo + 1, max((len(v) for v in self.terms.values()), default=0)
                + max((len(v) for v in other.terms.values()), default=0))
        terms = {}
        if n > 0:
            for m1, l1 in self.terms.items():
                for m2, l2 in other.terms.items():
                    if D is not None and m1[0] + m2[0] > D:
                        continue
                    key = mono_mul(m1, m2)
                    prod = _conv(l1, l2, n)
                    acc = terms.get(key)
                    if acc is None:
                        terms[key] = prod
                    else:
                        for i, c in enumerate(prod):
                            if c:
                                acc[i] += c
        return QSeries(lo, prec, terms, lcm(self.m, other.m), D)

    __rmul__ = __mul__

    def scale(self, c) -> "QSeries":
        """Multiply by a scalar or a ground-ring element."""
        if isinstance(c, LambdaElement):
            return self * c
        m = c.order if isinstance(c, Cyclotomic) else 1
        return QSeries(self.lo, self.prec, {k: [x * c for x in v] for k, v in self.terms.items()},
                       lcm(self.m, m), self.D)

    def shift(self, k: int) -> "QSeries":
        """Multiply by u**k."""
        return QSeries(self.lo + k, self.prec + k, dict(self.terms), self.m, self.D)

    def adams(self, r: int, on_roots: bool = False) -> "QSeries":
        """Psi^r on ground-ring coefficients; u is left alone.

        Roots of unity are fixed unless ``on_roots`` asks for zeta -> zeta**r.
        """
        terms = {}
        for mono, lst in self.terms.items():
            if self.D is not None and mono[0] * r > self.D:
                continue
            terms[mono_adams(mono, r)] = [scalar_power_map(c, r) for c in lst] if on_roots else list(lst)
        return QSeries(self.lo, self.prec, terms, self.m, self.D)

    def conj(self) -> "QSeries":
        return QSeries(self.lo, self.prec, {k: [scalar_conj(c) for c in v] for k, v in self.terms.items()},
                       self.m, self.D)

    def map_lambda(self, fn) -> "QSeries":
        """Apply a map on ground-ring coefficients power by power."""
        return QSeries.from_coeffs({p: fn(c) for p, c in self.coeffs.items()}, self.prec, self.m, self.D)

    def __pow__(self, n: int):
        out = QSeries.one(EXACT, self.m, self.D)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "QSeries":
        s, nil = self.split()
        if not s:
            raise ZeroDivisionError("series with nilpotent leading part is not invertible")
        sinv = _scalar_inverse(s)
        z = nil * sinv
        return _nilpotent_sum(-z, lambda n: Fraction(1)) * sinv

    def __truediv__(self, other):
        if is_scalar(other):
            return self.scale(scalar_inv(other))
        if isinstance(other, QSeries):
            return self * other.inverse()
        return NotImplemented

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        diff = self - other
        return not diff.terms

    __hash__ = None

    def __repr__(self):
        return f"QSeries({self}, prec={self.prec}, m={self.m})"

    def __str__(self):
        parts = []
        for p, c in self.coeffs.items():
            cs = str(c)
            us = "" if p == 0 else ("u" if p == 1 else f"u^{p}")
            if not us:
                parts.append(cs)
            else:
                parts.append(f"({cs})*{us}")
        body = " + ".join(parts) if parts else "0"
        if self.prec >= EXACT // 2:
            return body
        return f"{body} + O(u^{self.prec + 1})"

    def to_json(self):
        return {
            "m": self.m,
            "min_order": self.lo,
            "E": self.prec,
            "coeffs": [[p, c.to_json()] for p, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data, D=None):
        coeffs = {int(p): LambdaElement.from_json(c, D) for p, c in data["coeffs"]}
        return cls.from_coeffs(coeffs, int(data["E"]), int(data["m"]), D)


def _scalar_inverse(s: QSeries) -> QSeries:
    lst = s.terms[ONE_MONO]
    v = s.lo
    if len(lst) == 1:
        return QSeries.scalar([scalar_inv(lst[0])], -v, EXACT, s.m, s.D)
    if s.prec >= EXACT // 2:
        raise PrecisionError("inverse of an exact non-monomial series needs a working precision")
    n = s.prec - v + 1
    return QSeries.scalar(_s_inv(lst, n), -v, s.prec - 2 * v, s.m, s.D)


# -- exp / log -----------------------------------------------------------

def _nilpotent_sum(z: QSeries, coeff) -> QSeries:
    """sum_n coeff(n) z**n for z in the augmentation ideal (so z**(D+1) = 0)."""
    out = QSeries.one(EXACT, z.m, z.D).scale(coeff(0)) if coeff(0) else QSeries(1, EXACT, {}, z.m, z.D)
    if not z:
        return out + z  # z is zero only up to its precision
    if z.D is None:
        raise ValueError("augmentation-ideal series does not terminate without a truncation order")
    power = QSeries.one(EXACT, z.m, z.D)
    for n in range(1, z.D + 1):
        power = power * z
        c = coeff(n)
        if c:
            out = out + power.scale(c)
        if not power and power.prec >= EXACT // 2:
            break
    return out


def series_exp(x: QSeries) -> QSeries:
    """exp(x).  The filtration-zero part of x must be a power series without constant term."""
    s, nil = x.split()
    if s and s.lo < 1:
        raise ValueError(
            "series_exp: filtration-zero coefficient at u^%d; the exponential would not truncate" % s.lo
        )
    n = x.prec + 1
    if s:
        if x.prec >= EXACT // 2:
            raise PrecisionError("series_exp of an exact series needs a working precision")
        lst = [Fraction(0)] * (s.lo) + s.terms[ONE_MONO]
        e0 = QSeries.scalar(_s_exp(lst, n), 0, x.prec, x.m, x.D)
    else:
        e0 = QSeries.one(x.prec, x.m, x.D)
    en = _nilpotent_sum(nil, lambda k: Fraction(1) / _fact(k))
    return e0 * en


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


@dataclass
class LogResult:
    """log(y) = log(scalar) + shift * log(u) + series."""

    shift: int
    scalar: object
    series: QSeries

    @property
    def trivial_prefix(self) -> bool:
        return self.shift == 0 and self.scalar == 1


def series_log(y: QSeries) -> LogResult:
    s, nil = y.split()
    if not s:
        raise ValueError("series_log: filtration-zero part vanishes")
    v = s.lo
    lst = s.terms[ONE_MONO]
    c = lst[0]
    cinv = scalar_inv(c)
    n = s.prec - v + 1
    if len(lst) == 1:
        l0 = QSeries(0, n - 1, {}, y.m, y.D)
    else:
        if n > EXACT // 2:
            raise PrecisionError("series_log of an exact series needs a working precision")
        w = [x * cinv for x in lst[:n]]
        w[0] = Fraction(0)
        l0 = QSeries.scalar(_s_log1p(w, n), 0, n - 1, y.m, y.D)
    z = nil * _scalar_inverse(s)
    lz = _nilpotent_sum(z, lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0))
    return LogResult(v, c, l0 + lz)


def is_power_series(x: QSeries) -> bool:
    return x.is_power_series()


# -- expansions of rational functions -----------------------------------

def _sigma(kind: str, m: int, e: int, n: int):
    if kind == "partial":
        return tuple(c * (-1) ** i for i, c in enumerate(_binomial(Fraction(e), n)))
    return _binomial(Fraction(e, m), n)


@lru_cache(maxsize=4096)
def _shifted_power(kind: str, m: int, a: int, e: int, n: int):
    """Series of (center * sigma)**e, n terms."""
    center = _center(kind, m, a)
    ce = _spow(center, e)
    return tuple(x * ce for x in _sigma(kind, m, e, n))


def _center(kind, m, a):
    if kind == "one" or m == 1:
        return Fraction(1)
    if kind == "adelic":
        return _root(m, -a)
    return _root(m, a)


@lru_cache(maxsize=4096)
def _den_factor(kind: str, m: int, a: int, k: int, n: int):
    """(is_pole, unit series) of 1 - (center*sigma)**k, pole factor u divided out."""
    series = _shifted_power(kind, m, a, k, n + 1)
    d = [-x for x in series]
    d[0] += 1
    if not d[0]:
        return True, tuple(d[1 : n + 1])
    return False, tuple(d[:n])


@lru_cache(maxsize=1024)
def _den_inverse(kind: str, m: int, a: int, den: tuple, n: int):
    unit = [Fraction(1)] + [Fraction(0)] * (n - 1)
    poles = 0
    for k in den:
        pole, d = _den_factor(kind, m, a, k, n)
        poles += pole
        unit = _conv(unit, d, n)
    return poles, tuple(_s_inv(unit, n))


def local_expansion(f, m: int, a: int, kind: str, E: int) -> QSeries:
    """Expansion of a rational function in a local coordinate, known through ``E``.

    kind ``"one"``: q = 1 + u.  ``"adelic"``: q -> q**(1/m)/zeta_m**a with
    q = 1 + u.  ``"partial"``: q = zeta_m**a * (1 - x), expansion in x.
    """
    from .qfun import RationalQ

    f = RationalQ.coerce(f)
    poles = sum(1 for k in f.den if _den_factor(kind, m, a, k, 1)[0])
    W = E + poles
    n = W + 1
    D = f.num.trunc()
    if n <= 0 or not f.num:
        return QSeries(E + 1, E, {}, m, D)
    _, inv = _den_inverse(kind, m, a, f.den, n)
    num_terms = {}
    for e, c in f.num.terms.items():
        sp = _shifted_power(kind, m, a, e, n)
        for mono, v in c.terms.items():
            acc = num_terms.setdefault(mono, [Fraction(0)] * n)
            for i, x in enumerate(sp):
                if x:
                    acc[i] += v * x
    terms = {mono: _conv(lst, inv, n) for mono, lst in num_terms.items()}
    return QSeries(-poles, E, terms, m, D)


def expand_at_one(f, E: int) -> QSeries:
    """Laurent expansion of f near q = 1 in u = q - 1, known through u**E."""
    return local_expansion(f, 1, 0, "one", E)


def expand_adelic(f, m: int, a: int, E: int) -> QSeries:
    """Expansion of f(q**(1/m) / zeta) near q = 1 for zeta = zeta_m**a primitive."""
    if m < 1:
        raise ValueError("root order must be positive")
    if m == 1:
        return expand_at_one(f, E)
    if gcd(a, m) != 1:
        raise ValueError(f"zeta_{m}^{a} is not a primitive {m}-th root of unity")
    return local_expansion(f, m, a % m, "adelic", E)


def inv_one_minus_series(coef, alpha: Fraction, E: int) -> QSeries:
    """Expansion of 1 / (1 - coef * (1+u)**alpha) near u = 0, known through u**E."""
    alpha = Fraction(alpha)
    m = coef.order if isinstance(coef, Cyclotomic) else 1
    n = E + 2
    b = _binomial(alpha, n + 1)
    d = [-(x * coef) for x in b]
    d[0] += 1
    if not d[0]:
        unit = d[1 : n + 1]
        return QSeries.scalar(_s_inv(unit, n), -1, E, m)
    return QSeries.scalar(_s_inv(d[:n], n), 0, E, m)


def default_E(D: int, f=None) -> int:
    """D + (polar depth at q = 1) + 2."""
    depth = 0
    if f is not None:
        entries = getattr(f, "entries", None)
        items = entries if entries is not None else [f]
        depth = max((len(x.den) for x in items), default=0)
    return D + depth + 2
