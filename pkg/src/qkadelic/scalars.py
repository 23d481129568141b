"""Exact scalars: rationals and cyclotomic fields Q(zeta_m).

Rationals are plain :class:`fractions.Fraction` values.  An element of
Q(zeta_m) is a polynomial in ``zeta_m`` reduced modulo the m-th cyclotomic
polynomial.  Elements of different orders are combined by embedding both
into the field of the least common multiple of the orders.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

Rational = Fraction

__all__ = [
    "Rational",
    "Cyclotomic",
    "cyclotomic_poly",
    "poly_divmod",
    "zeta",
    "scalar_power_map",
    "scalar_conj",
    "is_scalar",
    "render_scalar",
]


def poly_divmod(num, den):
    """Divide polynomials given as coefficient lists, lowest degree first."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    lead = den[-1]
    if len(num) < len(den):
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        c = num[i + len(den) - 1] / lead
        quot[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    rem = num[: len(den) - 1] or [Fraction(0)]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[Fraction, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first.

    Obtained by dividing ``q**n - 1`` by ``Phi_d`` for every proper divisor d.
    """
    if n < 1:
        raise ValueError(f"cyclotomic_poly needs n >= 1, got {n}")
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            num, rem = poly_divmod(num, cyclotomic_poly(d))
            if any(rem):
                raise ArithmeticError(f"Phi_{d} does not divide q^{n}-1")
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[Fraction, ...], ...]:
    # row n = zeta_m**n written in the basis 1, zeta, ..., zeta**(deg-1); n < m
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    rows = []
    cur = [Fraction(0)] * deg
    cur[0] = Fraction(1)
    for _ in range(m):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _degree(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce(m: int, coeffs) -> tuple[Fraction, ...]:
    """Reduce sum_n coeffs[n] * zeta_m**n (any length) to the canonical basis."""
    table = _power_table(m)
    deg = len(table[0])
    out = [Fraction(0)] * deg
    for n, c in enumerate(coeffs):
        if c:
            row = table[n % m]
            for i in range(deg):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


class Cyclotomic:
    """Immutable element of Q(zeta_m)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        deg = _degree(order)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > deg:
            coeffs = list(_reduce(order, coeffs))
        coeffs += [Fraction(0)] * (deg - len(coeffs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zeta(cls, m: int, a: int = 1) -> "Cyclotomic":
        return cls(m, _power_table(m)[a % m])

    @classmethod
    def rational(cls, x, m: int = 1) -> "Cyclotomic":
        return cls(m, [Fraction(x)])

    # -- helpers --------------------------------------------------------
    def embed(self, n: int) -> "Cyclotomic":
        """Rewrite in Q(zeta_n) using zeta_m = zeta_n**(n/m)."""
        if n % self.order:
            raise ValueError(f"cannot embed Q(zeta_{self.order}) into Q(zeta_{n})")
        if n == self.order:
            return self
        step = n // self.order
        poly = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1)
        for j, c in enumerate(self.coeffs):
            poly[j * step] = c
        return Cyclotomic(n, _reduce(n, poly))

    def _common(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic(1, [Fraction(other)])
        if other.order == self.order:
            return self, other
        n = lcm(self.order, other.order)
        return self.embed(n), other.embed(n)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, (self.coeffs[0] + other,) + self.coeffs[1:])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (int, Fraction, Cyclotomic)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c * other for c in self.coeffs])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        if a.order <= 2:
            return Cyclotomic(a.order, [a.coeffs[0] * b.coeffs[0]])
        prod = [Fraction(0)] * (2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.order, _reduce(a.order, prod))

    __rmul__ = __mul__

    def inv(self) -> "Cyclotomic":
        if not self:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        m = self.order
        deg = len(self.coeffs)
        if deg == 1:
            return Cyclotomic(m, [1 / self.coeffs[0]])
        # columns: self * zeta**j; solve M x = e_0 by Gauss-Jordan
        cols = [_reduce(m, [Fraction(0)] * j + list(self.coeffs)) for j in range(deg)]
        rows = [[cols[j][i] for j in range(deg)] + [Fraction(int(i == 0))] for i in range(deg)]
        for c in range(deg):
            piv = next(r for r in range(c, deg) if rows[r][c])
            rows[c], rows[piv] = rows[piv], rows[c]
            p = rows[c][c]
            rows[c] = [v / p for v in rows[c]]
            for r in range(deg):
                if r != c and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[c])]
        return Cyclotomic(m, [rows[i][deg] for i in range(deg)])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = Cyclotomic(self.order, [1])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def power_map(self, r: int) -> "Cyclotomic":
        """Field map zeta -> zeta**r (a Galois automorphism when gcd(r, m) = 1)."""
        m = self.order
        poly = [Fraction(0)] * m
        for j, c in enumerate(self.coeffs):
            poly[(j * r) % m] += c
        return Cyclotomic(m, _reduce(m, poly))

    def conj(self) -> "Cyclotomic":
        return self.power_map(-1)

    # -- comparison -----------------------------------------------------
    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash(("cyc", self.order, self.coeffs))

    def __repr__(self):
        return f"Cyclotomic({self.order}, {self})"

    def __str__(self):
        sym = f"z{self.order}"
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if j == 0 else (sym if j == 1 else f"{sym}^{j}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def zeta(m: int, a: int = 1) -> Cyclotomic:
    return Cyclotomic.zeta(m, a)


def is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, Cyclotomic))


def scalar_power_map(c, r: int):
    return c.power_map(r) if isinstance(c, Cyclotomic) else c


def scalar_conj(c):
    return c.conj() if isinstance(c, Cyclotomic) else c


def scalar_inv(c):
    if isinstance(c, Cyclotomic):
        return c.inv()
    return 1 / Fraction(c)


def render_scalar(c) -> str:
    """Canonical text: rationals as ``p/q``, cyclotomics as polynomials in ``z{m}``."""
    if isinstance(c, Cyclotomic):
        if c.is_rational() and c.order == 1:
            return str(c.coeffs[0])
        return f"({c})" if sum(1 for x in c.coeffs if x) > 1 else str(c)
    return str(Fraction(c))
