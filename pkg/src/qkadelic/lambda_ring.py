"""Truncated free lambda-ring on generators tau_1, tau_2, ...

Elements are finite sums of monomials in the generators ``Psi^j(tau_k)``
with rational or cyclotomic coefficients.  The generator ``Psi^j(tau_k)``
has filtration degree ``j``; an element with truncation order ``D`` drops
every monomial of total degree above ``D``.  ``D = None`` means no
truncation (used for constants and exact inputs).
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from .scalars import Cyclotomic, is_scalar, render_scalar, scalar_power_map

__all__ = [
    "LambdaElement",
    "ONE_MONO",
    "tau",
    "const",
    "adams",
    "filtration_degree",
    "lambda_exp",
    "lambda_log",
    "min_trunc",
    "mono_mul",
    "mono_adams",
]

# A monomial is (degree, ((j, k, e), ...)) with triples sorted by (j, k).
ONE_MONO = (0, ())


def min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def mono_mul(m1, m2):
    if not m1[1]:
        return m2
    if not m2[1]:
        return m1
    exps = {}
    for j, k, e in m1[1]:
        exps[(j, k)] = e
    for j, k, e in m2[1]:
        exps[(j, k)] = exps.get((j, k), 0) + e
    return (m1[0] + m2[0], tuple((j, k, e) for (j, k), e in sorted(exps.items())))


def mono_adams(mono, m: int):
    if m == 1 or not mono[1]:
        return mono
    return (mono[0] * m, tuple((j * m, k, e) for j, k, e in mono[1]))


def _mono_str(mono) -> str:
    parts = []
    for j, k, e in mono[1]:
        g = f"Psi{j}(tau{k})"
        parts.append(g if e == 1 else f"{g}^{e}")
    return "*".join(parts)


class LambdaElement:
    """Immutable element of the truncated ground ring."""

    __slots__ = ("terms", "D")

    def __init__(self, terms=None, D: int | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                if c and (D is None or mono[0] <= D):
                    clean[mono] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "D", D)

    def __setattr__(self, name, value):
        raise AttributeError("LambdaElement is immutable")

    @classmethod
    def _raw(cls, terms, D):
        # terms already pruned and truncated
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "D", D)
        return obj

    # -- structure --------------------------------------------------
    def truncate(self, D: int | None) -> "LambdaElement":
        return LambdaElement(self.terms, min_trunc(self.D, D))

    def with_trunc(self, D: int | None) -> "LambdaElement":
        """Re-tag the truncation order (dropping terms above a finite D)."""
        return LambdaElement(self.terms, D)

    def filtration_degree(self):
        if not self.terms:
            return float("inf")
        return min(mono[0] for mono in self.terms)

    def constant(self):
        return self.terms.get(ONE_MONO, Fraction(0))

    def is_constant(self) -> bool:
        return all(not mono[1] for mono in self.terms)

    def generators(self):
        return sorted({(j, k) for mono in self.terms for j, k, _ in mono[1]})

    # -- arithmetic -------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LambdaElement):
            return other
        if is_scalar(other):
            return LambdaElement({ONE_MONO: other} if other else {}, None)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        D = min_trunc(self.D, other.D)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            v = out.get(mono)
            out[mono] = c if v is None else v + c
        return LambdaElement(out, D)

    __radd__ = __add__

    def __neg__(self):
        return LambdaElement._raw({m: -c for m, c in self.terms.items()}, self.D)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LambdaElement":
        if not c:
            return LambdaElement({}, self.D)
        return LambdaElement._raw({m: v * c for m, v in self.terms.items()}, self.D)

    def __mul__(self, other):
        if is_scalar(other):
            return self.scale(other)
        if not isinstance(other, LambdaElement):
            return NotImplemented
        D = min_trunc(self.D, other.D)
        out = {}
        for m1, c1 in self.terms.items():
            d1 = m1[0]
            for m2, c2 in other.terms.items():
                if D is not None and d1 + m2[0] > D:
                    continue
                key = mono_mul(m1, m2)
                v = out.get(key)
                out[key] = c1 * c2 if v is None else v + c1 * c2
        return LambdaElement(out, D)

    def __rmul__(self, other):
        if is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if isinstance(other, Cyclotomic):
            return self.scale(other.inv())
        return NotImplemented

    def __pow__(self, n: int):
        out = LambdaElement({ONE_MONO: Fraction(1)}, self.D)
        for _ in range(n):
            out = out * self
        return out

    def adams(self, m: int) -> "LambdaElement":
        """Ring endomorphism Psi^m: Psi^j(tau_k) -> Psi^{jm}(tau_k), zeta -> zeta^m."""
        if m < 1:
            raise ValueError("Adams operations are indexed by m >= 1")
        if m == 1:
            return self
        out = {}
        for mono, c in self.terms.items():
            if self.D is not None and mono[0] * m > self.D:
                continue
            out[mono_adams(mono, m)] = scalar_power_map(c, m)
        return LambdaElement(out, self.D)

    def map_coeffs(self, fn) -> "LambdaElement":
        return LambdaElement({m: fn(c) for m, c in self.terms.items()}, self.D)

    # -- comparison / display --------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        D = min_trunc(self.D, other.D)
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            if D is not None and k[0] > D:
                continue
            if self.terms.get(k, 0) != other.terms.get(k, 0):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        return f"LambdaElement({self}, D={self.D})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            ms = _mono_str(mono)
            cs = render_scalar(c)
            if not ms:
                parts.append(cs)
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append("-" + ms)
            else:
                parts.append(f"{cs}*{ms}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_json(self):
        return [
            {"monomial": [list(t) for t in mono[1]], "coeff": render_scalar(self.terms[mono])}
            for mono in sorted(self.terms)
        ]

    @classmethod
    def from_json(cls, data, D=None):
        from .textio import parse_scalar

        terms = {}
        for item in data:
            triples = tuple(sorted((int(j), int(k), int(e)) for j, k, e in item["monomial"]))
            mono = (sum(j * e for j, _, e in triples), triples)
            terms[mono] = terms.get(mono, 0) + parse_scalar(item["coeff"])
        return cls(terms, D)


def tau(k: int, j: int = 1, D: int | None = None) -> LambdaElement:
    """The generator Psi^j(tau_k)."""
    if j < 1 or k < 1:
        raise ValueError("generators Psi^j(tau_k) need j, k >= 1")
    return LambdaElement({(j, ((j, k, 1),)): Fraction(1)}, D)


def const(c, D: int | None = None) -> LambdaElement:
    return LambdaElement({ONE_MONO: c} if c else {}, D)


def adams(m: int, x: LambdaElement) -> LambdaElement:
    return x.adams(m)


def filtration_degree(x: LambdaElement):
    return x.filtration_degree()


def _nilpotent_series(x: LambdaElement, coeff, what: str) -> LambdaElement:
    if x.D is None and x:
        raise ValueError(f"{what} of an untruncated non-zero element does not terminate")
    out = const(Fraction(0), x.D)
    power = const(Fraction(1), x.D)
    n = 0
    while True:
        c = coeff(n)
        if c:
            out = out + power.scale(c)
        n += 1
        power = power * x
        if not power:
            return out


def lambda_exp(x: LambdaElement) -> LambdaElement:
    """exp(x) for x in the augmentation ideal; finite because of truncation."""
    if x.filtration_degree() < 1:
        raise ValueError("lambda_exp needs filtration_degree(x) >= 1")
    return _nilpotent_series(x, lambda n: Fraction(1, factorial(n)), "exp")


def lambda_log(y: LambdaElement) -> LambdaElement:
    """log(y) for y with filtration_degree(y - 1) >= 1."""
    w = y - 1
    if w.filtration_degree() < 1:
        raise ValueError("lambda_log needs filtration_degree(y - 1) >= 1")
    return _nilpotent_series(w, lambda n: Fraction((-1) ** (n + 1), n) if n else Fraction(0), "log")
