"""Text and JSON round-tripping for ground-ring elements and Laurent polynomials.

Expressions use ``+ - * / ^`` and parentheses over these atoms::

    3, 1/2          rationals
    z4, z4^3        the root of unity zeta_4 and its powers
    tau2            the generator tau_2
    Psi3(expr)      the Adams operation applied to a ground-ring expression
    q, q^-2         the loop variable

Division is allowed only by scalars.  Canonical JSON uses sorted keys and
never emits floats.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .lambda_ring import LambdaElement, const, tau
from .qfun import LaurentPoly
from .scalars import Cyclotomic, scalar_inv

__all__ = ["ParseError", "parse_laurent", "parse_lambda", "parse_scalar", "dump_json", "load_json"]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<psi>Psi(?P<psi_j>\d+))|(?P<tau>tau(?P<tau_k>\d+))"
    r"|(?P<zeta>z(?P<zeta_m>\d+))|(?P<q>q)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind in ("psi_j", "tau_k", "zeta_m"):
            kind = {"psi_j": "psi", "tau_k": "tau", "zeta_m": "zeta"}[kind]
        if kind == "num":
            out.append(("num", int(m.group("num"))))
        elif kind == "psi":
            out.append(("psi", int(m.group("psi_j"))))
        elif kind == "tau":
            out.append(("tau", int(m.group("tau_k"))))
        elif kind == "zeta":
            out.append(("zeta", int(m.group("zeta_m"))))
        elif kind == "q":
            out.append(("q", None))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text: str, D):
        self.toks = _tokenize(text)
        self.i = 0
        self.D = D

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ParseError(f"expected {value or kind}, found {tok[1] or tok[0]}")
        self.i += 1
        return tok

    def parse(self) -> LaurentPoly:
        out = self.expr()
        self.take("end")
        return out

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        out = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.power()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                out = out * self.power()
            elif tok == ("op", "/"):
                self.take()
                den = self.power()
                c = _as_scalar(den)
                if c is None or not c:
                    raise ParseError("division is only allowed by a nonzero scalar")
                out = out * scalar_inv(c)
            elif tok[0] in ("num", "psi", "tau", "zeta", "q") or tok == ("op", "("):
                out = out * self.power()  # implicit multiplication
            else:
                return out

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            n = self.take("num")[1]
            if not neg:
                return base ** n if not isinstance(base, LaurentPoly) else _pow(base, n)
            return _neg_pow(base, n)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return LaurentPoly({0: const(Fraction(val), self.D)})
        if kind == "tau":
            self.take()
            if val < 1:
                raise ParseError("generator index must be positive")
            return LaurentPoly({0: tau(val, 1, self.D)})
        if kind == "zeta":
            self.take()
            if val < 1:
                raise ParseError("root order must be positive")
            return LaurentPoly({0: const(Cyclotomic.zeta(val, 1), self.D)})
        if kind == "q":
            self.take()
            return LaurentPoly({1: const(Fraction(1), self.D)})
        if kind == "psi":
            self.take()
            self.take("op", "(")
            inner = self.expr()
            self.take("op", ")")
            if val < 1:
                raise ParseError("Adams index must be positive")
            if any(e != 0 for e in inner.terms):
                raise ParseError("Psi applies to ground-ring expressions without q")
            return LaurentPoly({0: inner.coeff(0).adams(val)})
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ParseError(f"unexpected token {val or kind}")


def _pow(base: LaurentPoly, n: int) -> LaurentPoly:
    out = LaurentPoly({0: const(1)})
    for _ in range(n):
        out = out * base
    return out


def _neg_pow(base: LaurentPoly, n: int) -> LaurentPoly:
    if len(base.terms) == 1:
        (e, c), = base.terms.items()
        s = _as_scalar(LaurentPoly({0: c}))
        if s is not None and s:
            return LaurentPoly({-e * n: const(scalar_inv(s) ** n)})
    raise ParseError("negative powers are only allowed for monomials q^e times a scalar")


def _as_scalar(x: LaurentPoly):
    if not x.terms:
        return Fraction(0)
    if set(x.terms) != {0}:
        return None
    c = x.terms[0]
    if not c.is_constant():
        return None
    return c.constant()


def parse_laurent(text: str, D: int | None = None) -> LaurentPoly:
    return _Parser(str(text), D).parse().truncate(D)


def parse_lambda(text: str, D: int | None = None) -> LambdaElement:
    """Parse a ground-ring element (no q allowed)."""
    lp = parse_laurent(text, D)
    if any(e != 0 for e in lp.terms):
        raise ParseError(f"{text!r} depends on q; a ground-ring element was expected")
    return lp.coeff(0).with_trunc(D)


def parse_scalar(text: str):
    """Parse a rational or cyclotomic number."""
    c = _as_scalar(parse_laurent(text))
    if c is None:
        raise ParseError(f"{text!r} is not a scalar")
    return c


def _check_no_floats(obj):
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in canonical JSON")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_no_floats(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _check_no_floats(v)


def dump_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    _check_no_floats(obj)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(text: str):
    return json.loads(text, parse_float=lambda s: (_ for _ in ()).throw(ParseError(f"float {s} in input")))
