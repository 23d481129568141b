"""Novikov variables, a nilpotent toy K-ring and finite-difference operators.

The toy ring is Q[P_1^{+-1}, ..., P_s^{+-1}] modulo (P_i - 1)^(N_i + 1), written in
the basis of monomials in x_i = P_i - 1.  Coefficients of everything in
this module are :class:`KQ` values: toy-ring combinations of rational
functions of q over the ground ring.

Operators are kept in normal order ``sum c_{a,b} T^a Q^b``.  The symbol
``T_i`` stands for ``P_i q^{slot * Q_i d/dQ_i}``; ``slot`` is 1 for the
plain translation and k for operators written in the variable
``P q^{k Q d/dQ}`` before an Adams operation is applied.  Moving Q past
T uses ``T_i Q_i = q^slot Q_i T_i``, which follows from the action on
monomials.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

from .lambda_ring import LambdaElement, const
from .qfun import LaurentPoly, RationalQ
from .scalars import is_scalar

__all__ = [
    "ToyK",
    "KQ",
    "NovikovSeries",
    "DiffOp",
    "op_apply",
    "op_compose",
    "op_exp_apply",
    "adams_on_operator",
    "adams_on_series",
    "free_term",
    "theorem3_transform",
    "theorem4_transform",
    "theorem4_operator",
]


def _gen_binom(n: int, j: int) -> Fraction:
    """C(n, j) for any integer n (negative allowed)."""
    out = Fraction(1)
    for i in range(j):
        out = out * (n - i) / (i + 1)
    return out


class ToyK:
    """Nilpotency orders N = (N_1, ..., N_s); s = 0 gives the rationals."""

    def __init__(self, N=(1,)):
        N = tuple(int(n) for n in N)
        if any(n < 0 for n in N):
            raise ValueError("nilpotency orders must be >= 0")
        self.N = N
        self.s = len(N)
        self.zero_index = (0,) * self.s

    def __eq__(self, other):
        return isinstance(other, ToyK) and self.N == other.N

    def __hash__(self):
        return hash(self.N)

    def __repr__(self):
        return f"ToyK({self.N})"

    def basis(self):
        return list(product(*(range(n + 1) for n in self.N)))

    def mul_index(self, e1, e2):
        e = tuple(x + y for x, y in zip(e1, e2))
        if any(x > n for x, n in zip(e, self.N)):
            return None
        return e

    def coerce(self, x) -> "KQ":
        if isinstance(x, KQ):
            if x.ring != self:
                raise ValueError("toy rings differ")
            return x
        return KQ(self, {self.zero_index: RationalQ.coerce(x)})

    def zero(self) -> "KQ":
        return KQ(self, {})

    def one(self) -> "KQ":
        return self.coerce(const(1))

    def x(self, i: int) -> "KQ":
        e = tuple(int(j == i) for j in range(self.s))
        return KQ(self, {e: RationalQ.coerce(const(1))}) if self.N[i] >= 1 else self.zero()

    def P_power(self, n) -> "KQ":
        """prod_i P_i**n_i = prod_i (1 + x_i)**n_i (negative exponents allowed)."""
        return KQ(self, {e: RationalQ.coerce(const(c)) for e, c in self._power_table(tuple(n)).items()})

    @lru_cache(maxsize=None)
    def _power_table(self, n):
        out = {}
        for e in self.basis():
            c = Fraction(1)
            for ni, ei in zip(n, e):
                c *= _gen_binom(ni, ei)
            if c:
                out[e] = c
        return out

    @lru_cache(maxsize=None)
    def adams_index(self, k: int, e):
        """Psi^k(x^e) = prod_i ((1 + x_i)**k - 1)**e_i as {index: coefficient}."""
        out = {self.zero_index: Fraction(1)}
        for i, ei in enumerate(e):
            xi_k = {}
            for j in range(1, min(k, self.N[i]) + 1):
                idx = tuple(j if t == i else 0 for t in range(self.s))
                xi_k[idx] = Fraction(comb(k, j))
            for _ in range(ei):
                new = {}
                for a, ca in out.items():
                    for b, cb in xi_k.items():
                        idx = self.mul_index(a, b)
                        if idx is not None:
                            new[idx] = new.get(idx, 0) + ca * cb
                out = {a: c for a, c in new.items() if c}
        return out


class KQ:
    """Toy-ring combination ``sum_e x^e c_e(q)`` with rational-function coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: ToyK, terms=None):
        self.ring = ring
        self.terms = {e: RationalQ.coerce(c) for e, c in (terms or {}).items() if c}

    def _coerce(self, other):
        if isinstance(other, KQ):
            return other
        if is_scalar(other) or isinstance(other, (LambdaElement, LaurentPoly, RationalQ)):
            return self.ring.coerce(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return KQ(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return KQ(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_scalar(other) or isinstance(other, LambdaElement):
            return KQ(self.ring, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = self.ring.mul_index(e1, e2)
                if e is not None:
                    p = c1 * c2
                    out[e] = out[e] + p if e in out else p
        return KQ(self.ring, out)

    __rmul__ = __mul__

    def mul_q_power(self, n: int) -> "KQ":
        if n == 0:
            return self
        return KQ(self.ring, {e: RationalQ(c.num.shift(n), c.den) for e, c in self.terms.items()})

    def adams(self, k: int) -> "KQ":
        """P -> P^k, Psi^k on ground-ring coefficients, q -> q^k."""
        if k == 1:
            return self
        out = {}
        for e, c in self.terms.items():
            ck = c.adams(k)
            for idx, w in self.ring.adams_index(k, e).items():
                p = ck * w
                out[idx] = out[idx] + p if idx in out else p
        return KQ(self.ring, out)

    def reduce(self) -> "KQ":
        return KQ(self.ring, {e: c.reduce() for e, c in self.terms.items()})

    def rank_part(self) -> RationalQ:
        return self.terms.get(self.ring.zero_index, RationalQ(LaurentPoly()))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return not (self - other)

    __hash__ = None

    def __repr__(self):
        return f"KQ({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            c = str(self.terms[e])
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self):
        return [[list(e), c.to_json()] for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, ring: ToyK, data, D=None):
        return cls(ring, {tuple(e): RationalQ.from_json(c, D) for e, c in data})


class NovikovSeries:
    """``sum_d F_d Q^d`` over degree vectors d >= 0 with total degree <= G."""

    __slots__ = ("ring", "G", "terms")

    def __init__(self, ring: ToyK, G: int, terms=None):
        self.ring = ring
        self.G = G
        clean = {}
        for d, c in (terms or {}).items():
            d = tuple(int(x) for x in d)
            if len(d) != ring.s or any(x < 0 for x in d):
                raise ValueError(f"degree vector {d} must have {ring.s} non-negative entries")
            if sum(d) > G:
                continue
            c = ring.coerce(c)
            if c:
                clean[d] = c
        self.terms = clean

    @classmethod
    def monomial(cls, ring: ToyK, G: int, d, coeff=1) -> "NovikovSeries":
        return cls(ring, G, {tuple(d): coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return NovikovSeries(self.ring, min(self.G, other.G), out)

    def __neg__(self):
        return NovikovSeries(self.ring, self.G, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NovikovSeries":
        c = self.ring.coerce(c)
        return NovikovSeries(self.ring, self.G, {d: v * c for d, v in self.terms.items()})

    def adams(self, k: int) -> "NovikovSeries":
        """Psi^k: coefficients as in :meth:`KQ.adams`, Q^d -> Q^{kd}."""
        return NovikovSeries(
            self.ring, self.G, {tuple(k * x for x in d): c.adams(k) for d, c in self.terms.items()}
        )

    def reduce(self) -> "NovikovSeries":
        return NovikovSeries(self.ring, self.G, {d: c.reduce() for d, c in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return not (self - other)

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"[{c}]*Q^{list(d)}" for d, c in sorted(self.terms.items())) or "0"
        return f"NovikovSeries({body}, G={self.G})"

    def to_json(self):
        return {"N": list(self.ring.N), "G": self.G, "terms": [[list(d), c.to_json()] for d, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data, D=None):
        ring = ToyK(data["N"])
        return cls(ring, int(data["G"]), {tuple(d): KQ.from_json(ring, c, D) for d, c in data["terms"]})


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


class DiffOp:
    """Normal-ordered operator ``sum c_{a,b} T^a Q^b``.

    ``slot=None`` marks an operator written in a formal variable T whose
    meaning (``P q^{k Q d/dQ}``) is fixed later by :meth:`with_slot`.
    """

    __slots__ = ("ring", "terms", "slot")

    def __init__(self, ring: ToyK, terms=None, slot: int | None = 1):
        self.ring = ring
        self.slot = slot
        clean = {}
        for (a, b), c in (terms or {}).items():
            a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
            if len(a) != ring.s or len(b) != ring.s or any(x < 0 for x in a + b):
                raise ValueError("operator exponents must be non-negative vectors of length s")
            c = ring.coerce(c)
            if c:
                key = (a, b)
                clean[key] = clean[key] + c if key in clean else c
        self.terms = {k: v for k, v in clean.items() if v}

    # -- constructors ---------------------------------------------------
    @classmethod
    def scalar(cls, ring, c, slot=1):
        z = (0,) * ring.s
        return cls(ring, {(z, z): c}, slot)

    @classmethod
    def T(cls, ring, i=0, power=1, slot=1, coeff=1):
        a = tuple(power if j == i else 0 for j in range(ring.s))
        return cls(ring, {(a, (0,) * ring.s): coeff}, slot)

    @classmethod
    def Q(cls, ring, i=0, power=1, slot=1, coeff=1):
        b = tuple(power if j == i else 0 for j in range(ring.s))
        return cls(ring, {((0,) * ring.s, b): coeff}, slot)

    @classmethod
    def shift(cls, ring, i=0):
        """The plain translation q^{Q_i d/dQ_i} = P_i^{-1} T_i."""
        n = tuple(-1 if j == i else 0 for j in range(ring.s))
        return cls.T(ring, i, 1, 1, ring.P_power(n))

    def with_slot(self, k: int) -> "DiffOp":
        return DiffOp(self.ring, self.terms, k)

    # -- arithmetic -------------------------------------------------------
    def _same(self, other):
        if self.slot != other.slot:
            raise ValueError(f"operators use different translation slots ({self.slot} vs {other.slot})")

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(self.ring, other, self.slot)
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return DiffOp(self.ring, out, self.slot)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.ring, {k: -c for k, c in self.terms.items()}, self.slot)

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(self.ring, other, self.slot)
        return self + (-other)

    def __mul__(self, other):
        """Coefficient multiplication, or composition for another operator."""
        if isinstance(other, DiffOp):
            return op_compose(self, other)
        c = self.ring.coerce(other)
        return DiffOp(self.ring, {k: v * c for k, v in self.terms.items()}, self.slot)

    def __rmul__(self, other):
        c = self.ring.coerce(other)
        return DiffOp(self.ring, {k: c * v for k, v in self.terms.items()}, self.slot)

    def reduce(self) -> "DiffOp":
        return DiffOp(self.ring, {k: v.reduce() for k, v in self.terms.items()}, self.slot)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.slot == other.slot and not (self - other)

    __hash__ = None

    def __repr__(self):
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            parts.append(f"[{c}]*T^{list(a)}*Q^{list(b)}")
        return f"DiffOp({' + '.join(parts) or '0'}, slot={self.slot})"

    def to_json(self):
        return {
            "slot": self.slot,
            "terms": [[list(a), list(b), c.to_json()] for (a, b), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, ring: ToyK, data, D=None):
        if isinstance(data, list):
            data = {"terms": data, "slot": None}
        terms = {(tuple(a), tuple(b)): KQ.from_json(ring, c, D) for a, b, c in data["terms"]}
        return cls(ring, terms, data.get("slot"))


def _need_slot(op: DiffOp):
    if op.slot is None:
        raise ValueError("operator has untagged translation slots; call with_slot(k) first")


def op_compose(d1: DiffOp, d2: DiffOp) -> DiffOp:
    """Normal form of d1 o d2 using Q^b T^a = q^{-slot a.b} T^a Q^b."""
    _need_slot(d1)
    d1._same(d2)
    out = {}
    for (a1, b1), c1 in d1.terms.items():
        for (a2, b2), c2 in d2.terms.items():
            c = (c1 * c2).mul_q_power(-d1.slot * _dot(a2, b1))
            key = (_vec_add(a1, a2), _vec_add(b1, b2))
            out[key] = out[key] + c if key in out else c
    return DiffOp(d1.ring, out, d1.slot)


def op_apply(op: DiffOp, F: NovikovSeries) -> NovikovSeries:
    """c T^a Q^b sends F_d Q^d to c P^a q^{slot a.(d+b)} F_d Q^{d+b}."""
    _need_slot(op)
    ring = op.ring
    out = {}
    for (a, b), c in op.terms.items():
        Pa = ring.P_power(a) if any(a) else None
        for d, fd in F.terms.items():
            d2 = _vec_add(d, b)
            if sum(d2) > F.G:
                continue
            v = c * fd
            if Pa is not None:
                v = v * Pa
            v = v.mul_q_power(op.slot * _dot(a, d2))
            out[d2] = out[d2] + v if d2 in out else v
    return NovikovSeries(ring, F.G, out)


def op_exp_apply(X: DiffOp, F: NovikovSeries, max_terms: int | None = None) -> NovikovSeries:
    """exp(X) F as a finite sum; raises if the powers of X do not die out."""
    if max_terms is None:
        D = _trunc_of(X, F)
        max_terms = (D if D is not None else 8) * (F.G + 1) * (sum(X.ring.N) + 1) + 2
    out = F
    term = F
    for n in range(1, max_terms + 1):
        term = op_apply(X, term).reduce().scale(Fraction(1, n))
        if not term:
            return out
        out = out + term
    raise ValueError("non-truncating exponent: exp(X) F did not terminate")


def _trunc_of(X: DiffOp, F: NovikovSeries):
    D = None
    for c in list(X.terms.values()) + list(F.terms.values()):
        for r in c.terms.values():
            t = r.num.trunc()
            if t is not None:
                D = t if D is None else min(D, t)
    return D


def free_term(op: DiffOp) -> KQ:
    """D(1, 0, q): the sum of the coefficients with no Q."""
    z = (0,) * op.ring.s
    out = op.ring.zero()
    for (a, b), c in op.terms.items():
        if b == z:
            out = out + c
    return out


def _check_free_term(name, op: DiffOp):
    rank = free_term(op).rank_part()
    if rank and rank.filtration_degree() < 1:
        raise ValueError(f"free-term violation: {name}(1, 0, q) = {rank} is not small")


def adams_on_operator(k: int, op: DiffOp) -> DiffOp:
    """Psi^k of an operator written in P q^{kQ d/dQ}; the result uses plain slots.

    (P q^{kQ d/dQ})^a -> T^{ka}, Q^b -> Q^{kb}, coefficients as in KQ.adams.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if op.slot != k:
        raise ValueError(f"adams_on_operator({k}) needs an operator tagged with slot {k}, got {op.slot}")
    terms = {
        (tuple(k * x for x in a), tuple(k * x for x in b)): c.adams(k) for (a, b), c in op.terms.items()
    }
    return DiffOp(op.ring, terms, 1)


def adams_on_series(k: int, F: NovikovSeries) -> NovikovSeries:
    return F.adams(k)


def _exponent3(ops: dict, r: int, ring: ToyK) -> DiffOp:
    X = DiffOp(ring, {}, 1)
    for j in sorted(ops):
        if j % r:
            continue
        k = j // r
        op = ops[j]
        tagged = op.with_slot(k) if op.slot is None else op
        X = X + adams_on_operator(k, tagged) * RationalQ.inv_one_minus(k, Fraction(1, k))
    return X


def theorem3_transform(f: list, ops: dict) -> list:
    """f_r -> exp(sum_k Psi^k(D_{kr}(P q^{kQ d/dQ}, Q, q)) / (k (1 - q^k))) f_r.

    ``f`` lists NovikovSeries entries indexed from r = 1; ``ops`` maps k to an
    untagged operator D_k.
    """
    if not f:
        return []
    ring = f[0].ring
    for k, op in ops.items():
        _check_free_term(f"D_{k}", op)
    out = []
    for r, fr in enumerate(f, start=1):
        X = _exponent3(ops, r, ring)
        out.append(op_exp_apply(X, fr) if X else fr)
    return out


def _kq_exp(x: KQ) -> KQ:
    out = x.ring.one()
    term = x.ring.one()
    n = 0
    while True:
        n += 1
        term = (term * x).reduce() * Fraction(1, n)
        if not term:
            return out
        if n > 64:
            raise ValueError("non-truncating exponent")
        out = out + term


def theorem4_transform(fQ: dict, c: dict, tau: dict, basis: list, ring: ToyK, G: int) -> dict:
    """Closed formula: for every r,

    g_r = sum_d f_{r,d} Q^d exp(sum_{k,alpha} Psi^k(tau_{alpha,rk}) P^{k m_alpha} q^{k (m_alpha, d)}
          / (k (1 - q^k))) sum_alpha c_{alpha,r}(q) P^{m_alpha} q^{(m_alpha, d)}.
    """
    out = {}
    for r, fr in sorted(fQ.items()):
        terms = {}
        for d, frd in fr.items():
            d = tuple(d)
            if sum(d) > G:
                continue
            X = ring.zero()
            for (alpha, j), t in tau.items():
                if j % r or not t:
                    continue
                k = j // r
                m = basis[alpha]
                X = X + ring.P_power(tuple(k * x for x in m)).mul_q_power(k * _dot(m, d)) * RationalQ.inv_one_minus(
                    k, t.adams(k) * Fraction(1, k)
                )
            lin = ring.zero()
            for (alpha, rr), cv in c.items():
                if rr != r:
                    continue
                m = basis[alpha]
                lin = lin + ring.P_power(m).mul_q_power(_dot(m, d)) * RationalQ.coerce(cv)
            terms[d] = ring.coerce(frd) * _kq_exp(X) * lin
        out[r] = NovikovSeries(ring, G, terms).reduce()
    return out


def theorem4_operator(fQ: dict, c: dict, tau: dict, basis: list, ring: ToyK, G: int) -> dict:
    """(sum_alpha c_{alpha,r} T^{m_alpha}) exp(sum Psi^k(tau_{alpha,rk}) T^{k m_alpha} / (k (1-q^k))) f_r via op_apply."""
    out = {}
    for r, fr in sorted(fQ.items()):
        F = NovikovSeries(ring, G, {tuple(d): v for d, v in fr.items()})
        X = DiffOp(ring, {}, 1)
        for (alpha, j), t in tau.items():
            if j % r or not t:
                continue
            k = j // r
            m = tuple(k * x for x in basis[alpha])
            X = X + DiffOp(ring, {(m, (0,) * ring.s): RationalQ.inv_one_minus(k, t.adams(k) * Fraction(1, k))}, 1)
        L = DiffOp(ring, {}, 1)
        for (alpha, rr), cv in c.items():
            if rr == r:
                L = L + DiffOp(ring, {(tuple(basis[alpha]), (0,) * ring.s): RationalQ.coerce(cv)}, 1)
        out[r] = op_apply(L, op_exp_apply(X, F) if X else F).reduce()
    return out
