"""Sequences of rational functions and their expansions at roots of unity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .config import EngineConfig
from .expand import QSeries, expand_adelic
from .lambda_ring import LambdaElement, const
from .qfun import PT_PAIRING, LaurentPoly, PairingSpec, RationalQ, one_minus_q, project_plus

__all__ = [
    "SequencePoint",
    "AdelicTable",
    "cell_id",
    "parse_cell_id",
    "primitive_roots",
    "dilaton_point",
    "adelic_map",
    "twisted_pair",
    "project_plus_seq",
]


def cell_id(r: int, m: int, a: int) -> str:
    return f"r{r}_zeta{m}_{a}"


def parse_cell_id(text: str) -> tuple[int, int, int]:
    r, rest = text[1:].split("_zeta")
    m, a = rest.split("_")
    return int(r), int(m), int(a)


def primitive_roots(m: int) -> list[int]:
    """Exponents a with zeta_m**a primitive; [0] for m = 1."""
    if m == 1:
        return [0]
    return [a for a in range(1, m) if gcd(a, m) == 1]


@dataclass(frozen=True)
class SequencePoint:
    """A finite sequence (f_1, ..., f_R) of rational functions of q."""

    entries: tuple
    config: EngineConfig = field(default_factory=EngineConfig)

    def __post_init__(self):
        entries = tuple(RationalQ.coerce(f) for f in self.entries)
        if len(entries) != self.config.R:
            raise ValueError(f"sequence has {len(entries)} entries but R = {self.config.R}")
        object.__setattr__(self, "entries", entries)

    @property
    def R(self) -> int:
        return len(self.entries)

    def __getitem__(self, r: int) -> RationalQ:
        """Entry f_r, indexed from 1."""
        if not 1 <= r <= self.R:
            raise IndexError(f"sequence index {r} outside 1..{self.R}")
        return self.entries[r - 1]

    def replace(self, r: int, f) -> "SequencePoint":
        entries = list(self.entries)
        entries[r - 1] = RationalQ.coerce(f)
        return SequencePoint(tuple(entries), self.config)

    def map(self, fn) -> "SequencePoint":
        """Apply ``fn(r, f_r)`` to every entry."""
        return SequencePoint(tuple(fn(r, f) for r, f in enumerate(self.entries, start=1)), self.config)

    def __eq__(self, other):
        if not isinstance(other, SequencePoint):
            return NotImplemented
        return self.R == other.R and all(a == b for a, b in zip(self.entries, other.entries))

    __hash__ = None

    def to_json(self):
        return {
            "config": self.config.to_dict(),
            "entries": [f.to_json() for f in self.entries],
        }

    @classmethod
    def from_json(cls, data, config: EngineConfig | None = None):
        cfg = config or EngineConfig.from_dict(data["config"])
        entries = tuple(RationalQ.from_json(f, cfg.D) for f in data["entries"])
        if len(entries) != cfg.R:
            cfg = cfg.replace(R=len(entries))
        return cls(entries, cfg)


@dataclass
class AdelicTable:
    """Expansions keyed by (r, m, a); JSON keys are ``r{r}_zeta{m}_{a}``."""

    cells: dict

    def __getitem__(self, key):
        return self.cells[key]

    def to_json(self):
        return {cell_id(*key): s.to_json() for key, s in sorted(self.cells.items())}


def dilaton_point(R: int, config: EngineConfig | None = None) -> SequencePoint:
    if R < 1:
        raise ValueError("R must be >= 1")
    cfg = (config or EngineConfig()).replace(R=R)
    v = RationalQ(one_minus_q().truncate(cfg.D))
    return SequencePoint(tuple(v for _ in range(R)), cfg)


def adelic_map(f: SequencePoint, M_max: int | None = None, E: int | None = None) -> AdelicTable:
    """Cells Psi^r(expansion of f_r(q**(1/m) / zeta)) for r <= R, m <= M_max."""
    M_max = M_max or f.config.M_max
    E = f.config.E if E is None else E
    cells = {}
    for r, fr in enumerate(f.entries, start=1):
        for m in range(1, M_max + 1):
            for a in primitive_roots(m):
                cells[(r, m, a)] = expand_adelic(fr, m, a, E).adams(r)
    return AdelicTable(cells)


def twisted_pair(r: int, a: LambdaElement, b: LambdaElement, pairing: PairingSpec = PT_PAIRING):
    """(Psi^r a, Psi^r b)^(r) = r Psi^r((a, b)); takes the pre-images a, b."""
    if r < 1:
        raise ValueError("r must be >= 1")
    av = list(a) if isinstance(a, (list, tuple)) else [a]
    bv = list(b) if isinstance(b, (list, tuple)) else [b]
    av = [x if isinstance(x, LambdaElement) else const(x) for x in av]
    bv = [x if isinstance(x, LambdaElement) else const(x) for x in bv]
    value = pairing.pair(av, bv)
    value = value if isinstance(value, LambdaElement) else const(Fraction(value))
    return value.adams(r) * r


def project_plus_seq(f: SequencePoint) -> list[LaurentPoly]:
    return [project_plus(fr) for fr in f.entries]
