"""Truncation orders shared by the engine and the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class EngineConfig:
    """D: ground-ring truncation, E: u-series order, R: sequence length,
    M_max: largest root order, G: Novikov degree bound, seed: RNG seed."""

    D: int = 2
    E: int = 6
    R: int = 4
    M_max: int = 3
    G: int = 2
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"{f.name} must be an integer, got {v!r}")
            if f.name != "seed" and v < 1:
                raise ValueError(f"{f.name} must be >= 1, got {v}")
        if self.E < self.D + 2:
            raise ValueError(f"E must be at least D + 2 = {self.D + 2}, got {self.E}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**{k: int(v) for k, v in data.items()})

    def replace(self, **changes) -> "EngineConfig":
        data = self.to_dict()
        data.update({k: v for k, v in changes.items() if v is not None})
        return EngineConfig(**data)
