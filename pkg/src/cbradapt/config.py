from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields

from .errors import ParseError, SchemaError
from .knowledge import UsefulnessVariant
from .model import _read_json


class Paradigm(str, enum.Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
    HYBRID = "hybrid"


class Heuristic(str, enum.Enum):
    FIRST_FIT = "first-fit"
    BEST_FIT = "best-fit"


@dataclass(frozen=True)
class EngineConfig:
    """Engine and mediator settings.

    ``ut`` and ``epsilon`` override the utility model's own values when set.
    """

    ut: float | None = None
    epsilon: float | None = None
    beta: float = 0.7
    paradigm: Paradigm = Paradigm.HYBRID
    alpha_threshold: float = 0.5
    heuristic: Heuristic = Heuristic.FIRST_FIT
    usefulness_variant: UsefulnessVariant = UsefulnessVariant.PAPER
    kappa_cap: int = 10**6
    enum_cap: int = 10**6

    def __post_init__(self):
        try:
            object.__setattr__(self, "paradigm", Paradigm(self.paradigm))
            object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
            object.__setattr__(self, "usefulness_variant", UsefulnessVariant(self.usefulness_variant))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        if not 0.0 <= self.beta <= 1.0:
            raise SchemaError("beta must lie in [0, 1]")
        if not 0.0 <= self.alpha_threshold <= 1.0:
            raise SchemaError("alpha_threshold must lie in [0, 1]")
        if self.kappa_cap < 1 or self.enum_cap < 1:
            raise SchemaError("caps must be positive")

    def apply_to(self, model):
        """The utility model with this config's UT / epsilon overrides."""
        return model.with_threshold(self.ut, self.epsilon)

    def to_json(self) -> dict:
        out = asdict(self)
        for k in ("paradigm", "heuristic", "usefulness_variant"):
            out[k] = out[k].value
        return out

    @classmethod
    def from_json(cls, data) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path) -> EngineConfig:
    return EngineConfig.from_json(_read_json(path))
