"""Piecewise utility functions and their weighted geometric mean.

A utility function maps the values of a few involved attributes to a number
in [0, 1] through an ordered list of ``(condition, value)`` rules and a
default.  The first rule whose condition holds wins.  Conditions are small
boolean trees over ``attribute == symbol`` atoms.

In JSON a condition is one of::

    {"attribute": "Speed", "value": "High"}      # atom
    {"Speed": "High", "Obstacles": "True"}        # conjunction of atoms
    {"all": [...]}  {"any": [...]}  {"not": {...}}
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

from .errors import ParseError, SchemaError, UncertainInput
from .model import UNCERTAIN, SystemSchema, SystemState, _read_json


@dataclass(frozen=True)
class Atom:
    attribute: str
    value: str

    def holds(self, state: Mapping) -> bool:
        return state[self.attribute] == self.value

    def atoms(self):
        yield self


@dataclass(frozen=True)
class And:
    terms: tuple

    def holds(self, state: Mapping) -> bool:
        return all(t.holds(state) for t in self.terms)

    def atoms(self):
        for t in self.terms:
            yield from t.atoms()


@dataclass(frozen=True)
class Or:
    terms: tuple

    def holds(self, state: Mapping) -> bool:
        return any(t.holds(state) for t in self.terms)

    def atoms(self):
        for t in self.terms:
            yield from t.atoms()


@dataclass(frozen=True)
class Not:
    term: "Condition"

    def holds(self, state: Mapping) -> bool:
        return not self.term.holds(state)

    def atoms(self):
        yield from self.term.atoms()


Condition = Union[Atom, And, Or, Not]


def parse_condition(data) -> Condition:
    if not isinstance(data, Mapping) or not data:
        raise ParseError(f"condition must be a non-empty object, got {data!r}")
    if "all" in data or "any" in data:
        if len(data) != 1:
            raise ParseError(f"'all'/'any' must be the only key: {data!r}")
        key = next(iter(data))
        terms = data[key]
        if not isinstance(terms, Sequence) or isinstance(terms, str) or not terms:
            raise ParseError(f"{key!r} needs a non-empty list")
        parsed = tuple(parse_condition(t) for t in terms)
        return And(parsed) if key == "all" else Or(parsed)
    if "not" in data:
        if len(data) != 1:
            raise ParseError(f"'not' must be the only key: {data!r}")
        return Not(parse_condition(data["not"]))
    if set(data) == {"attribute", "value"}:
        return Atom(data["attribute"], data["value"])
    atoms = tuple(Atom(k, v) for k, v in data.items())
    return atoms[0] if len(atoms) == 1 else And(atoms)


def condition_to_json(cond: Condition):
    if isinstance(cond, Atom):
        return {"attribute": cond.attribute, "value": cond.value}
    if isinstance(cond, And):
        return {"all": [condition_to_json(t) for t in cond.terms]}
    if isinstance(cond, Or):
        return {"any": [condition_to_json(t) for t in cond.terms]}
    return {"not": condition_to_json(cond.term)}


@dataclass(frozen=True)
class UtilityFunction:
    name: str
    involved: frozenset
    rules: tuple = ()
    default: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "involved", frozenset(self.involved))
        object.__setattr__(self, "rules", tuple((c, float(v)) for c, v in self.rules))
        for cond, value in self.rules:
            stray = {a.attribute for a in cond.atoms()} - self.involved
            if stray:
                raise SchemaError(f"{self.name}: rule references uninvolved {sorted(stray)}")
            if not 0.0 <= value <= 1.0:
                raise SchemaError(f"{self.name}: rule value {value} outside [0, 1]")
        if not 0.0 <= self.default <= 1.0:
            raise SchemaError(f"{self.name}: default {self.default} outside [0, 1]")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise SchemaError(f"{self.name}: weight must be positive")


@dataclass(frozen=True)
class UtilityModel:
    functions: tuple
    ut: float = 0.5
    margin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.functions:
            raise SchemaError("a utility model needs at least one function")
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise SchemaError("utility function names must be unique")
        if not 0.0 < self.ut < 1.0:
            raise SchemaError(f"UT must lie in (0, 1), got {self.ut}")
        if self.margin < 0:
            raise SchemaError("margin must be non-negative")

    def with_threshold(self, ut=None, margin=None) -> "UtilityModel":
        return UtilityModel(
            self.functions,
            self.ut if ut is None else ut,
            self.margin if margin is None else margin,
        )

    def validate(self, schema: SystemSchema) -> None:
        """Check every involved attribute and atom against ``schema``."""
        for fn in self.functions:
            for name in fn.involved:
                if name not in schema:
                    raise SchemaError(f"{fn.name}: unknown attribute {name!r}")
            for cond, _ in fn.rules:
                for atom in cond.atoms():
                    if atom.value not in schema[atom.attribute].domain:
                        raise SchemaError(
                            f"{fn.name}: {atom.value!r} is not a value of {atom.attribute!r}"
                        )

    def to_json(self) -> dict:
        return {
            "ut": self.ut,
            "epsilon": self.margin,
            "functions": [
                {
                    "name": f.name,
                    "involved": sorted(f.involved),
                    "weight": f.weight,
                    "rules": [
                        {"when": condition_to_json(c), "value": v} for c, v in f.rules
                    ],
                    "default": f.default,
                }
                for f in self.functions
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "UtilityModel":
        try:
            functions = [
                UtilityFunction(
                    name=item["name"],
                    involved=frozenset(item["involved"]),
                    rules=tuple(
                        (parse_condition(r["when"]), float(r["value"]))
                        for r in item.get("rules", ())
                    ),
                    default=float(item["default"]),
                    weight=float(item.get("weight", 1.0)),
                )
                for item in data["functions"]
            ]
            return cls(
                tuple(functions),
                ut=float(data["ut"]),
                margin=float(data.get("epsilon", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed utility model: {exc}") from exc


def load_utility_model(path, schema: SystemSchema | None = None) -> UtilityModel:
    model = UtilityModel.from_json(_read_json(path))
    if schema is not None:
        model.validate(schema)
    return model


def eval_function(state: Mapping, fn: UtilityFunction) -> float:
    for name in fn.involved:
        if state[name] is UNCERTAIN:
            raise UncertainInput(f"{fn.name}: attribute {name!r} is uncertain")
    for cond, value in fn.rules:
        if cond.holds(state):
            return value
    return fn.default


def weighted_geometric_mean(values: Sequence[float], weights: Sequence[float]) -> float:
    """``(prod u_i ** w_i) ** (1 / sum w_i)`` evaluated in the log domain."""
    total = 0.0
    acc = 0.0
    for u, w in zip(values, weights):
        if u == 0.0:
            return 0.0
        acc += w * math.log(u)
        total += w
    return math.exp(acc / total)


def overall_utility(state: Mapping, model: UtilityModel) -> float:
    values = [eval_function(state, fn) for fn in model.functions]
    return weighted_geometric_mean(values, [fn.weight for fn in model.functions])


def needs_adaptation(state: Mapping, model: UtilityModel) -> bool:
    """True when the overall utility reaches or approaches UT (within margin)."""
    return overall_utility(state, model) <= model.ut + model.margin


@dataclass(frozen=True)
class RequestAnalysis:
    """Attributes the engine should move.

    ``breakers`` keep some function below UT, ``antagonists`` merely depress
    a function.  ``unadaptable_participants`` lists attributes that take part
    in a sub-UT function but cannot be changed; they are informational.
    """

    breakers: frozenset = field(default_factory=frozenset)
    antagonists: frozenset = field(default_factory=frozenset)
    unadaptable_participants: frozenset = field(default_factory=frozenset)


def analyze_request(state: SystemState, model: UtilityModel, schema: SystemSchema) -> RequestAnalysis:
    state.require_known()
    current = {fn.name: eval_function(state, fn) for fn in model.functions}

    def alternatives(fn, name):
        here = state[name]
        for v in schema[name].domain:
            if v != here:
                yield eval_function(state.replace({name: v}), fn)

    breakers: set[str] = set()
    participants: set[str] = set()
    for fn in model.functions:
        if current[fn.name] >= model.ut:
            continue
        movable = [n for n in schema.names if n in fn.involved and schema[n].adaptable]
        participants.update(n for n in fn.involved if not schema[n].adaptable)
        found = {n for n in movable if any(u >= model.ut for u in alternatives(fn, n))}
        # no single substitution restores this function: move all of its attributes
        breakers.update(found or movable)

    antagonists: set[str] = set()
    for fn in model.functions:
        for name in fn.involved:
            if name in breakers or name in antagonists or not schema[name].adaptable:
                continue
            if any(u > current[fn.name] for u in alternatives(fn, name)):
                antagonists.add(name)

    return RequestAnalysis(frozenset(breakers), frozenset(antagonists), frozenset(participants))


class CompiledModel:
    """Fast evaluator over value tuples in schema order.

    Function values are memoized on the projection of the state onto each
    function's involved attributes, which keeps exhaustive search cheap.
    Results are bit-identical to :func:`overall_utility`.
    """

    def __init__(self, model: UtilityModel, schema: SystemSchema):
        self.model = model
        self.schema = schema
        self.weights = [fn.weight for fn in model.functions]
        self._names = schema.names
        self._slots = [tuple(schema.index(n) for n in sorted(fn.involved)) for fn in model.functions]
        self._caches: list[dict] = [{} for _ in model.functions]

    def function_values(self, values: tuple) -> list[float]:
        out = []
        for fn, slots, cache in zip(self.model.functions, self._slots, self._caches):
            key = tuple(values[i] for i in slots)
            u = cache.get(key)
            if u is None:
                u = eval_function(dict(zip((self._names[i] for i in slots), key)), fn)
                cache[key] = u
            out.append(u)
        return out

    def overall(self, values: tuple) -> float:
        return weighted_geometric_mean(self.function_values(values), self.weights)
