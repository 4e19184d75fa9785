"""Schemas, states and cases of a managed system.

A managed system is described by an ordered list of attributes, each with a
finite symbolic domain.  A :class:`SystemState` assigns one value to every
attribute; the value is either a domain symbol or :data:`UNCERTAIN` when the
managed system could not observe it.  A :class:`Case` is a fully known state
stored in the knowledge base together with its utility.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import (
    MissingAttribute,
    ParseError,
    SchemaError,
    UncertainInput,
    UnknownAttribute,
    ValueNotInDomain,
)

UNCERTAIN_TOKEN = "?"


class _Uncertain:
    """Marker for an attribute value the managed system could not observe."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNCERTAIN"

    def __reduce__(self):
        return (_Uncertain, ())


UNCERTAIN = _Uncertain()

Value = Union[str, _Uncertain]


class Kind(str, enum.Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class AttributeSchema:
    """One adaptation-concerned attribute.

    For ordinal attributes the order of ``domain`` is the rank order.
    ``weight`` is the attribute's importance in case similarity; it is
    unrelated to utility-function weights.
    """

    name: str
    domain: tuple[str, ...]
    kind: Kind = Kind.NOMINAL
    adaptable: bool = True
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if not self.domain:
            raise SchemaError(f"attribute {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise SchemaError(f"attribute {self.name!r} has duplicate domain values")
        if UNCERTAIN_TOKEN in self.domain:
            raise SchemaError(f"{UNCERTAIN_TOKEN!r} is reserved for uncertain values")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise SchemaError(f"attribute {self.name!r} needs a positive weight")

    def rank(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise ValueNotInDomain(f"{value!r} is not a value of {self.name!r}") from None


class SystemSchema:
    """Ordered collection of :class:`AttributeSchema`."""

    def __init__(self, attributes):
        self.attributes: tuple[AttributeSchema, ...] = tuple(attributes)
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if not any(a.adaptable for a in self.attributes):
            raise SchemaError("schema needs at least one adaptable attribute")
        self._by_name = {a.name: a for a in self.attributes}
        self._index = {a.name: i for i, a in enumerate(self.attributes)}

    def __getitem__(self, name: str) -> AttributeSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownAttribute(name) from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[AttributeSchema]:
        return iter(self.attributes)

    def __len__(self) -> int:
        return len(self.attributes)

    def __eq__(self, other) -> bool:
        return isinstance(other, SystemSchema) and self.attributes == other.attributes

    def __hash__(self) -> int:
        return hash(self.attributes)

    def __repr__(self) -> str:
        return f"SystemSchema({[a.name for a in self.attributes]})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def adaptable(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.adaptable)

    @property
    def unadaptable(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if not a.adaptable)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAttribute(name) from None

    def fingerprint(self) -> str:
        """Identifier binding knowledge bases to this schema.

        Only names and domains participate; changing an attribute weight or
        adaptability flag keeps stored cases meaningful.
        """
        payload = json.dumps([[a.name, list(a.domain)] for a in self.attributes])
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "attributes": [
                {
                    "name": a.name,
                    "domain": list(a.domain),
                    "kind": a.kind.value,
                    "adaptable": a.adaptable,
                    "weight": a.weight,
                }
                for a in self.attributes
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SystemSchema":
        try:
            attrs = [
                AttributeSchema(
                    name=item["name"],
                    domain=tuple(item["domain"]),
                    kind=Kind(item.get("kind", "nominal")),
                    adaptable=bool(item.get("adaptable", True)),
                    weight=float(item.get("weight", 1.0)),
                )
                for item in data["attributes"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed schema: {exc}") from exc
        return cls(attrs)


def load_schema(path) -> SystemSchema:
    return SystemSchema.from_json(_read_json(path))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


class SystemState(Mapping):
    """Immutable assignment of a value to every attribute of a schema.

    Construction does not check against a schema; use :func:`validate_state`.
    """

    __slots__ = ("_values", "_hash")

    def __init__(self, values: Mapping[str, Value] = (), **kw):
        self._values = dict(values, **kw)
        self._hash = None

    def __getitem__(self, name: str) -> Value:
        return self._values[name]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._values.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={_show(v)}" for k, v in self._values.items())
        return f"SystemState({inner})"

    def replace(self, changes: Mapping[str, Value]) -> "SystemState":
        new = dict(self._values)
        new.update(changes)
        return SystemState(new)

    @property
    def uncertain(self) -> tuple[str, ...]:
        return tuple(k for k, v in self._values.items() if v is UNCERTAIN)

    @property
    def is_known(self) -> bool:
        return all(v is not UNCERTAIN for v in self._values.values())

    def require_known(self, names=None) -> None:
        for name in self._values if names is None else names:
            if self._values[name] is UNCERTAIN:
                raise UncertainInput(f"attribute {name!r} is uncertain")

    def values_in(self, schema: SystemSchema) -> tuple:
        return tuple(self._values[a.name] for a in schema.attributes)

    def to_json(self) -> dict:
        return {k: _show(v) for k, v in self._values.items()}

    @classmethod
    def from_json(cls, data: Mapping) -> "SystemState":
        if not isinstance(data, Mapping):
            raise ParseError("a state must be a JSON object")
        return cls({k: UNCERTAIN if v == UNCERTAIN_TOKEN else v for k, v in data.items()})

    @classmethod
    def from_values(cls, schema: SystemSchema, values) -> "SystemState":
        return cls(zip(schema.names, values))


def _show(v: Value) -> str:
    return UNCERTAIN_TOKEN if v is UNCERTAIN else v


def load_state(path) -> SystemState:
    return SystemState.from_json(_read_json(path))


class Origin(str, enum.Enum):
    SEEDED = "seeded"
    GENERATED = "generated"


@dataclass(frozen=True)
class Case:
    id: str
    state: SystemState
    utility: float
    origin: Origin = Origin.SEEDED

    def __post_init__(self):
        object.__setattr__(self, "origin", Origin(self.origin))
        if not self.state.is_known:
            raise UncertainInput(f"case {self.id!r} has uncertain attributes {self.state.uncertain}")
        if not 0.0 <= self.utility <= 1.0:
            raise ValueError(f"case {self.id!r} utility {self.utility} outside [0, 1]")


def case_id_for(state: SystemState) -> str:
    """Deterministic opaque id derived from a fully known state."""
    payload = json.dumps(sorted(state.to_json().items()))
    return "case-" + hashlib.sha1(payload.encode()).hexdigest()[:10]


def validate_state(state: Mapping[str, Value], schema: SystemSchema) -> None:
    for name in state:
        if name not in schema:
            raise UnknownAttribute(f"unknown attribute {name!r}")
    for attr in schema:
        if attr.name not in state:
            raise MissingAttribute(f"missing attribute {attr.name!r}")
        value = state[attr.name]
        if value is not UNCERTAIN and value not in attr.domain:
            raise ValueNotInDomain(f"{value!r} is not a value of {attr.name!r}")


def state_space_size(schema: SystemSchema) -> int:
    return math.prod(len(a.domain) for a in schema)


def count_uncertain(state: SystemState) -> int:
    return len(state.uncertain)


def data_path(name: str) -> Path:
    """Path of a data file shipped with the package (robot example)."""
    return Path(__file__).parent / "data" / name
