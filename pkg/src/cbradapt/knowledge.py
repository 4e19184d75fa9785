"""Knowledge base of good operating states and case retrieval.

Retrieval builds a qualified adaptation frame (QAF): every stored case that
agrees with the request on its unadaptable attributes and whose weighted
similarity to the request case is at least ``beta``.  Each entry is scored by
case usefulness, which combines similarity with the case's utility.
"""

from __future__ import annotations

import enum
import json
import threading
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .errors import EmptyInclusionSet, EmptyQAF, ParseError, SchemaMismatch, StateError
from .model import (
    UNCERTAIN,
    AttributeSchema,
    Case,
    Kind,
    Origin,
    SystemSchema,
    SystemState,
    _read_json,
    validate_state,
)


class UsefulnessVariant(str, enum.Enum):
    PAPER = "paper"
    COMPLEMENT = "complement"


def local_similarity(attr: AttributeSchema, v1: str, v2: str) -> float:
    r1, r2 = attr.rank(v1), attr.rank(v2)
    if attr.kind is Kind.NOMINAL:
        return 1.0 if r1 == r2 else 0.0
    span = len(attr.domain) - 1
    if span == 0:
        return 1.0
    return 1.0 - abs(r1 - r2) / span


def case_similarity(request_case: Mapping, case: Case, schema: SystemSchema, included: Iterable[str]) -> float:
    """Weighted mean of local similarities over the ``included`` attributes."""
    included = [n for n in schema.names if n in set(included)]
    if not included:
        raise EmptyInclusionSet("similarity needs at least one included attribute")
    num = den = 0.0
    for name in included:
        attr = schema[name]
        num += attr.weight * local_similarity(attr, request_case[name], case.state[name])
        den += attr.weight
    return num / den


def usefulness(sim: float, utility: float, variant=UsefulnessVariant.PAPER) -> float:
    """Case usefulness.

    ``paper``: ``1 - (1 - sim) * utility``.
    ``complement``: ``1 - (1 - sim) * (1 - utility)``, which grows with utility.
    """
    if UsefulnessVariant(variant) is UsefulnessVariant.PAPER:
        return 1.0 - (1.0 - sim) * utility
    return 1.0 - (1.0 - sim) * (1.0 - utility)


@dataclass(frozen=True)
class QAFEntry:
    case: Case
    similarity: float
    usefulness: float


@dataclass(frozen=True)
class QAF:
    entries: tuple = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


class RetainOutcome(str, enum.Enum):
    RETAINED = "retained"
    BELOW_THRESHOLD = "below-threshold"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class Quarantined:
    record: object
    reason: str


class KnowledgeBase:
    """In-memory case store bound to one schema.

    Readers take :meth:`snapshot`, an immutable tuple; writers replace the
    tuple under a lock, so an in-flight retrieval never sees a half-done
    retain.
    """

    def __init__(self, schema_fingerprint: str, cases: Iterable[Case] = ()):
        self.schema_fingerprint = schema_fingerprint
        self._cases: tuple[Case, ...] = ()
        self._states: set = set()
        self._lock = threading.Lock()
        self.quarantined: list[Quarantined] = []
        for c in cases:
            if c.state in self._states:
                raise ValueError(f"duplicate state in case {c.id!r}")
            self._states.add(c.state)
            self._cases += (c,)

    @classmethod
    def empty(cls, schema: SystemSchema) -> "KnowledgeBase":
        return cls(schema.fingerprint())

    def snapshot(self) -> tuple[Case, ...]:
        return self._cases

    @property
    def cases(self) -> tuple[Case, ...]:
        return self._cases

    def __len__(self) -> int:
        return len(self._cases)

    def __iter__(self):
        return iter(self._cases)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KnowledgeBase)
            and self.schema_fingerprint == other.schema_fingerprint
            and self._cases == other._cases
        )

    __hash__ = None

    def contains_state(self, state: SystemState) -> bool:
        return state in self._states

    def copy(self) -> "KnowledgeBase":
        return KnowledgeBase(self.schema_fingerprint, self._cases)

    def _add(self, case: Case) -> bool:
        with self._lock:
            if case.state in self._states:
                return False
            self._states.add(case.state)
            self._cases = self._cases + (case,)
            return True

    def to_json(self) -> dict:
        return {
            "schema_fingerprint": self.schema_fingerprint,
            "cases": [
                {
                    "id": c.id,
                    "state": c.state.to_json(),
                    "utility": c.utility,
                    "origin": c.origin.value,
                }
                for c in self._cases
            ],
        }


def build_qaf(
    request_case: Mapping,
    request_full: SystemState,
    kb: KnowledgeBase,
    schema: SystemSchema,
    beta: float,
    included: Iterable[str],
    variant=UsefulnessVariant.PAPER,
) -> QAF:
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    included = frozenset(included)
    fixed = [
        (n, request_full[n]) for n in schema.unadaptable if request_full[n] is not UNCERTAIN
    ]
    entries = []
    for case in kb.snapshot():
        if any(case.state[n] != v for n, v in fixed):
            continue
        # no included attribute can disagree, so similarity is vacuously 1
        sim = case_similarity(request_case, case, schema, included) if included else 1.0
        if beta <= sim <= 1.0:
            entries.append(QAFEntry(case, sim, usefulness(sim, case.utility, variant)))
    return QAF(tuple(entries))


def select_best(qaf: QAF) -> QAFEntry:
    """Highest usefulness; ties go to higher utility, then smaller case id."""
    if not qaf:
        raise EmptyQAF("cannot select from an empty QAF")
    return min(qaf.entries, key=lambda e: (-e.usefulness, -e.case.utility, e.case.id))


def retain(case: Case, kb: KnowledgeBase, model) -> RetainOutcome:
    if not case.utility > model.ut:
        return RetainOutcome.BELOW_THRESHOLD
    if not kb._add(case):
        return RetainOutcome.DUPLICATE
    return RetainOutcome.RETAINED


def save_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kb.to_json(), fh, indent=2)
        fh.write("\n")


def load_kb(path, schema: SystemSchema, model) -> KnowledgeBase:
    """Load and re-validate a knowledge base file.

    Cases that fail the schema, the UT gate or duplicate an earlier state are
    kept in ``kb.quarantined`` with a reason instead of being loaded.
    """
    return kb_from_json(_read_json(path), schema, model)


def kb_from_json(data, schema: SystemSchema, model) -> KnowledgeBase:
    if not isinstance(data, Mapping) or "cases" not in data:
        raise ParseError("knowledge base must be an object with a 'cases' list")
    fingerprint = data.get("schema_fingerprint")
    if fingerprint != schema.fingerprint():
        raise SchemaMismatch(
            f"knowledge base fingerprint {fingerprint!r} != schema {schema.fingerprint()!r}"
        )
    kb = KnowledgeBase(fingerprint)
    for record in data["cases"]:
        try:
            state = SystemState.from_json(record["state"])
            validate_state(state, schema)
            case = Case(
                id=str(record["id"]),
                state=state,
                utility=float(record["utility"]),
                origin=Origin(record.get("origin", "seeded")),
            )
        except (KeyError, TypeError, ValueError, ParseError, StateError) as exc:
            kb.quarantined.append(Quarantined(record, f"invalid: {exc}"))
            continue
        outcome = retain(case, kb, model)
        if outcome is not RetainOutcome.RETAINED:
            kb.quarantined.append(Quarantined(record, outcome.value))
    return kb


@dataclass
class KBStats:
    size: int
    seeded: int
    generated: int
    min_utility: float | None
    mean_utility: float | None
    max_utility: float | None
    quarantined: int = 0


def kb_stats(kb: KnowledgeBase) -> KBStats:
    utilities = [c.utility for c in kb]
    return KBStats(
        size=len(kb),
        seeded=sum(c.origin is Origin.SEEDED for c in kb),
        generated=sum(c.origin is Origin.GENERATED for c in kb),
        min_utility=min(utilities) if utilities else None,
        mean_utility=sum(utilities) / len(utilities) if utilities else None,
        max_utility=max(utilities) if utilities else None,
        quarantined=len(kb.quarantined),
    )
