"""The adaptation process: retrieve, select by usefulness, else generate, retain.

:func:`adapt` runs the whole pipeline for one fully known request.  Uncertain
requests go through :func:`cbradapt.uncertainty.concretize` first.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import threading
import time
from dataclasses import dataclass, field, replace

from .config import EngineConfig, Heuristic
from .errors import NoFeasibleState, SearchSpaceTooLarge
from .knowledge import (
    KnowledgeBase,
    QAFEntry,
    RetainOutcome,
    build_qaf,
    retain,
    select_best,
)
from .model import Case, Origin, SystemSchema, SystemState, case_id_for
from .utility import (
    CompiledModel,
    RequestAnalysis,
    UtilityModel,
    analyze_request,
)


class Provenance(str, enum.Enum):
    RETRIEVED = "retrieved"
    FIRST_FIT = "generated-first-fit"
    BEST_FIT = "generated-best-fit"


@dataclass(frozen=True)
class AdaptationRequest:
    """Snapshot of the managed system when adaptation is issued.

    ``free`` names attributes the engine must assign regardless of analysis
    (uncertain adaptable attributes); ``uncertain`` remembers which values
    were unobserved before concretization.
    """

    id: str
    state: SystemState
    issued_at: float = field(default_factory=time.monotonic)
    free: frozenset = frozenset()
    uncertain: frozenset = frozenset()


@dataclass(frozen=True)
class AdaptationResponse:
    id: str
    state: SystemState
    utility: float
    usefulness: float
    provenance: Provenance
    changed: frozenset
    source_case: str | None = None
    similarity: float | None = None
    retained: RetainOutcome | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "state": self.state.to_json(),
            "utility": self.utility,
            "usefulness": self.usefulness,
            "provenance": self.provenance.value,
            "source_case": self.source_case,
            "similarity": self.similarity,
            "changed": sorted(self.changed),
            "retained": None if self.retained is None else self.retained.value,
        }


def _as_request(request) -> AdaptationRequest:
    if isinstance(request, AdaptationRequest):
        return request
    return AdaptationRequest("request", request, issued_at=0.0)


def _changed(request: AdaptationRequest, state: SystemState) -> frozenset:
    diff = {n for n in state if state[n] != request.state[n]}
    return frozenset(diff | request.uncertain)


def formulate_request_case(request, analysis: RequestAnalysis):
    """Drop the UT-breakers from the request; returns ``(case, included)``."""
    state = _as_request(request).state
    included = frozenset(n for n in state if n not in analysis.breakers)
    return SystemState({n: state[n] for n in state if n in included}), included


def response_from_case(request, case: Case, model: UtilityModel, schema: SystemSchema,
                       *, similarity=None, usefulness=None, compiled=None):
    """Compose an executable response from a retrieved case.

    Adaptable attributes come from the case, unadaptable ones from the
    request.  Returns ``None`` (fall through to generation) when the
    composed state does not exceed UT.
    """
    request = _as_request(request)
    state = SystemState(
        {a.name: case.state[a.name] if a.adaptable else request.state[a.name] for a in schema}
    )
    compiled = compiled or CompiledModel(model, schema)
    utility = compiled.overall(state.values_in(schema))
    if not utility > model.ut:
        return None
    return AdaptationResponse(
        id=f"{request.id}/response",
        state=state,
        utility=utility,
        usefulness=usefulness if usefulness is not None else utility,
        provenance=Provenance.RETRIEVED,
        changed=_changed(request, state),
        source_case=case.id,
        similarity=similarity,
    )


def _generated(request, values, utility, provenance, schema) -> AdaptationResponse:
    state = SystemState.from_values(schema, values)
    return AdaptationResponse(
        id=f"{request.id}/response",
        state=state,
        utility=utility,
        usefulness=utility,
        provenance=provenance,
        changed=_changed(request, state),
    )


def _ordered(schema: SystemSchema, names) -> list[int]:
    names = set(names)
    return [i for i, a in enumerate(schema.attributes) if a.name in names]


def first_fit(request, analysis: RequestAnalysis, model: UtilityModel, schema: SystemSchema,
              *, enum_cap: int = 10**6, compiled=None) -> AdaptationResponse:
    """First assignment found whose overall utility exceeds UT.

    Variable sets are tried in order: breakers; breakers and antagonists;
    every adaptable attribute.  Each set is enumerated in schema order with
    the last attribute varying fastest, values in domain order.
    """
    request = _as_request(request)
    request.state.require_known()
    compiled = compiled or CompiledModel(model, schema)
    base = list(request.state.values_in(schema))
    stages = [
        analysis.breakers,
        analysis.breakers | analysis.antagonists,
        frozenset(schema.adaptable),
    ]
    seen = []
    evaluated = 0
    for stage in stages:
        slots = _ordered(schema, stage)
        if slots in seen:
            continue
        seen.append(slots)
        domains = [schema.attributes[i].domain for i in slots]
        for combo in itertools.product(*domains):
            evaluated += 1
            if evaluated > enum_cap:
                raise SearchSpaceTooLarge(f"first-fit exceeded {enum_cap} evaluated states")
            values = base[:]
            for i, v in zip(slots, combo):
                values[i] = v
            values = tuple(values)
            u = compiled.overall(values)
            if u > model.ut:
                return _generated(request, values, u, Provenance.FIRST_FIT, schema)
    raise NoFeasibleState("no adaptable assignment exceeds UT")


def best_fit(request, analysis: RequestAnalysis, model: UtilityModel, schema: SystemSchema,
             *, enum_cap: int = 10**6, compiled=None) -> AdaptationResponse:
    """Exhaustive argmax of overall utility over the adaptable subspace.

    Ties go to the assignment changing fewest attributes, then to the one
    enumerated first.  ``analysis`` is accepted for symmetry with
    :func:`first_fit`; the search space does not depend on it.
    """
    request = _as_request(request)
    request.state.require_known()
    compiled = compiled or CompiledModel(model, schema)
    base = request.state.values_in(schema)
    slots = _ordered(schema, schema.adaptable)
    domains = [schema.attributes[i].domain for i in slots]
    size = 1
    for d in domains:
        size *= len(d)
    if size > enum_cap:
        raise SearchSpaceTooLarge(f"adaptable subspace has {size} states > {enum_cap}")
    current = [base[i] for i in slots]
    best = None
    best_key = None
    template = list(base)
    for combo in itertools.product(*domains):
        for i, v in zip(slots, combo):
            template[i] = v
        values = tuple(template)
        u = compiled.overall(values)
        if not u > model.ut:
            continue
        moves = sum(a != b for a, b in zip(combo, current))
        if best_key is None or u > best_key[0] or (u == best_key[0] and moves < best_key[1]):
            best, best_key = values, (u, moves)
    if best is None:
        raise NoFeasibleState("no adaptable assignment exceeds UT")
    return _generated(request, best, best_key[0], Provenance.BEST_FIT, schema)


def adapt(request: AdaptationRequest, kb: KnowledgeBase, model: UtilityModel,
          schema: SystemSchema, config: EngineConfig = EngineConfig(), *, compiled=None
          ) -> AdaptationResponse:
    """Full pipeline for one fully known request.

    ``model`` is used as given; apply config overrides beforehand with
    :meth:`EngineConfig.apply_to` (``AdaptationEngine`` does this).
    """
    request = _as_request(request)
    request.state.require_known()
    compiled = compiled or CompiledModel(model, schema)

    analysis = analyze_request(request.state, model, schema)
    if request.free:
        breakers = analysis.breakers | (request.free & frozenset(schema.adaptable))
        analysis = RequestAnalysis(
            breakers, analysis.antagonists - breakers, analysis.unadaptable_participants
        )

    request_case, included = formulate_request_case(request, analysis)
    qaf = build_qaf(request_case, request.state, kb, schema, config.beta, included,
                    config.usefulness_variant)
    if qaf:
        entry: QAFEntry = select_best(qaf)
        response = response_from_case(
            request, entry.case, model, schema,
            similarity=entry.similarity, usefulness=entry.usefulness, compiled=compiled,
        )
        if response is not None:
            return response

    search = best_fit if config.heuristic is Heuristic.BEST_FIT else first_fit
    response = search(request, analysis, model, schema, enum_cap=config.enum_cap, compiled=compiled)
    case = Case(case_id_for(response.state), response.state, response.utility, Origin.GENERATED)
    outcome = retain(case, kb, model)
    return replace(response, retained=outcome)


class AdaptationEngine:
    """Engine bound to one schema, utility model, knowledge base and config.

    Calls to :meth:`adapt` are serialized; waiting callers are served in
    order of their request's ``issued_at``.
    """

    def __init__(self, schema: SystemSchema, model: UtilityModel, kb: KnowledgeBase,
                 config: EngineConfig = EngineConfig()):
        self.schema = schema
        self.config = config
        self.model = config.apply_to(model)
        self.model.validate(schema)
        self.kb = kb
        self.compiled = CompiledModel(self.model, schema)
        self._cv = threading.Condition()
        self._waiting: list = []
        self._tickets = itertools.count()
        self._busy = False

    def adapt(self, request: AdaptationRequest) -> AdaptationResponse:
        ticket = (request.issued_at, next(self._tickets))
        with self._cv:
            heapq.heappush(self._waiting, ticket)
            while self._busy or self._waiting[0] != ticket:
                self._cv.wait()
            heapq.heappop(self._waiting)
            self._busy = True
        try:
            return adapt(request, self.kb, self.model, self.schema, self.config,
                         compiled=self.compiled)
        finally:
            with self._cv:
                self._busy = False
                self._cv.notify_all()
