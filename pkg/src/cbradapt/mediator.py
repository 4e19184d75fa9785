"""Adaptation mediator and a discrete-tick managed-system simulator.

Each tick the scenario's perturbations are applied to the simulated system,
the mediator reads its state, decides whether to issue an adaptation and, if
so, runs the engine and applies the response.  Everything that happened is
collected in a :class:`RunReport`.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .config import EngineConfig
from .engine import AdaptationEngine, AdaptationRequest, AdaptationResponse
from .errors import AdaptationError, ParseError
from .knowledge import KnowledgeBase, load_kb, save_kb
from .model import SystemSchema, SystemState, _read_json, validate_state
from .uncertainty import UncertaintyAssessment, assess, concretize, decide
from .utility import UtilityModel

log = logging.getLogger(__name__)


class ManagedSystem(Protocol):
    def read_state(self) -> SystemState: ...

    def apply(self, response: AdaptationResponse) -> None: ...


class SimulatedSystem:
    """Managed system whose state only changes through perturbations and
    applied responses."""

    def __init__(self, schema: SystemSchema, initial: SystemState):
        validate_state(initial, schema)
        self.schema = schema
        self._state = initial

    def read_state(self) -> SystemState:
        return self._state

    def apply(self, response: AdaptationResponse) -> None:
        self._state = response.state

    def perturb(self, changes) -> None:
        new = self._state.replace(changes)
        validate_state(new, self.schema)
        self._state = new


@dataclass(frozen=True)
class Event:
    tick: int
    changes: SystemState


@dataclass(frozen=True)
class Scenario:
    initial_state: SystemState
    ticks: int
    events: tuple = ()
    schema: str | None = None

    def __post_init__(self):
        ticks = [e.tick for e in self.events]
        if ticks != sorted(ticks):
            raise ParseError("scenario events must be ordered by tick")
        if any(t < 1 or t > self.ticks for t in ticks):
            raise ParseError(f"event ticks must lie in 1..{self.ticks}")

    def validate(self, schema: SystemSchema) -> None:
        validate_state(self.initial_state, schema)
        for e in self.events:
            validate_state(self.initial_state.replace(e.changes), schema)

    def events_at(self, tick: int):
        return [e for e in self.events if e.tick == tick]

    @classmethod
    def from_json(cls, data) -> "Scenario":
        try:
            events = tuple(
                Event(int(e["tick"]), SystemState.from_json(e["set"])) for e in data.get("events", ())
            )
            return cls(
                initial_state=SystemState.from_json(data["initial_state"]),
                ticks=int(data["ticks"]),
                events=events,
                schema=data.get("schema"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    return Scenario.from_json(_read_json(path))


@dataclass
class TickRecord:
    tick: int
    state: SystemState
    decision: str  # "healthy", "adapt" or "deferred"
    utility: float | None = None
    assessment: UncertaintyAssessment | None = None
    response: AdaptationResponse | None = None
    error: str | None = None
    latency_ms: float | None = None
    kb_size: int = 0

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "tick": self.tick,
            "state": self.state.to_json(),
            "decision": self.decision,
            "utility": self.utility,
            "assessment": self.assessment.to_json() if self.assessment else None,
            "response": self.response.to_json() if self.response else None,
            "provenance": self.response.provenance.value if self.response else None,
            "error": self.error,
            "kb_size": self.kb_size,
        }
        if timing:
            out["latency_ms"] = self.latency_ms
        return out


@dataclass
class RunReport:
    records: list = field(default_factory=list)

    @property
    def issued(self) -> list:
        return [r for r in self.records if r.decision == "adapt"]

    @property
    def failures(self) -> int:
        return sum(r.error is not None for r in self.records)

    def summary(self) -> dict:
        issued = self.issued
        done = [r for r in issued if r.response is not None]
        retrieved = sum(r.response.provenance.value == "retrieved" for r in done)
        latencies = [r.latency_ms for r in issued if r.latency_ms is not None]
        return {
            "ticks": len(self.records),
            "adaptations_issued": len(issued),
            "adaptations_succeeded": len(done),
            "retrievals": retrieved,
            "generations": len(done) - retrieved,
            "failures": self.failures,
            "kb_size": [r.kb_size for r in self.records],
            "mean_latency_ms": sum(latencies) / len(latencies) if latencies else None,
            "max_latency_ms": max(latencies) if latencies else None,
        }

    def to_json(self, timing: bool = True) -> dict:
        summary = self.summary()
        if not timing:
            summary.pop("mean_latency_ms")
            summary.pop("max_latency_ms")
        return {"ticks": [r.to_json(timing) for r in self.records], "summary": summary}

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0


class Mediator:
    """Monitors the managed system and executes engine responses."""

    def __init__(self, engine: AdaptationEngine):
        self.engine = engine
        self.config: EngineConfig = engine.config
        self.model: UtilityModel = engine.model
        self.schema = engine.schema

    def monitor(self, state: SystemState):
        """Returns ``(issue, assessment, utility)`` for an observed state."""
        if state.is_known:
            utility = self.engine.compiled.overall(state.values_in(self.schema))
            return utility <= self.model.ut + self.model.margin, None, utility
        a = assess(state, self.model, self.schema, self.config.kappa_cap,
                   compiled=self.engine.compiled)
        return decide(a, self.config), a, None

    def request_for(self, request: AdaptationRequest) -> AdaptationRequest:
        return concretize(request, self.model, self.schema, self.config.kappa_cap,
                          compiled=self.engine.compiled)

    def execute(self, response: AdaptationResponse, system: ManagedSystem) -> None:
        utility = self.engine.compiled.overall(response.state.values_in(self.schema))
        if not utility > self.model.ut:
            raise AdaptationError(f"refusing to apply response with utility {utility} <= UT")
        system.apply(response)


def tick(system: SimulatedSystem, mediator: Mediator, t: int, scenario: Scenario) -> TickRecord:
    for event in scenario.events_at(t):
        system.perturb(event.changes)
    state = system.read_state()
    record = TickRecord(t, state, "healthy", kb_size=len(mediator.engine.kb))
    try:
        issue, record.assessment, record.utility = mediator.monitor(state)
        if not issue:
            if record.assessment is not None:
                record.decision = "deferred"
            return record
        record.decision = "adapt"
        request = mediator.request_for(AdaptationRequest(f"tick-{t}", state, issued_at=float(t)))
        started = time.perf_counter()
        try:
            response = mediator.engine.adapt(request)
        finally:
            record.latency_ms = (time.perf_counter() - started) * 1000.0
        mediator.execute(response, system)
        record.response = response
    except AdaptationError as exc:
        log.warning("tick %d: %s", t, exc)
        record.error = f"{type(exc).__name__}: {exc}"
    record.kb_size = len(mediator.engine.kb)
    return record


def run_scenario(scenario: Scenario, schema: SystemSchema, model: UtilityModel,
                 config: EngineConfig = EngineConfig(), kb: KnowledgeBase | None = None,
                 kb_path=None) -> RunReport:
    """Run every tick of ``scenario``.

    The knowledge base comes from ``kb``, else from ``kb_path`` when that file
    exists, else starts empty.  When ``kb_path`` is given the final knowledge
    base is written back to it.
    """
    scenario.validate(schema)
    if kb is None:
        if kb_path is not None and Path(kb_path).exists():
            kb = load_kb(kb_path, schema, config.apply_to(model))
        else:
            kb = KnowledgeBase.empty(schema)
    engine = AdaptationEngine(schema, model, kb, config)
    mediator = Mediator(engine)
    system = SimulatedSystem(schema, scenario.initial_state)
    report = RunReport()
    for t in range(1, scenario.ticks + 1):
        report.records.append(tick(system, mediator, t, scenario))
    if kb_path is not None:
        save_kb(kb, kb_path)
    return report


def adapt_once(state: SystemState, schema: SystemSchema, model: UtilityModel,
               config: EngineConfig = EngineConfig(), kb: KnowledgeBase | None = None) -> dict:
    """One pass of monitor + adapt for a single observed state.

    Engine errors propagate to the caller.
    """
    validate_state(state, schema)
    engine = AdaptationEngine(schema, model, kb if kb is not None else KnowledgeBase.empty(schema), config)
    mediator = Mediator(engine)
    issue, assessment, utility = mediator.monitor(state)
    out = {
        "state": state.to_json(),
        "utility": utility,
        "assessment": assessment.to_json() if assessment else None,
        "issued": issue,
    }
    if not issue:
        out["note"] = "no adaptation needed"
        out["response"] = {"state": state.to_json(), "changed": []} if state.is_known else None
        return out
    request = mediator.request_for(AdaptationRequest("once", state, issued_at=0.0))
    out["response"] = engine.adapt(request).to_json()
    return out

