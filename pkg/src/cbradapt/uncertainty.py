"""Run-time uncertainty: quantify it, decide whether to adapt, concretize.

For a state with unobserved attributes, ``kappa`` is the set of fully known
states it could be.  ``mu`` is the fraction of ``kappa`` that needs
adaptation, ``theta`` the fraction of attributes that are uncertain, and
``eta = 1 - (1 - mu) * (1 - theta)`` the overall uncertainty level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

from .config import EngineConfig, Paradigm
from .engine import AdaptationRequest
from .errors import KappaTooLarge
from .model import UNCERTAIN, SystemSchema, SystemState
from .utility import CompiledModel, UtilityModel


@dataclass(frozen=True)
class UncertaintyAssessment:
    kappa_size: int
    r: int
    mu: float
    theta: float
    eta: float

    def to_json(self) -> dict:
        return {"kappa_size": self.kappa_size, "r": self.r, "mu": self.mu,
                "theta": self.theta, "eta": self.eta}


def overall_uncertainty(mu: float, theta: float) -> float:
    return 1.0 - (1.0 - mu) * (1.0 - theta)


def kappa_size(state: SystemState, schema: SystemSchema) -> int:
    return math.prod(len(schema[n].domain) for n in state.uncertain)


def iter_kappa(state: SystemState, schema: SystemSchema, kappa_cap: int = 10**6):
    size = kappa_size(state, schema)
    if size > kappa_cap:
        raise KappaTooLarge(f"|kappa| = {size} exceeds cap {kappa_cap}")
    unknown = [a.name for a in schema if state[a.name] is UNCERTAIN]
    for combo in itertools.product(*(schema[n].domain for n in unknown)):
        yield state.replace(dict(zip(unknown, combo)))


def enumerate_kappa(state: SystemState, schema: SystemSchema, kappa_cap: int = 10**6) -> list[SystemState]:
    """Every completion of ``state``, in schema order x domain order."""
    return list(iter_kappa(state, schema, kappa_cap))


def assess(state: SystemState, model: UtilityModel, schema: SystemSchema,
           kappa_cap: int = 10**6, *, compiled=None) -> UncertaintyAssessment:
    compiled = compiled or CompiledModel(model, schema)
    gate = model.ut + model.margin
    size = 0
    r = 0
    for member in iter_kappa(state, schema, kappa_cap):
        size += 1
        if compiled.overall(member.values_in(schema)) <= gate:
            r += 1
    mu = r / size
    theta = len(state.uncertain) / len(schema)
    return UncertaintyAssessment(size, r, mu, theta, overall_uncertainty(mu, theta))


def decide(assessment: UncertaintyAssessment, config: EngineConfig) -> bool:
    """Whether the mediator should issue an adaptation.

    With nothing uncertain (``theta == 0``) every paradigm reduces to the
    plain monitoring gate.  Otherwise: pessimistic always issues, optimistic
    never does, hybrid issues iff ``eta <= alpha_threshold``.
    """
    if assessment.theta == 0:
        return assessment.mu > 0
    if config.paradigm is Paradigm.PESSIMISTIC:
        return True
    if config.paradigm is Paradigm.OPTIMISTIC:
        return False
    return assessment.eta <= config.alpha_threshold


def concretize(request: AdaptationRequest, model: UtilityModel, schema: SystemSchema,
               kappa_cap: int = 10**6, *, compiled=None) -> AdaptationRequest:
    """Turn an uncertain request into a fully known one the engine accepts.

    Uncertain values are filled from the worst member of kappa (lowest
    overall utility, first in enumeration order on ties).  Uncertain
    adaptable attributes are then marked free so the engine reassigns them;
    uncertain unadaptable attributes stay at their worst case.
    """
    uncertain = request.state.uncertain
    if not uncertain:
        return request
    compiled = compiled or CompiledModel(model, schema)
    worst = min(
        iter_kappa(request.state, schema, kappa_cap),
        key=lambda s: compiled.overall(s.values_in(schema)),
    )
    free = frozenset(n for n in uncertain if schema[n].adaptable)
    return replace(
        request,
        state=worst,
        free=request.free | free,
        uncertain=request.uncertain | frozenset(uncertain),
    )
