import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_instance, random_state

from cbradapt import (
    UNCERTAIN,
    AdaptationRequest,
    AttributeSchema,
    EngineConfig,
    SystemSchema,
    SystemState,
    UtilityFunction,
    UtilityModel,
    adapt,
    assess,
    concretize,
    decide,
    enumerate_kappa,
    needs_adaptation,
    overall_uncertainty,
    overall_utility,
    state_space_size,
)
from cbradapt.errors import KappaTooLarge
from cbradapt.uncertainty import UncertaintyAssessment
from cbradapt.utility import Atom


def test_kappa_ad_req_2(robot_schema, ad_req_2):
    kappa = enumerate_kappa(ad_req_2, robot_schema)
    assert [s["Communication"] for s in kappa] == ["OFF", "VHF", "X-band", "UHF"]
    assert all(s.replace({"Communication": UNCERTAIN}) == ad_req_2 for s in kappa)


def test_kappa_known_state_is_singleton(robot_schema, ad_req_1):
    assert enumerate_kappa(ad_req_1, robot_schema) == [ad_req_1]


def test_kappa_product_of_two():
    schema = SystemSchema([AttributeSchema("a", ("x", "y")), AttributeSchema("b", ("p", "q", "r"))])
    kappa = enumerate_kappa(SystemState(a=UNCERTAIN, b=UNCERTAIN), schema)
    assert [tuple(s.values()) for s in kappa] == [
        ("x", "p"), ("x", "q"), ("x", "r"), ("y", "p"), ("y", "q"), ("y", "r"),
    ]


def test_kappa_cap(robot_schema):
    everything = SystemState({n: UNCERTAIN for n in robot_schema.names})
    with pytest.raises(KappaTooLarge):
        enumerate_kappa(everything, robot_schema, kappa_cap=8639)
    assert len(enumerate_kappa(everything, robot_schema)) == 8640


def test_assess_healthy_known(robot_schema, robot_model, robot_kb):
    a = assess(robot_kb.cases[4].state, robot_model, robot_schema)
    assert (a.kappa_size, a.r, a.mu, a.theta, a.eta) == (1, 0, 0.0, 0.0, 0.0)


def test_assess_ad_req_2(robot_schema, robot_model, ad_req_2):
    a = assess(ad_req_2, robot_model, robot_schema)
    assert a.kappa_size == 4 and a.r == 1
    assert a.mu == 0.25 and a.theta == 0.125
    assert a.eta == pytest.approx(0.34375, abs=1e-15)
    off = ad_req_2.replace({"Communication": "OFF"})
    assert needs_adaptation(off, robot_model)


def test_eta_absorbing_at_mu_one():
    for theta in (0.0, 0.3, 1.0):
        assert overall_uncertainty(1.0, theta) == 1.0


def test_eta_grid_properties():
    grid = [i / 100 for i in range(101)]
    for i, mu in enumerate(grid):
        for j, theta in enumerate(grid):
            eta = overall_uncertainty(mu, theta)
            assert 0.0 <= eta <= 1.0
            assert (eta == 0.0) == (mu == 0.0 and theta == 0.0)
            if i:
                assert eta >= overall_uncertainty(grid[i - 1], theta)
            if j:
                assert eta >= overall_uncertainty(mu, grid[j - 1])


@given(st.floats(0, 1), st.floats(0, 1))
def test_eta_matches_formula(mu, theta):
    assert overall_uncertainty(mu, theta) == pytest.approx(1 - (1 - mu) * (1 - theta), abs=1e-15)


def _assessment(mu, theta):
    return UncertaintyAssessment(4, round(mu * 4), mu, theta, overall_uncertainty(mu, theta))


def test_decide_examples():
    ad_req_2 = _assessment(0.25, 0.125)
    assert decide(ad_req_2, EngineConfig(paradigm="hybrid", alpha_threshold=0.5))
    assert not decide(ad_req_2, EngineConfig(paradigm="hybrid", alpha_threshold=0.3))
    assert decide(_assessment(0.0, 0.5), EngineConfig(paradigm="pessimistic"))
    assert not decide(_assessment(1.0, 0.5), EngineConfig(paradigm="optimistic"))


def test_decide_known_state_uses_monitoring_gate():
    for paradigm in ("optimistic", "pessimistic", "hybrid"):
        cfg = EngineConfig(paradigm=paradigm)
        assert decide(UncertaintyAssessment(1, 1, 1.0, 0.0, 1.0), cfg)
        assert not decide(UncertaintyAssessment(1, 0, 0.0, 0.0, 0.0), cfg)


def test_paradigm_limits_on_random_states():
    for seed in range(100):
        rng, schema, model = random_instance(seed)
        for _ in range(5):
            state = random_state(rng, schema)
            state = state.replace({n: UNCERTAIN for n in schema.names if rng.random() < 0.4})
            a = assess(state, model, schema)
            assert decide(a, EngineConfig(paradigm="hybrid", alpha_threshold=1.0)) == decide(
                a, EngineConfig(paradigm="pessimistic"))
            assert decide(a, EngineConfig(paradigm="hybrid", alpha_threshold=0.0)) == decide(
                a, EngineConfig(paradigm="optimistic"))


def test_kappa_size_and_mu_recount():
    for seed in range(100):
        rng, schema, model = random_instance(seed)
        state = random_state(rng, schema)
        state = state.replace({n: UNCERTAIN for n in schema.names if rng.random() < 0.5})
        kappa = enumerate_kappa(state, schema)
        projected = [AttributeSchema(a.name, a.domain) for a in schema if a.name in state.uncertain]
        assert len(kappa) == (state_space_size(SystemSchema(projected)) if projected else 1)
        a = assess(state, model, schema)
        r = sum(overall_utility(s, model) <= model.ut + model.margin for s in kappa)
        assert (a.kappa_size, a.r) == (len(kappa), r)
        assert a.mu == r / len(kappa)
        assert a.theta == len(state.uncertain) / len(schema)


def test_concretize_known_is_identity(robot_schema, robot_model, ad_req_1):
    request = AdaptationRequest("r", ad_req_1)
    assert concretize(request, robot_model, robot_schema) is request


def test_concretize_adaptable_becomes_free(robot_schema, robot_model, robot_kb, ad_req_2):
    request = concretize(AdaptationRequest("r", ad_req_2), robot_model, robot_schema)
    assert request.state["Communication"] == "OFF"  # the worst completion
    assert "Communication" in request.free and "Communication" in request.uncertain
    resp = adapt(request, robot_kb, robot_model, robot_schema)
    assert resp.state["Communication"] != "OFF"
    assert resp.utility > 0.5
    assert "Communication" in resp.changed


def test_concretize_unadaptable_takes_worst_case(robot_schema, robot_model, robot_kb):
    healthy = robot_kb.cases[4].state
    request = concretize(AdaptationRequest("r", healthy.replace({"Obstacles": UNCERTAIN})),
                         robot_model, robot_schema)
    worst = min(("True", "False"), key=lambda v: overall_utility(healthy.replace({"Obstacles": v}), robot_model))
    assert request.state["Obstacles"] == worst == "True"
    assert "Obstacles" not in request.free and "Obstacles" in request.uncertain


def test_concretize_worst_case_on_toy_model():
    schema = SystemSchema([
        AttributeSchema("knob", ("a", "b")),
        AttributeSchema("env", ("calm", "storm"), adaptable=False),
    ])
    fn = UtilityFunction("f", {"env"}, ((Atom("env", "storm"), 0.2),), default=0.9)
    model = UtilityModel((fn,), ut=0.5)
    request = concretize(AdaptationRequest("r", SystemState(knob="a", env=UNCERTAIN)), model, schema)
    assert request.state["env"] == "storm"
