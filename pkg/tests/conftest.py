import itertools
import random

import pytest

from cbradapt import (
    AttributeSchema,
    Case,
    EngineConfig,
    KnowledgeBase,
    SystemSchema,
    SystemState,
    UtilityFunction,
    UtilityModel,
    data_path,
    load_config,
    load_kb,
    load_schema,
    load_state,
    load_utility_model,
)
from cbradapt.model import case_id_for
from cbradapt.utility import And, Atom, Not, Or


@pytest.fixture(scope="session")
def robot_schema():
    return load_schema(data_path("robot.schema.json"))


@pytest.fixture(scope="session")
def robot_model(robot_schema):
    return load_utility_model(data_path("robot.utility.json"), robot_schema)


@pytest.fixture(scope="session")
def robot_config():
    return load_config(data_path("robot.config.json"))


@pytest.fixture
def robot_kb(robot_schema, robot_model):
    return load_kb(data_path("robot.kb.json"), robot_schema, robot_model)


@pytest.fixture(scope="session")
def ad_req_1():
    return load_state(data_path("ad_req_1.state.json"))


@pytest.fixture(scope="session")
def ad_req_2():
    return load_state(data_path("ad_req_2.state.json"))


def all_states(schema):
    for values in itertools.product(*(a.domain for a in schema)):
        yield SystemState.from_values(schema, values)


def random_schema(rng, max_attrs=5, max_values=4, min_attrs=1):
    n = rng.randint(min_attrs, max_attrs)
    adaptable = [rng.random() < 0.7 for _ in range(n)]
    if not any(adaptable):
        adaptable[rng.randrange(n)] = True
    return SystemSchema(
        AttributeSchema(
            name=f"a{i}",
            domain=tuple(f"v{j}" for j in range(rng.randint(1, max_values))),
            kind=rng.choice(["nominal", "ordinal"]),
            adaptable=adaptable[i],
            weight=rng.uniform(0.5, 3.0),
        )
        for i in range(n)
    )


def random_condition(rng, schema, names, depth=2):
    r = rng.random()
    if depth == 0 or r < 0.5:
        name = rng.choice(names)
        return Atom(name, rng.choice(schema[name].domain))
    if r < 0.7:
        return And(tuple(random_condition(rng, schema, names, depth - 1) for _ in range(2)))
    if r < 0.9:
        return Or(tuple(random_condition(rng, schema, names, depth - 1) for _ in range(2)))
    return Not(random_condition(rng, schema, names, depth - 1))


def random_value(rng):
    r = rng.random()
    if r < 0.03:
        return 0.0
    return round(rng.random(), 3)


def random_model(rng, schema, max_functions=4):
    functions = []
    for k in range(rng.randint(1, max_functions)):
        names = rng.sample(schema.names, rng.randint(1, min(3, len(schema))))
        rules = tuple(
            (random_condition(rng, schema, names), random_value(rng))
            for _ in range(rng.randint(0, 3))
        )
        functions.append(
            UtilityFunction(
                name=f"f{k}",
                involved=frozenset(names),
                rules=rules,
                default=random_value(rng),
                weight=rng.uniform(0.5, 3.0),
            )
        )
    return UtilityModel(tuple(functions), ut=round(rng.uniform(0.2, 0.8), 3))


def random_state(rng, schema):
    return SystemState({a.name: rng.choice(a.domain) for a in schema})


def random_kb(rng, schema, model, max_cases=3):
    kb = KnowledgeBase.empty(schema)
    seen = set()
    cases = []
    for _ in range(rng.randint(0, max_cases)):
        state = random_state(rng, schema)
        if state in seen:
            continue
        seen.add(state)
        cases.append(Case(case_id_for(state), state, rng.uniform(model.ut + 1e-6, 1.0)))
    return KnowledgeBase(kb.schema_fingerprint, cases)


def random_instance(seed, **kw):
    rng = random.Random(seed)
    schema = random_schema(rng, **kw)
    model = random_model(rng, schema)
    return rng, schema, model


@pytest.fixture
def default_config():
    return EngineConfig()
