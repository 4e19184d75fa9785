import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbradapt import (
    UNCERTAIN,
    AttributeSchema,
    Case,
    SystemSchema,
    SystemState,
    count_uncertain,
    data_path,
    state_space_size,
    validate_state,
)
from cbradapt.errors import (
    MissingAttribute,
    SchemaError,
    UncertainInput,
    UnknownAttribute,
    ValueNotInDomain,
)


def test_robot_schema_matches_data_sheet(robot_schema):
    assert [len(a.domain) for a in robot_schema] == [4, 3, 3, 3, 5, 2, 2, 4]
    assert set(robot_schema.unadaptable) == {"Obstacles", "Power Meter"}
    assert robot_schema["Communication"].domain == ("OFF", "VHF", "X-band", "UHF")


def test_state_space_size_robot(robot_schema):
    assert state_space_size(robot_schema) == 8640


@pytest.mark.parametrize("sizes, expected", [((3,), 3), ((2, 2), 4)])
def test_state_space_size_small(sizes, expected):
    schema = SystemSchema(
        AttributeSchema(f"a{i}", tuple(f"v{j}" for j in range(k))) for i, k in enumerate(sizes)
    )
    assert state_space_size(schema) == expected


@given(st.lists(st.integers(1, 6), min_size=1, max_size=6), st.integers(1, 6))
def test_state_space_size_is_multiplicative(sizes, extra):
    def build(ks):
        return SystemSchema(
            AttributeSchema(f"a{i}", tuple(f"v{j}" for j in range(k))) for i, k in enumerate(ks)
        )

    assert state_space_size(build(sizes + [extra])) == state_space_size(build(sizes)) * extra


def test_seed_case_is_valid(robot_schema):
    kb = json.loads(data_path("robot.kb.json").read_text())
    c1 = SystemState.from_json(kb["cases"][0]["state"])
    validate_state(c1, robot_schema)


def test_missing_attribute(robot_schema, ad_req_1):
    state = SystemState({k: v for k, v in ad_req_1.items() if k != "Speed"})
    with pytest.raises(MissingAttribute):
        validate_state(state, robot_schema)


def test_value_not_in_domain(robot_schema, ad_req_1):
    with pytest.raises(ValueNotInDomain):
        validate_state(ad_req_1.replace({"Speed": "Warp"}), robot_schema)


def test_unknown_attribute(robot_schema, ad_req_1):
    with pytest.raises(UnknownAttribute):
        validate_state(ad_req_1.replace({"Altitude": "High"}), robot_schema)


def test_validate_state_exhaustive_small_schemas():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(1, 3)
        schema = SystemSchema(
            AttributeSchema(f"a{i}", tuple(f"v{j}" for j in range(rng.randint(1, 3))))
            for i in range(n)
        )
        symbols = ["v0", "v1", "v2", "bogus", UNCERTAIN, None]  # None = attribute absent
        for combo in itertools.product(symbols, repeat=n):
            state = SystemState({f"a{i}": v for i, v in enumerate(combo) if v is not None})
            expected = all(
                v is UNCERTAIN or (v is not None and v in schema[f"a{i}"].domain)
                for i, v in enumerate(combo)
            )
            try:
                validate_state(state, schema)
                ok = True
            except (MissingAttribute, ValueNotInDomain):
                ok = False
            assert ok == expected, (schema, state)


def test_count_uncertain(robot_schema, ad_req_1, ad_req_2):
    assert count_uncertain(ad_req_2) == 1
    assert count_uncertain(ad_req_1) == 0
    assert count_uncertain(SystemState({n: UNCERTAIN for n in robot_schema.names})) == 8


def test_uncertain_json_round_trip(ad_req_2):
    assert ad_req_2["Communication"] is UNCERTAIN
    assert SystemState.from_json(ad_req_2.to_json()) == ad_req_2


def test_state_is_hashable_and_immutable(ad_req_1):
    changed = ad_req_1.replace({"Speed": "Low"})
    assert ad_req_1["Speed"] == "High"
    assert len({ad_req_1, changed, ad_req_1.replace({})}) == 2


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(name="x", domain=()),
        dict(name="x", domain=("a", "a")),
        dict(name="x", domain=("a",), weight=0),
        dict(name="x", domain=("?",)),
    ],
)
def test_attribute_invariants(kwargs):
    with pytest.raises(SchemaError):
        AttributeSchema(**kwargs)


def test_schema_invariants():
    with pytest.raises(SchemaError):
        SystemSchema([AttributeSchema("x", ("a",)), AttributeSchema("x", ("b",))])
    with pytest.raises(SchemaError):
        SystemSchema([AttributeSchema("x", ("a",), adaptable=False)])


def test_case_rejects_uncertain_and_bad_utility(ad_req_1, ad_req_2):
    with pytest.raises(UncertainInput):
        Case("c", ad_req_2, 0.9)
    with pytest.raises(ValueError):
        Case("c", ad_req_1, 1.5)


def test_fingerprint_ignores_weights(robot_schema):
    reweighted = SystemSchema(
        AttributeSchema(a.name, a.domain, a.kind, a.adaptable, a.weight + 1) for a in robot_schema
    )
    assert reweighted.fingerprint() == robot_schema.fingerprint()
    assert SystemSchema.from_json(robot_schema.to_json()) == robot_schema
