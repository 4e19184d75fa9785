"""
Deciding under uncertainty
==========================

When some attributes cannot be observed, the mediator enumerates every
state the system could be in, measures how many of them are troubled and
combines that with the share of unknown attributes into one level. The
configured paradigm then decides whether to adapt.
"""

from cbradapt import (
    UNCERTAIN, AdaptationRequest, EngineConfig, KnowledgeBase, adapt, assess,
    concretize, data_path, decide, enumerate_kappa, load_schema, load_state,
    load_utility_model, overall_utility,
)

schema = load_schema(data_path("robot.schema.json"))
model = load_utility_model(data_path("robot.utility.json"), schema)
state = load_state(data_path("ad_req_2.state.json"))
print("unknown:", sorted(state.uncertain))

# %%
# Every completion of the unknown link, and its utility.
for member in enumerate_kappa(state, schema):
    print(f"  Communication={member['Communication']:7s} utility {overall_utility(member, model):.3f}")

a = assess(state, model, schema)
print(f"mu={a.mu} theta={a.theta} eta={a.eta}")

# %%
# The three paradigms. Hybrid adapts only when the level is at or below
# its threshold, so threshold 1 acts like pessimistic and 0 like optimistic.
for config in (EngineConfig(paradigm="optimistic"), EngineConfig(paradigm="pessimistic"),
               *(EngineConfig(paradigm="hybrid", alpha_threshold=t) for t in (0.0, 0.3, 0.5, 1.0))):
    label = config.paradigm.value + (f"({config.alpha_threshold})" if config.paradigm.value == "hybrid" else "")
    print(f"{label:16s} issue={decide(a, config)}")

# %%
# Before the engine sees the request, the unknown link is planned for its
# worst case and handed to the engine as a free variable.
request = concretize(AdaptationRequest("dropout", state), model, schema)
print("planned as:", request.state["Communication"], "free:", sorted(request.free))
response = adapt(request, KnowledgeBase.empty(schema), model, schema)
print(f"response: Communication={response.state['Communication']} utility {response.utility:.3f}")

# %%
# An unobservable environment attribute is fixed at its worst value instead.
healthy = state.replace({"Communication": "UHF", "Obstacles": UNCERTAIN})
print("Obstacles planned as:", concretize(AdaptationRequest("blind", healthy), model, schema).state["Obstacles"])
