"""
Quickstart: one adaptation on the robot
=======================================

Load the shipped robot description, score a troubled state, see which
attributes are to blame, and let the engine propose a fix.
"""

# %%
# The schema lists every attribute and its domain. The utility model scores
# a full state in [0, 1]; anything at or below the threshold needs fixing.
from cbradapt import (
    AdaptationRequest, KnowledgeBase, adapt, analyze_request, data_path,
    load_kb, load_schema, load_state, load_utility_model, overall_utility,
    state_space_size,
)

schema = load_schema(data_path("robot.schema.json"))
model = load_utility_model(data_path("robot.utility.json"), schema)
print("attributes:", schema.names)
print("possible states:", state_space_size(schema))

# %%
# An obstacle has appeared while the robot runs at high speed.
state = load_state(data_path("ad_req_1.state.json"))
print(f"utility {overall_utility(state, model):.3f} against threshold {model.ut}")

analysis = analyze_request(state, model, schema)
print("breakers:", sorted(analysis.breakers))
print("antagonists:", sorted(analysis.antagonists))

# %%
# With an empty knowledge base the engine has to search for a new state.
# The result is remembered, so the same request is answered from memory
# the second time.
kb = KnowledgeBase.empty(schema)
for attempt in (1, 2):
    response = adapt(AdaptationRequest(f"try-{attempt}", state), kb, model, schema)
    print(f"attempt {attempt}: {response.provenance.value:20s} utility {response.utility:.3f}"
          f"  changed {sorted(response.changed)}  kb size {len(kb)}")

# %%
# The seeded knowledge base already holds five known-good configurations.
seeded = load_kb(data_path("robot.kb.json"), schema, model)
response = adapt(AdaptationRequest("seeded", state), seeded, model, schema)
print(f"seeded KB: {response.provenance.value} from {response.source_case}"
      f" (similarity {response.similarity:.2f}), Speed -> {response.state['Speed']}")
