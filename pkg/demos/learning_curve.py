"""
Learning from experience
========================

A 200-tick scenario cycles through twelve recurring problem states,
starting from an empty knowledge base. Early on most answers are
generated by search; once they are stored, the same problems are answered
by retrieval, which is cheaper.
"""

from cbradapt import (
    KnowledgeBase, data_path, load_config, load_scenario, load_schema,
    load_utility_model, run_scenario,
)

schema = load_schema(data_path("robot.schema.json"))
model = load_utility_model(data_path("robot.utility.json"), schema)
config = load_config(data_path("robot.config.json"))
scenario = load_scenario(data_path("robot.cyclic.scenario.json"))

report = run_scenario(scenario, schema, model, config, kb=KnowledgeBase.empty(schema))

# %%
# Retrieval share, mean latency and knowledge base size per 20-tick window.
print("ticks      retrieved  mean ms   kb size")
for start in range(0, scenario.ticks, 20):
    window = [r for r in report.records[start:start + 20] if r.decision == "adapt"]
    hits = sum(r.response.provenance.value == "retrieved" for r in window if r.response)
    latency = sum(r.latency_ms for r in window) / len(window)
    print(f"{start + 1:3d}-{start + 20:<3d}    {hits / len(window):6.2f}   {latency:7.3f}   {window[-1].kb_size:4d}")

# %%
summary = report.summary()
print(f"{summary['retrievals']} retrieved, {summary['generations']} generated, {summary['failures']} failures")
