"""
Replaying the two published adaptation samples
==============================================

A six-tick scenario: an obstacle appears while the robot is fast (tick 2),
then the communication reading drops out (tick 5). The mediator monitors
every tick and calls the engine when needed.
"""

from cbradapt import data_path, load_config, load_schema, load_scenario, load_utility_model, run_scenario

schema = load_schema(data_path("robot.schema.json"))
model = load_utility_model(data_path("robot.utility.json"), schema)
config = load_config(data_path("robot.config.json"))
scenario = load_scenario(data_path("table3.scenario.json"))

report = run_scenario(scenario, schema, model, config)

# %%
# One line per tick. Uncertain ticks show the assessed uncertainty level.
for record in report.records:
    line = f"tick {record.tick}: {record.decision:8s}"
    if record.utility is not None:
        line += f" utility {record.utility:.3f}"
    if record.assessment is not None:
        a = record.assessment
        line += f" mu {a.mu:.3f} theta {a.theta:.3f} eta {a.eta:.5f}"
    if record.response is not None:
        r = record.response
        line += f" -> {r.provenance.value}, changed " + ", ".join(
            f"{n}={r.state[n]}" for n in sorted(r.changed))
    print(line)

# %%
print(report.summary())
