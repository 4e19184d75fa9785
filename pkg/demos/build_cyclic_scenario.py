"""
Building the cyclic scenario
============================

Regenerates ``robot.cyclic.scenario.json``. The pool holds ten fully
observed problem states for which first-fit search is expensive (at least
150 candidate evaluations), drawn with a fixed seed, plus two states with
an unobserved communication link. The 200 ticks cycle through the pool.

Run with ``--write`` to overwrite the shipped file; otherwise the scenario
is printed.
"""

import itertools
import json
import random
import sys

from cbradapt import (
    SystemState, analyze_request, data_path, first_fit, load_schema,
    load_state, load_utility_model, needs_adaptation,
)
from cbradapt.utility import CompiledModel

TICKS, DRAWN, MIN_EVALUATIONS, SEED = 200, 10, 150, 7

schema = load_schema(data_path("robot.schema.json"))
model = load_utility_model(data_path("robot.utility.json"), schema)


# %%
# Count how many candidate states first-fit scores before it succeeds.
class CountingModel(CompiledModel):
    evaluations = 0

    def overall(self, values):
        self.evaluations += 1
        return super().overall(values)


def search_cost(state):
    counter = CountingModel(model, schema)
    first_fit(state, analyze_request(state, model, schema), model, schema, compiled=counter)
    return counter.evaluations


expensive = []
for values in itertools.product(*(a.domain for a in schema)):
    state = SystemState.from_values(schema, values)
    if needs_adaptation(state, model) and search_cost(state) >= MIN_EVALUATIONS:
        expensive.append(state)
print(f"{len(expensive)} expensive problem states", file=sys.stderr)

# %%
healthy = {
    "Communication": "UHF", "Power Mode": "Medium Power", "Power Meter": "High", "Speed": "Medium",
    "Video Quality": "Medium", "Data Backup": "Off", "Obstacles": "False",
    "Encryption": "Video Encryption Algorithm",
}
pool = [s.to_json() for s in random.Random(SEED).sample(expensive, DRAWN)]
pool += [load_state(data_path("ad_req_2.state.json")).to_json(), dict(healthy, Communication="?")]

scenario = {
    "description": (
        f"{TICKS} ticks cycling through a fixed pool of {len(pool)} recurring problem states. "
        f"Ten are fully observed states drawn (seed {SEED}) from the robot states whose first-fit "
        f"search must evaluate at least {MIN_EVALUATIONS} candidates under the reference utility model; "
        "two have an unobserved communication link. Every tick overwrites the full state, so each "
        "pool member recurs exactly."
    ),
    "schema": "robot.schema.json",
    "initial_state": healthy,
    "ticks": TICKS,
    "events": [{"tick": t, "set": pool[(t - 1) % len(pool)]} for t in range(1, TICKS + 1)],
}

if "--write" in sys.argv:
    with open(data_path("robot.cyclic.scenario.json"), "w", encoding="utf-8") as fh:
        json.dump(scenario, fh, indent=1)
else:
    json.dump(scenario, sys.stdout, indent=1)
