"""Run the bundled scenarios that finish in seconds and print their summaries.

The sweep scenarios (fig5-single, fig6-double) take minutes; run them with
``ringbin run fig5-single`` when needed.
"""

import json
import tempfile

from ringbin.scenario import bundled_scenarios, load_scenario, run_scenario

with tempfile.TemporaryDirectory() as tmp:
    for name in ("fig2-spectrum", "fig7-fringe", "fig3-car"):
        summary = run_scenario(load_scenario(bundled_scenarios()[name]), f"{tmp}/{name}")
        summary.pop("peaks", None)
        print(name, json.dumps(summary, indent=1, sort_keys=True))
