"""Capture service payloads for the frontend's drill-determinism tests.

Replays a five-step drill against the fixture snapshot and records, per
step: the clicked cell path, the request the explorer must produce, the
library-canonical response payload, and a second capture of the same
query issued directly over HTTP.  The frontend test suite replays the
clicks through its state machine and must reproduce these grids
verbatim.

Run:  python3 scripts/make_ui_fixtures.py
"""

import copy
import json
import pathlib

from fastapi.testclient import TestClient

from incube.cube import build_facts
from incube.service import create_app, query_payload, schema_payload
from incube.codebook import load_tables
from incube.synthetic import generate_synthetic

OUT = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

BASE_REQUEST = {
    "group_by": [{"hierarchy": "space", "depth": 1}, {"hierarchy": "time", "depth": 1}],
    "filters": [],
    "measures": ["incident_count", "nkill"],
}

LEVELS = {"space": ["region", "country", "provstate", "city"], "time": ["year", "month", "day"]}


def drill_once(request: dict, cell_path: list[str]) -> dict:
    """Mirror of the explorer's drill transform, used to pick the clicks."""
    for i, entry in enumerate(request["group_by"]):
        levels = LEVELS[entry["hierarchy"]]
        if entry["depth"] < len(levels):
            offset = sum(g["depth"] for g in request["group_by"][:i])
            member = cell_path[offset + entry["depth"] - 1]
            dim = f"{entry['hierarchy']}.{levels[entry['depth'] - 1]}"
            out = copy.deepcopy(request)
            out["group_by"][i] = {"hierarchy": entry["hierarchy"], "depth": entry["depth"] + 1}
            out["filters"] = out["filters"] + [{"dim": dim, "members": [member]}]
            return out
    raise SystemExit("nothing left to drill")


def main() -> None:
    tables = load_tables()
    table = build_facts(generate_synthetic(seed=7, n=200), tables)
    client = TestClient(create_app(table=table))

    request = copy.deepcopy(BASE_REQUEST)
    response = query_payload(table, request)
    steps = []
    for _ in range(5):
        cells = response["cells"]
        click = cells[1]["path"] if len(cells) > 1 else cells[0]["path"]
        request = drill_once(request, list(click))
        response = query_payload(table, request)
        direct = client.post("/query", json=request)
        assert direct.status_code == 200
        steps.append(
            {
                "click": list(click),
                "request": request,
                "response": response,
                "direct_response": direct.json(),
            }
        )

    OUT.mkdir(parents=True, exist_ok=True)
    fixture = {
        "schema": schema_payload(table, tables),
        "base_request": BASE_REQUEST,
        "base_response": query_payload(table, BASE_REQUEST),
        "steps": steps,
    }
    path = OUT / "drill_fixture.json"
    path.write_text(json.dumps(fixture, indent=1, sort_keys=True))
    print(f"wrote {path} with {len(steps)} drill steps")


if __name__ == "__main__":
    main()
