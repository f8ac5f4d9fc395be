"""Drive the HTTP query facade in-process (no sockets needed).

Run:  python3 demos/04_http_service.py

For a real server:  incube serve --snapshot cube.icq --addr 127.0.0.1:8765
"""

import json
import tempfile

from fastapi.testclient import TestClient

from incube import build_facts, generate_synthetic, snapshot_save
from incube.service import create_app

with tempfile.NamedTemporaryFile(suffix=".icq") as handle:
    snapshot_save(build_facts(generate_synthetic(seed=7, n=800)), handle.name)
    client = TestClient(create_app(snapshot_path=handle.name))

    # schema drives UI pickers: hierarchies, level member counts, measures
    schema = client.get("/schema").json()
    print("measures:", schema["measures"][:5], "...")
    print("space levels:", [(l["name"], l["members"]) for l in
                            next(h for h in schema["hierarchies"] if h["name"] == "space")["levels"]])

    # the query body mirrors the library's CellQuery
    body = {
        "group_by": [{"hierarchy": "space", "depth": 1}],
        "filters": [{"dim": "crit1", "tristate": "yes"}],
        "measures": ["incident_count", "nkill"],
    }
    response = client.post("/query", json=body).json()
    print(f"\nby region with crit1=Yes (total {response['total']}):")
    for cell in response["cells"]:
        print(" ", cell["path"][0], cell["values"]["incident_count"]["sum"], "incidents,",
              cell["values"]["nkill"]["sum"], "killed",
              f"({cell['values']['nkill']['unknown']} unknown)")

    # mining endpoints transport the miners; inputs travel inline
    rules = client.post("/mine/rules", json={
        "transactions": [["a", "b"], ["a", "b"], ["a", "c"], ["b", "c"]],
        "min_support": 0.5, "min_confidence": 0.6,
    }).json()
    print("\nrules over the 4-transaction example:",
          [(r["antecedent"], r["consequent"]) for r in rules["rules"]])

    outliers = client.post("/mine/outliers", json={
        "query": {"group_by": [{"hierarchy": "time", "depth": 1}]},
        "measure": "incident_count",
        "threshold": 2.5,
    }).json()
    flagged = [r for r in outliers["outliers"] if r["flagged"]]
    print(f"outliers over yearly counts: {len(flagged)} flagged")

    # error contract: 400 malformed, 422 domain problems
    print("\nmalformed body ->", client.post("/query", content=b"{nope").status_code)
    print("unknown measure ->", client.post("/query", json={"measures": ["foo"]}).status_code)
    print("responses are replay-identical:",
          client.post("/query", json=body).content == client.post("/query", json=body).content)
