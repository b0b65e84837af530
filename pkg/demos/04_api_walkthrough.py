"""
The HTTP API, exercised in-process
==================================

`trevo serve <dataset-dir>` exposes the same functionality over JSON.  This
script drives the FastAPI app with an in-process test client, so it runs
without opening a port; point any HTTP client at a real server for the same
payloads.
"""

import json

from fastapi.testclient import TestClient

from trevo import SimConfig, make_dataset
from trevo.api import create_app

ds, _ = make_dataset(SimConfig(n_leaves=32, n_traits=4, seed=5))
client = TestClient(create_app(ds))

# dataset summary: counts, trait definitions, nested tree
body = client.get("/api/dataset").json()
print("leaves:", body["leaves"], "internal:", body["internal_count"])
print("traits:", [t["name"] for t in body["trait_defs"]])

# register a named selection, then bin it
sel = client.post("/api/selection", json={
    "name": "all", "origin": "clade", "node": ds.tree.root}).json()
print("selection mrca:", sel["mrca"], "leaves:", len(sel["leaf_ids"]))

bins = client.post("/api/bins", json={
    "selection": "all", "k": 4, "traits": ["trait00", "region"]}).json()
print("bin edges:", [round(e, 3) for e in bins["edges"]])
print("leaf bin histogram:",
      bins["summaries"]["trait00"][bins["leaf_bin"]]["histogram"]["counts"])

# rank all pairs under a preset; responses embed the pair trajectories
rank = client.post("/api/pattern/rank", json={
    "query": {"trait": "trait00", "preset": "convergence"}, "top": 3}).json()
print("total pairs:", rank["total_pairs"])
for pair in rank["pairs"]:
    print(" ", pair["pair"], "score", round(pair["score"], 4),
          "trajectory samples:",
          [len(t["samples"]) for t in pair["trajectories"]])

# errors are structured JSON with stable codes
err = client.post("/api/pattern/rank", json={"query": {"trait": "region"}})
print("error status", err.status_code, json.dumps(err.json()["code"]))

# the response schema ships with the package and is served too
schema = client.get("/api/schema").json()
print("schema definitions:", sorted(schema["$defs"]))
