import random
import threading

import jsonschema
import pytest
from fastapi.testclient import TestClient

from trevo.api import create_app, dataset_json, load_api_schema, rank_json
from trevo.patterns import PatternQuery, score_all_pairs
from trevo.synth import SimConfig, make_dataset

SCHEMA = load_api_schema()


def validate(payload, def_name):
    jsonschema.validate(
        payload, {"$ref": f"#/$defs/{def_name}", "$defs": SCHEMA["$defs"]})


@pytest.fixture(scope="module")
def ds():
    dataset, _ = make_dataset(SimConfig(n_leaves=20, n_traits=3, seed=14))
    return dataset


@pytest.fixture()
def client(ds):
    return TestClient(create_app(ds))


def test_get_dataset(client, ds):
    resp = client.get("/api/dataset")
    assert resp.status_code == 200
    body = resp.json()
    validate(body, "dataset")
    assert body == dataset_json(ds)
    assert body["leaves"] == 20
    assert body["tree"]["id"] == ds.tree.root


def test_get_schema(client):
    resp = client.get("/api/schema")
    assert resp.status_code == 200
    assert resp.json() == SCHEMA


def test_no_dataset_conflict():
    empty = TestClient(create_app(None))
    resp = empty.get("/api/dataset")
    assert resp.status_code == 409
    body = resp.json()
    validate(body, "error")
    assert body["code"] == "NO_DATASET"


def test_selection_clade(client, ds):
    resp = client.post("/api/selection", json={
        "name": "all", "origin": "clade", "node": ds.tree.root})
    assert resp.status_code == 200
    body = resp.json()
    validate(body, "selection")
    assert body["mrca"] == ds.tree.root
    assert len(body["leaf_ids"]) == 20


def test_selection_duplicate_name(client, ds):
    req = {"name": "dup", "origin": "clade", "node": ds.tree.root}
    assert client.post("/api/selection", json=req).status_code == 200
    resp = client.post("/api/selection", json=req)
    assert resp.status_code == 409
    assert resp.json()["code"] == "DUPLICATE_SELECTION"


def test_selection_trait_filter(client):
    resp = client.post("/api/selection", json={
        "name": "west", "origin": "trait_filter", "trait": "region",
        "states": ["west"]})
    assert resp.status_code == 200
    validate(resp.json(), "selection")


def test_selection_errors(client):
    resp = client.post("/api/selection", json={
        "name": "x", "origin": "trait_filter", "trait": "nope",
        "states": ["a"]})
    assert resp.status_code == 404
    assert resp.json()["code"] == "UNKNOWN_TRAIT"
    resp = client.post("/api/selection", json={
        "name": "x", "origin": "brush", "leaf_ids": []})
    assert resp.status_code == 422
    assert resp.json()["code"] == "EMPTY_SELECTION"
    resp = client.post("/api/selection", json={
        "name": "x", "origin": "teleport"})
    assert resp.status_code == 422
    assert resp.json()["code"] == "INVALID_REQUEST"


def test_bins_round_trip(client, ds):
    client.post("/api/selection", json={
        "name": "all", "origin": "clade", "node": ds.tree.root})
    resp = client.post("/api/bins", json={
        "selection": "all", "k": 4, "traits": ["trait00", "region"]})
    assert resp.status_code == 200
    body = resp.json()
    validate(body, "bins")
    assert body["leaf_bin"] == 4
    assert len(body["summaries"]["trait00"]) == 5
    leaf_summary = body["summaries"]["trait00"][4]
    assert leaf_summary["histogram"] is not None
    assert body["summaries"]["region"][4]["states"] is not None


def test_bins_unknown_selection(client):
    resp = client.post("/api/bins", json={"selection": "ghost",
                                          "traits": ["trait00"]})
    assert resp.status_code == 404
    assert resp.json()["code"] == "UNKNOWN_SELECTION"


def test_bins_k_bounds(client, ds):
    client.post("/api/selection", json={
        "name": "all", "origin": "clade", "node": ds.tree.root})
    for k in (0, 33):
        resp = client.post("/api/bins", json={
            "selection": "all", "k": k, "traits": ["trait00"]})
        assert resp.status_code == 422
        assert resp.json()["code"] == "INVALID_REQUEST"


def test_rank_matches_in_process(client, ds):
    resp = client.post("/api/pattern/rank", json={
        "query": {"trait": "trait00", "preset": "convergence"}, "top": 10})
    assert resp.status_code == 200
    body = resp.json()
    validate(body, "rank")
    ranked = score_all_pairs(ds, PatternQuery("trait00",
                                              preset_id="convergence"))
    assert body == rank_json(ds, ranked, "trait00", 10)
    assert len(body["pairs"]) == 10
    assert body["total_pairs"] == 20 * 19 // 2


def test_rank_custom_query_overrides(client):
    resp = client.post("/api/pattern/rank", json={
        "query": {"trait": "trait01", "preset": "convergence",
                  "targets": {"closeness": "ignore"},
                  "weights": {"delta": 2.0}, "alpha": 0.3},
        "top": 5})
    assert resp.status_code == 200
    body = resp.json()
    validate(body, "rank")
    for pair in body["pairs"]:
        assert "closeness" not in pair["desirabilities"]


def test_rank_errors(client):
    resp = client.post("/api/pattern/rank", json={
        "query": {"trait": "region"}})
    assert resp.status_code == 422
    assert resp.json()["code"] == "KIND_MISMATCH"
    resp = client.post("/api/pattern/rank", json={
        "query": {"trait": "trait00", "preset": "nope"}})
    assert resp.status_code == 422
    assert resp.json()["code"] == "INVALID_QUERY"
    resp = client.post("/api/pattern/rank", json={
        "query": {"trait": "trait00", "alpha": 7.0}})
    assert resp.status_code == 422
    assert resp.json()["code"] == "INVALID_QUERY"


def test_concurrent_selection_registration(client, ds):
    # many threads race on the same name: exactly one wins
    results = []

    def register():
        resp = client.post("/api/selection", json={
            "name": "race", "origin": "clade", "node": ds.tree.root})
        results.append(resp.status_code)

    threads = [threading.Thread(target=register) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == [200] + [409] * 15


def test_fuzz_responses_always_schema_valid(client, ds):
    rng = random.Random(31)
    traits = [t.name for t in ds.trait_defs]
    leaves = list(ds.tree.leaves)
    nodes = list(ds.tree.nodes)
    ok = 0
    for i in range(200):
        kind = rng.randrange(3)
        if kind == 0:
            resp = client.post("/api/selection", json={
                "name": f"s{i}", "origin": rng.choice(
                    ["clade", "trait_filter", "brush"]),
                "node": rng.choice(nodes + ["bogus"]),
                "trait": rng.choice(traits),
                "states": rng.sample(["west", "east", "bogus"],
                                     rng.randint(0, 2)) or None,
                "range": [rng.uniform(-3, 0), rng.uniform(0, 3)]
                if rng.random() < 0.5 else None,
                "leaf_ids": rng.sample(leaves, rng.randint(0, 4)) or None,
            })
            good = "selection"
        elif kind == 1:
            resp = client.post("/api/bins", json={
                "selection": rng.choice([f"s{j}" for j in range(i + 1)]),
                "k": rng.randint(1, 32),
                "traits": rng.sample(traits, rng.randint(1, len(traits))),
            })
            good = "bins"
        else:
            resp = client.post("/api/pattern/rank", json={
                "query": {
                    "trait": rng.choice(traits),
                    "preset": rng.choice([None, "convergence", "recent_stasis"]),
                    "alpha": rng.choice([0.0, 0.5, 1.0]),
                    "min_distance": rng.choice([0.0, 0.1]),
                },
                "top": rng.randint(1, 30),
            })
            good = "rank"
        body = resp.json()
        if resp.status_code == 200:
            validate(body, good)
            ok += 1
        else:
            validate(body, "error")
            assert isinstance(body["code"], str)
    assert ok > 20  # the fuzz mix produces plenty of successes too
