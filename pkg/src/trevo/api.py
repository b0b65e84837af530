"""HTTP service exposing the dataset, trait-view summaries, and pattern queries.

One dataset per process; the dataset is immutable shared state, the named
selection registry is guarded by a lock.  Every response mirrors the
corresponding in-process call exactly; errors are JSON objects with stable
machine-readable codes: {"code", "message", "detail"}.
"""

from __future__ import annotations

import json
import threading
from importlib import resources
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import patterns, summaries
from .dataset import Dataset
from .errors import (
    EmptySelection,
    InvalidQuery,
    KindMismatch,
    NoContinuousTrait,
    TooFewLeaves,
    TrevoError,
    UnknownNode,
    UnknownTrait,
)
from .summaries import BinSummary, SubtreeSelection, TimeBins
from .tree import present_time


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": self.message,
                     "detail": self.detail},
        )


_ERROR_MAP: list[tuple[type, int, str]] = [
    (EmptySelection, 422, "EMPTY_SELECTION"),
    (KindMismatch, 422, "KIND_MISMATCH"),
    (InvalidQuery, 422, "INVALID_QUERY"),
    (TooFewLeaves, 422, "TOO_FEW_LEAVES"),
    (NoContinuousTrait, 422, "NO_CONTINUOUS_TRAIT"),
    (UnknownTrait, 404, "UNKNOWN_TRAIT"),
    (UnknownNode, 404, "UNKNOWN_NODE"),
]


def _to_api_error(exc: TrevoError) -> ApiError:
    for etype, status, code in _ERROR_MAP:
        if isinstance(exc, etype):
            return ApiError(status, code, str(exc))
    return ApiError(400, "BAD_REQUEST", str(exc))


# --- request models -----------------------------------------------------------


class SelectionRequest(BaseModel):
    name: str
    origin: str = Field(pattern="^(clade|trait_filter|brush)$")
    node: str | None = None
    trait: str | None = None
    states: list[str] | None = None
    range: tuple[float, float] | None = None
    leaf_ids: list[str] | None = None
    color_key: str | None = None


class BinsRequest(BaseModel):
    selection: str
    k: int = Field(default=8, ge=1, le=32)
    traits: list[str]
    seed: int = 0


class QuerySpec(BaseModel):
    trait: str
    preset: str | None = None
    targets: dict[str, str] | None = None
    weights: dict[str, float] | None = None
    alpha: float = 0.5
    min_distance: float = 0.0


class RankRequest(BaseModel):
    query: QuerySpec
    top: int = Field(default=50, ge=1)


def build_query(spec: QuerySpec) -> patterns.PatternQuery:
    if spec.preset is not None:
        query = patterns.preset_query(spec.preset, spec.trait)
        targets = dict(query.targets)
        weights = dict(query.weights)
    else:
        targets = {"distance": "high", "delta": "high", "closeness": "low"}
        weights = {m: 1.0 for m in patterns.METRICS}
    if spec.targets:
        targets.update(spec.targets)
    if spec.weights:
        weights.update(spec.weights)
    return patterns.PatternQuery(
        primary_trait=spec.trait,
        targets=targets,
        weights=weights,
        alpha=spec.alpha,
        preset_id=spec.preset,
        min_distance=spec.min_distance,
    )


# --- serializers ----------------------------------------------------------------


def dataset_json(ds: Dataset) -> dict:
    def node_json(nid: str) -> dict:
        node = ds.tree.nodes[nid]
        return {
            "id": node.id,
            "time": node.time,
            "branch_length": node.branch_length,
            "children": [node_json(c) for c in node.children],
        }

    return {
        "leaves": len(ds.tree.leaves),
        "internal_count": len(ds.tree) - len(ds.tree.leaves),
        "present_time": present_time(ds.tree),
        "trait_defs": [
            {"name": t.name, "kind": t.kind, "states": list(t.states)}
            for t in ds.trait_defs
        ],
        "tree": node_json(ds.tree.root),
    }


def selection_json(name: str, sel: SubtreeSelection) -> dict:
    return {
        "name": name,
        "origin": sel.origin,
        "label": sel.label,
        "mrca": sel.mrca_id,
        "leaf_ids": sorted(sel.leaf_ids),
        "induced_nodes": sorted(sel.induced_nodes),
        "color_key": sel.color_key,
    }


def summary_json(summary: BinSummary) -> dict:
    out: dict[str, Any] = {
        "bin": summary.bin_index,
        "trait": summary.trait,
        "node_ids": summary.node_ids,
        "outliers": sorted(summary.outlier_ids),
        "intervals": None,
        "kde": None,
        "histogram": None,
        "states": None,
    }
    if summary.intervals is not None:
        out["intervals"] = [list(t) for t in summary.intervals]
    if summary.kde_curve is not None:
        x, density = summary.kde_curve
        out["kde"] = {"x": x.tolist(), "density": density.tolist()}
    if summary.histogram is not None:
        edges, counts = summary.histogram
        out["histogram"] = {"edges": edges.tolist(), "counts": counts.tolist()}
    if summary.states is not None:
        out["states"] = {
            state: {
                "probabilities": s.probabilities,
                "mean": s.mean,
                "jitter": s.jitter,
            }
            for state, s in summary.states.items()
        }
    return out


def bins_json(ds: Dataset, bins: TimeBins, traits: list[str], seed: int) -> dict:
    return {
        "edges": list(bins.edges),
        "leaf_bin": bins.leaf_bin,
        "internal_assignment": dict(sorted(bins.internal_assignment.items())),
        "summaries": {
            trait: [
                summary_json(summaries.summarize_bin(ds, bins, i, trait, seed=seed))
                for i in range(bins.leaf_bin + 1)
            ]
            for trait in traits
        },
    }


def trajectory_json(traj: patterns.Trajectory) -> dict:
    return {
        "leaf": traj.leaf_id,
        "samples": [
            {"time": t, "estimate": est, "lower": lo, "upper": hi}
            for t, est, lo, hi in traj.samples
        ],
    }


def ranked_pair_json(ds: Dataset, rp: patterns.RankedPair, trait: str,
                     with_trajectories: bool) -> dict:
    out = {
        "pair": [rp.leaf_a, rp.leaf_b],
        "score": rp.score,
        "rank": rp.rank,
        "desirabilities": rp.desirabilities,
        "metrics": {
            "distance_time": rp.metrics.distance_time,
            "topo_edges": rp.metrics.topo_edges,
            "delta": rp.metrics.delta,
            "closeness": rp.metrics.closeness,
        },
        "heatmap": {
            t: {"top1pct": flag, "rank": rank, "saturation": saturation}
            for t, (flag, rank, saturation) in rp.heatmap.items()
        },
        "top_rank_frequency": rp.top_rank_frequency,
    }
    if with_trajectories:
        ta, tb = patterns.pair_trajectories(ds, rp.leaf_a, rp.leaf_b, trait)
        out["trajectories"] = [trajectory_json(ta), trajectory_json(tb)]
    return out


def rank_json(ds: Dataset, ranked: list[patterns.RankedPair], trait: str,
              top: int) -> dict:
    return {
        "trait": trait,
        "total_pairs": len(ranked),
        "pairs": [
            ranked_pair_json(ds, rp, trait, with_trajectories=True)
            for rp in ranked[:top]
        ],
    }


def load_api_schema() -> dict:
    """The JSON schema shipped with the package (also served at /api/schema)."""
    return json.loads(
        resources.files("trevo").joinpath("api_schema.json").read_text()
    )


# --- application -----------------------------------------------------------------


def create_app(dataset: Dataset | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="trevo", docs_url=None, redoc_url=None)
    state = {"dataset": dataset}
    selections: dict[str, SubtreeSelection] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(TrevoError)
    async def handle_trevo_error(request: Request, exc: TrevoError):
        return _to_api_error(exc).response()

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return ApiError(422, "INVALID_REQUEST", "request body failed validation",
                        detail=exc.errors()).response()

    def require_dataset() -> Dataset:
        ds = state["dataset"]
        if ds is None:
            raise ApiError(409, "NO_DATASET", "no dataset loaded")
        return ds

    @app.get("/api/dataset")
    def get_dataset():
        return dataset_json(require_dataset())

    @app.get("/api/schema")
    def get_schema():
        return load_api_schema()

    @app.post("/api/selection")
    def post_selection(req: SelectionRequest):
        ds = require_dataset()
        if req.origin == "clade":
            if req.node is None:
                raise ApiError(422, "INVALID_REQUEST", "clade selection needs node")
            sel = summaries.select_clade(ds, req.node, color_key=req.color_key)
        elif req.origin == "trait_filter":
            if req.trait is None:
                raise ApiError(422, "INVALID_REQUEST",
                               "trait_filter selection needs trait")
            sel = summaries.select_by_trait(
                ds, req.trait,
                states=set(req.states) if req.states is not None else None,
                value_range=req.range,
                color_key=req.color_key,
            )
        else:
            if not req.leaf_ids:
                raise ApiError(422, "EMPTY_SELECTION", "brush selection is empty")
            sel = summaries.select_leaves(ds, set(req.leaf_ids),
                                          color_key=req.color_key)
        with registry_lock:
            if req.name in selections:
                raise ApiError(409, "DUPLICATE_SELECTION",
                               f"selection {req.name!r} already exists")
            selections[req.name] = sel
        return selection_json(req.name, sel)

    @app.post("/api/bins")
    def post_bins(req: BinsRequest):
        ds = require_dataset()
        with registry_lock:
            sel = selections.get(req.selection)
        if sel is None:
            raise ApiError(404, "UNKNOWN_SELECTION",
                           f"no selection named {req.selection!r}")
        for trait in req.traits:
            ds.traits.trait_def(trait)
        bins = summaries.bin_by_time(ds, sel, req.k)
        return bins_json(ds, bins, req.traits, req.seed)

    @app.post("/api/pattern/rank")
    def post_rank(req: RankRequest):
        ds = require_dataset()
        query = build_query(req.query)
        ranked = patterns.score_all_pairs(ds, query)
        return rank_json(ds, ranked, query.primary_trait, req.top)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
