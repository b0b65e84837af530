"""Subtree selection, time binning, and per-bin uncertain-trait summaries.

Internal nodes of a selection are grouped into equal-width time bins over
[time of the selection MRCA, present time); the selected leaves occupy a
dedicated final bin.  Continuous bins are summarized by interval lists plus
a Gaussian KDE (internal nodes) or a histogram (leaves); discrete bins by
per-state probability dot-plot data with deterministic jitter.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import CONTINUOUS, DISCRETE, Dataset
from .errors import EmptyInput, EmptySelection, KindMismatch, UnknownNode
from .tree import mrca, path_from, present_time

KDE_GRID_POINTS = 128
MIN_OUTLIER_N = 4
JITTER_SPAN = 0.4  # offsets land in [-0.4, 0.4] of the dot-plot lane height


@dataclass(frozen=True)
class SubtreeSelection:
    """A leaf set plus the internal nodes it induces up to its MRCA."""

    leaf_ids: frozenset[str]
    induced_nodes: frozenset[str]
    mrca_id: str
    origin: str  # clade | trait_filter | brush
    label: str
    color_key: str | None = None


@dataclass(frozen=True)
class TimeBins:
    edges: tuple[float, ...]  # k + 1 edges over [t_mrca, present_time)
    internal_assignment: dict[str, int]
    leaf_ids: frozenset[str]

    @property
    def k(self) -> int:
        return len(self.edges) - 1

    @property
    def leaf_bin(self) -> int:
        """Index of the dedicated leaf bin (one past the internal bins)."""
        return self.k


@dataclass
class StateSummary:
    probabilities: list[float]
    mean: float
    jitter: list[float]


@dataclass
class BinSummary:
    bin_index: int
    trait: str
    node_ids: list[str]
    intervals: list[tuple[float, float, float]] | None = None
    kde_curve: tuple[np.ndarray, np.ndarray] | None = None
    histogram: tuple[np.ndarray, np.ndarray] | None = None  # (edges, counts)
    states: dict[str, StateSummary] | None = None
    outlier_ids: frozenset[str] = field(default_factory=frozenset)


def _collective_mrca(ds: Dataset, leaf_ids: list[str]) -> str:
    anc = leaf_ids[0]
    for leaf in leaf_ids[1:]:
        # mrca() expects leaves; lift via the ancestor chain instead.
        anc = _mrca_nodes(ds, anc, leaf)
    return anc


def _mrca_nodes(ds: Dataset, a: str, b: str) -> str:
    depth = ds.tree.edge_depth
    nodes = ds.tree.nodes
    while depth[a] > depth[b]:
        a = nodes[a].parent  # type: ignore[assignment]
    while depth[b] > depth[a]:
        b = nodes[b].parent  # type: ignore[assignment]
    while a != b:
        a = nodes[a].parent  # type: ignore[assignment]
        b = nodes[b].parent  # type: ignore[assignment]
    return a


def _induced_internals(ds: Dataset, anc: str, leaf_ids: list[str]) -> frozenset[str]:
    induced: set[str] = set()
    for leaf in leaf_ids:
        induced.update(path_from(ds.tree, anc, leaf))
    return frozenset(induced - set(leaf_ids))


def select_by_trait(
    ds: Dataset,
    trait: str,
    *,
    states: set[str] | None = None,
    value_range: tuple[float, float] | None = None,
    label: str | None = None,
    color_key: str | None = None,
) -> SubtreeSelection:
    """Select leaves whose known value satisfies the predicate.

    Exactly one of `states` (discrete trait) or `value_range` (continuous,
    closed interval) must be given.
    """
    tdef = ds.traits.trait_def(trait)
    if (states is None) == (value_range is None):
        raise KindMismatch("give exactly one of states= or value_range=")
    if states is not None and tdef.kind != DISCRETE:
        raise KindMismatch(f"trait {trait!r} is continuous, state predicate given")
    if value_range is not None and tdef.kind != CONTINUOUS:
        raise KindMismatch(f"trait {trait!r} is discrete, range predicate given")

    selected: list[str] = []
    for leaf in ds.tree.leaves:
        if states is not None:
            if ds.traits.known_state(leaf, trait) in states:
                selected.append(leaf)
        else:
            lo, hi = value_range  # type: ignore[misc]
            if lo <= ds.traits.estimate(leaf, trait) <= hi:
                selected.append(leaf)
    if not selected:
        raise EmptySelection(f"no leaf matches the predicate on trait {trait!r}")

    anc = _collective_mrca(ds, selected)
    return SubtreeSelection(
        leaf_ids=frozenset(selected),
        induced_nodes=_induced_internals(ds, anc, selected),
        mrca_id=anc,
        origin="trait_filter",
        label=label or f"{trait} filter",
        color_key=color_key,
    )


def select_clade(ds: Dataset, node_id: str, *, label: str | None = None,
                 color_key: str | None = None) -> SubtreeSelection:
    """Select all leaves descending from `node_id`."""
    node = ds.tree.node(node_id)
    leaves = ds.tree.descendant_leaves(node_id)
    induced = {node_id}
    stack = [node_id]
    while stack:
        for child in ds.tree.nodes[stack.pop()].children:
            if not ds.tree.nodes[child].is_leaf:
                induced.add(child)
                stack.append(child)
    if node.is_leaf:
        induced = set()
    return SubtreeSelection(
        leaf_ids=frozenset(leaves),
        induced_nodes=frozenset(induced),
        mrca_id=node_id,
        origin="clade",
        label=label or f"clade {node_id}",
        color_key=color_key,
    )


def select_leaves(ds: Dataset, leaf_ids: set[str], *, label: str = "brush",
                  color_key: str | None = None) -> SubtreeSelection:
    """Explicit leaf-set selection (UI brushing)."""
    if not leaf_ids:
        raise EmptySelection("empty leaf set")
    for leaf in leaf_ids:
        node = ds.tree.node(leaf)
        if not node.is_leaf:
            raise UnknownNode(f"{leaf!r} is not a leaf")
    ordered = sorted(leaf_ids)
    anc = _collective_mrca(ds, ordered)
    return SubtreeSelection(
        leaf_ids=frozenset(ordered),
        induced_nodes=_induced_internals(ds, anc, ordered),
        mrca_id=anc,
        origin="brush",
        label=label,
        color_key=color_key,
    )


def bin_by_time(ds: Dataset, sel: SubtreeSelection, k: int) -> TimeBins:
    """k equal-width bins over [t_mrca, present); leaves go to a separate bin.

    Intervals are half-open, so a node exactly on an interior edge falls in
    the bin to its right; the last internal bin is closed.
    """
    if k < 1:
        raise ValueError("bin count must be >= 1")
    t0 = ds.tree.nodes[sel.mrca_id].time
    t1 = present_time(ds.tree)
    edges = tuple(np.linspace(t0, t1, k + 1).tolist())
    width = (t1 - t0) / k
    assignment: dict[str, int] = {}
    for nid in sorted(sel.induced_nodes):
        node = ds.tree.nodes[nid]
        if node.is_leaf:
            continue
        if width > 0:
            idx = min(k - 1, int(math.floor((node.time - t0) / width)))
        else:
            idx = 0
        assignment[nid] = idx
    return TimeBins(edges=edges, internal_assignment=assignment, leaf_ids=sel.leaf_ids)


def find_outliers(values: list[float] | np.ndarray, iqr_factor: float = 1.5) -> set[int]:
    """Indices outside the Tukey fences [Q1 - f*IQR, Q3 + f*IQR].

    Fewer than four values never yields outliers.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < MIN_OUTLIER_N:
        return set()
    q1, q3 = np.percentile(arr, [25, 75])
    iqr = q3 - q1
    lo = q1 - iqr_factor * iqr
    hi = q3 + iqr_factor * iqr
    return {int(i) for i in np.nonzero((arr < lo) | (arr > hi))[0]}


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5); fallback 0.1*max(|x|, 1) at zero spread."""
    n = values.size
    sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
    if sd == 0.0:
        return 0.1 * max(abs(float(values[0])), 1.0)
    q1, q3 = np.percentile(values, [25, 75])
    iqr = float(q3 - q1)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * n ** (-1 / 5)


def kde(values: list[float] | np.ndarray, bandwidth: float | None = None,
        grid_points: int = KDE_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-kernel density on a fixed grid spanning [min - 4h, max + 4h].

    Four bandwidths of padding keep the trapezoidal integral of the curve
    within 1e-3 of 1 even for a single edge kernel (the mass outside +/-3h
    alone is 2.7e-3).
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInput("kde needs at least one value")
    h = bandwidth if bandwidth is not None else silverman_bandwidth(arr)
    grid = np.linspace(arr.min() - 4 * h, arr.max() + 4 * h, grid_points)
    z = (grid[:, None] - arr[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) / (arr.size * h * math.sqrt(2 * math.pi))
    return grid, density


def jitter_offset(node_id: str, state: str, seed: int = 0) -> float:
    """Deterministic per-(node, state) vertical offset in [-0.4, 0.4]."""
    digest = hashlib.blake2b(
        f"{node_id}|{state}|{seed}".encode(), digest_size=8
    ).digest()
    u = int.from_bytes(digest, "big") / 2**64
    return (2 * u - 1) * JITTER_SPAN


def _sturges(n: int) -> int:
    return max(1, int(math.ceil(math.log2(n))) + 1) if n > 0 else 1


def summarize_bin(ds: Dataset, bins: TimeBins, bin_index: int, trait: str,
                  seed: int = 0) -> BinSummary:
    """Summarize one bin for one trait; `bin_index == bins.leaf_bin` selects leaves."""
    if not 0 <= bin_index <= bins.leaf_bin:
        raise ValueError(f"bin index {bin_index} out of range")
    tdef = ds.traits.trait_def(trait)
    is_leaf_bin = bin_index == bins.leaf_bin
    if is_leaf_bin:
        node_ids = sorted(bins.leaf_ids)
    else:
        node_ids = sorted(
            (nid for nid, b in bins.internal_assignment.items() if b == bin_index),
            key=lambda nid: (ds.tree.nodes[nid].time, nid),
        )
    summary = BinSummary(bin_index=bin_index, trait=trait, node_ids=node_ids)
    if not node_ids:
        return summary

    if tdef.kind == CONTINUOUS:
        triples = [ds.traits.interval(nid, trait) for nid in node_ids]
        estimates = np.array([t[0] for t in triples])
        summary.intervals = triples
        outliers = find_outliers(estimates)
        summary.outlier_ids = frozenset(node_ids[i] for i in outliers)
        if is_leaf_bin:
            counts, edges = np.histogram(estimates, bins=_sturges(estimates.size))
            summary.histogram = (edges, counts)
        else:
            summary.kde_curve = kde(estimates)
    else:
        summary.states = {}
        for si, state in enumerate(tdef.states):
            probs = [float(ds.traits.probabilities(nid, trait)[si]) for nid in node_ids]
            summary.states[state] = StateSummary(
                probabilities=probs,
                mean=float(np.mean(probs)),
                jitter=[jitter_offset(nid, state, seed) for nid in node_ids],
            )
    return summary
