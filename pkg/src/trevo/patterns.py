"""All-pairs scoring of leaf pairs against evolutionary patterns.

A pattern is a target (high / low / ignore) plus a weight for each of the
three metrics:

* distance  -- separation since the MRCA: a mix of elapsed time and
  topological edge count,
* delta     -- maximum post-split difference of the piecewise-linear
  trait trajectories (present time included),
* closeness -- trait difference between the two extant leaves.

Raw metrics are min-max normalized across all pairs, oriented toward their
targets, and combined as a weighted mean.  Scores are quantized to 1e-9
before ranking so that orderings survive affine re-scaling of the trait
values (sub-ulp noise would otherwise split mathematically exact ties);
remaining ties are broken by the lexicographic (leaf_a, leaf_b) pair order,
which makes rankings fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import CONTINUOUS, Dataset
from .errors import (
    InvalidQuery,
    KindMismatch,
    MismatchedRoot,
    NoContinuousTrait,
    TooFewLeaves,
    UnknownTrait,
)
from .tree import PhyloTree, metric_distance, mrca, mrca_table, path_from, present_time

HIGH = "high"
LOW = "low"
IGNORE = "ignore"

METRICS = ("distance", "delta", "closeness")

SCORE_QUANTUM = 1e9  # scores are rounded half-even to 1/SCORE_QUANTUM


@dataclass(frozen=True)
class PatternQuery:
    primary_trait: str
    targets: dict[str, str] = field(
        default_factory=lambda: {"distance": HIGH, "delta": HIGH, "closeness": LOW}
    )
    weights: dict[str, float] = field(
        default_factory=lambda: {"distance": 1.0, "delta": 1.0, "closeness": 1.0}
    )
    alpha: float = 0.5  # share of time vs topology inside the distance metric
    preset_id: str | None = None
    min_distance: float = 0.0  # pairs closer in time than this are dropped

    def validate(self) -> None:
        for m in METRICS:
            if self.targets.get(m) not in (HIGH, LOW, IGNORE):
                raise InvalidQuery(f"bad target for {m}: {self.targets.get(m)!r}")
            if self.weights.get(m, 0.0) < 0:
                raise InvalidQuery(f"negative weight for {m}")
        active = [m for m in METRICS if self.targets[m] != IGNORE]
        if not active:
            raise InvalidQuery("at least one metric target must not be 'ignore'")
        if sum(self.weights[m] for m in active) <= 0:
            raise InvalidQuery("active weights must sum to a positive value")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidQuery("alpha must lie in [0, 1]")


# The six feasible {high, low}^3 target triples over (distance, delta,
# closeness); the two triples with delta=low, closeness=high are infeasible
# because closeness never exceeds delta.  The names are ours.
PRESETS: tuple[tuple[str, str, tuple[str, str, str]], ...] = (
    ("convergence", "Convergence", (HIGH, HIGH, LOW)),
    ("deep_divergence", "Deep divergence", (HIGH, HIGH, HIGH)),
    ("ancient_stasis", "Ancient stasis", (HIGH, LOW, LOW)),
    ("recent_rapid_divergence", "Recent rapid divergence", (LOW, HIGH, HIGH)),
    ("transient_excursion", "Transient excursion", (LOW, HIGH, LOW)),
    ("recent_stasis", "Recent stasis", (LOW, LOW, LOW)),
)

PRESET_NAMES = {pid: name for pid, name, _ in PRESETS}


def presets(primary_trait: str = "") -> list[PatternQuery]:
    """The six preset queries, with equal weights and alpha = 0.5."""
    out = []
    for pid, _name, (d, de, c) in PRESETS:
        out.append(PatternQuery(
            primary_trait=primary_trait,
            targets={"distance": d, "delta": de, "closeness": c},
            preset_id=pid,
        ))
    return out


def preset_query(preset_id: str, primary_trait: str) -> PatternQuery:
    for q in presets(primary_trait):
        if q.preset_id == preset_id:
            return q
    raise InvalidQuery(f"unknown preset {preset_id!r}")


@dataclass(frozen=True)
class Trajectory:
    """Trait samples along the path from an ancestor down to a leaf."""

    leaf_id: str
    samples: tuple[tuple[float, float, float, float], ...]  # (time, est, lo, hi)


@dataclass(frozen=True)
class PairMetrics:
    leaf_a: str
    leaf_b: str
    distance_time: float
    topo_edges: int
    delta: float
    closeness: float


@dataclass
class RankedPair:
    leaf_a: str
    leaf_b: str
    score: float
    rank: int
    desirabilities: dict[str, float]
    metrics: PairMetrics
    # per-trait (top1pct, rank, saturation); saturation = 1 - (rank-1)/P
    heatmap: dict[str, tuple[bool, int, float]]
    top_rank_frequency: int


def trajectory(ds: Dataset, ancestor: str, leaf: str, trait: str) -> Trajectory:
    """One sample per node on path_from(ancestor, leaf); leaf sample is known."""
    if ds.traits.trait_def(trait).kind != CONTINUOUS:
        raise KindMismatch(f"trait {trait!r} is not continuous")
    samples = []
    for nid in path_from(ds.tree, ancestor, leaf):
        est, lo, hi = ds.traits.interval(nid, trait)
        samples.append((ds.tree.nodes[nid].time, est, lo, hi))
    return Trajectory(leaf_id=leaf, samples=tuple(samples))


def _interp(times: np.ndarray, values: np.ndarray, t: float) -> float:
    """Piecewise-linear interpolation with constant extension past the ends."""
    if t <= times[0]:
        return float(values[0])
    if t >= times[-1]:
        return float(values[-1])
    i = int(np.searchsorted(times, t, side="right")) - 1
    t0, t1 = float(times[i]), float(times[i + 1])
    v0, v1 = float(values[i]), float(values[i + 1])
    return v0 + (t - t0) * ((v1 - v0) / (t1 - t0))


def metric_delta(traj_a: Trajectory, traj_b: Trajectory) -> float:
    """Max |f_a(t) - f_b(t)| over [t_mrca, t_end] for piecewise-linear estimates.

    Exact: the difference of two piecewise-linear functions attains its
    maximum at a breakpoint, so evaluating at the union of breakpoints
    (plus the common end time) suffices.
    """
    if traj_a.samples[0][0] != traj_b.samples[0][0]:
        raise MismatchedRoot("trajectories do not start at the same MRCA time")
    ta = np.array([s[0] for s in traj_a.samples])
    va = np.array([s[1] for s in traj_a.samples])
    tb = np.array([s[0] for s in traj_b.samples])
    vb = np.array([s[1] for s in traj_b.samples])
    breakpoints = sorted(set(ta.tolist()) | set(tb.tolist()))
    best = 0.0
    for t in breakpoints:
        diff = abs(_interp(ta, va, t) - _interp(tb, vb, t))
        if diff > best:
            best = diff
    return best


def metric_closeness(ds: Dataset, a: str, b: str, trait: str) -> float:
    """|value(a) - value(b)| for a continuous trait at the leaves."""
    if ds.traits.trait_def(trait).kind != CONTINUOUS:
        raise KindMismatch(f"trait {trait!r} is not continuous")
    return abs(ds.traits.estimate(a, trait) - ds.traits.estimate(b, trait))


def _minmax(x: np.ndarray) -> np.ndarray:
    """Normalize to [0, 1]; a constant metric maps every pair to 0.5."""
    mn = x.min()
    mx = x.max()
    if mx == mn:
        return np.full(x.shape, 0.5)
    return (x - mn) / (mx - mn)


def _leaf_curves(
    ds: Dataset, leaves: tuple[str, ...], traits: tuple[str, ...],
    grid: np.ndarray,
) -> np.ndarray:
    """Evaluate every leaf's root-path trajectory at all grid times.

    Returns (L, len(grid), K).  Values at a path's own breakpoints are the
    stored node values exactly; elsewhere linear interpolation with
    constant extension past the leaf time.
    """
    tree = ds.tree
    out = np.empty((len(leaves), grid.size, len(traits)))
    for li, leaf in enumerate(leaves):
        path = path_from(tree, tree.root, leaf)
        times = np.array([tree.nodes[n].time for n in path])
        values = np.array(
            [[ds.traits.estimate(n, tr) for tr in traits] for n in path]
        )
        idx = np.searchsorted(times, grid, side="right") - 1
        idx = np.clip(idx, 0, len(path) - 2 if len(path) > 1 else 0)
        if len(path) == 1:
            out[li] = np.broadcast_to(values[0], (grid.size, len(traits)))
            continue
        t0 = times[idx]
        dv = (values[idx + 1] - values[idx]) / (times[idx + 1] - times[idx])[:, None]
        curve = values[idx] + (grid - t0)[:, None] * dv
        past_end = grid >= times[-1]
        curve[past_end] = values[-1]
        exact = np.isin(grid, times)
        if np.any(exact):
            curve[exact] = values[np.searchsorted(times, grid[exact])]
        out[li] = curve
    return out


def score_all_pairs(ds: Dataset, query: PatternQuery) -> list[RankedPair]:
    """Score and rank every unordered leaf pair under `query`.

    Returns one RankedPair per pair, ordered by rank (descending score,
    ties by lexicographic pair).  Heatmap rows report, for every continuous
    trait, the pair's rank under the same query applied to that trait and
    whether it lands in the top 1% (threshold max(1, ceil(0.01 * P))).
    """
    query.validate()
    tree = ds.tree
    leaves = tree.leaves
    if len(leaves) < 2:
        raise TooFewLeaves("need at least two leaves")
    traits = ds.continuous_traits
    if not traits:
        raise NoContinuousTrait("dataset has no continuous trait")
    if query.primary_trait not in ds.traits.trait_names:
        raise UnknownTrait(f"no trait named {query.primary_trait!r}")
    if query.primary_trait not in traits:
        raise KindMismatch(f"trait {query.primary_trait!r} is not continuous")

    n = len(leaves)
    ia, ib = np.triu_indices(n, k=1)  # lexicographic (leaf_a, leaf_b) order
    t_mrca, d_mrca = mrca_table(tree)
    depth_e = np.array([tree.edge_depth[l] for l in leaves])
    t_present = present_time(tree)

    distance_time = t_present - t_mrca[ia, ib]
    topo = depth_e[ia] + depth_e[ib] - 2 * d_mrca[ia, ib]

    if query.min_distance > 0.0:
        keep = distance_time >= query.min_distance
        ia, ib = ia[keep], ib[keep]
        distance_time = distance_time[keep]
        topo = topo[keep]
        if ia.size == 0:
            raise TooFewLeaves("minimum-distance filter removed every pair")
    pair_count = ia.size

    grid = np.unique(np.array([node.time for node in tree.preorder()]))
    curves = _leaf_curves(ds, leaves, traits, grid)
    leaf_values = np.array(
        [[ds.traits.estimate(l, tr) for tr in traits] for l in leaves]
    )

    # delta per pair per trait, chunked to bound memory
    delta = np.empty((pair_count, len(traits)))
    chunk = max(1, 4_000_000 // max(1, grid.size * len(traits)))
    for start in range(0, pair_count, chunk):
        sl = slice(start, start + chunk)
        diff = np.abs(curves[ia[sl]] - curves[ib[sl]])
        delta[sl] = diff.max(axis=1)
    closeness = np.abs(leaf_values[ia] - leaf_values[ib])

    ndt = _minmax(distance_time)
    ntopo = _minmax(topo.astype(float))
    mixed = query.alpha * ndt + (1.0 - query.alpha) * ntopo

    def rank_for_trait(ti: int) -> tuple[np.ndarray, np.ndarray]:
        parts: list[tuple[str, np.ndarray]] = [("distance", mixed)]
        parts.append(("delta", _minmax(delta[:, ti])))
        parts.append(("closeness", _minmax(closeness[:, ti])))
        num = np.zeros(pair_count)
        wsum = 0.0
        for name, norm in parts:
            target = query.targets[name]
            if target == IGNORE:
                continue
            d = norm if target == HIGH else 1.0 - norm
            num = num + query.weights[name] * d
            wsum += query.weights[name]
        scores = np.rint((num / wsum) * SCORE_QUANTUM) / SCORE_QUANTUM
        order = np.argsort(-scores, kind="stable")
        ranks = np.empty(pair_count, dtype=np.int64)
        ranks[order] = np.arange(1, pair_count + 1)
        return scores, ranks

    primary_ti = traits.index(query.primary_trait)
    top1 = max(1, math.ceil(0.01 * pair_count))
    ranks_by_trait: dict[str, np.ndarray] = {}
    scores = None
    for ti, trait in enumerate(traits):
        s, r = rank_for_trait(ti)
        ranks_by_trait[trait] = r
        if ti == primary_ti:
            scores = s
    assert scores is not None
    primary_ranks = ranks_by_trait[query.primary_trait]
    top_freq = np.zeros(pair_count, dtype=np.int64)
    for trait in traits:
        top_freq += ranks_by_trait[trait] <= top1

    # normalized desirabilities for reporting
    ndelta_p = _minmax(delta[:, primary_ti])
    nclose_p = _minmax(closeness[:, primary_ti])

    out: list[RankedPair] = []
    for p in range(pair_count):
        a, b = leaves[ia[p]], leaves[ib[p]]
        desir = {}
        for name, norm in (("distance", mixed), ("delta", ndelta_p),
                           ("closeness", nclose_p)):
            target = query.targets[name]
            if target == IGNORE:
                continue
            desir[name] = float(norm[p] if target == HIGH else 1.0 - norm[p])
        heatmap = {
            trait: (
                bool(ranks_by_trait[trait][p] <= top1),
                int(ranks_by_trait[trait][p]),
                float(1.0 - (ranks_by_trait[trait][p] - 1) / pair_count),
            )
            for trait in traits
        }
        out.append(RankedPair(
            leaf_a=a,
            leaf_b=b,
            score=float(scores[p]),
            rank=int(primary_ranks[p]),
            desirabilities=desir,
            metrics=PairMetrics(
                leaf_a=a,
                leaf_b=b,
                distance_time=float(distance_time[p]),
                topo_edges=int(topo[p]),
                delta=float(delta[p, primary_ti]),
                closeness=float(closeness[p, primary_ti]),
            ),
            heatmap=heatmap,
            top_rank_frequency=int(top_freq[p]),
        ))
    out.sort(key=lambda rp: rp.rank)
    return out


def sort_by_rank_frequency(ranked: list[RankedPair]) -> list[RankedPair]:
    """Order by descending top-rank frequency, then score, then pair."""
    return sorted(
        ranked,
        key=lambda rp: (-rp.top_rank_frequency, -rp.score, rp.leaf_a, rp.leaf_b),
    )


def pair_trajectories(ds: Dataset, a: str, b: str, trait: str) -> tuple[Trajectory, Trajectory]:
    """Both trajectories from the pair's MRCA down to each leaf."""
    anc = mrca(ds.tree, a, b)
    return trajectory(ds, anc, a, trait), trajectory(ds, anc, b, trait)
