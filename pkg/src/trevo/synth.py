"""Deterministic synthetic datasets: random ultrametric trees, Brownian-motion
trait evolution, and convergence injection.

All randomness flows through numpy's seedable PCG64 generator, so a given
configuration always produces a byte-identical dataset directory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CONTINUOUS, DISCRETE, Dataset, TraitDef, TraitMatrix
from .errors import PairTooClose
from .tree import PhyloTree, build_tree, mrca, path_from

REGION_STATES = ("west", "east")


@dataclass(frozen=True)
class InjectSpec:
    leaf_a: str | None = None  # None: auto-pick one leaf per root subtree
    leaf_b: str | None = None
    strength: float = 0.9


@dataclass(frozen=True)
class SimConfig:
    n_leaves: int
    n_traits: int = 4
    sigma: float = 1.0
    seed: int = 0
    inject: InjectSpec | None = None

    def __post_init__(self):
        if self.n_leaves < 2:
            raise ValueError("need at least two leaves")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def random_tree(n: int, seed: int) -> PhyloTree:
    """Random ultrametric binary tree via sequential coalescence.

    Leaves are named s000.., internal nodes n000.. in merge order; the same
    seed always yields the same Newick serialization.
    """
    if n < 2:
        raise ValueError("need at least two leaves")
    rng = np.random.default_rng(seed)
    active: list[str] = [f"s{i:03d}" for i in range(n)]
    height = {l: 0.0 for l in active}  # above the present
    parents: dict[str, str | None] = {}
    children: dict[str, list[str]] = {}
    h = 0.0
    for merge in range(n - 1):
        m = len(active)
        h += float(rng.exponential(2.0 / (m * (m - 1)))) * n
        i, j = sorted(rng.choice(m, size=2, replace=False).tolist())
        nid = f"n{merge:03d}"
        a, b = active[i], active[j]
        parents[a] = nid
        parents[b] = nid
        children[nid] = [a, b]
        height[nid] = h
        active[i] = nid
        del active[j]
    root = active[0]
    parents[root] = None
    lengths = {
        child: height[nid] - height[child]
        for nid, kids in children.items()
        for child in kids
    }
    return build_tree(parents, children, lengths, root)


def simulate_traits(tree: PhyloTree, cfg: SimConfig) -> Dataset:
    """Brownian-motion traits on a tree.

    Each continuous trait starts at 0 at the root and takes Normal(0,
    sigma^2 * branch_length) steps down every edge.  Internal intervals are
    a synthetic stand-in for reconstruction uncertainty (value +/- 1.96 *
    sigma * sqrt(time)); leaves are known.  One discrete "region" trait is
    thresholded on the first continuous trait, with internal probabilities
    from a logistic of the value.
    """
    rng = np.random.default_rng([cfg.seed, 1])
    k = cfg.n_traits
    names = tuple(f"trait{t:02d}" for t in range(k))
    values: dict[str, np.ndarray] = {}
    for node in tree.preorder():
        if node.parent is None:
            values[node.id] = np.zeros(k)
        else:
            step = rng.normal(size=k) * (cfg.sigma * math.sqrt(node.branch_length))
            values[node.id] = values[node.parent] + step

    trait_defs = tuple(TraitDef(nm, CONTINUOUS) for nm in names)
    trait_defs += (TraitDef("region", DISCRETE, REGION_STATES),)
    matrix = TraitMatrix(trait_defs=trait_defs)
    for ti, nm in enumerate(names):
        per: dict[str, tuple[float, float, float]] = {}
        for node in tree.preorder():
            v = float(values[node.id][ti])
            if node.is_leaf:
                per[node.id] = (v, v, v)
            else:
                hw = 1.96 * cfg.sigma * math.sqrt(node.time)
                per[node.id] = (v, v - hw, v + hw)
        matrix.continuous[nm] = per

    scale = max(cfg.sigma, 1e-12)
    region: dict[str, np.ndarray] = {}
    for node in tree.preorder():
        v = float(values[node.id][0])
        if node.is_leaf:
            vec = np.array([1.0, 0.0]) if v < 0.0 else np.array([0.0, 1.0])
        else:
            p_east = 1.0 / (1.0 + math.exp(-v / scale))
            vec = np.array([1.0 - p_east, p_east])
        region[node.id] = vec
    matrix.discrete["region"] = region
    return Dataset(tree=tree, traits=matrix)


def default_inject_pair(tree: PhyloTree) -> tuple[str, str]:
    """Deepest leaf (ties: lexicographic) under each of the root's subtrees."""
    root = tree.nodes[tree.root]
    if len(root.children) < 2:
        raise PairTooClose("root has fewer than two subtrees")
    picks = []
    for child in root.children[:2]:
        leaves = tree.descendant_leaves(child)
        picks.append(max(leaves, key=lambda l: (tree.edge_depth[l], l)))
    return tuple(sorted(picks))  # type: ignore[return-value]


def inject_convergence(ds: Dataset, leaf_a: str, leaf_b: str, strength: float,
                       trait: str | None = None) -> Dataset:
    """Deform one trait so the pair diverges early and converges at the leaves.

    Requires mrca(leaf_a, leaf_b) == root.  The first post-root nodes are
    pushed apart and later path nodes are pulled toward the midpoint of the
    pair's original leaf values, increasingly with time; the final leaf
    difference shrinks by (1 - strength).  strength = 0 leaves the dataset
    unchanged.  Only nodes on the two root-to-leaf paths are modified.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must lie in [0, 1]")
    tree = ds.tree
    if mrca(tree, leaf_a, leaf_b) != tree.root:
        raise PairTooClose(
            f"mrca({leaf_a!r}, {leaf_b!r}) is not the root; pick leaves from "
            "distinct deep clades"
        )
    if trait is None:
        trait = ds.continuous_traits[0]
    per = dict(ds.traits.continuous[trait])

    leaf_vals = [per[l][0] for l in tree.leaves]
    gap = 0.5 * (max(leaf_vals) - min(leaf_vals))
    target = 0.5 * (per[leaf_a][0] + per[leaf_b][0])

    paths = {leaf_a: path_from(tree, tree.root, leaf_a)[1:],
             leaf_b: path_from(tree, tree.root, leaf_b)[1:]}
    first_a = per[paths[leaf_a][0]][0]
    first_b = per[paths[leaf_b][0]][0]
    push = {leaf_a: 1.0 if first_a >= first_b else -1.0}
    push[leaf_b] = -push[leaf_a]

    for leaf, path in paths.items():
        t_first = tree.nodes[path[0]].time
        t_leaf = tree.nodes[leaf].time
        span = t_leaf - t_first
        for nid in path:
            est, lo, hi = per[nid]
            if nid == path[0]:
                new = est + strength * gap * push[leaf]
            else:
                u = (tree.nodes[nid].time - t_first) / span
                new = (1.0 - strength * u) * est + strength * u * target
            # keep the interval widths, anchored at the new estimate
            per[nid] = (new, new - (est - lo), new + (hi - est))

    matrix = TraitMatrix(
        trait_defs=ds.trait_defs,
        continuous={**ds.traits.continuous, trait: per},
        discrete=dict(ds.traits.discrete),
    )
    return Dataset(tree=tree, traits=matrix)


def make_dataset(cfg: SimConfig) -> tuple[Dataset, tuple[str, str] | None]:
    """Tree + traits + optional convergence injection, all from cfg.seed."""
    tree = random_tree(cfg.n_leaves, cfg.seed)
    ds = simulate_traits(tree, cfg)
    if cfg.inject is None:
        return ds, None
    a, b = cfg.inject.leaf_a, cfg.inject.leaf_b
    if a is None or b is None:
        a, b = default_inject_pair(tree)
    ds = inject_convergence(ds, a, b, cfg.inject.strength)
    return ds, (a, b)
