"""Trait tables, dataset assembly, validation, and the canonical on-disk layout.

A dataset directory holds `tree.nwk` plus `traits.csv` (long format, header
`node_id,trait,kind,state,value,lower,upper`) and an optional free-text
`meta.txt`.  Leaves carry known values; internal nodes carry uncertain ones
(a confidence interval for continuous traits, a state-probability vector for
discrete ones).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import newick
from .errors import (
    ERROR,
    WARNING,
    Diagnostic,
    KindMismatch,
    MissingTrait,
    ProbabilitySumError,
    StrictnessError,
    TraitTableError,
    UnknownNode,
    UnknownTrait,
)
from .tree import PhyloTree, present_time

CONTINUOUS = "continuous"
DISCRETE = "discrete"

CSV_HEADER = ["node_id", "trait", "kind", "state", "value", "lower", "upper"]

PROB_SUM_TOL = 1e-6
ULTRAMETRIC_RTOL = 1e-6


@dataclass
class TraitRow:
    """One long-format table row; optional fields are None when inapplicable."""

    node_id: str
    trait: str
    kind: str
    state: str | None = None
    value: float = 0.0
    lower: float | None = None
    upper: float | None = None


@dataclass(frozen=True)
class TraitDef:
    name: str
    kind: str
    states: tuple[str, ...] = ()


@dataclass
class TraitMatrix:
    """Complete node x trait value store.

    Continuous values are (estimate, lower, upper) triples; leaves have
    lower == upper == estimate.  Discrete values are probability vectors
    over the TraitDef state order; leaf vectors are one-hot.
    """

    trait_defs: tuple[TraitDef, ...]
    continuous: dict[str, dict[str, tuple[float, float, float]]] = field(default_factory=dict)
    discrete: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)

    @property
    def trait_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.trait_defs)

    def trait_def(self, name: str) -> TraitDef:
        for t in self.trait_defs:
            if t.name == name:
                return t
        raise UnknownTrait(f"no trait named {name!r}")

    def estimate(self, node_id: str, trait: str) -> float:
        return self.continuous[trait][node_id][0]

    def interval(self, node_id: str, trait: str) -> tuple[float, float, float]:
        return self.continuous[trait][node_id]

    def probabilities(self, node_id: str, trait: str) -> np.ndarray:
        return self.discrete[trait][node_id]

    def known_state(self, node_id: str, trait: str) -> str:
        """State with the highest probability (the known state at leaves)."""
        tdef = self.trait_def(trait)
        probs = self.discrete[trait][node_id]
        return tdef.states[int(np.argmax(probs))]


@dataclass
class Dataset:
    tree: PhyloTree
    traits: TraitMatrix

    @property
    def trait_defs(self) -> tuple[TraitDef, ...]:
        return self.traits.trait_defs

    @property
    def continuous_traits(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.trait_defs if t.kind == CONTINUOUS)


def _infer_trait_defs(rows: list[TraitRow]) -> tuple[TraitDef, ...]:
    kinds: dict[str, str] = {}
    states: dict[str, list[str]] = {}
    order: list[str] = []
    for row in rows:
        if row.trait not in kinds:
            kinds[row.trait] = row.kind
            order.append(row.trait)
            states[row.trait] = []
        elif kinds[row.trait] != row.kind:
            raise TraitTableError(
                f"trait {row.trait!r} declared both "
                f"{kinds[row.trait]} and {row.kind}"
            )
        if row.kind == DISCRETE:
            if row.state is None:
                raise TraitTableError(
                    f"discrete row for node {row.node_id!r}, trait {row.trait!r} "
                    "has no state"
                )
            if row.state not in states[row.trait]:
                states[row.trait].append(row.state)
    return tuple(
        TraitDef(name, kinds[name], tuple(states[name]) if kinds[name] == DISCRETE else ())
        for name in order
    )


def load_traits(rows: list[TraitRow], tree: PhyloTree, strict: bool = True) -> TraitMatrix:
    """Assemble a complete node x trait matrix from long-format rows.

    Strict mode enforces the leaf-known / internal-uncertain split; lenient
    mode treats a bare internal value as a zero-width interval and accepts
    leaf intervals as given.
    """
    trait_defs = _infer_trait_defs(rows)
    matrix = TraitMatrix(trait_defs=trait_defs)
    state_index = {
        t.name: {s: i for i, s in enumerate(t.states)} for t in trait_defs
    }
    discrete_acc: dict[tuple[str, str], dict[str, float]] = {}

    for row in rows:
        if row.node_id not in tree:
            raise UnknownNode(f"trait row references unknown node {row.node_id!r}")
        node = tree.node(row.node_id)
        if row.kind == DISCRETE:
            if not 0.0 <= row.value <= 1.0:
                raise TraitTableError(
                    f"probability {row.value} out of [0, 1] for node "
                    f"{row.node_id!r}, trait {row.trait!r}"
                )
            if row.lower is not None or row.upper is not None:
                raise TraitTableError(
                    f"discrete row for node {row.node_id!r}, trait {row.trait!r} "
                    "carries interval bounds"
                )
            acc = discrete_acc.setdefault((row.trait, row.node_id), {})
            if row.state in acc:
                raise TraitTableError(
                    f"duplicate state {row.state!r} for node {row.node_id!r}, "
                    f"trait {row.trait!r}"
                )
            acc[row.state] = row.value  # type: ignore[index]
        else:
            has_bounds = row.lower is not None or row.upper is not None
            if has_bounds and (row.lower is None or row.upper is None):
                raise TraitTableError(
                    f"node {row.node_id!r}, trait {row.trait!r}: lower and upper "
                    "must both be present or both absent"
                )
            if node.is_leaf:
                if strict and has_bounds:
                    raise StrictnessError(
                        f"leaf {row.node_id!r} carries interval bounds for "
                        f"trait {row.trait!r}"
                    )
                lo = row.lower if row.lower is not None else row.value
                hi = row.upper if row.upper is not None else row.value
            else:
                if strict and not has_bounds:
                    raise StrictnessError(
                        f"internal node {row.node_id!r} lacks interval bounds "
                        f"for trait {row.trait!r}"
                    )
                lo = row.lower if row.lower is not None else row.value
                hi = row.upper if row.upper is not None else row.value
            if not lo <= row.value <= hi:
                raise TraitTableError(
                    f"node {row.node_id!r}, trait {row.trait!r}: interval "
                    f"[{lo}, {hi}] does not contain the estimate {row.value}"
                )
            per_trait = matrix.continuous.setdefault(row.trait, {})
            if row.node_id in per_trait:
                raise TraitTableError(
                    f"duplicate continuous row for node {row.node_id!r}, "
                    f"trait {row.trait!r}"
                )
            per_trait[row.node_id] = (row.value, lo, hi)

    for (trait, node_id), by_state in discrete_acc.items():
        idx = state_index[trait]
        vec = np.zeros(len(idx))
        for state, prob in by_state.items():
            vec[idx[state]] = prob
        total = float(vec.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ProbabilitySumError(node_id, trait, total)
        node = tree.node(node_id)
        if strict and node.is_leaf and not np.any(vec == 1.0):
            raise StrictnessError(
                f"leaf {node_id!r} has a non-degenerate state distribution "
                f"for trait {trait!r}"
            )
        matrix.discrete.setdefault(trait, {})[node_id] = vec

    for tdef in trait_defs:
        store = matrix.continuous if tdef.kind == CONTINUOUS else matrix.discrete
        per_trait = store.get(tdef.name, {})
        for node in tree.preorder():
            if node.id not in per_trait:
                raise MissingTrait(node.id, tdef.name)
    return matrix


def validate_dataset(ds: Dataset, strict: bool = True) -> list[Diagnostic]:
    """Check all dataset invariants; returns diagnostics instead of raising."""
    out: list[Diagnostic] = []
    tree = ds.tree

    for node in tree.preorder():
        if node.parent is not None and not node.branch_length > 0:
            out.append(Diagnostic(ERROR, "NONPOSITIVE_BRANCH",
                                  f"branch above {node.id!r} has length "
                                  f"{node.branch_length}", node=node.id))
        if strict and len(node.children) > 2:
            out.append(Diagnostic(ERROR, "POLYTOMY",
                                  f"node {node.id!r} has {len(node.children)} "
                                  "children (tree is not binary)", node=node.id))

    depth = present_time(tree)
    tol = abs(depth) * ULTRAMETRIC_RTOL
    for leaf in tree.leaves:
        t = tree.nodes[leaf].time
        if abs(t - depth) > tol:
            out.append(Diagnostic(WARNING, "NON_ULTRAMETRIC",
                                  f"leaf {leaf!r} at time {t}, present time is "
                                  f"{depth}", node=leaf))

    for tdef in ds.trait_defs:
        if tdef.kind == CONTINUOUS:
            per = ds.traits.continuous.get(tdef.name, {})
            for node in tree.preorder():
                triple = per.get(node.id)
                if triple is None:
                    out.append(Diagnostic(ERROR, "MISSING_TRAIT",
                                          f"node {node.id!r} has no value for "
                                          f"trait {tdef.name!r}",
                                          node=node.id, trait=tdef.name))
                    continue
                est, lo, hi = triple
                if not lo <= est <= hi:
                    out.append(Diagnostic(ERROR, "CI_ORDER",
                                          f"interval [{lo}, {hi}] does not "
                                          f"contain estimate {est}",
                                          node=node.id, trait=tdef.name))
                elif strict and node.is_leaf and (lo != est or hi != est):
                    out.append(Diagnostic(ERROR, "LEAF_UNCERTAIN",
                                          f"leaf {node.id!r} carries a "
                                          "non-degenerate interval",
                                          node=node.id, trait=tdef.name))
        else:
            per_d = ds.traits.discrete.get(tdef.name, {})
            for node in tree.preorder():
                vec = per_d.get(node.id)
                if vec is None:
                    out.append(Diagnostic(ERROR, "MISSING_TRAIT",
                                          f"node {node.id!r} has no value for "
                                          f"trait {tdef.name!r}",
                                          node=node.id, trait=tdef.name))
                    continue
                if np.any(vec < 0) or np.any(vec > 1):
                    out.append(Diagnostic(ERROR, "PROB_RANGE",
                                          "state probabilities outside [0, 1]",
                                          node=node.id, trait=tdef.name))
                total = float(vec.sum())
                if abs(total - 1.0) > PROB_SUM_TOL:
                    out.append(Diagnostic(ERROR, "PROB_SUM",
                                          f"state probabilities sum to {total}",
                                          node=node.id, trait=tdef.name))
                elif strict and node.is_leaf and not np.any(vec == 1.0):
                    out.append(Diagnostic(ERROR, "LEAF_UNCERTAIN",
                                          f"leaf {node.id!r} has a "
                                          "non-degenerate state distribution",
                                          node=node.id, trait=tdef.name))
    return out


# --- CSV and directory IO ---------------------------------------------------


def _parse_float(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise TraitTableError(f"bad number {text!r} in {context}") from None


def read_traits_csv(text: str) -> list[TraitRow]:
    """Parse the long-format trait CSV; the header must match exactly."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TraitTableError("empty trait table") from None
    if header != CSV_HEADER:
        raise TraitTableError(
            f"bad header {','.join(header)!r}, expected {','.join(CSV_HEADER)!r}"
        )
    rows: list[TraitRow] = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(CSV_HEADER):
            raise TraitTableError(f"line {lineno}: expected {len(CSV_HEADER)} fields")
        node_id, trait, kind, state, value, lower, upper = cells
        if kind not in (CONTINUOUS, DISCRETE):
            raise TraitTableError(f"line {lineno}: unknown kind {kind!r}")
        rows.append(TraitRow(
            node_id=node_id,
            trait=trait,
            kind=kind,
            state=state or None,
            value=_parse_float(value, f"line {lineno}"),
            lower=_parse_float(lower, f"line {lineno}") if lower else None,
            upper=_parse_float(upper, f"line {lineno}") if upper else None,
        ))
    return rows


def traits_to_rows(ds: Dataset) -> list[TraitRow]:
    """Long-format rows in deterministic order (preorder nodes, declared traits)."""
    rows: list[TraitRow] = []
    for tdef in ds.trait_defs:
        for node in ds.tree.preorder():
            if tdef.kind == CONTINUOUS:
                est, lo, hi = ds.traits.interval(node.id, tdef.name)
                if node.is_leaf and lo == est and hi == est:
                    rows.append(TraitRow(node.id, tdef.name, CONTINUOUS, value=est))
                else:
                    rows.append(TraitRow(node.id, tdef.name, CONTINUOUS,
                                         value=est, lower=lo, upper=hi))
            else:
                vec = ds.traits.probabilities(node.id, tdef.name)
                if node.is_leaf:
                    state = tdef.states[int(np.argmax(vec))]
                    rows.append(TraitRow(node.id, tdef.name, DISCRETE,
                                         state=state, value=1.0))
                else:
                    for state, prob in zip(tdef.states, vec):
                        rows.append(TraitRow(node.id, tdef.name, DISCRETE,
                                             state=state, value=float(prob)))
    return rows


def write_traits_csv(rows: list[TraitRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            row.node_id,
            row.trait,
            row.kind,
            row.state or "",
            repr(row.value),
            repr(row.lower) if row.lower is not None else "",
            repr(row.upper) if row.upper is not None else "",
        ])
    return out.getvalue()


def read_dataset(directory: str | Path, strict: bool = True) -> Dataset:
    """Load the canonical dataset directory (`tree.nwk` + `traits.csv`)."""
    directory = Path(directory)
    tree = newick.parse_newick((directory / "tree.nwk").read_text())
    rows = read_traits_csv((directory / "traits.csv").read_text())
    matrix = load_traits(rows, tree, strict=strict)
    return Dataset(tree=tree, traits=matrix)


def write_dataset(ds: Dataset, directory: str | Path, meta: str | None = None) -> None:
    """Write the canonical dataset directory; byte-deterministic for a dataset."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "tree.nwk").write_text(newick.serialize_newick(ds.tree) + "\n")
    (directory / "traits.csv").write_text(write_traits_csv(traits_to_rows(ds)))
    if meta is not None:
        (directory / "meta.txt").write_text(meta)
