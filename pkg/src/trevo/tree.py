"""Rooted, time-calibrated tree model and topology queries.

Times run forward from the root (time 0) to the present (maximum leaf
time).  Trees are immutable after construction; all queries are read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NonPositiveBranchLength, NotAnAncestor, SamePair, UnknownLeaf, UnknownNode


@dataclass(frozen=True)
class Node:
    id: str
    parent: str | None
    children: tuple[str, ...]
    branch_length: float  # 0.0 for the root
    time: float  # cumulative branch length from the root

    @property
    def is_leaf(self) -> bool:
        return not self.children


class PhyloTree:
    """Indexed node set with a single root.

    Construct via :func:`build_tree` (or the Newick parser) so that node
    times are consistent with branch lengths.
    """

    def __init__(self, nodes: dict[str, Node], root: str):
        self.nodes = nodes
        self.root = root

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node named {node_id!r}") from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        """Leaf ids in lexicographic order."""
        return tuple(sorted(n.id for n in self.nodes.values() if n.is_leaf))

    @cached_property
    def internal_nodes(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.preorder() if not n.is_leaf)

    def preorder(self) -> list[Node]:
        out: list[Node] = []
        stack = [self.root]
        while stack:
            node = self.nodes[stack.pop()]
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    @cached_property
    def edge_depth(self) -> dict[str, int]:
        """Number of edges from the root to each node."""
        depth = {self.root: 0}
        for node in self.preorder():
            if node.parent is not None:
                depth[node.id] = depth[node.parent] + 1
        return depth

    def descendant_leaves(self, node_id: str) -> list[str]:
        """Leaf ids below (or equal to) `node_id`, lexicographically sorted."""
        self.node(node_id)
        found = []
        stack = [node_id]
        while stack:
            node = self.nodes[stack.pop()]
            if node.is_leaf:
                found.append(node.id)
            else:
                stack.extend(node.children)
        return sorted(found)


def build_tree(
    parents: dict[str, str | None],
    children: dict[str, list[str]],
    branch_lengths: dict[str, float],
    root: str,
) -> PhyloTree:
    """Assemble a PhyloTree, computing node times from branch lengths.

    Non-root branch lengths must be strictly positive.
    """
    times: dict[str, float] = {root: 0.0}
    nodes: dict[str, Node] = {}
    order = [root]
    i = 0
    while i < len(order):
        nid = order[i]
        i += 1
        order.extend(children.get(nid, ()))
    for nid in order:
        parent = parents.get(nid)
        if parent is None:
            bl = 0.0
        else:
            bl = branch_lengths[nid]
            if not bl > 0:
                raise NonPositiveBranchLength(
                    f"branch above {nid!r} has non-positive length {bl}"
                )
            times[nid] = times[parent] + bl
        nodes[nid] = Node(
            id=nid,
            parent=parent,
            children=tuple(children.get(nid, ())),
            branch_length=bl,
            time=times[nid],
        )
    return PhyloTree(nodes, root)


def _require_leaf(tree: PhyloTree, leaf_id: str) -> Node:
    if leaf_id not in tree.nodes:
        raise UnknownLeaf(f"no leaf named {leaf_id!r}")
    node = tree.nodes[leaf_id]
    if not node.is_leaf:
        raise UnknownLeaf(f"{leaf_id!r} is not a leaf")
    return node


def mrca(tree: PhyloTree, a: str, b: str) -> str:
    """Most recent common ancestor of two leaves (ancestor-or-self)."""
    _require_leaf(tree, a)
    _require_leaf(tree, b)
    depth = tree.edge_depth
    x, y = a, b
    while depth[x] > depth[y]:
        x = tree.nodes[x].parent  # type: ignore[assignment]
    while depth[y] > depth[x]:
        y = tree.nodes[y].parent  # type: ignore[assignment]
    while x != y:
        x = tree.nodes[x].parent  # type: ignore[assignment]
        y = tree.nodes[y].parent  # type: ignore[assignment]
    return x


def path_from(tree: PhyloTree, ancestor: str, node_id: str) -> list[str]:
    """Node ids from `ancestor` down to `node_id`, inclusive."""
    tree.node(ancestor)
    cur = tree.node(node_id)
    path = [cur.id]
    while cur.id != ancestor:
        if cur.parent is None:
            raise NotAnAncestor(f"{ancestor!r} is not an ancestor of {node_id!r}")
        cur = tree.nodes[cur.parent]
        path.append(cur.id)
    path.reverse()
    return path


def topo_edges(tree: PhyloTree, a: str, b: str) -> int:
    """Edge count between two leaves through their MRCA."""
    anc = mrca(tree, a, b)
    depth = tree.edge_depth
    return (depth[a] - depth[anc]) + (depth[b] - depth[anc])


def present_time(tree: PhyloTree) -> float:
    """Maximum leaf time; equals every leaf time in ultrametric trees."""
    return max(tree.nodes[l].time for l in tree.leaves)


def metric_distance(tree: PhyloTree, a: str, b: str) -> tuple[float, int]:
    """(present_time - time of MRCA, topological edge count) for a leaf pair."""
    if a == b:
        raise SamePair(f"need two distinct leaves, got {a!r} twice")
    anc = mrca(tree, a, b)
    return present_time(tree) - tree.nodes[anc].time, topo_edges(tree, a, b)


def mrca_table(tree: PhyloTree) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs MRCA times and edge depths over `tree.leaves`.

    Returns (times, depths), both shaped (L, L) and indexed by the position
    of each leaf in the lexicographic `tree.leaves` order.  Diagonal entries
    describe the leaf itself.  Runs in O(L^2) via one postorder sweep.
    """
    leaves = tree.leaves
    index = {l: i for i, l in enumerate(leaves)}
    n = len(leaves)
    t = np.empty((n, n))
    d = np.empty((n, n), dtype=np.int64)
    depth = tree.edge_depth
    for l in leaves:
        i = index[l]
        t[i, i] = tree.nodes[l].time
        d[i, i] = depth[l]
    # Postorder: at each internal node, leaf pairs split across distinct
    # child subtrees have this node as their MRCA.
    groups: dict[str, np.ndarray] = {}
    for node in reversed(tree.preorder()):
        if node.is_leaf:
            groups[node.id] = np.array([index[node.id]])
            continue
        child_groups = [groups.pop(c) for c in node.children]
        for i in range(len(child_groups)):
            for j in range(i + 1, len(child_groups)):
                ix = np.ix_(child_groups[i], child_groups[j])
                t[ix] = node.time
                d[ix] = depth[node.id]
                ix_r = np.ix_(child_groups[j], child_groups[i])
                t[ix_r] = node.time
                d[ix_r] = depth[node.id]
        groups[node.id] = np.concatenate(child_groups)
    return t, d
