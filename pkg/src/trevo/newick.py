"""Newick parsing and serialization.

Grammar: standard Newick with mandatory branch lengths on every non-root
edge.  Unquoted labels use [A-Za-z0-9_.-]; single-quoted labels may contain
anything, with '' as an escaped quote.  Unlabeled internal nodes are
auto-named "_in<preorder index>".
"""

from __future__ import annotations

import re

from .errors import DuplicateLabel, MissingBranchLength, NewickSyntaxError
from .tree import PhyloTree, build_tree

_LABEL_RE = re.compile(r"[A-Za-z0-9_.\-]+")
_NUMBER_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


class _Clade:
    __slots__ = ("label", "length", "children")

    def __init__(self):
        self.label: str | None = None
        self.length: float | None = None
        self.children: list[_Clade] = []


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> NewickSyntaxError:
        return NewickSyntaxError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        return self.text[self.pos]

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> _Clade:
        self.skip_ws()
        root = self.subtree()
        if self.peek() != ";":
            raise self.error("expected ';'")
        self.pos += 1
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing characters after ';'")
        return root

    def subtree(self) -> _Clade:
        clade = _Clade()
        if self.peek() == "(":
            self.pos += 1
            clade.children.append(self.subtree())
            while self.peek() == ",":
                self.pos += 1
                clade.children.append(self.subtree())
            self.expect(")")
            clade.label = self.maybe_label()
        else:
            clade.label = self.maybe_label()
            if clade.label is None:
                raise self.error("expected a leaf label or '('")
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == ":":
            self.pos += 1
            clade.length = self.number()
        return clade

    def maybe_label(self) -> str | None:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        if self.text[self.pos] == "'":
            return self.quoted_label()
        m = _LABEL_RE.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def quoted_label(self) -> str:
        self.pos += 1  # opening quote
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated quoted label")
            ch = self.text[self.pos]
            if ch == "'":
                if self.text[self.pos + 1 : self.pos + 2] == "'":
                    out.append("'")
                    self.pos += 2
                    continue
                self.pos += 1
                break
            out.append(ch)
            self.pos += 1
        if not out:
            raise self.error("empty quoted label")
        return "".join(out)

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if m is None:
            raise self.error("expected a branch length")
        self.pos = m.end()
        return float(m.group())


def parse_newick(text: str) -> PhyloTree:
    """Parse a Newick string into a rooted, time-calibrated tree.

    Raises NewickSyntaxError (position-annotated) on malformed input,
    MissingBranchLength when a non-root edge lacks a length, and
    DuplicateLabel on repeated node names.
    """
    root_clade = _Parser(text).parse()

    # Auto-name unlabeled internals by preorder index, collision-checked.
    preorder: list[_Clade] = []
    stack = [root_clade]
    while stack:
        clade = stack.pop()
        preorder.append(clade)
        stack.extend(reversed(clade.children))
    used = {c.label for c in preorder if c.label is not None}
    seen: set[str] = set()
    for c in preorder:
        if c.label is not None and c.label in seen:
            raise DuplicateLabel(f"label {c.label!r} appears more than once")
        if c.label is not None:
            seen.add(c.label)
    for idx, clade in enumerate(preorder):
        if clade.label is None:
            name = f"_in{idx}"
            if name in used:
                raise DuplicateLabel(
                    f"auto-generated name {name!r} collides with an existing label"
                )
            clade.label = name

    parents: dict[str, str | None] = {root_clade.label: None}  # type: ignore[dict-item]
    children: dict[str, list[str]] = {}
    lengths: dict[str, float] = {}
    for clade in preorder:
        assert clade.label is not None
        children[clade.label] = [c.label for c in clade.children]  # type: ignore[misc]
        for child in clade.children:
            parents[child.label] = clade.label  # type: ignore[index]
            if child.length is None:
                raise MissingBranchLength(
                    f"edge above {child.label!r} has no branch length"
                )
            lengths[child.label] = child.length  # type: ignore[index]
    return build_tree(parents, children, lengths, root_clade.label)  # type: ignore[arg-type]


def _format_label(label: str) -> str:
    if _LABEL_RE.fullmatch(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def serialize_newick(tree: PhyloTree) -> str:
    """Render a tree back to Newick with full-precision branch lengths.

    parse_newick(serialize_newick(t)) is structurally identical to t.
    """

    def render(node_id: str) -> str:
        node = tree.nodes[node_id]
        label = _format_label(node.id)
        if node.is_leaf:
            body = label
        else:
            inner = ",".join(render(c) for c in node.children)
            body = f"({inner}){label}"
        if node.parent is None:
            return body
        return f"{body}:{node.branch_length!r}"

    return render(tree.root) + ";"
