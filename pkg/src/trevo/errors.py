"""Exception hierarchy and the Diagnostic record shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class TrevoError(Exception):
    """Base class for all errors raised by this package."""


# --- Newick / tree construction -------------------------------------------

class NewickError(TrevoError):
    pass


class NewickSyntaxError(NewickError):
    """Malformed Newick input; carries the 0-based character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MissingBranchLength(NewickError):
    pass


class DuplicateLabel(NewickError):
    pass


class NonPositiveBranchLength(NewickError):
    pass


# --- Tree queries -----------------------------------------------------------

class UnknownNode(TrevoError):
    pass


class UnknownLeaf(UnknownNode):
    pass


class NotAnAncestor(TrevoError):
    pass


class SamePair(TrevoError):
    pass


# --- Trait loading ----------------------------------------------------------

class TraitTableError(TrevoError):
    pass


class UnknownTrait(TraitTableError):
    pass


class MissingTrait(TraitTableError):
    def __init__(self, node_id: str, trait: str):
        super().__init__(f"node {node_id!r} has no value for trait {trait!r}")
        self.node_id = node_id
        self.trait = trait


class ProbabilitySumError(TraitTableError):
    def __init__(self, node_id: str, trait: str, total: float):
        super().__init__(
            f"state probabilities for node {node_id!r}, trait {trait!r} "
            f"sum to {total}, expected 1"
        )
        self.node_id = node_id
        self.trait = trait
        self.total = total


class StrictnessError(TraitTableError):
    pass


class KindMismatch(TrevoError):
    pass


# --- Selections and summaries -----------------------------------------------

class EmptySelection(TrevoError):
    pass


class EmptyInput(TrevoError):
    pass


# --- Pattern engine -----------------------------------------------------------

class MismatchedRoot(TrevoError):
    pass


class NoContinuousTrait(TrevoError):
    pass


class TooFewLeaves(TrevoError):
    pass


class InvalidQuery(TrevoError):
    pass


# --- Synthetic data -----------------------------------------------------------

class PairTooClose(TrevoError):
    pass


# --- Diagnostics --------------------------------------------------------------

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; `severity` is "error" or "warning"."""

    severity: str
    code: str
    message: str
    node: str | None = None
    trait: str | None = None

    def __str__(self) -> str:
        where = []
        if self.node is not None:
            where.append(f"node={self.node}")
        if self.trait is not None:
            where.append(f"trait={self.trait}")
        suffix = f" [{', '.join(where)}]" if where else ""
        return f"{self.severity}: {self.code}: {self.message}{suffix}"
