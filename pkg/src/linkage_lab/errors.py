"""Exception types shared across the toolkit."""

from __future__ import annotations


class LinkageLabError(Exception):
    """Base class for all toolkit errors."""


class LoopArcError(LinkageLabError):
    """An arc of the form (v, v) was supplied."""


class DuplicateLabelError(LinkageLabError):
    """Two distinct vertex declarations carry the same label."""


class UnknownVertexError(LinkageLabError):
    """An operation referenced a label that is not a vertex of the digraph."""


class CyclicDigraphError(LinkageLabError):
    """Raised where acyclicity is required; carries one witness cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"digraph contains a cycle: {' -> '.join(str(v) for v in self.cycle)}")


class MissingBridgeArcError(LinkageLabError):
    """Walk concatenation needed a bridging arc that the host does not have."""


class MalformedDocumentError(LinkageLabError):
    """A JSON document does not match the expected schema."""


class InvalidSolutionError(LinkageLabError):
    """A claimed grid-tiling solution fails the membership condition."""


class MalformedLinkageError(LinkageLabError):
    """A linkage lacks the structure an extraction step relies on."""


class TooManyPairsError(LinkageLabError):
    """The sweep solver was given more pair occurrences than its state budget allows."""


class EarEnumerationOverflowError(LinkageLabError):
    """Maximal-ear enumeration exceeded its cap."""


class AnonymityCapExceededError(LinkageLabError):
    """No identifying sequence exists within the configured length cap."""


class UnlabeledInstanceError(LinkageLabError):
    """An operation requires gadget-labelled vertices but found foreign labels."""


class ArcNotLiftableError(LinkageLabError):
    """An arc of the source digraph has no counterpart in the edge transform."""


class ZoneProjectionError(LinkageLabError):
    """A path of the edge instance does not decompose into per-vertex zones."""


class InvalidImmersionError(LinkageLabError):
    """A claimed weak immersion fails validation."""


class DegreeBoundError(LinkageLabError):
    """The edge instance violates the total-degree bound required here."""
