"""Exception hierarchy shared by every dpfrac module."""


class DpfracError(Exception):
    code = "error"


class InvalidParameter(DpfracError, ValueError):
    code = "invalid-parameter"


class NotConnected(DpfracError):
    code = "not-connected"


class CoverError(DpfracError):
    code = "invalid-cover"


class NonEdgeMatching(CoverError):
    """A matching was supplied for a pair of vertices that is not an edge."""

    code = "non-edge-matching"


class NonInjectiveMatching(CoverError):
    code = "non-injective-matching"


class InvalidColor(CoverError):
    code = "invalid-color"


class InvalidTree(DpfracError):
    code = "invalid-tree"


class FoldTooSmall(DpfracError):
    """Tree normalization needs at least two colors per vertex."""

    code = "fold-too-small"


class InvalidAssignment(DpfracError):
    code = "invalid-assignment"


class TooLarge(DpfracError):
    """An exhaustive enumeration would exceed its budget."""

    code = "too-large"

    def __init__(self, message, size=None, budget=None):
        super().__init__(message)
        self.size = size
        self.budget = budget


class InfeasibleTrivially(DpfracError):
    code = "infeasible-trivially"


class NotFound(DpfracError):
    code = "not-found"


class NoBound(DpfracError):
    code = "no-bound"


class IntegrityError(DpfracError):
    """Raised when two independent routes disagree. Always a bug."""

    code = "integrity-failure"


class ConstructionIntegrityError(IntegrityError):
    code = "construction-integrity-error"

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class MalformedInput(DpfracError):
    code = "malformed-input"

    def __init__(self, message, pointer="$"):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
