"""Exception types shared across the package.

The split matters for the CLI and the service: input problems (bad files,
mismatched shapes, out-of-range arguments) map to exit code 2 / HTTP 400,
an exhausted enumeration budget maps to exit code 3, and anything else is
an internal error (exit code 1 / HTTP 500).
"""


class ValidationError(ValueError):
    """User-supplied data is malformed or violates a precondition."""


class ShapeError(ValidationError):
    """Array dimensions do not line up (layer chain, input length, ...)."""


class NetworkFormatError(ValidationError):
    """A network file failed to parse or has the wrong structure."""


class UnsupportedError(ValidationError):
    """The requested quantity is undefined for this architecture.

    Raised instead of silently computing something the underlying result
    does not cover (for example weight-magnitude Lipschitz bounds for
    networks with fewer than three hidden layers' worth of depth).
    """


class GeometryError(ValidationError):
    """A polygon operation was asked of an unsuitable region or network."""


class BudgetExceededError(RuntimeError):
    """Region enumeration hit the node budget before finishing.

    Carries the partial count so callers can report how far it got; the
    partial tree itself is deliberately not exposed.
    """

    def __init__(self, budget: int, explored: int):
        super().__init__(
            f"region enumeration exceeded its node budget ({budget}); "
            f"{explored} candidate nodes were examined"
        )
        self.budget = budget
        self.explored = explored
