"""Exception types raised across the package."""


class DiscriminationError(Exception):
    """Base class for all errors raised by orthodisc."""


class DimensionError(DiscriminationError, ValueError):
    pass


class NotHermitianError(DiscriminationError, ValueError):
    pass


class NotPSDError(DiscriminationError, ValueError):
    pass


class ValidationError(DiscriminationError, ValueError):
    """Input violates a precondition of the discrimination construction."""


class NormalizationError(ValidationError):
    pass


class OrthogonalityError(ValidationError):
    def __init__(self, i: int, j: int, overlap: float):
        self.indices = (i, j)
        self.overlap = overlap
        super().__init__(
            f"states {i + 1} and {j + 1} are not orthogonal (|<phi_{i + 1}|phi_{j + 1}>| = {overlap:.6g})"
        )


class EigenvalueArrayError(ValidationError):
    """An eigenvalue array set cannot label the states unambiguously.

    ``rows`` holds the offending 0-based row indices and ``states`` the
    colliding 0-based state indices, where applicable.
    """

    def __init__(self, message: str, rows=(), states=()):
        self.rows = tuple(rows)
        self.states = tuple(states)
        super().__init__(message)


class NoMatchError(DiscriminationError, LookupError):
    pass


class UnsupportedGateError(DiscriminationError, ValueError):
    pass


class UnroutableError(DiscriminationError):
    def __init__(self, gate, pair):
        self.gate = gate
        self.pair = tuple(pair)
        super().__init__(
            f"{gate.kind} needs physical qubits {self.pair[0]} and {self.pair[1]} "
            f"to be coupled, but the coupling map has no edge between them"
        )


class FactorizationError(DiscriminationError, RuntimeError):
    """The state register is still entangled with the rest after measurement."""
