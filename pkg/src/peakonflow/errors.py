"""Exception types shared across the package.

The CLI maps these onto exit codes: bad input -> 1, computation failures
(precision exhaustion, inconsistent data, truncation limits) -> 2, I/O -> 3.
"""


class PeakonError(Exception):
    """Base class for everything raised deliberately by this package."""


class ValidationError(PeakonError):
    """Malformed measure data, out-of-range parameters, bad CLI arguments."""


class ComputationError(PeakonError):
    """A numeric routine could not deliver its contract."""


class PrecisionError(ComputationError):
    """Working precision was insufficient; carries a suggested retry value."""

    def __init__(self, msg, suggested_digits=None):
        super().__init__(msg)
        self.suggested_digits = suggested_digits


class InconsistencyError(ComputationError):
    """Data violated a structural invariant (e.g. two consecutive vanishing
    minors in a determinant chain), so the input cannot come from a measure
    of the assumed class."""


class TruncationError(ComputationError):
    """A series/sum did not settle within the allowed number of terms."""


class InconclusiveError(ComputationError):
    """Partial sums plus the supplied tail bounds decide neither way;
    refusing to guess."""


class DomainError(ComputationError):
    """Evaluation requested outside the region the data determines."""
