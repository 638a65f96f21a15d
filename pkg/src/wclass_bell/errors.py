"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class WClassError(Exception):
    """Base class for all library errors."""


class ContractError(WClassError, ValueError):
    """An operation was called with structurally wrong arguments (shape, dimension)."""


class ValidationError(WClassError, ValueError):
    """Input failed a physical validity check (Hermiticity, trace, norm, domain)."""


class InvalidStateError(ValidationError):
    """The amplitude vector cannot describe a state (e.g. all zeros)."""


class NumericalError(WClassError, ArithmeticError):
    """A numerical routine failed to converge or produced an inadmissible value."""


class ConsistencyError(WClassError):
    """Closed-form and matrix-path values disagree beyond tolerance."""


class InvariantViolation(WClassError):
    """A sampled state is a counterexample to one of the checked relations.

    ``probs`` carries the offending probability triple when known.
    """

    def __init__(self, message, probs=None):
        super().__init__(message)
        self.probs = probs
