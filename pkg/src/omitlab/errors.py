"""Exception hierarchy shared by the library and the command line tool."""


class OmitlabError(Exception):
    """Base class for every library error."""


class InputError(OmitlabError, ValueError):
    """A precondition on operation inputs was violated."""


class UnsupportedModulusError(InputError):
    """Composite modulus passed to a finite-field construction."""


class ParseError(OmitlabError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class BudgetExceededError(OmitlabError):
    """A search or sampling budget ran out before the task finished."""


class OracleTimeoutError(BudgetExceededError):
    """Exact oracle exceeded its node-expansion budget."""


class SamplingError(BudgetExceededError):
    """Vertex sampling missed the target windows within max_retries."""


class ConstructionError(BudgetExceededError):
    """Randomized construction exhausted its retry budget.

    ``level`` records how far the incremental build got before giving up.
    """

    def __init__(self, message, level=None):
        self.level = level
        super().__init__(message)


class SolverError(OmitlabError):
    """Iterative eigensolver failed to converge; carries the residual."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class VerificationError(OmitlabError):
    """A self-check that must hold by construction failed."""
