"""Exception hierarchy shared across the package.

Every error raised by pdslab derives from :class:`PdsLabError` so callers
(notably the CLI) can map failures onto exit codes without matching on
message text.
"""

from __future__ import annotations


class PdsLabError(Exception):
    """Base class for all pdslab errors."""


class InvalidParameterError(PdsLabError, ValueError):
    """A parameter is outside its documented domain."""


class InvalidProbabilityError(InvalidParameterError):
    """A probability argument lies outside [0, 1]."""


class InvalidGammaError(InvalidParameterError):
    """The clique edge density must lie in (0, 1/2]."""


class AbsoluteContinuityError(PdsLabError, ValueError):
    """chi-square divergence requested where the reference has zero mass."""


class InvalidPmfError(PdsLabError, ValueError):
    """A probability vector fails normalization or nonnegativity."""


class ValidityViolationError(PdsLabError, ValueError):
    """A surgically modified PMF came out negative: the caller broke the
    validity conditions of the kernel construction."""


class BudgetExceededError(PdsLabError, RuntimeError):
    """Exhaustive enumeration would visit more subsets than the budget."""


class TooLargeError(PdsLabError, ValueError):
    """An exhaustive check was requested above its hard size cap."""


class PreconditionViolationError(PdsLabError, ValueError):
    """An operation's stated precondition does not hold."""


class ContractViolationError(PdsLabError, RuntimeError):
    """A user-supplied callable violated its interface contract."""


class VertexCountMismatchError(PdsLabError, ValueError):
    """An input graph has a different vertex count than the parameters."""


class EdgeListParseError(PdsLabError, ValueError):
    """Malformed edge-list file; carries the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(PdsLabError, ValueError):
    """A sweep configuration file failed validation."""
