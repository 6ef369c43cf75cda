"""Exception hierarchy shared across the package."""


class AdvLossError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(AdvLossError):
    """A loss specification violates its own constraints."""


class AlphaOutOfRange(InvalidSpec):
    """An abstention penalty outside the supported [0, 1/2] interval."""


class UnsupportedBase(InvalidSpec):
    """A weighted loss wrapping something other than a standard metric."""


class DimensionMismatch(AdvLossError):
    """Vector or matrix shapes are inconsistent."""


class SolverFailure(AdvLossError):
    """The linear-program solver exceeded its pivot budget or stalled."""


class TooLarge(AdvLossError):
    """An instance exceeds a combinatorial safety guard."""


class SchemeUnavailable(AdvLossError):
    """A prediction scheme that does not apply to the given loss."""


class BadConfig(AdvLossError):
    """An optimizer or experiment configuration that cannot be run."""


class BudgetExceeded(AdvLossError):
    """An iterative routine hit its budget before reaching tolerance."""


class ParseError(AdvLossError):
    """A malformed cell or row in an input file."""


class EmptyDataset(AdvLossError):
    """An input file with no usable rows."""


class TooSmall(AdvLossError):
    """A dataset too small to split as requested."""
