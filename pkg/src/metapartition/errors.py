"""Exception hierarchy shared by the solvers."""


class MetapartitionError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MetapartitionError, ValueError):
    """A time or parameter lies outside the domain of a model function."""


class ParameterError(MetapartitionError, ValueError):
    """A model or solver parameter violates its declared constraints."""


class BracketError(MetapartitionError, RuntimeError):
    """Adaptive bracket expansion did not terminate within its limits."""


class DegenerateEfficacyError(MetapartitionError, ValueError):
    """Planning has zero marginal effect, so no interior coupling exists."""


class SamplingError(MetapartitionError, ValueError):
    """A sampled problem instance violates positivity."""
