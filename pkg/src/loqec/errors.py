"""Exception types shared across the simulator."""


class LoqecError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(LoqecError):
    """A numeric input violates its contract (norms, ranges, probabilities)."""


class ConfigurationError(LoqecError):
    """An element, wiring, or config references ports or paths inconsistently."""


class StructureError(LoqecError):
    """A state lacks the photon-number structure an operation requires."""


class UsageError(LoqecError):
    """An operation was invoked with arguments that make no physical sense."""


class FitError(LoqecError):
    """Curve fitting failed: too few points or a rank-deficient design."""


class ManifestError(LoqecError):
    """A run manifest does not satisfy the strict config schema."""
