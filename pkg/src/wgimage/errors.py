"""Exception types shared across the package."""


class NoGuidedModes(Exception):
    """Raised when the frequency is below the first waveguide cutoff."""


class QuadratureNotConverged(Exception):
    """Raised when adaptive refinement of an array integral fails its tolerance."""


class SingularUnregularized(Exception):
    """Raised when unregularized inversion meets a numerically singular spectrum."""


class TooFewReceivers(Exception):
    """Raised when a sensing matrix would have fewer rows than modes."""


class EmptySpectrum(Exception):
    """Raised when an effective-rank query receives no spectral values."""


class GeometryMismatch(Exception):
    """Raised when field samples and an operator disagree about the array geometry."""


class ConfigError(Exception):
    """Raised on invalid or inconsistent experiment configuration."""
