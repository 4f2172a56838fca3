"""Exception types shared across the package."""


class ExtruderError(Exception):
    """Base class for all package errors."""


class ConfigError(ExtruderError):
    """Invalid or inconsistent configuration input."""


class DomainError(ExtruderError):
    """Spatial coordinate outside the admissible domain."""


class GridError(ExtruderError):
    """Grid too coarse or otherwise unusable."""


class DegenerateDomainError(ExtruderError):
    """Phase domain collapsed below the minimum admissible width."""


class DegenerateGainError(ExtruderError):
    """Gain function vanishes where a division by it is required."""


class ResampleError(ExtruderError):
    """Requested resampling would extrapolate too far beyond the data."""


class SolverError(ExtruderError):
    """Time integration failed (persistent step rejection at dt_min)."""


class AlignmentError(ExtruderError):
    """Profiles live on domains too different to compare."""
