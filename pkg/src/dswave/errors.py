"""Typed errors shared across the package."""


class DsWaveError(ValueError):
    """Base class for all package-specific errors."""


class ChartSingularError(DsWaveError):
    """Point lies on the excluded set of a coordinate chart."""


class ComplementarySeriesError(DsWaveError):
    """Mass below the principal-series threshold (n-1)/(2R); out of scope."""


class OnSingularSurfaceError(DsWaveError):
    """Evaluation requested exactly on the x.xi = 0 surface."""


class PoleError(DsWaveError):
    """Evaluation at a pole of a special function."""


class UnsupportedCaseError(DsWaveError):
    """Parameter degeneracy outside the supported regime."""


class AccuracyError(DsWaveError):
    """A numerical procedure could not reach its accuracy target."""
