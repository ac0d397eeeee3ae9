"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or vector has the wrong shape for the requested operation."""


class SingularMatrixError(ValueError):
    """Matrix is singular, rank deficient, or not positive definite."""


class TransformOverflowError(OverflowError):
    """An integer entry of the unimodular transform left the int64 range."""


class ConfigError(ValueError):
    """Invalid key=value configuration or matrix file contents."""
