"""Seysen and LLL lattice reduction aided linear precoding for multiuser MIMO."""

from .errors import ConfigError, DimensionError, SingularMatrixError, TransformOverflowError
from .lattice import lll_reduce, reduce_basis, reduce_greedy, reduce_lazy
from .precoding import SchemeId, build_precoder, lattice_decode
from .simulator import SimConfig, run_ber_sweep, run_condition_cdf

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DimensionError",
    "SingularMatrixError",
    "TransformOverflowError",
    "lll_reduce",
    "reduce_basis",
    "reduce_greedy",
    "reduce_lazy",
    "SchemeId",
    "build_precoder",
    "lattice_decode",
    "SimConfig",
    "run_ber_sweep",
    "run_condition_cdf",
]
