"""Linear ZF / MMSE precoding and their lattice-reduction-aided variants.

Everything works on the real-valued model: ``Hr`` is the ``2N_R x 2N_T``
real expansion of the channel, symbol vectors ``s`` have components in
{-1, +1} (4QAM ``+-1 +- 1j``).  ``s`` may be a single column or a block of
columns, one per frame.

For the LRA schemes the reducer runs on the transposed (effective) channel,
giving ``H_red = T^T H``.  The transmitter inverts ``H_red``, so the
noiseless receiver sees ``beta * T^-T s``.  Receivers undo the scale,
quantize onto the shifted integer lattice ``2Z + p`` (``p`` is the parity of
``T^-T 1``) and map back with ``T^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, SingularMatrixError
from .lattice import lll_reduce, reduce_greedy, reduce_lazy
from .matrix_core import as_real, pseudo_inverse, trace_inverse_gram

__all__ = [
    "SchemeId",
    "Precoder",
    "PrecodeResult",
    "beta_scale",
    "unimodular_inverse",
    "parity_offset",
    "mmse_extend",
    "build_precoder",
    "zf_precode",
    "lra_zf_precode",
    "mmse_precode",
    "lra_mmse_precode",
    "lattice_decode",
    "REDUCER_NAMES",
]


class SchemeId(str, Enum):
    ZF = "ZF"
    MMSE = "MMSE"
    LRA_ZF_SA = "LRA-ZF-SA"
    LRA_ZF_LLL = "LRA-ZF-LLL"
    LRA_MMSE_SA = "LRA-MMSE-SA"
    LRA_MMSE_LLL = "LRA-MMSE-LLL"

    def __str__(self) -> str:
        return self.value

    @property
    def is_mmse(self) -> bool:
        return "MMSE" in self.value

    @property
    def reducer(self) -> str | None:
        """'SA', 'LLL' or None for the plain linear schemes."""
        if self.value.startswith("LRA-"):
            return self.value.rsplit("-", 1)[1]
        return None


REDUCER_NAMES = ("SA-greedy", "SA-lazy", "LLL")


@dataclass
class Precoder:
    """Per-channel precoding matrix, reusable for any number of frames.

    ``P`` maps symbol blocks to the unscaled transmit block; ``x = beta * P s``.
    """

    P: np.ndarray
    beta: float
    T: np.ndarray
    parity_offset: np.ndarray

    def precode(self, s) -> np.ndarray:
        return self.beta * (self.P @ np.asarray(s, dtype=np.float64))


@dataclass
class PrecodeResult:
    x: np.ndarray
    beta: float
    T: np.ndarray
    parity_offset: np.ndarray


def beta_scale(Heff, n_t: int) -> float:
    """Power scale ``sqrt(N_T / trace((Heff Heff^T)^-1))``.

    Keeps the mean of ``||beta * Heff^+ s||^2`` at ``N_T`` for unit-power
    real symbol components.
    """
    Heff = as_real(Heff)
    return float(np.sqrt(n_t / trace_inverse_gram(Heff.T)))


def unimodular_inverse(T) -> np.ndarray:
    """Exact integer inverse of a unimodular matrix."""
    T = np.asarray(T, dtype=np.int64)
    n = T.shape[0]
    Ti = np.rint(np.linalg.inv(T.astype(np.float64)))
    if np.max(np.abs(Ti)) < 2.0**31 and np.max(np.abs(T)) < 2**31:
        Ti = Ti.astype(np.int64)
        if np.array_equal(T.astype(object) @ Ti.astype(object), np.eye(n, dtype=np.int64)):
            return Ti
    return _exact_inverse(T)


def _exact_inverse(T: np.ndarray) -> np.ndarray:
    from fractions import Fraction

    n = T.shape[0]
    M = [[Fraction(int(v)) for v in row] + [Fraction(int(r == c)) for c in range(n)]
         for r, row in enumerate(T)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("transform is singular")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    out = [[v for v in row[n:]] for row in M]
    if any(v.denominator != 1 for row in out for v in row):
        raise SingularMatrixError("transform is not unimodular")
    return np.array([[int(v) for v in row] for row in out], dtype=np.int64)


def parity_offset(T) -> np.ndarray:
    """``(T^-T 1) mod 2``: parity of the reduced-domain image of an odd vector."""
    Ti = unimodular_inverse(T)
    return np.mod(Ti.sum(axis=0), 2).astype(np.int64)


def mmse_extend(Hr, sigma_n: float) -> np.ndarray:
    """Regularized channel ``[Hr | sigma_n I]`` with ``I`` sized to Hr's rows."""
    if sigma_n < 0:
        raise ValueError("sigma_n must be non-negative")
    Hr = as_real(Hr)
    return np.hstack([Hr, sigma_n * np.eye(Hr.shape[0])])


def _n_t(Hr: np.ndarray) -> int:
    return Hr.shape[1] // 2


def _reduce_rows(Heff: np.ndarray, reducer: str, rng) -> np.ndarray:
    """Run a reducer on the rows of ``Heff`` (columns of ``Heff^T``); return T."""
    key = reducer.upper()
    if key in ("SA", "SA-GREEDY", "SEYSEN-GREEDY"):
        red = reduce_greedy(Heff.T)
    elif key in ("SA-LAZY", "SEYSEN-LAZY"):
        red = reduce_lazy(Heff.T, rng=rng)
    elif key == "LLL":
        red = lll_reduce(Heff.T)
    else:
        raise ValueError(f"unknown reducer {reducer!r}")
    return red.T


def _check_square(Hr: np.ndarray) -> None:
    if Hr.shape[0] != Hr.shape[1]:
        raise DimensionError(f"square real channel required, got {Hr.shape}")


def _make_precoder(Hr: np.ndarray, mmse: bool, sigma_n: float, reducer: str | None, rng) -> Precoder:
    _check_square(Hr)
    n = Hr.shape[0]
    Heff = mmse_extend(Hr, sigma_n) if mmse else Hr
    if reducer is None:
        T = np.eye(n, dtype=np.int64)
        Hred = Heff
    else:
        T = _reduce_rows(Heff, reducer, rng)
        Hred = T.T.astype(np.float64) @ Heff
    beta = beta_scale(Hred, _n_t(Hr))
    if mmse:
        # keep only the physical transmit dimensions of x'
        P = pseudo_inverse(Hred)[: Hr.shape[1]]
    else:
        P = np.linalg.solve(Hred, np.eye(n))
    return Precoder(P=P, beta=beta, T=T, parity_offset=parity_offset(T))


def build_precoder(Hr, scheme: SchemeId | str, sigma_n: float = 0.0,
                   sa_variant: str = "greedy", rng=None) -> Precoder:
    """Precoding matrix, power scale and transform for one channel.

    ``sa_variant`` selects greedy or lazy Seysen for the ``*-SA`` schemes;
    ``rng`` is only consumed by the lazy variant.
    """
    scheme = SchemeId(scheme)
    red = scheme.reducer
    if red == "SA":
        red = f"SA-{sa_variant}"
    return _make_precoder(as_real(Hr), scheme.is_mmse, sigma_n, red, rng)


def _result(pre: Precoder, s) -> PrecodeResult:
    s = as_real(s)
    return PrecodeResult(x=pre.precode(s), beta=pre.beta, T=pre.T, parity_offset=pre.parity_offset)


def zf_precode(Hr, s) -> PrecodeResult:
    """Channel inversion ``x = beta Hr^-1 s``."""
    return _result(_make_precoder(as_real(Hr), False, 0.0, None, None), s)


def lra_zf_precode(Hr, s, reducer: str = "SA-greedy", rng=None) -> PrecodeResult:
    """ZF on the reduced channel ``T^T Hr``; ``reducer`` is one of REDUCER_NAMES."""
    return _result(_make_precoder(as_real(Hr), False, 0.0, reducer, rng), s)


def mmse_precode(Hr, s, sigma_n: float) -> PrecodeResult:
    """Regularized channel inversion; keeps the first ``2 N_T`` entries of
    ``beta [Hr | sigma_n I]^+ s``."""
    return _result(_make_precoder(as_real(Hr), True, sigma_n, None, None), s)


def lra_mmse_precode(Hr, s, sigma_n: float, reducer: str = "SA-greedy", rng=None) -> PrecodeResult:
    return _result(_make_precoder(as_real(Hr), True, sigma_n, reducer, rng), s)


def lattice_decode(y, beta: float, T, parity_offset) -> np.ndarray:
    """Receiver decision: scale, slice onto ``2Z + parity``, map back by ``T^T``.

    Returns symbols in {-1, +1} with the same shape as ``y``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    v = np.asarray(y, dtype=np.float64) / beta
    p = np.asarray(parity_offset, dtype=np.float64).reshape(-1, 1)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    z = 2.0 * np.round((v - p) / 2.0) + p
    s_hat = np.asarray(T, dtype=np.float64).T @ z
    return np.where(s_hat > 0.0, 1.0, -1.0)

