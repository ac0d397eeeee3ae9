"""Monte-Carlo harness: BER sweeps over precoding schemes and condition-number CDFs.

Randomness is keyed, never shared.  Every channel index ``c`` owns
independent PCG64 streams derived from ``SeedSequence(seed, spawn_key=(c, purpose))``:
one for the channel draw (and any resampling), one for the frame data (bits
and noise) and one for the lazy-Seysen pair choice.  The same channels, bits
and unit-variance noise are therefore reused across schemes and SNR points,
and a work unit's result does not depend on which process runs it.

Gaussian samples use the Box-Muller transform on ``Generator.random()``
doubles: ``r = sqrt(-2 ln(1 - u1))``, ``z0 = r cos(2 pi u2)``,
``z1 = r sin(2 pi u2)``, with ``u1`` / ``u2`` taken from consecutive
halves of one uniform block.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SingularMatrixError
from .lattice import lll_reduce, reduce_greedy, reduce_lazy
from .matrix_core import complex_to_real_matrix, condition_number
from .precoding import SchemeId, build_precoder, lattice_decode

log = logging.getLogger(__name__)

__all__ = [
    "SimConfig",
    "BerPoint",
    "CdfPoint",
    "ConditionStudy",
    "stream",
    "box_muller",
    "gen_channel",
    "qam4_modulate",
    "qam4_demodulate",
    "noise_variance",
    "snr_to_sigma",
    "run_ber_point",
    "run_ber_sweep",
    "condition_study",
    "run_condition_cdf",
    "ber_at",
    "snr_at_ber",
    "ALL_SCHEMES",
    "SIGMA_MODES",
]

ALL_SCHEMES = tuple(SchemeId)
SIGMA_MODES = ("tx-power", "per-bit")
BITS_PER_SYMBOL = 2

# stream purposes
_CHANNEL, _DATA, _LAZY = 0, 1, 2


@dataclass
class SimConfig:
    n_t: int = 4
    n_r: int = 4
    snr_grid_db: tuple[float, ...] = ()
    schemes: tuple[SchemeId, ...] = ALL_SCHEMES
    n_channels: int = 10_000
    frames_per_channel: int = 100
    min_errors: int = 200
    min_channels: int = 1000
    seed: int = 0
    sigma_mode: str = "tx-power"
    sa_variant: str = "greedy"
    workers: int = 1

    def __post_init__(self):
        self.snr_grid_db = tuple(float(s) for s in self.snr_grid_db)
        self.schemes = tuple(SchemeId(s) for s in self.schemes)
        if self.n_t != self.n_r:
            raise ConfigError("n_t must equal n_r (square real channel)")
        if self.n_t < 1:
            raise ConfigError("n_t must be positive")
        if not all(math.isfinite(s) for s in self.snr_grid_db):
            raise ConfigError("snr_grid_db entries must be finite")
        for name in ("n_channels", "frames_per_channel", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.min_errors < 0 or self.min_channels < 0:
            raise ConfigError("min_errors and min_channels must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(f"sigma_mode must be one of {SIGMA_MODES}")
        if self.sa_variant not in ("greedy", "lazy"):
            raise ConfigError("sa_variant must be 'greedy' or 'lazy'")


@dataclass
class BerPoint:
    scheme: SchemeId
    snr_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    ci95_halfwidth: float
    channels: int = 0
    resampled: int = 0


@dataclass
class CdfPoint:
    reducer: str
    kappa: float
    cdf: float


@dataclass
class ConditionStudy:
    """Per-channel condition numbers plus reducer operation counters."""

    kappa: dict[str, np.ndarray]
    counters: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def n_channels(self) -> int:
        return len(self.kappa["none"])

    def complexity_summary(self) -> dict[str, float]:
        """Mean counters per channel and SA/LLL ratios (informational)."""
        n = max(self.n_channels, 1)
        sa, lll = self.counters["SA"], self.counters["LLL"]
        out = {
            "SA_mean_iterations": sa["iterations"] / n,
            "SA_mean_pair_evaluations": sa["pair_evaluations"] / n,
            "LLL_mean_iterations": lll["iterations"] / n,
            "LLL_mean_pair_evaluations": lll["pair_evaluations"] / n,
        }
        out["iteration_ratio_SA_over_LLL"] = (
            sa["iterations"] / lll["iterations"] if lll["iterations"] else float("nan")
        )
        out["pair_evaluation_ratio_SA_over_LLL"] = (
            sa["pair_evaluations"] / lll["pair_evaluations"] if lll["pair_evaluations"] else float("nan")
        )
        return out


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def box_muller(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normal samples via Box-Muller on the stream's uniforms."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    n = int(np.prod(shape))
    half = (n + 1) // 2
    u = rng.random(2 * half)
    r = np.sqrt(-2.0 * np.log1p(-u[:half]))
    theta = 2.0 * np.pi * u[half:]
    z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
    return z[:n].reshape(shape)


def gen_channel(rng: np.random.Generator, n_r: int, n_t: int) -> np.ndarray:
    """i.i.d. CN(0, 1) entries: real and imaginary parts N(0, 1/2)."""
    z = box_muller(rng, (2, n_r, n_t)) * math.sqrt(0.5)
    return z[0] + 1j * z[1]


def qam4_modulate(bits) -> np.ndarray:
    """Gray 4QAM: ``(b0, b1) -> (1 - 2 b0) + (1 - 2 b1) j``, as an (n, 1) column."""
    b = np.asarray(bits, dtype=np.int64).ravel()
    if b.size % 2:
        raise ValueError("4QAM needs an even number of bits")
    if np.any((b != 0) & (b != 1)):
        raise ValueError("bits must be 0 or 1")
    sym = (1 - 2 * b[0::2]) + 1j * (1 - 2 * b[1::2])
    return sym.astype(np.complex128).reshape(-1, 1)


def qam4_demodulate(s_hat) -> np.ndarray:
    """Hard bits from real-model symbols (real parts stacked above imaginary).

    A component that is not strictly positive decodes to bit 1.  A block of
    columns gives one row of bits per column.
    """
    s = np.asarray(s_hat, dtype=np.float64)
    single = s.ndim == 1 or s.shape[1] == 1
    s = s.reshape(s.shape[0], -1)
    n = s.shape[0] // 2
    bits = np.empty((s.shape[1], 2 * n), dtype=np.int64)
    bits[:, 0::2] = (s[:n] <= 0.0).T
    bits[:, 1::2] = (s[n:] <= 0.0).T
    return bits[0] if single else bits


def _bits_to_real_symbols(bits: np.ndarray) -> np.ndarray:
    """(F, 2n) bit rows -> (2n, F) real-model symbol block."""
    return np.vstack([(1 - 2 * bits[:, 0::2]).T, (1 - 2 * bits[:, 1::2]).T]).astype(np.float64)


def noise_variance(snr_db: float, n_t: int, sigma_mode: str = "tx-power") -> float:
    """Per-receiver complex noise variance.

    ``tx-power``: total transmit power ``N_T`` over noise, ``N_T / 10^(snr/10)``.
    ``per-bit``: the same power shared by the two bits of a 4QAM symbol,
    ``N_T / (2 * 10^(snr/10))``.
    """
    lin = 10.0 ** (snr_db / 10.0)
    if sigma_mode == "tx-power":
        return n_t / lin
    if sigma_mode == "per-bit":
        return n_t / (BITS_PER_SYMBOL * lin)
    raise ConfigError(f"unknown sigma_mode {sigma_mode!r}")


def snr_to_sigma(snr_db: float, n_t: int, sigma_mode: str = "tx-power") -> float:
    """Real-model per-component noise standard deviation ``sqrt(sigma^2 / 2)``.

    This is also the ``sigma_n`` used to extend the channel for MMSE schemes.
    """
    return math.sqrt(noise_variance(snr_db, n_t, sigma_mode) / 2.0)


def _ci95(errors: int, bits: int) -> float:
    if bits == 0:
        return 0.0
    p = errors / bits
    return 1.96 * math.sqrt(p * (1.0 - p) / bits)


def _draw_precoder(cfg: SimConfig, c: int, scheme: SchemeId, sigma_n: float):
    """Channel ``c`` and its precoder; singular draws are redrawn from the same stream."""
    rng = stream(cfg.seed, c, _CHANNEL)
    resampled = 0
    while True:
        Hr = complex_to_real_matrix(gen_channel(rng, cfg.n_r, cfg.n_t))
        try:
            pre = build_precoder(Hr, scheme, sigma_n, cfg.sa_variant, rng=stream(cfg.seed, c, _LAZY))
            return Hr, pre, resampled
        except (SingularMatrixError, np.linalg.LinAlgError):
            resampled += 1
            log.warning("channel %d singular for %s, resampling", c, scheme)
            if resampled > 100:
                raise


def run_ber_point(cfg: SimConfig, scheme: SchemeId | str, snr_db: float) -> BerPoint:
    """Bit errors for one scheme at one SNR.

    Channels are processed in index order; the point stops once ``min_errors``
    errors are counted over at least ``min_channels`` channels, or after
    ``n_channels`` channels.
    """
    scheme = SchemeId(scheme)
    sigma_n = snr_to_sigma(snr_db, cfg.n_t, cfg.sigma_mode)
    F = cfg.frames_per_channel
    nbits = BITS_PER_SYMBOL * cfg.n_r
    bits_sent = errors = resampled = 0
    channels = 0
    for c in range(cfg.n_channels):
        Hr, pre, r = _draw_precoder(cfg, c, scheme, sigma_n)
        resampled += r
        data = stream(cfg.seed, c, _DATA)
        bits = data.integers(0, 2, size=(F, nbits))
        noise = box_muller(data, (Hr.shape[0], F))
        S = _bits_to_real_symbols(bits)
        Y = Hr @ pre.precode(S) + sigma_n * noise
        s_hat = lattice_decode(Y, pre.beta, pre.T, pre.parity_offset)
        errors += int(np.count_nonzero(qam4_demodulate(s_hat) != bits))
        bits_sent += bits.size
        channels = c + 1
        if errors >= cfg.min_errors and channels >= cfg.min_channels:
            break
    if resampled > 0.001 * channels:
        log.warning("%s @ %.2f dB: %d resampled channels out of %d", scheme, snr_db, resampled, channels)
    ber = errors / bits_sent if bits_sent else 0.0
    return BerPoint(scheme, float(snr_db), bits_sent, errors, ber, _ci95(errors, bits_sent),
                    channels, resampled)


def _ber_unit(args) -> BerPoint:
    cfg, scheme, snr = args
    return run_ber_point(cfg, scheme, snr)


def run_ber_sweep(cfg: SimConfig, workers: int | None = None) -> list[BerPoint]:
    """All (scheme, SNR) points, scheme-major, in grid order."""
    units = [(cfg, s, snr) for s in cfg.schemes for snr in cfg.snr_grid_db]
    workers = cfg.workers if workers is None else workers
    if workers <= 1 or len(units) <= 1:
        return [_ber_unit(u) for u in units]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_ber_unit, units))


def _condition_chunk(args):
    cfg, lo, hi = args
    n = hi - lo
    kappa = {k: np.empty(n) for k in ("none", "SA", "LLL")}
    counters = {k: {"iterations": 0, "pair_evaluations": 0} for k in ("SA", "LLL")}
    for idx, c in enumerate(range(lo, hi)):
        Hr = complex_to_real_matrix(gen_channel(stream(cfg.seed, c, _CHANNEL), cfg.n_r, cfg.n_t))
        if cfg.sa_variant == "lazy":
            sa = reduce_lazy(Hr.T, rng=stream(cfg.seed, c, _LAZY))
        else:
            sa = reduce_greedy(Hr.T)
        lll = lll_reduce(Hr.T)
        kappa["none"][idx] = condition_number(Hr)
        kappa["SA"][idx] = condition_number(sa.basis)
        kappa["LLL"][idx] = condition_number(lll.basis)
        for key, red in (("SA", sa), ("LLL", lll)):
            counters[key]["iterations"] += red.report.iterations
            counters[key]["pair_evaluations"] += red.report.pair_evaluations
    return kappa, counters


def condition_study(cfg: SimConfig, workers: int | None = None) -> ConditionStudy:
    """Condition numbers of the raw, SA-reduced and LLL-reduced channels."""
    workers = cfg.workers if workers is None else workers
    n = cfg.n_channels
    nchunks = max(1, min(n, 4 * workers))
    edges = np.linspace(0, n, nchunks + 1).astype(int)
    units = [(cfg, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers <= 1:
        parts = [_condition_chunk(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_condition_chunk, units))
    kappa = {k: np.concatenate([p[0][k] for p in parts]) for k in ("none", "SA", "LLL")}
    counters = {
        k: {c: sum(p[1][k][c] for p in parts) for c in ("iterations", "pair_evaluations")}
        for k in ("SA", "LLL")
    }
    return ConditionStudy(kappa, counters)


def run_condition_cdf(cfg: SimConfig, study: ConditionStudy | None = None) -> list[CdfPoint]:
    """Empirical CDF series, sorted by reducer name then kappa."""
    if study is None:
        study = condition_study(cfg)
    points = []
    for reducer in sorted(study.kappa):
        k = np.sort(study.kappa[reducer])
        n = k.size
        points.extend(CdfPoint(reducer, float(v), (i + 1) / n) for i, v in enumerate(k))
    return points


def ber_at(points: list[BerPoint], scheme) -> list[BerPoint]:
    scheme = SchemeId(scheme)
    return sorted((p for p in points if p.scheme == scheme), key=lambda p: p.snr_db)


def snr_at_ber(points: list[BerPoint], target: float, min_errors: int = 0) -> float:
    """SNR where a BER curve first crosses ``target``.

    Linear interpolation of log10(BER) against SNR between the bracketing
    grid points; both must carry at least ``min_errors`` errors.  Returns NaN
    when the curve never crosses the target.
    """
    pts = sorted(points, key=lambda p: p.snr_db)
    lt = math.log10(target)
    for a, b in zip(pts, pts[1:]):
        if a.ber >= target >= b.ber and a.ber > b.ber:
            if a.bit_errors < min_errors or b.bit_errors < min_errors or b.ber <= 0.0:
                return float("nan")
            la, lb = math.log10(a.ber), math.log10(b.ber)
            return a.snr_db + (lt - la) * (b.snr_db - a.snr_db) / (lb - la)
    return float("nan")
