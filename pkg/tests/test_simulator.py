import math

import numpy as np
import pytest

import seysen_precoding.simulator as sim
from seysen_precoding.errors import ConfigError
from seysen_precoding.matrix_core import complex_to_real_vector
from seysen_precoding.simulator import (
    BerPoint,
    SimConfig,
    box_muller,
    gen_channel,
    qam4_demodulate,
    qam4_modulate,
    run_ber_point,
    run_ber_sweep,
    run_condition_cdf,
    snr_at_ber,
    snr_to_sigma,
    stream,
)


def small_cfg(**kw):
    base = dict(snr_grid_db=(), n_channels=100, frames_per_channel=10, min_channels=50,
                min_errors=50, seed=11)
    base.update(kw)
    return SimConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(n_t=4, n_r=2)
    with pytest.raises(ConfigError):
        SimConfig(snr_grid_db=(float("inf"),))
    with pytest.raises(ConfigError):
        SimConfig(sigma_mode="eb")
    with pytest.raises(ConfigError):
        SimConfig(seed=-1)
    with pytest.raises(ValueError):
        SimConfig(schemes=("ZF", "THP"))


def test_box_muller_moments():
    z = box_muller(stream(1, 0), 200_001)
    assert z.shape == (200_001,)
    assert abs(z.mean()) < 0.01
    assert z.var() == pytest.approx(1.0, abs=0.01)
    # fourth moment of a standard normal is 3
    assert np.mean(z**4) == pytest.approx(3.0, abs=0.05)


def test_streams_are_keyed():
    a = stream(5, 1, 0).random(4)
    np.testing.assert_array_equal(a, stream(5, 1, 0).random(4))
    assert not np.array_equal(a, stream(5, 0, 1).random(4))
    assert not np.array_equal(a, stream(6, 1, 0).random(4))


def test_gen_channel_statistics():
    H = gen_channel(stream(3, 0), 100, 1000)
    assert H.shape == (100, 1000)
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.02)
    assert abs(np.corrcoef(H.real.ravel(), H.imag.ravel())[0, 1]) < 0.01
    assert H.real.var() == pytest.approx(0.5, abs=0.01)


def test_gen_channel_deterministic():
    np.testing.assert_array_equal(gen_channel(stream(9, 4), 4, 4), gen_channel(stream(9, 4), 4, 4))


@pytest.mark.parametrize("bits, sym", [((0, 0), 1 + 1j), ((1, 1), -1 - 1j), ((0, 1), 1 - 1j), ((1, 0), -1 + 1j)])
def test_qam4_mapping(bits, sym):
    assert qam4_modulate(bits)[0, 0] == sym


def test_qam4_odd_length():
    with pytest.raises(ValueError):
        qam4_modulate([0, 1, 1])


def test_qam4_round_trip():
    gen = np.random.default_rng(0)
    bits = gen.integers(0, 2, size=10_000)
    s = complex_to_real_vector(qam4_modulate(bits))
    np.testing.assert_array_equal(qam4_demodulate(s), bits)
    np.testing.assert_array_equal(qam4_demodulate(-s), 1 - bits)


def test_qam4_demodulate_tie():
    np.testing.assert_array_equal(qam4_demodulate(np.array([[0.0], [0.0]])), [1, 1])


def test_snr_to_sigma():
    assert snr_to_sigma(math.inf, 4) == 0.0
    assert 2 * snr_to_sigma(0.0, 4) ** 2 == pytest.approx(4.0)
    grid = np.linspace(-10, 40, 11)
    sig = [snr_to_sigma(x, 4) for x in grid]
    assert all(a > b for a, b in zip(sig, sig[1:]))
    # per-bit mode sits 3 dB away
    assert snr_to_sigma(10.0, 4, "per-bit") == pytest.approx(snr_to_sigma(10.0 + 10 * math.log10(2), 4))


@pytest.mark.parametrize("scheme", list(sim.ALL_SCHEMES))
def test_ber_point_noiseless(scheme):
    p = run_ber_point(small_cfg(n_channels=30), scheme, math.inf)
    assert p.bit_errors == 0 and p.ber == 0.0
    assert p.bits_sent == 30 * 10 * 8


@pytest.mark.parametrize("scheme", list(sim.ALL_SCHEMES))
def test_ber_point_noise_dominated(scheme):
    p = run_ber_point(small_cfg(n_channels=60, min_errors=10**9), scheme, -30.0)
    assert p.ber == pytest.approx(0.5, abs=0.02)


def test_ber_point_early_stop():
    cfg = small_cfg(n_channels=500, min_channels=40, min_errors=100)
    p = run_ber_point(cfg, "ZF", 5.0)
    assert p.bit_errors >= 100
    assert p.channels == 40
    assert p.ber == p.bit_errors / p.bits_sent
    assert p.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(p.ber * (1 - p.ber) / p.bits_sent))


def test_scheme_ordering_moderate_snr():
    cfg = small_cfg(n_channels=400, min_channels=400, frames_per_channel=20)
    pts = {s: run_ber_point(cfg, s, 16.0) for s in ("LRA-ZF-SA", "LRA-ZF-LLL", "ZF")}
    sa, lll, zf = pts["LRA-ZF-SA"], pts["LRA-ZF-LLL"], pts["ZF"]
    assert sa.ber - sa.ci95_halfwidth <= lll.ber + lll.ci95_halfwidth
    assert lll.ber - lll.ci95_halfwidth <= zf.ber + zf.ci95_halfwidth
    assert lll.ber < zf.ber


def test_sweep_shape_and_determinism():
    cfg = small_cfg(snr_grid_db=(0.0, 10.0, 20.0), schemes=("ZF", "LRA-ZF-SA"))
    a = run_ber_sweep(cfg)
    assert [(str(p.scheme), p.snr_db) for p in a] == [
        ("ZF", 0.0), ("ZF", 10.0), ("ZF", 20.0),
        ("LRA-ZF-SA", 0.0), ("LRA-ZF-SA", 10.0), ("LRA-ZF-SA", 20.0)]
    assert a == run_ber_sweep(cfg)
    assert run_ber_sweep(small_cfg()) == []
    for scheme in ("ZF", "LRA-ZF-SA"):
        curve = [p for p in a if str(p.scheme) == scheme]
        for lo, hi in zip(curve, curve[1:]):
            assert hi.ber <= lo.ber + lo.ci95_halfwidth + hi.ci95_halfwidth


def test_sweep_parallel_matches_serial():
    cfg = small_cfg(snr_grid_db=(5.0, 15.0), schemes=("MMSE", "LRA-MMSE-LLL"), n_channels=40)
    assert run_ber_sweep(cfg, workers=1) == run_ber_sweep(cfg, workers=2)


def test_lazy_variant_runs():
    cfg = small_cfg(sa_variant="lazy", n_channels=20)
    assert run_ber_point(cfg, "LRA-ZF-SA", math.inf).bit_errors == 0


def test_condition_cdf_identity_channel(monkeypatch):
    monkeypatch.setattr(sim, "gen_channel", lambda rng, n_r, n_t: np.eye(n_r, n_t, dtype=complex))
    pts = run_condition_cdf(small_cfg(n_channels=1))
    assert len(pts) == 3
    assert {p.reducer for p in pts} == {"none", "SA", "LLL"}
    assert all(p.kappa == pytest.approx(1.0) and p.cdf == 1.0 for p in pts)


def test_condition_cdf_series():
    pts = run_condition_cdf(small_cfg(n_channels=200))
    assert len(pts) == 600
    for reducer in ("none", "SA", "LLL"):
        series = [p for p in pts if p.reducer == reducer]
        assert all(p.kappa >= 1.0 for p in series)
        assert all(0.0 <= p.cdf <= 1.0 for p in series)
        assert all(a.kappa <= b.kappa and a.cdf <= b.cdf for a, b in zip(series, series[1:]))
    med = {r: np.median([p.kappa for p in pts if p.reducer == r]) for r in ("none", "SA", "LLL")}
    assert med["SA"] <= med["LLL"] <= med["none"]


def test_condition_study_parallel_and_counters():
    cfg = small_cfg(n_channels=30)
    a = sim.condition_study(cfg, workers=1)
    b = sim.condition_study(cfg, workers=2)
    for k in a.kappa:
        np.testing.assert_array_equal(a.kappa[k], b.kappa[k])
    assert a.counters == b.counters
    summary = a.complexity_summary()
    assert summary["SA_mean_iterations"] > 0 and summary["LLL_mean_iterations"] > 0


def _pt(snr, ber, err=1000):
    return BerPoint("ZF", snr, 10**6, err, ber, 0.0)


def test_snr_at_ber_interpolation():
    pts = [_pt(0.0, 1e-1), _pt(10.0, 1e-3)]
    assert snr_at_ber(pts, 1e-2) == pytest.approx(5.0)
    assert math.isnan(snr_at_ber(pts, 1e-4))
    assert math.isnan(snr_at_ber([_pt(0.0, 1e-1, 50), _pt(10.0, 1e-3)], 1e-2, min_errors=200))
