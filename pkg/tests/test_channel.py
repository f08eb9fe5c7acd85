import math

import numpy as np
import pytest

from xroffload.channel import (RadioParams, generate_trace, path_loss_db, snr,
                               trace_from_csv, trace_to_csv)

# Hand-evaluated once from the published UMa NLOS formula at d = 500 m,
# f_c = 7 GHz, h_BS = 25 m, h_UT = 1.8 m (NLOS branch dominates;
# breakpoint distance is 1792 m so the LOS floor uses the near slope).
PL_500M_7GHZ_DB = 135.75595919472323

# -174 dBm/Hz + 10*log10(20e6) + 7 dB noise figure.
NOISE_20MHZ_NF7_DBM = -93.98970004336019


def test_path_loss_golden_500m():
    assert path_loss_db(500.0, RadioParams()) == pytest.approx(
        PL_500M_7GHZ_DB, rel=1e-12)


def test_path_loss_monotone_in_distance():
    params = RadioParams()
    assert path_loss_db(100.0, params) < path_loss_db(500.0, params)
    losses = [path_loss_db(d, params) for d in (10, 50, 100, 300, 700, 1500)]
    assert all(a < b for a, b in zip(losses, losses[1:]))


def test_path_loss_monotone_in_frequency():
    base = RadioParams()
    doubled = RadioParams(carrier_frequency=14e9)
    for d in (50.0, 100.0, 500.0):
        assert path_loss_db(d, doubled) > path_loss_db(d, base)


def test_path_loss_rejects_close_range():
    with pytest.raises(ValueError, match="distance out of model range"):
        path_loss_db(5.0, RadioParams())


def test_trace_determinism():
    params = RadioParams()
    a = generate_trace(300.0, 512, params, seed=11)
    b = generate_trace(300.0, 512, params, seed=11)
    assert np.array_equal(a.gains, b.gains)
    c = generate_trace(300.0, 512, params, seed=12)
    assert not np.array_equal(a.gains, c.gains)


def test_trace_zero_doppler_is_frozen():
    params = RadioParams(ue_speed=0.0)
    trace = generate_trace(200.0, 64, params, seed=4)
    assert np.all(trace.gains == trace.gains[0])


def test_unit_mean_small_scale_fading():
    # Shadowing off isolates the fading factor; the large-scale part is then
    # deterministic, so the time average of g_t is gains / large_scale.
    params = RadioParams(shadowing_sigma=0.0)
    trace = generate_trace(500.0, 100_000, params, seed=0)
    large_scale = params.antenna_gain * 10.0 ** (-path_loss_db(500.0, params) / 10.0)
    g_mean = trace.gains.mean() / large_scale
    assert abs(g_mean - 1.0) < 0.02


def test_mean_gain_decreases_with_distance():
    params = RadioParams()
    means = []
    for d in (200.0, 400.0):
        total = 0.0
        for seed in range(100):
            total += generate_trace(d, 40, params, seed=seed).gains.mean()
        means.append(total / 100)
    assert means[0] > means[1]


def test_gains_positive_and_finite():
    trace = generate_trace(700.0, 1000, RadioParams(), seed=9)
    assert np.all(trace.gains > 0)
    assert np.all(np.isfinite(trace.gains))


def test_trace_csv_roundtrip(tmp_path):
    trace = generate_trace(350.0, 96, RadioParams(), seed=21)
    path = tmp_path / "trace.csv"
    trace_to_csv(trace, path)
    back = trace_from_csv(path)
    assert back.distance == trace.distance
    assert back.seed == trace.seed
    assert np.array_equal(back.gains, trace.gains)


def test_snr_unity_when_signal_matches_noise():
    params = RadioParams()
    gain = params.noise_power_w / 0.2
    assert snr(gain, 0.2, params) == pytest.approx(1.0, rel=1e-12)


def test_snr_linear_in_power():
    params = RadioParams()
    assert snr(1e-11, 0.2, params) == pytest.approx(
        2.0 * snr(1e-11, 0.1, params), rel=1e-12)


def test_noise_power_golden():
    params = RadioParams()
    expected_dbm = params.thermal_noise_density + 10 * math.log10(params.bandwidth) \
        + params.noise_figure
    assert expected_dbm == pytest.approx(NOISE_20MHZ_NF7_DBM, rel=1e-12)
    assert params.noise_power_w == pytest.approx(
        10 ** ((NOISE_20MHZ_NF7_DBM - 30.0) / 10.0), rel=1e-12)


def test_bs_power_from_density():
    # 23 dBm/MHz over 20 MHz is 36.01 dBm, just under 4 W.
    assert RadioParams().bs_tx_power_w == pytest.approx(3.9905246299377604, rel=1e-12)


def test_radio_params_validation():
    with pytest.raises(ValueError):
        RadioParams(bandwidth=0.0)
    with pytest.raises(ValueError):
        RadioParams(ue_max_tx_power=-1.0)
