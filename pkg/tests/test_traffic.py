import numpy as np
import pytest

from xroffload.traffic import (FramePair, TrafficParams, frames_from_csv,
                               frames_to_csv, generate_frames)


def test_sample_means_track_rate_over_fps():
    params = TrafficParams()
    frames = generate_frames(params, 100_000, seed=0)
    d_ul = np.array([f.d_ul for f in frames])
    d_dl = np.array([f.d_dl for f in frames])
    # Symmetric truncation preserves the mean; 28e6/60 and 8.5e6/60 bits.
    assert abs(d_dl.mean() - params.dl_mean_bits) / params.dl_mean_bits < 0.01
    assert abs(d_ul.mean() - params.ul_mean_bits) / params.ul_mean_bits < 0.01


def test_degenerate_std_yields_exact_means():
    params = TrafficParams(std_fraction=0.0)
    frames = generate_frames(params, 50, seed=1)
    assert all(f.d_dl == params.dl_mean_bits for f in frames)
    assert all(f.d_ul == params.ul_mean_bits for f in frames)


def test_all_samples_inside_truncation_bounds():
    params = TrafficParams()
    frames = generate_frames(params, 10_000, seed=2)
    low, high = params.truncation
    for f in frames:
        assert low * params.ul_mean_bits <= f.d_ul <= high * params.ul_mean_bits
        assert low * params.dl_mean_bits <= f.d_dl <= high * params.dl_mean_bits


def test_determinism_per_seed():
    params = TrafficParams()
    a = generate_frames(params, 200, seed=3)
    b = generate_frames(params, 200, seed=3)
    assert a == b
    c = generate_frames(params, 200, seed=4)
    assert a != c


def test_csv_roundtrip(tmp_path):
    frames = generate_frames(TrafficParams(), 25, seed=5)
    path = tmp_path / "frames.csv"
    frames_to_csv(frames, path)
    assert frames_from_csv(path) == frames


def test_params_validation():
    with pytest.raises(ValueError):
        TrafficParams(fps=0)
    with pytest.raises(ValueError):
        TrafficParams(truncation=(1.2, 1.5))
    with pytest.raises(ValueError):
        generate_frames(TrafficParams(), 0, seed=0)


def test_frame_pair_fields():
    f = FramePair(d_ul=100.0, d_dl=200.0, frame_index=7)
    assert (f.d_ul, f.d_dl, f.frame_index) == (100.0, 200.0, 7)
