"""Truncated-Gaussian XR frame-size generator for UL and DL directions."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrafficParams:
    """Frame-size distribution knobs; means follow rate / fps."""

    dl_rate: float = 28e6          # bit/s
    ul_rate: float = 8.5e6         # bit/s
    fps: float = 60.0              # frames per second
    std_fraction: float = 0.105    # std as a fraction of the mean
    truncation: tuple[float, float] = (0.5, 1.5)   # [low, high] x mean

    def __post_init__(self):
        if self.dl_rate <= 0 or self.ul_rate <= 0:
            raise ValueError("rates must be positive")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.std_fraction < 0:
            raise ValueError("std_fraction must be non-negative")
        low, high = self.truncation
        if not (0 < low < 1 < high):
            raise ValueError("truncation must satisfy 0 < low < 1 < high")

    @property
    def dl_mean_bits(self) -> float:
        return self.dl_rate / self.fps

    @property
    def ul_mean_bits(self) -> float:
        return self.ul_rate / self.fps


@dataclass(frozen=True)
class FramePair:
    """UL and DL frame sizes (bits) for one frame interval."""

    d_ul: float
    d_dl: float
    frame_index: int = 0


def _truncated_normal(rng: np.random.Generator, mean: float, std: float,
                      low: float, high: float, n: int) -> np.ndarray:
    """Rejection-sample n values from Normal(mean, std) clipped to [low, high]."""
    if std == 0.0:
        return np.full(n, mean)
    out = rng.normal(mean, std, size=n)
    bad = (out < low) | (out > high)
    while bad.any():
        out[bad] = rng.normal(mean, std, size=int(bad.sum()))
        bad = (out < low) | (out > high)
    return out


def generate_frames(params: TrafficParams, n_frames: int, seed: int) -> list[FramePair]:
    """Draw i.i.d. UL/DL frame sizes for n_frames intervals, deterministic per seed."""
    if n_frames < 1:
        raise ValueError("n_frames must be at least 1")
    rng = np.random.default_rng(seed)
    low, high = params.truncation

    ul_mean = params.ul_mean_bits
    dl_mean = params.dl_mean_bits
    d_ul = _truncated_normal(rng, ul_mean, params.std_fraction * ul_mean,
                             low * ul_mean, high * ul_mean, n_frames)
    d_dl = _truncated_normal(rng, dl_mean, params.std_fraction * dl_mean,
                             low * dl_mean, high * dl_mean, n_frames)
    return [FramePair(d_ul=float(u), d_dl=float(d), frame_index=i)
            for i, (u, d) in enumerate(zip(d_ul, d_dl))]


def frames_to_csv(frames: list[FramePair], path) -> None:
    """Write frames as frame_index,d_ul_bits,d_dl_bits rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "d_ul_bits", "d_dl_bits"])
        for f in frames:
            writer.writerow([f.frame_index, repr(f.d_ul), repr(f.d_dl)])


def frames_from_csv(path) -> list[FramePair]:
    """Read frames written by :func:`frames_to_csv`."""
    frames = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            frames.append(FramePair(d_ul=float(row["d_ul_bits"]),
                                    d_dl=float(row["d_dl_bits"]),
                                    frame_index=int(row["frame_index"])))
    return frames
