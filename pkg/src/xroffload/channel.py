"""Statistical urban-macro NLOS channel: path loss, shadowing, correlated fading.

Produces per-slot linear power gains for a single moving headset served by one
base station.  Large-scale loss follows the TR 38.901 UMa NLOS curve, one
log-normal shadowing value is drawn per episode, and small-scale fading is a
sum of temporally correlated Rayleigh taps whose powers add up to the
matched-filter-bound gain of the slot.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.special import j0

SPEED_OF_LIGHT = 3.0e8
MIN_DISTANCE_M = 10.0

# Small-scale fading: tap count and exponential power-delay decay (in taps).
N_TAPS = 8
TAP_DECAY = 3.0


@dataclass(frozen=True)
class RadioParams:
    """Radio-link constants for both ends of the TDD link."""

    carrier_frequency: float = 7e9          # Hz
    bandwidth: float = 20e6                 # Hz
    bs_height: float = 25.0                 # m
    ue_height: float = 1.8                  # m
    bs_tx_power_density: float = 23.0       # dBm/MHz
    ue_max_tx_power: float = 0.2            # W
    noise_figure: float = 7.0               # dB
    thermal_noise_density: float = -174.0   # dBm/Hz
    bs_array_elements: int = 64             # 8x8 panel
    ue_array_elements: int = 4              # 2x2 panel
    ue_speed: float = 5.0 / 3.6             # m/s (5 km/h)
    shadowing_sigma: float = 6.0            # dB

    def __post_init__(self):
        if self.carrier_frequency <= 0 or self.bandwidth <= 0:
            raise ValueError("carrier_frequency and bandwidth must be positive")
        if self.bs_height <= 0 or self.ue_height <= 0:
            raise ValueError("antenna heights must be positive")
        if self.ue_max_tx_power <= 0:
            raise ValueError("ue_max_tx_power must be positive")
        if self.bs_array_elements < 1 or self.ue_array_elements < 1:
            raise ValueError("array element counts must be at least 1")
        if self.ue_speed < 0:
            raise ValueError("ue_speed must be non-negative")
        if self.shadowing_sigma < 0:
            raise ValueError("shadowing_sigma must be non-negative")

    @property
    def antenna_gain(self) -> float:
        """Combined boresight array gain, linear (element-count product)."""
        return float(self.bs_array_elements * self.ue_array_elements)

    @property
    def bs_tx_power_w(self) -> float:
        """Total BS transmit power in W from the per-MHz density."""
        total_dbm = self.bs_tx_power_density + 10.0 * math.log10(self.bandwidth / 1e6)
        return 10.0 ** ((total_dbm - 30.0) / 10.0)

    @property
    def noise_power_w(self) -> float:
        """Receiver noise power over the full bandwidth, noise figure included."""
        density_dbm_hz = self.thermal_noise_density + self.noise_figure
        return 10.0 ** ((density_dbm_hz - 30.0) / 10.0) * self.bandwidth


@dataclass(frozen=True)
class ChannelTrace:
    """Per-slot linear power gains for one episode at a fixed distance."""

    distance: float
    gains: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        object.__setattr__(self, "gains", g)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("gains must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValueError("gains must be finite and strictly positive")

    def __len__(self) -> int:
        return int(self.gains.size)

    def frame_slice(self, frame_index: int, slots_per_frame: int) -> np.ndarray:
        """Gains for one frame interval (slots are laid out frame by frame)."""
        start = frame_index * slots_per_frame
        stop = start + slots_per_frame
        if stop > self.gains.size:
            raise IndexError("trace underrun")
        return self.gains[start:stop]


def path_loss_db(d: float, params: RadioParams) -> float:
    """UMa NLOS path loss in dB at 2-D distance ``d`` (TR 38.901 style).

    Valid from 10 m; deterministic in (d, params).
    """
    if d < MIN_DISTANCE_M:
        raise ValueError("distance out of model range (minimum 10 m)")
    fc_ghz = params.carrier_frequency / 1e9
    dh = params.bs_height - params.ue_height
    d3d = math.hypot(d, dh)

    # LOS curve is the NLOS floor; dual slope around the breakpoint distance.
    h_env = 1.0
    d_bp = (4.0 * (params.bs_height - h_env) * (params.ue_height - h_env)
            * params.carrier_frequency / SPEED_OF_LIGHT)
    if d <= d_bp:
        pl_los = 28.0 + 22.0 * math.log10(d3d) + 20.0 * math.log10(fc_ghz)
    else:
        pl_los = (28.0 + 40.0 * math.log10(d3d) + 20.0 * math.log10(fc_ghz)
                  - 9.0 * math.log10(d_bp ** 2 + dh ** 2))

    pl_nlos = (13.54 + 39.08 * math.log10(d3d) + 20.0 * math.log10(fc_ghz)
               - 0.6 * (params.ue_height - 1.5))
    return max(pl_los, pl_nlos)


def generate_trace(d: float, n_slots: int, params: RadioParams, seed: int,
                   slot_time: float = 1e-3) -> ChannelTrace:
    """Generate one episode of per-slot linear power gains at distance ``d``.

    gain[t] = array_gain * 10^(-(PL + X)/10) * g[t] with X one shadowing draw
    per episode and g[t] a unit-mean sum of correlated Rayleigh tap powers.
    The Doppler rate is ue_speed * f_c / c; zero speed freezes the fading.
    """
    if n_slots < 1:
        raise ValueError("n_slots must be at least 1")
    rng = np.random.default_rng(seed)

    shadow_db = rng.normal(0.0, params.shadowing_sigma)
    large_scale = params.antenna_gain * 10.0 ** (-(path_loss_db(d, params) + shadow_db) / 10.0)

    # Exponential power-delay profile normalised to unit total power.
    tap_powers = np.exp(-np.arange(N_TAPS) / TAP_DECAY)
    tap_powers /= tap_powers.sum()

    doppler = params.ue_speed * params.carrier_frequency / SPEED_OF_LIGHT
    rho = float(j0(2.0 * math.pi * doppler * slot_time))

    # Stationary start, then first-order Gauss-Markov evolution per tap.
    h0 = (rng.standard_normal(N_TAPS) + 1j * rng.standard_normal(N_TAPS)) \
        * np.sqrt(tap_powers / 2.0)
    if abs(rho) >= 1.0:
        taps = np.repeat(h0[:, None], n_slots, axis=1)
    else:
        innov_std = np.sqrt(tap_powers * (1.0 - rho ** 2) / 2.0)
        w = (rng.standard_normal((N_TAPS, n_slots))
             + 1j * rng.standard_normal((N_TAPS, n_slots))) * innov_std[:, None]
        taps, _ = lfilter([1.0], [1.0, -rho], w, axis=1, zi=(rho * h0)[:, None])

    g = np.sum(np.abs(taps) ** 2, axis=0)
    return ChannelTrace(distance=d, gains=large_scale * g, seed=seed)


def snr(gain: float, tx_power: float, params: RadioParams) -> float:
    """Linear SNR: gain * tx_power over the full-band noise power."""
    if gain <= 0:
        raise ValueError("gain must be positive")
    if tx_power <= 0:
        raise ValueError("tx_power must be positive")
    return gain * tx_power / params.noise_power_w


def trace_to_csv(trace: ChannelTrace, path) -> None:
    """Write a trace as slot_index,gain_linear rows (metadata in a # header)."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# distance={trace.distance!r} seed={trace.seed!r}\n")
        writer = csv.writer(fh)
        writer.writerow(["slot_index", "gain_linear"])
        for i, g in enumerate(trace.gains):
            writer.writerow([i, repr(float(g))])


def trace_from_csv(path) -> ChannelTrace:
    """Read a trace written by :func:`trace_to_csv`."""
    distance = math.nan
    seed = -1
    gains = []
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("#"):
            for token in first[1:].split():
                key, _, value = token.partition("=")
                if key == "distance":
                    distance = float(value)
                elif key == "seed":
                    seed = int(value)
        else:
            fh.seek(0)
        reader = csv.DictReader(fh)
        for row in reader:
            gains.append(float(row["gain_linear"]))
    return ChannelTrace(distance=distance, gains=np.asarray(gains), seed=seed)
