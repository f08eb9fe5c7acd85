"""Per-frame-interval link and compute model for an XR headset on a TDD link.

One frame interval is a fixed number of slots, UL slots first, DL slots after.
A camera frame goes up; a fraction alpha of the display frame is rendered and
encoded at the edge while the UL runs, comes back in the DL slots, is decoded
on the headset, and the remaining (1 - alpha) is rendered locally.  These
routines compute the latency split, the energy split (including idle slots
displaced by slow edge compute), the per-slot data actually carried, the
UL/DL frame-loss indicators, and the discrete UL power backoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import RadioParams, snr

DEFAULT_BETA_GRID = (0.25, 0.5, 0.75, 1.0)

# DL success rules: the frame survives if the DL slots carried at least the
# edge-rendered portion (default) or, pessimistically, the whole frame.
DL_RULE_EDGE = "edge_portion"
DL_RULE_FULL = "full_frame"


@dataclass(frozen=True)
class HeadsetParams:
    """Headset power draws (W) and compute speeds (bit/s)."""

    p_loc: float = 0.5        # local execution
    p_dec: float = 0.1        # decoding
    p_ul_max: float = 0.2     # maximum UL transmit
    p_dl: float = 0.3         # DL reception
    p_idle: float = 0.001     # waiting on the edge
    f_loc: float = 200e6      # local render speed
    f_dec: float = 3e9        # decode speed
    f_edge: float = 600e9     # edge render speed
    f_enc: float = 3e9        # edge encode speed
    loc_capability_scale: float = 1.0   # multiplies f_loc only

    def __post_init__(self):
        for name in ("p_loc", "p_dec", "p_ul_max", "p_dl", "p_idle",
                     "f_loc", "f_dec", "f_edge", "f_enc", "loc_capability_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def f_loc_effective(self) -> float:
        return self.f_loc * self.loc_capability_scale


@dataclass(frozen=True)
class SlotConfig:
    """TDD slot geometry and the end-to-end latency budget."""

    slot_time: float = 1e-3           # s
    slots_per_frame: int = 16         # total slots per frame interval
    latency_threshold: float = 20e-3  # s
    dl_success_rule: str = DL_RULE_EDGE

    def __post_init__(self):
        if self.slot_time <= 0:
            raise ValueError("slot_time must be positive")
        if self.slots_per_frame < 2:
            raise ValueError("slots_per_frame must be at least 2")
        if self.latency_threshold < self.slot_time:
            raise ValueError("latency_threshold must be at least one slot")
        if self.dl_success_rule not in (DL_RULE_EDGE, DL_RULE_FULL):
            raise ValueError("unknown dl_success_rule")


@dataclass(frozen=True)
class Action:
    """One point on the discrete (UL slots, DL slots, offload ratio) lattice."""

    n_ul: int
    n_dl: int
    alpha_index: int
    alpha: float

    def __post_init__(self):
        if self.n_ul < 1:
            raise ValueError("n_ul must be at least 1")
        if self.n_dl < 0:
            raise ValueError("n_dl must be non-negative")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")

    def validate(self, cfg: SlotConfig) -> None:
        if self.n_ul + self.n_dl > cfg.slots_per_frame:
            raise ValueError("slot allocation exceeds slots_per_frame")


@dataclass(frozen=True)
class LatencyBreakdown:
    """Per-frame latency components in seconds.

    l_edge overlaps the UL transmission and is excluded from l_total; it
    enters the accounting only by displacing early DL slots.
    """

    l_ul: float
    l_dl_comm: float
    l_edge: float
    l_dec: float
    l_loc: float
    l_total: float


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-frame energy components in joules; e_total is their exact sum."""

    e_ul: float
    e_ul_edge: float
    e_dl: float
    e_dec: float
    e_loc: float
    e_total: float


@dataclass(frozen=True)
class FrameOutcome:
    """Everything observable about one simulated frame interval."""

    latency: LatencyBreakdown
    energy: EnergyBreakdown
    fli_ul: int
    fli_dl: int
    d_ul_sent: float
    d_dl_sent: float
    ul_power_used: float
    displaced_dl_slots: int


def shannon_rate(gain: float, tx_power: float, params: RadioParams) -> float:
    """Achievable rate in bit/s at the given linear gain and transmit power."""
    if tx_power == 0.0:
        return 0.0
    return params.bandwidth * math.log2(1.0 + snr(gain, tx_power, params))


def split_frame(d_dl: float, alpha: float) -> tuple[float, float]:
    """Split a DL frame into (edge, local) portions; the parts sum exactly."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    d_edge = alpha * d_dl
    return d_edge, d_dl - d_edge


def compute_latencies(frame, action: Action, cfg: SlotConfig,
                      hp: HeadsetParams) -> LatencyBreakdown:
    """Latency split for one frame under the given slot/offload action."""
    action.validate(cfg)
    d_edge, d_loc = split_frame(frame.d_dl, action.alpha)
    l_ul = action.n_ul * cfg.slot_time
    l_dl_comm = action.n_dl * cfg.slot_time
    l_edge = d_edge / hp.f_edge + d_edge / hp.f_enc
    l_dec = d_edge / hp.f_dec
    l_loc = d_loc / hp.f_loc_effective
    return LatencyBreakdown(
        l_ul=l_ul,
        l_dl_comm=l_dl_comm,
        l_edge=l_edge,
        l_dec=l_dec,
        l_loc=l_loc,
        l_total=l_ul + l_dl_comm + l_dec + l_loc,
    )


def displaced_dl_slots(l_ul: float, l_edge: float, slot_time: float) -> int:
    """DL slots made unusable because edge compute/encode outlasts the UL."""
    if l_ul < 0 or l_edge < 0 or slot_time <= 0:
        raise ValueError("latencies must be non-negative and slot_time positive")
    return max(0, math.ceil((l_edge - l_ul) / slot_time))


def compute_energy(frame, action: Action, lat: LatencyBreakdown, cfg: SlotConfig,
                   hp: HeadsetParams, ul_power: float) -> EnergyBreakdown:
    """Energy split for one frame given its latency breakdown and UL power."""
    if ul_power > hp.p_ul_max:
        raise ValueError("ul_power exceeds p_ul_max")
    displaced = displaced_dl_slots(lat.l_ul, lat.l_edge, cfg.slot_time)
    e_ul = lat.l_ul * ul_power
    e_ul_edge = e_ul + displaced * cfg.slot_time * hp.p_idle
    e_dl = max(action.n_dl - displaced, 0) * cfg.slot_time * hp.p_dl
    e_dec = lat.l_dec * hp.p_dec
    e_loc = lat.l_loc * hp.p_loc
    return EnergyBreakdown(
        e_ul=e_ul,
        e_ul_edge=e_ul_edge,
        e_dl=e_dl,
        e_dec=e_dec,
        e_loc=e_loc,
        e_total=e_ul_edge + e_dl + e_dec + e_loc,
    )


def data_sent(trace_slice, action: Action, ul_power: float, p_bs: float,
              displaced: int, params: RadioParams,
              slot_time: float) -> tuple[float, float]:
    """Bits actually carried in the UL slots and the usable DL slots.

    UL slots occupy the leading positions of the slice, DL slots follow; the
    first ``displaced`` DL slots are still waiting on the edge and carry
    nothing.
    """
    gains = np.asarray(trace_slice, dtype=float)
    if gains.size < action.n_ul + action.n_dl:
        raise ValueError("trace underrun")
    d_ul_sent = sum(shannon_rate(float(g), ul_power, params) * slot_time
                    for g in gains[:action.n_ul])
    dl_start = action.n_ul + min(displaced, action.n_dl)
    dl_stop = action.n_ul + action.n_dl
    d_dl_sent = sum(shannon_rate(float(g), p_bs, params) * slot_time
                    for g in gains[dl_start:dl_stop])
    return d_ul_sent, d_dl_sent


def frame_loss(frame, sent: tuple[float, float], lat: LatencyBreakdown,
               cfg: SlotConfig, alpha: float) -> tuple[int, int]:
    """UL and DL frame-loss indicators for one frame interval.

    The UL frame dies if its slots carried less than the camera frame.  The
    DL frame dies if the usable DL slots carried less than the required
    payload, if the end-to-end latency misses the budget, or if the UL frame
    died (the edge cannot render without the upload).
    """
    d_ul_sent, d_dl_sent = sent
    fli_ul = 1 if d_ul_sent < frame.d_ul else 0
    if cfg.dl_success_rule == DL_RULE_FULL:
        dl_needed = frame.d_dl
    else:
        dl_needed = alpha * frame.d_dl
    fli_dl = 1 if (d_dl_sent < dl_needed
                   or lat.l_total > cfg.latency_threshold
                   or fli_ul == 1) else 0
    return fli_ul, fli_dl


def adjust_ul_power(frame, action: Action, predicted_gain: float,
                    params: RadioParams, beta_grid=DEFAULT_BETA_GRID,
                    slot_time: float = 1e-3) -> float:
    """Smallest discrete UL power that should carry the camera frame.

    Capacity is predicted from the gain observed at the start of the frame;
    if no backoff level suffices the maximum power is used as the safe
    fallback.
    """
    betas = sorted(beta_grid)
    if not betas or betas[-1] != 1.0 or betas[0] <= 0.0:
        raise ValueError("beta_grid must lie in (0, 1] and contain 1.0")
    for beta in betas:
        power = beta * params.ue_max_tx_power
        capacity = action.n_ul * slot_time * shannon_rate(predicted_gain, power, params)
        if capacity >= frame.d_ul:
            return power
    return params.ue_max_tx_power


def simulate_frame(frame, action: Action, trace_slice, cfg: SlotConfig,
                   hp: HeadsetParams, radio: RadioParams,
                   beta_grid=DEFAULT_BETA_GRID) -> FrameOutcome:
    """Run the full per-frame pipeline for one action and one channel slice."""
    action.validate(cfg)
    gains = np.asarray(trace_slice, dtype=float)
    if gains.size < action.n_ul + action.n_dl:
        raise ValueError("trace underrun")

    ul_power = adjust_ul_power(frame, action, float(gains[0]), radio,
                               beta_grid=beta_grid, slot_time=cfg.slot_time)
    lat = compute_latencies(frame, action, cfg, hp)
    displaced = displaced_dl_slots(lat.l_ul, lat.l_edge, cfg.slot_time)
    sent = data_sent(gains, action, ul_power, radio.bs_tx_power_w, displaced,
                     radio, cfg.slot_time)
    energy = compute_energy(frame, action, lat, cfg, hp, ul_power)
    fli_ul, fli_dl = frame_loss(frame, sent, lat, cfg, action.alpha)
    return FrameOutcome(
        latency=lat,
        energy=energy,
        fli_ul=fli_ul,
        fli_dl=fli_dl,
        d_ul_sent=sent[0],
        d_dl_sent=sent[1],
        ul_power_used=ul_power,
        displaced_dl_slots=displaced,
    )
