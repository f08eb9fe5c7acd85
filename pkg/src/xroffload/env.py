"""Episode engine: frame-by-frame interaction loop with reward shaping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framemodel import (DEFAULT_BETA_GRID, Action, FrameOutcome,
                         HeadsetParams, SlotConfig, simulate_frame)
from .channel import ChannelTrace, RadioParams
from .traffic import FramePair, TrafficParams


@dataclass(frozen=True)
class EnvState:
    """What the agent observes before acting: frame sizes and channel gain."""

    d_ul: float
    d_dl: float
    h: float

    def __post_init__(self):
        if not (np.isfinite(self.d_ul) and np.isfinite(self.d_dl) and np.isfinite(self.h)):
            raise ValueError("state components must be finite")
        if self.d_ul < 0 or self.d_dl < 0 or self.h <= 0:
            raise ValueError("frame sizes must be non-negative and gain positive")


@dataclass(frozen=True)
class RewardParams:
    """Loss/energy tradeoff weight, energy normaliser, and decision window."""

    sigma: float = 0.7
    e_max: float = 1.0
    window: int = 1

    def __post_init__(self):
        # sigma = 0 degenerates: the agent stops serving traffic entirely.
        if not (0.0 < self.sigma <= 1.0):
            raise ValueError("sigma must lie in (0, 1]")
        if self.e_max <= 0:
            raise ValueError("e_max must be positive")
        if self.window < 1:
            raise ValueError("window must be at least 1")


def reward(outcome: FrameOutcome, rp: RewardParams) -> float:
    """Per-frame reward: minus weighted frame losses minus normalised energy."""
    losses = outcome.fli_ul + outcome.fli_dl
    return -rp.sigma * losses - (1.0 - rp.sigma) * (outcome.energy.e_total / rp.e_max)


def e_max_default(cfg: SlotConfig, hp: HeadsetParams,
                  traffic: TrafficParams) -> float:
    """Loose per-frame energy ceiling used as the default normaliser.

    Every slot transmitting at maximum UL power plus a largest-possible frame
    both decoded and rendered locally in full.
    """
    d_dl_max = traffic.dl_mean_bits * traffic.truncation[1]
    e_tx = cfg.slots_per_frame * cfg.slot_time * hp.p_ul_max
    e_dec = d_dl_max / hp.f_dec * hp.p_dec
    e_loc = d_dl_max / hp.f_loc_effective * hp.p_loc
    return e_tx + e_dec + e_loc


class XrOffloadEnv:
    """One episode over pre-generated traffic and a frozen channel trace.

    The state evolution is exogenous: actions change rewards, never the next
    state.  With a decision window W > 1 the same action is held for W
    consecutive frames and the step reward is the sum over the window.
    """

    def __init__(self, frames: list[FramePair], trace: ChannelTrace,
                 cfg: SlotConfig, hp: HeadsetParams, radio: RadioParams,
                 rp: RewardParams, beta_grid=DEFAULT_BETA_GRID):
        needed = len(frames) * cfg.slots_per_frame
        if len(trace) < needed:
            raise ValueError("trace underrun: episode needs "
                             f"{needed} slots, trace has {len(trace)}")
        self.frames = list(frames)
        self.trace = trace
        self.cfg = cfg
        self.hp = hp
        self.radio = radio
        self.rp = rp
        self.beta_grid = beta_grid
        self._cursor = 0

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def done(self) -> bool:
        return self._cursor >= len(self.frames)

    def _state_at(self, index: int) -> EnvState:
        frame = self.frames[index]
        gains = self.trace.frame_slice(index, self.cfg.slots_per_frame)
        return EnvState(d_ul=frame.d_ul, d_dl=frame.d_dl, h=float(gains[0]))

    def reset(self) -> EnvState:
        self._cursor = 0
        return self._state_at(0)

    def peek(self) -> tuple[FramePair, np.ndarray]:
        """Current frame and its channel slice (full-knowledge policies only)."""
        if self.done:
            raise RuntimeError("episode exhausted")
        return (self.frames[self._cursor],
                self.trace.frame_slice(self._cursor, self.cfg.slots_per_frame))

    def step(self, action: Action):
        """Hold ``action`` for one decision window.

        Returns (next_state, reward, outcomes, done); next_state is None at
        the end of the episode and reward is summed over the window.
        """
        if self.done:
            raise RuntimeError("episode exhausted")
        total = 0.0
        outcomes: list[FrameOutcome] = []
        for _ in range(self.rp.window):
            if self.done:
                break
            frame = self.frames[self._cursor]
            gains = self.trace.frame_slice(self._cursor, self.cfg.slots_per_frame)
            outcome = simulate_frame(frame, action, gains, self.cfg, self.hp,
                                     self.radio, beta_grid=self.beta_grid)
            total += reward(outcome, self.rp)
            outcomes.append(outcome)
            self._cursor += 1
        next_state = None if self.done else self._state_at(self._cursor)
        return next_state, total, outcomes, self.done
