"""Slot-level XR edge-offloading simulator with a DQN slot/offload allocator."""

__version__ = "0.1.0"

from .channel import ChannelTrace, RadioParams, generate_trace, path_loss_db, snr
from .framemodel import (Action, EnergyBreakdown, FrameOutcome, HeadsetParams,
                         LatencyBreakdown, SlotConfig, simulate_frame)
from .env import EnvState, RewardParams, XrOffloadEnv, e_max_default, reward
from .policies import ActionGrid, OraclePolicy, greedy_oracle
from .traffic import FramePair, TrafficParams, generate_frames

__all__ = [
    "Action", "ActionGrid", "ChannelTrace", "EnergyBreakdown", "EnvState",
    "FrameOutcome", "FramePair", "HeadsetParams", "LatencyBreakdown",
    "OraclePolicy", "RadioParams", "RewardParams", "SlotConfig",
    "TrafficParams", "XrOffloadEnv", "e_max_default", "generate_frames",
    "generate_trace", "greedy_oracle", "path_loss_db", "reward",
    "simulate_frame", "snr",
]
