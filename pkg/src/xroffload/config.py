"""Experiment configuration: nested dataclasses with YAML load/save."""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field, fields

import yaml

from .channel import RadioParams
from .dqn import TrainConfig
from .framemodel import HeadsetParams, SlotConfig
from .traffic import TrafficParams


@dataclass(frozen=True)
class SweepAxes:
    """Grid of operating points; non-swept axes stay singleton lists."""

    distances: tuple[float, ...] = tuple(float(d) for d in range(100, 701, 50))
    bandwidths: tuple[float, ...] = (20e6,)
    loc_scales: tuple[float, ...] = (1.0,)
    sigmas: tuple[float, ...] = (0.7,)

    def __post_init__(self):
        for name in ("distances", "bandwidths", "loc_scales", "sigmas"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"sweep axis {name} must be non-empty")
            object.__setattr__(self, name, values)

    def cells(self):
        """Cross product in deterministic sorted order."""
        for d in sorted(self.distances):
            for b in sorted(self.bandwidths):
                for s in sorted(self.loc_scales):
                    for g in sorted(self.sigmas):
                        yield (d, b, s, g)


@dataclass
class ExperimentConfig:
    """Everything a sweep needs; defaults mirror the evaluation-parameter table."""

    radio: RadioParams = field(default_factory=RadioParams)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    slot: SlotConfig = field(default_factory=SlotConfig)
    headset: HeadsetParams = field(default_factory=HeadsetParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    sweep: SweepAxes = field(default_factory=SweepAxes)
    seeds: tuple[int, ...] = (0, 1, 2)
    policies: tuple[str, ...] = ("partial", "always", "never", "oracle")
    sigma: float = 0.7
    window: int = 1
    e_max: float | None = None          # None -> loose per-frame ceiling
    eval_frames: int = 500
    eval_episodes: int = 1
    train_frames: int = 200
    flr_limit: float = 0.1
    beta_grid: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    alpha_values: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    region_high: float = 0.9
    region_low: float = 0.1
    state_scale_db: float = 20.0

    def __post_init__(self):
        self.seeds = tuple(int(s) for s in self.seeds)
        self.policies = tuple(self.policies)
        self.beta_grid = tuple(float(b) for b in self.beta_grid)
        self.alpha_values = tuple(float(a) for a in self.alpha_values)
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if not self.policies:
            raise ValueError("policies must be non-empty")
        if not (0.0 < self.flr_limit < 1.0):
            raise ValueError("flr_limit must lie in (0, 1)")
        if self.eval_frames < 1 or self.train_frames < 1:
            raise ValueError("frame counts must be positive")
        if self.eval_episodes < 1:
            raise ValueError("eval_episodes must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = copy.deepcopy(data)
        kwargs = {}
        nested = {
            "radio": RadioParams,
            "traffic": TrafficParams,
            "slot": SlotConfig,
            "headset": HeadsetParams,
            "train": TrainConfig,
            "sweep": SweepAxes,
        }
        known = {f.name for f in fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ValueError(f"unknown config key: {key}")
            if key in nested and isinstance(value, dict):
                if key == "traffic" and "truncation" in value:
                    value["truncation"] = tuple(value["truncation"])
                kwargs[key] = nested[key](**value)
            else:
                kwargs[key] = value
        return cls(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    return ExperimentConfig.from_dict(data)


def save_config(config: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=True)
