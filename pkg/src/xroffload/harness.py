"""Experiment runner: trains and evaluates policies over a sweep grid.

Every (cell, policy, seed) job is independent and fully seeded, so sweeps
reproduce byte-identical CSV output and can be fanned out over a process
pool; results are merged by sorted cell key regardless of scheduling.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy

from . import __version__
from .channel import RadioParams, generate_trace, path_loss_db
from .config import ExperimentConfig
from .dqn import DivergenceError, TrainConfig, normalize_state, train
from .env import RewardParams, XrOffloadEnv, e_max_default, reward as reward_fn
from .policies import ActionGrid, OraclePolicy
from .traffic import generate_frames

DQN_POLICIES = ("partial", "always", "never")
ORACLE_POLICIES = ("oracle", "oracle_always", "oracle_never")
RESULT_COLUMNS = (
    "distance", "bandwidth", "loc_scale", "sigma", "policy", "seed",
    "n_frames", "flr_ul", "flr_dl", "flr_total", "mean_energy",
    "mean_offload_ratio", "mean_reward", "coverage_ok", "error",
)


@dataclass(frozen=True)
class SweepRecord:
    """Aggregate metrics for one (cell, policy, seed) evaluation."""

    distance: float
    bandwidth: float
    loc_scale: float
    sigma: float
    policy: str
    seed: int
    n_frames: int
    flr_ul: float
    flr_dl: float
    flr_total: float
    mean_energy: float
    mean_offload_ratio: float
    mean_reward: float
    coverage_ok: bool
    error: str = ""


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a tuple of hashable parts."""
    digest = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _cell_radio(config: ExperimentConfig, bandwidth: float) -> RadioParams:
    return replace(config.radio, bandwidth=bandwidth)


def _cell_headset(config: ExperimentConfig, loc_scale: float):
    return replace(config.headset, loc_capability_scale=loc_scale)


def _cell_reward(config: ExperimentConfig, sigma: float, headset) -> RewardParams:
    e_max = config.e_max
    if e_max is None:
        e_max = e_max_default(config.slot, headset, config.traffic)
    return RewardParams(sigma=sigma, e_max=e_max, window=config.window)


def gain_reference(distance: float, radio: RadioParams) -> float:
    """Median large-scale gain used to centre the channel observation."""
    return radio.antenna_gain * 10.0 ** (-path_loss_db(distance, radio) / 10.0)


def _policy_grid(policy: str, config: ExperimentConfig) -> ActionGrid:
    grid = ActionGrid.build(config.slot.slots_per_frame, config.alpha_values)
    if policy in ("always", "oracle_always"):
        return grid.restrict_alpha(1.0)
    if policy in ("never", "oracle_never"):
        return grid.restrict_alpha(0.0)
    return grid


def _build_env(config: ExperimentConfig, cell, rp: RewardParams, n_frames: int,
               traffic_seed: int, trace_seed: int) -> XrOffloadEnv:
    distance, bandwidth, loc_scale, _ = cell
    radio = _cell_radio(config, bandwidth)
    headset = _cell_headset(config, loc_scale)
    frames = generate_frames(config.traffic, n_frames, traffic_seed)
    trace = generate_trace(distance, n_frames * config.slot.slots_per_frame,
                           radio, trace_seed, slot_time=config.slot.slot_time)
    return XrOffloadEnv(frames, trace, config.slot, headset, radio, rp,
                        beta_grid=config.beta_grid)


def train_agent(config: ExperimentConfig, cell, policy: str, seed: int):
    """Train one DQN agent for a sweep cell; returns (net, grid, curve)."""
    if policy not in DQN_POLICIES:
        raise ValueError(f"not a trainable policy: {policy}")
    distance, bandwidth, loc_scale, sigma = cell
    radio = _cell_radio(config, bandwidth)
    headset = _cell_headset(config, loc_scale)
    rp = _cell_reward(config, sigma, headset)
    grid = _policy_grid(policy, config)
    ref = gain_reference(distance, radio)

    def env_factory(episode: int) -> XrOffloadEnv:
        return _build_env(config, cell, rp, config.train_frames,
                          derive_seed("train-traffic", cell, seed, episode),
                          derive_seed("train-trace", cell, seed, episode))

    def normalize(state):
        return normalize_state(state, config.traffic, ref,
                               scale_db=config.state_scale_db)

    train_cfg = replace(config.train, seed=derive_seed("agent", cell, policy, seed))
    net, curve = train(env_factory, grid.actions, normalize, train_cfg)
    return net, grid, curve


def evaluate(config: ExperimentConfig, cell, policy: str, seed: int, net=None,
             grid: ActionGrid | None = None):
    """Evaluate a policy on the frozen evaluation episodes of (cell, seed).

    Runs config.eval_episodes held-out episodes (fresh shadowing per episode)
    and returns (outcomes, actions) with one entry per frame, concatenated.
    """
    distance, bandwidth, loc_scale, sigma = cell
    radio = _cell_radio(config, bandwidth)
    headset = _cell_headset(config, loc_scale)
    rp = _cell_reward(config, sigma, headset)
    if grid is None:
        grid = _policy_grid(policy, config)

    oracle = None
    normalize = None
    if policy in ORACLE_POLICIES:
        oracle = OraclePolicy(grid, config.slot, headset, radio, rp,
                              beta_grid=config.beta_grid)
    else:
        if net is None:
            raise ValueError("DQN policy evaluation needs a trained network")
        ref = gain_reference(distance, radio)

        def normalize(state):
            return normalize_state(state, config.traffic, ref,
                                   scale_db=config.state_scale_db)

    outcomes = []
    actions = []
    for episode in range(config.eval_episodes):
        env = _build_env(config, cell, rp, config.eval_frames,
                         derive_seed("eval-traffic", cell, seed, episode),
                         derive_seed("eval-trace", cell, seed, episode))
        state = env.reset()
        while not env.done:
            if oracle is not None:
                frame, trace_slice = env.peek()
                action = oracle.select(frame, trace_slice)
            else:
                action = grid[int(np.argmax(net.forward(normalize(state))))]
            state, _, outs, _ = env.step(action)
            outcomes.extend(outs)
            actions.extend([action] * len(outs))
    return outcomes, actions


def summarize_outcomes(cell, policy: str, seed: int, outcomes, actions,
                       rp: RewardParams, flr_limit: float,
                       error: str = "") -> SweepRecord:
    distance, bandwidth, loc_scale, sigma = cell
    if error or not outcomes:
        nan = float("nan")
        return SweepRecord(distance, bandwidth, loc_scale, sigma, policy, seed,
                           0, nan, nan, nan, nan, nan, nan, False, error)
    flr_ul = float(np.mean([o.fli_ul for o in outcomes]))
    flr_dl = float(np.mean([o.fli_dl for o in outcomes]))
    # The DL indicator already subsumes UL losses, so it is the end-to-end rate.
    flr_total = flr_dl
    return SweepRecord(
        distance=distance, bandwidth=bandwidth, loc_scale=loc_scale,
        sigma=sigma, policy=policy, seed=seed, n_frames=len(outcomes),
        flr_ul=flr_ul, flr_dl=flr_dl, flr_total=flr_total,
        mean_energy=float(np.mean([o.energy.e_total for o in outcomes])),
        mean_offload_ratio=float(np.mean([a.alpha for a in actions])),
        mean_reward=float(np.mean([reward_fn(o, rp) for o in outcomes])),
        coverage_ok=bool(flr_total <= flr_limit),
        error="",
    )


def run_job(config: ExperimentConfig, cell, policy: str, seed: int,
            frame_log_dir=None) -> SweepRecord:
    """Train (if needed) and evaluate one sweep job."""
    _, _, loc_scale, sigma = cell
    headset = _cell_headset(config, loc_scale)
    rp = _cell_reward(config, sigma, headset)
    try:
        net = None
        grid = None
        if policy in DQN_POLICIES:
            net, grid, _ = train_agent(config, cell, policy, seed)
        outcomes, actions = evaluate(config, cell, policy, seed, net=net, grid=grid)
    except DivergenceError as exc:
        return summarize_outcomes(cell, policy, seed, [], [], rp,
                                  config.flr_limit, error=f"divergence: {exc}")
    if frame_log_dir is not None:
        write_frame_log(frame_log_dir, cell, policy, seed, outcomes, actions, rp)
    return summarize_outcomes(cell, policy, seed, outcomes, actions, rp,
                              config.flr_limit)


def _job_entry(args):
    config_dict, cell, policy, seed, frame_log_dir = args
    config = ExperimentConfig.from_dict(config_dict)
    record = run_job(config, cell, policy, seed, frame_log_dir=frame_log_dir)
    return dataclasses.asdict(record)


def run_sweep(config: ExperimentConfig, out_dir, workers: int = 1,
              frame_logs: bool = False) -> list[SweepRecord]:
    """Run the full sweep and persist results.csv / summary.json / manifest.json."""
    os.makedirs(out_dir, exist_ok=True)
    frame_log_dir = None
    if frame_logs:
        frame_log_dir = os.path.join(out_dir, "frames")
        os.makedirs(frame_log_dir, exist_ok=True)

    jobs = [(cell, policy, seed)
            for cell in config.sweep.cells()
            for policy in config.policies
            for seed in config.seeds]

    if workers > 1:
        payloads = [(config.to_dict(), cell, policy, seed, frame_log_dir)
                    for cell, policy, seed in jobs]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            dicts = list(pool.map(_job_entry, payloads))
        records = [SweepRecord(**d) for d in dicts]
    else:
        records = [run_job(config, cell, policy, seed, frame_log_dir=frame_log_dir)
                   for cell, policy, seed in jobs]

    records.sort(key=lambda r: (r.distance, r.bandwidth, r.loc_scale, r.sigma,
                                r.policy, r.seed))
    write_results_csv(records, os.path.join(out_dir, "results.csv"))
    write_summary(config, records, os.path.join(out_dir, "summary.json"))
    write_manifest(config, os.path.join(out_dir, "manifest.json"))
    return records


def write_frame_log(directory, cell, policy, seed, outcomes, actions,
                    rp: RewardParams) -> None:
    distance, bandwidth, loc_scale, sigma = cell
    name = (f"d{distance:g}_b{bandwidth:g}_s{loc_scale:g}_g{sigma:g}_"
            f"{policy}_{seed}.csv")
    with open(os.path.join(directory, name), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "n_ul", "n_dl", "alpha", "fli_ul",
                         "fli_dl", "e_total", "reward"])
        for i, (o, a) in enumerate(zip(outcomes, actions)):
            writer.writerow([i, a.n_ul, a.n_dl, repr(a.alpha), o.fli_ul,
                             o.fli_dl, repr(o.energy.e_total),
                             repr(reward_fn(o, rp))])


def write_results_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for r in records:
            writer.writerow([
                repr(r.distance), repr(r.bandwidth), repr(r.loc_scale),
                repr(r.sigma), r.policy, r.seed, r.n_frames, repr(r.flr_ul),
                repr(r.flr_dl), repr(r.flr_total), repr(r.mean_energy),
                repr(r.mean_offload_ratio), repr(r.mean_reward),
                int(r.coverage_ok), r.error,
            ])


def read_results_csv(path) -> list[SweepRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(SweepRecord(
                distance=float(row["distance"]), bandwidth=float(row["bandwidth"]),
                loc_scale=float(row["loc_scale"]), sigma=float(row["sigma"]),
                policy=row["policy"], seed=int(row["seed"]),
                n_frames=int(row["n_frames"]), flr_ul=float(row["flr_ul"]),
                flr_dl=float(row["flr_dl"]), flr_total=float(row["flr_total"]),
                mean_energy=float(row["mean_energy"]),
                mean_offload_ratio=float(row["mean_offload_ratio"]),
                mean_reward=float(row["mean_reward"]),
                coverage_ok=bool(int(row["coverage_ok"])), error=row["error"]))
    return records


def mean_flr_by_distance(records: list[SweepRecord], policy: str,
                         group=None) -> dict[float, float]:
    """Mean total FLR per distance for one policy (seeds averaged)."""
    byd: dict[float, list[float]] = {}
    for r in records:
        if r.policy != policy or r.error:
            continue
        if group is not None and (r.bandwidth, r.loc_scale, r.sigma) != group:
            continue
        byd.setdefault(r.distance, []).append(r.flr_total)
    return {d: float(np.mean(v)) for d, v in sorted(byd.items())}


def coverage_distance(flr_by_distance: dict[float, float],
                      flr_limit: float) -> float | None:
    """Largest swept distance whose mean FLR stays within the limit.

    Grid resolution bounds precision; None means even the closest point fails.
    """
    qualifying = [d for d, flr in flr_by_distance.items()
                  if np.isfinite(flr) and flr <= flr_limit]
    return max(qualifying) if qualifying else None


def decision_regions(alpha_by_distance: dict[float, float], high: float = 0.9,
                     low: float = 0.1):
    """Classify each distance by its mean offload ratio and list boundaries."""
    table = []
    for d in sorted(alpha_by_distance):
        alpha = alpha_by_distance[d]
        if alpha >= high:
            region = "always"
        elif alpha <= low:
            region = "never"
        else:
            region = "partial"
        table.append({"distance": d, "mean_alpha": alpha, "region": region})
    boundaries = []
    for prev, cur in zip(table, table[1:]):
        if prev["region"] != cur["region"]:
            boundaries.append({"distance": cur["distance"],
                               "from": prev["region"], "to": cur["region"]})
    return {"table": table, "boundaries": boundaries}


def write_summary(config: ExperimentConfig, records: list[SweepRecord],
                  path) -> None:
    groups = sorted({(r.bandwidth, r.loc_scale, r.sigma) for r in records})
    coverage = {}
    regions = {}
    for group in groups:
        key = f"bw={group[0]:g},scale={group[1]:g},sigma={group[2]:g}"
        coverage[key] = {}
        for policy in config.policies:
            flr = mean_flr_by_distance(records, policy, group=group)
            coverage[key][policy] = coverage_distance(flr, config.flr_limit)
        alpha_byd: dict[float, list[float]] = {}
        for r in records:
            if (r.policy == "partial" and not r.error
                    and (r.bandwidth, r.loc_scale, r.sigma) == group):
                alpha_byd.setdefault(r.distance, []).append(r.mean_offload_ratio)
        if alpha_byd:
            means = {d: float(np.mean(v)) for d, v in alpha_byd.items()}
            regions[key] = decision_regions(means, config.region_high,
                                            config.region_low)
    summary = {"flr_limit": config.flr_limit, "coverage": coverage,
               "regions": regions}
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


def write_manifest(config: ExperimentConfig, path) -> None:
    config_dict = config.to_dict()
    blob = json.dumps(config_dict, sort_keys=True).encode()
    # Train and eval seeds live in disjoint derivation namespaces by
    # construction; record a direct check over the realised streams.
    cells = list(config.sweep.cells())
    train_seeds = {derive_seed("train-trace", cell, seed, ep)
                   for cell in cells for seed in config.seeds
                   for ep in range(config.train.episodes)}
    eval_seeds = {derive_seed("eval-trace", cell, seed, ep)
                  for cell in cells for seed in config.seeds
                  for ep in range(config.eval_episodes)}
    manifest = {
        "config": config_dict,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "root_seeds": list(config.seeds),
        "train_trace_seed_count": len(train_seeds),
        "eval_trace_seed_count": len(eval_seeds),
        "train_eval_seed_streams_disjoint": not (train_seeds & eval_seeds),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "xroffload": __version__,
        },
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
