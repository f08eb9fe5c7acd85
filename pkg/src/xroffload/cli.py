"""Command-line entry points for training, evaluation, sweeps, and replays."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import channel, dqn, harness, traffic
from .config import ExperimentConfig, load_config, save_config
from .env import RewardParams, XrOffloadEnv, e_max_default
from .policies import ActionGrid, OraclePolicy


def _config_from_args(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "seeds", None):
        config.seeds = tuple(args.seeds)
    return config


def _default_cell(config: ExperimentConfig, args):
    distance = args.distance if args.distance is not None else config.sweep.distances[0]
    return (float(distance), config.sweep.bandwidths[0],
            config.sweep.loc_scales[0], config.sweep.sigmas[0])


def cmd_train(args) -> int:
    config = _config_from_args(args)
    cell = _default_cell(config, args)
    seed = args.seed if args.seed is not None else config.seeds[0]
    net, grid, curve = harness.train_agent(config, cell, args.policy, seed)
    os.makedirs(args.out, exist_ok=True)
    ckpt = os.path.join(args.out, f"{args.policy}_d{cell[0]:g}_s{seed}.json")
    dqn.save_checkpoint(net, config.train, ckpt,
                        extra={"policy": args.policy, "cell": list(cell),
                               "seed": seed})
    curve_path = ckpt.replace(".json", "_curve.csv")
    with open(curve_path, "w") as fh:
        fh.write("episode,mean_reward\n")
        for i, r in enumerate(curve):
            fh.write(f"{i},{r!r}\n")
    print(f"checkpoint: {ckpt}")
    print(f"training curve: {curve_path}")
    return 0


def cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    net, _, extra = dqn.load_checkpoint(args.checkpoint)
    policy = extra["policy"] if extra else "partial"
    cell = tuple(extra["cell"]) if extra else _default_cell(config, args)
    seed = args.seed if args.seed is not None else config.seeds[0]
    grid = harness._policy_grid(policy, config)
    outcomes, actions = harness.evaluate(config, cell, policy, seed,
                                         net=net, grid=grid)
    headset = harness._cell_headset(config, cell[2])
    rp = harness._cell_reward(config, cell[3], headset)
    record = harness.summarize_outcomes(cell, policy, seed, outcomes, actions,
                                        rp, config.flr_limit)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "evaluation.json")
    with open(out_path, "w") as fh:
        json.dump(record.__dict__, fh, indent=2, sort_keys=True)
    if args.frame_log:
        harness.write_frame_log(args.out, cell, policy, seed, outcomes,
                                actions, rp)
    print(json.dumps(record.__dict__, indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    records = harness.run_sweep(config, args.out, workers=args.workers,
                                frame_logs=args.frame_logs)
    failures = [r for r in records if r.error]
    print(f"{len(records)} result rows -> {os.path.join(args.out, 'results.csv')}")
    if failures:
        print(f"{len(failures)} jobs recorded errors", file=sys.stderr)
    return 0


def cmd_regions(args) -> int:
    records = harness.read_results_csv(args.results)
    alpha_byd = {}
    for r in records:
        if r.policy == args.policy and not r.error:
            alpha_byd.setdefault(r.distance, []).append(r.mean_offload_ratio)
    means = {d: sum(v) / len(v) for d, v in alpha_byd.items()}
    regions = harness.decision_regions(means, args.high, args.low)
    text = json.dumps(regions, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_replay(args) -> int:
    config = _config_from_args(args)
    frames = traffic.frames_from_csv(args.frames)
    trace = channel.trace_from_csv(args.trace)
    headset = harness._cell_headset(config, config.sweep.loc_scales[0])
    radio = harness._cell_radio(config, config.sweep.bandwidths[0])
    e_max = config.e_max or e_max_default(config.slot, headset, config.traffic)
    rp = RewardParams(sigma=config.sweep.sigmas[0], e_max=e_max,
                      window=config.window)
    env = XrOffloadEnv(frames, trace, config.slot, headset, radio, rp,
                       beta_grid=config.beta_grid)
    grid = harness._policy_grid(args.policy, config)
    if args.policy in harness.ORACLE_POLICIES:
        policy = OraclePolicy(grid, config.slot, headset, radio, rp,
                              beta_grid=config.beta_grid)
        select = lambda state: policy.select(*env.peek())
    else:
        net, _, _ = dqn.load_checkpoint(args.checkpoint)
        ref = harness.gain_reference(trace.distance, radio)
        select = lambda state: grid[int(net.forward(
            dqn.normalize_state(state, config.traffic, ref,
                                scale_db=config.state_scale_db)).argmax())]

    outcomes, actions = [], []
    state = env.reset()
    while not env.done:
        action = select(state)
        state, _, outs, _ = env.step(action)
        outcomes.extend(outs)
        actions.extend([action] * len(outs))
    os.makedirs(args.out, exist_ok=True)
    cell = (trace.distance, radio.bandwidth, headset.loc_capability_scale,
            rp.sigma)
    harness.write_frame_log(args.out, cell, args.policy, trace.seed, outcomes,
                            actions, rp)
    record = harness.summarize_outcomes(cell, args.policy, trace.seed,
                                        outcomes, actions, rp, config.flr_limit)
    print(json.dumps(record.__dict__, indent=2, sort_keys=True))
    return 0


def cmd_init_config(args) -> int:
    save_config(ExperimentConfig(), args.out)
    print(f"wrote default config to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xroffload",
        description="XR TDD slot-allocation and edge-offloading simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one agent for one sweep cell")
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--out", default="runs", help="output directory")
    p.add_argument("--policy", default="partial",
                   choices=list(harness.DQN_POLICIES))
    p.add_argument("--distance", type=float, help="override cell distance (m)")
    p.add_argument("--seed", type=int, help="override the first config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on frozen traces")
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", default="runs")
    p.add_argument("--distance", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--frame-log", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="run the full experiment sweep")
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--out", default="runs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--frame-logs", action="store_true")
    p.add_argument("--seeds", type=int, nargs="+", help="override config seeds")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("regions", help="decision regions from a results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--policy", default="partial")
    p.add_argument("--high", type=float, default=0.9)
    p.add_argument("--low", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("replay", help="re-run a policy on exported traces")
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--trace", required=True, help="channel trace CSV")
    p.add_argument("--frames", required=True, help="frame sizes CSV")
    p.add_argument("--policy", default="oracle")
    p.add_argument("--checkpoint", help="needed for DQN policies")
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("init-config", help="write the default YAML config")
    p.add_argument("--out", default="xroffload.yaml")
    p.set_defaults(func=cmd_init_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
