"""One-off pilot of the acceptance trend experiment at 3 seeds (not shipped)."""
import json
import time

import numpy as np
from scipy import stats

from xroffload.config import ExperimentConfig, SweepAxes
from xroffload.dqn import TrainConfig
from xroffload import harness

SEEDS = (0, 1, 2)
DISTANCES = (150.0, 300.0, 450.0, 600.0, 750.0, 900.0)


def base_config():
    cfg = ExperimentConfig()
    steps = 50 * 150
    cfg.train = TrainConfig(episodes=50, hidden_dim=64, batch_size=64,
                            replay_capacity=steps,
                            epsilon_decay_steps=int(steps * 0.7),
                            epsilon_end=0.05, target_sync_period=200,
                            gamma=0.0, learning_rate=2e-3, update_every=1)
    cfg.train_frames = 150
    cfg.eval_frames = 150
    cfg.eval_episodes = 3
    cfg.seeds = SEEDS
    return cfg


t0 = time.time()
cfg_main = base_config()
cfg_main.sweep = SweepAxes(distances=DISTANCES)
cfg_main.policies = ("partial", "always", "never")
records = harness.run_sweep(cfg_main, "/tmp/pilot/main")
print(f"main sweep done in {time.time()-t0:.0f}s", flush=True)

cfg_cap = base_config()
cfg_cap.sweep = SweepAxes(distances=(450.0,), loc_scales=(2.0,))
cfg_cap.policies = ("partial",)
records += harness.run_sweep(cfg_cap, "/tmp/pilot/cap")

cfg_bw = base_config()
cfg_bw.sweep = SweepAxes(distances=(450.0,), bandwidths=(10e6, 40e6))
cfg_bw.policies = ("partial",)
records += harness.run_sweep(cfg_bw, "/tmp/pilot/bw")
print(f"all sweeps done in {time.time()-t0:.0f}s", flush=True)

main = [r for r in records if r.bandwidth == 20e6 and r.loc_scale == 1.0]

print("\n== per-distance means (partial) ==")
for d in DISTANCES:
    rows = [r for r in main if r.policy == "partial" and r.distance == d]
    print(f"d={d}: alpha={np.mean([r.mean_offload_ratio for r in rows]):.3f} "
          f"flr={np.mean([r.flr_total for r in rows]):.3f} "
          f"energy={np.mean([r.mean_energy for r in rows])*1e3:.3f} mJ")

print("\n== coverage curves ==")
for pol in ("partial", "always", "never"):
    flr = harness.mean_flr_by_distance(main, pol)
    print(pol, {d: round(v, 3) for d, v in flr.items()},
          "cov:", harness.coverage_distance(flr, 0.1))

pairs = [(r.distance, r.mean_offload_ratio) for r in main
         if r.policy == "partial" and r.distance <= 750.0]
rho, p = stats.spearmanr([a for a, _ in pairs], [b for _, b in pairs])
print(f"\nSpearman alpha vs distance (<=750): rho={rho:.3f} p={p:.2e}")

cap1 = sorted([(r.seed, r.mean_offload_ratio) for r in main
               if r.policy == "partial" and r.distance == 450.0])
cap2 = sorted([(r.seed, r.mean_offload_ratio) for r in records
               if r.loc_scale == 2.0])
a1 = [v for _, v in cap1]; a2 = [v for _, v in cap2]
t, p = stats.ttest_rel(a1, a2, alternative="greater")
print(f"capability: alpha(scale1)={np.mean(a1):.3f} alpha(scale2)={np.mean(a2):.3f} p={p:.4f}")

bw10 = sorted([(r.seed, r.mean_offload_ratio) for r in records if r.bandwidth == 10e6])
bw40 = sorted([(r.seed, r.mean_offload_ratio) for r in records if r.bandwidth == 40e6])
b1 = [v for _, v in bw10]; b4 = [v for _, v in bw40]
t, p = stats.ttest_rel(b4, b1, alternative="greater")
print(f"bandwidth: alpha(40M)={np.mean(b4):.3f} alpha(10M)={np.mean(b1):.3f} p={p:.4f}")

print("\n== energy (partial vs never at qualifying distances) ==")
flr_p = harness.mean_flr_by_distance(main, "partial")
flr_n = harness.mean_flr_by_distance(main, "never")
for d in DISTANCES:
    if flr_p[d] <= 0.1 and flr_n[d] <= 0.1:
        ep = np.mean([r.mean_energy for r in main
                      if r.policy == "partial" and r.distance == d])
        en = np.mean([r.mean_energy for r in main
                      if r.policy == "never" and r.distance == d])
        print(f"d={d}: partial={ep*1e3:.3f} never={en*1e3:.3f} saving={(1-ep/en)*100:.1f}%")

print(f"\ntotal pilot time {time.time()-t0:.0f}s")
