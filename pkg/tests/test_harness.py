import csv
import json

import numpy as np
import pytest

from xroffload.config import ExperimentConfig, SweepAxes, load_config, save_config
from xroffload.dqn import TrainConfig
from xroffload.harness import (RESULT_COLUMNS, coverage_distance,
                               decision_regions, derive_seed,
                               mean_flr_by_distance, read_results_csv,
                               run_job, run_sweep)


def tiny_config(policies=("oracle_never",), seeds=(0,), distances=(300.0,)):
    cfg = ExperimentConfig()
    cfg.sweep = SweepAxes(distances=distances)
    cfg.seeds = seeds
    cfg.policies = policies
    cfg.train = TrainConfig(episodes=4, hidden_dim=12, batch_size=16,
                            replay_capacity=400, epsilon_decay_steps=200,
                            target_sync_period=50, gamma=0.0)
    cfg.train_frames = 40
    cfg.eval_frames = 50
    cfg.eval_episodes = 1
    return cfg


def test_derive_seed_is_stable():
    # Pinned so cross-run reproducibility is visible in the test log.
    assert derive_seed("eval-trace", (300.0, 20e6, 1.0, 0.7), 0) == \
        derive_seed("eval-trace", (300.0, 20e6, 1.0, 0.7), 0)
    assert derive_seed("a") != derive_seed("b")


def test_single_cell_oracle_sweep_row(tmp_path):
    cfg = tiny_config()
    records = run_sweep(cfg, tmp_path / "out")
    assert len(records) == 1
    r = records[0]
    assert r.policy == "oracle_never"
    assert r.n_frames == 50
    assert 0.0 <= r.flr_total <= 1.0
    assert 0.0 <= r.mean_offload_ratio <= 1.0
    assert (tmp_path / "out" / "results.csv").exists()
    assert (tmp_path / "out" / "summary.json").exists()
    assert (tmp_path / "out" / "manifest.json").exists()


def test_results_csv_roundtrip(tmp_path):
    cfg = tiny_config(policies=("oracle_never", "oracle_always"), seeds=(0, 1))
    records = run_sweep(cfg, tmp_path / "out")
    back = read_results_csv(tmp_path / "out" / "results.csv")
    assert back == records
    with open(tmp_path / "out" / "results.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == RESULT_COLUMNS


def test_sweep_is_byte_identical_across_runs(tmp_path):
    cfg = tiny_config(policies=("never",), seeds=(0,))
    run_sweep(cfg, tmp_path / "a")
    run_sweep(cfg, tmp_path / "b")
    a = (tmp_path / "a" / "results.csv").read_bytes()
    b = (tmp_path / "b" / "results.csv").read_bytes()
    assert a == b


def test_frame_log_flr_matches_results_row(tmp_path):
    # Second, independent implementation of the FLR metric: recount the
    # per-frame indicators straight from the logged CSV.
    cfg = tiny_config(policies=("oracle_never",))
    records = run_sweep(cfg, tmp_path / "out", frame_logs=True)
    frame_dir = tmp_path / "out" / "frames"
    logs = list(frame_dir.glob("*.csv"))
    assert len(logs) == 1
    with open(logs[0], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == records[0].n_frames
    flr_dl = sum(int(row["fli_dl"]) for row in rows) / len(rows)
    flr_ul = sum(int(row["fli_ul"]) for row in rows) / len(rows)
    mean_e = sum(float(row["e_total"]) for row in rows) / len(rows)
    assert flr_dl == pytest.approx(records[0].flr_total)
    assert flr_ul == pytest.approx(records[0].flr_ul)
    assert mean_e == pytest.approx(records[0].mean_energy, rel=1e-12)


def test_manifest_seed_streams_disjoint(tmp_path):
    cfg = tiny_config()
    run_sweep(cfg, tmp_path / "out")
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["train_eval_seed_streams_disjoint"] is True
    assert manifest["root_seeds"] == [0]
    assert "config_sha256" in manifest


def test_divergent_jobs_recorded_not_raised(tmp_path, monkeypatch):
    from xroffload import harness as h
    from xroffload.dqn import DivergenceError

    def boom(*args, **kwargs):
        raise DivergenceError("synthetic blow-up")

    monkeypatch.setattr(h, "train_agent", boom)
    cfg = tiny_config(policies=("never",))
    records = run_sweep(cfg, tmp_path / "out")
    assert records[0].error.startswith("divergence")
    assert np.isnan(records[0].flr_total)
    assert records[0].coverage_ok is False


def test_coverage_all_below_limit_returns_max_distance():
    flr = {100.0: 0.01, 200.0: 0.03, 300.0: 0.05}
    assert coverage_distance(flr, 0.1) == 300.0


def test_coverage_none_when_all_above():
    flr = {100.0: 0.5, 200.0: 0.9}
    assert coverage_distance(flr, 0.1) is None


def test_coverage_crossing_fixture():
    # Monotone FLR curve crossing 10% between 400 and 450 with a 50 m grid.
    flr = {300.0: 0.02, 350.0: 0.04, 400.0: 0.08, 450.0: 0.13, 500.0: 0.4}
    assert coverage_distance(flr, 0.1) == 400.0


def test_regions_all_offload():
    regions = decision_regions({100.0: 1.0, 200.0: 0.95})
    assert [row["region"] for row in regions["table"]] == ["always", "always"]
    assert regions["boundaries"] == []


def test_regions_all_local():
    regions = decision_regions({100.0: 0.0, 200.0: 0.05})
    assert [row["region"] for row in regions["table"]] == ["never", "never"]


def test_regions_monotone_fixture_orders_three_regions():
    alpha = {100.0: 0.97, 200.0: 0.8, 300.0: 0.5, 400.0: 0.2, 500.0: 0.04}
    regions = decision_regions(alpha)
    assert [row["region"] for row in regions["table"]] == \
        ["always", "partial", "partial", "partial", "never"]
    assert [(b["from"], b["to"]) for b in regions["boundaries"]] == \
        [("always", "partial"), ("partial", "never")]


def test_mean_flr_by_distance_groups_and_averages():
    cfg = tiny_config(policies=("oracle_never",), seeds=(0, 1),
                      distances=(200.0, 300.0))
    records = [run_job(cfg, (d, 20e6, 1.0, 0.7), "oracle_never", s)
               for d in (200.0, 300.0) for s in (0, 1)]
    flr = mean_flr_by_distance(records, "oracle_never")
    assert set(flr) == {200.0, 300.0}
    manual = np.mean([r.flr_total for r in records if r.distance == 200.0])
    assert flr[200.0] == pytest.approx(manual)


def test_config_yaml_roundtrip(tmp_path):
    cfg = tiny_config(policies=("partial", "oracle"), seeds=(3, 4))
    path = tmp_path / "config.yaml"
    save_config(cfg, path)
    loaded = load_config(path)
    assert loaded.to_dict() == cfg.to_dict()


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("not_a_key: 1\n")
    with pytest.raises(ValueError, match="unknown config key"):
        load_config(path)
