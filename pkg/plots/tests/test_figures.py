import csv
import json

import pytest

from xrplots.figures import (FigureError, FigureSpec, energy_series,
                             offload_series, region_table, render)

COLUMNS = ["distance", "bandwidth", "loc_scale", "sigma", "policy", "seed",
           "n_frames", "flr_ul", "flr_dl", "flr_total", "mean_energy",
           "mean_offload_ratio", "mean_reward", "coverage_ok", "error"]


def write_results(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS)
        writer.writeheader()
        for row in rows:
            full = {c: row.get(c, "0") for c in COLUMNS}
            writer.writerow(full)


def make_row(distance, policy, seed=0, flr=0.0, energy=1e-3, alpha=0.5,
             loc_scale=1.0):
    return {"distance": distance, "bandwidth": 20e6, "loc_scale": loc_scale,
            "sigma": 0.7, "policy": policy, "seed": seed, "n_frames": 100,
            "flr_ul": flr, "flr_dl": flr, "flr_total": flr,
            "mean_energy": energy, "mean_offload_ratio": alpha,
            "mean_reward": -0.1, "coverage_ok": int(flr <= 0.1), "error": ""}


@pytest.fixture
def energy_fixture(tmp_path):
    # partial stays under the 10% limit through 500 m (5 points); always
    # crosses it at 400 m (3 points survive: 100, 200, 300).
    rows = []
    for i, d in enumerate((100, 200, 300, 400, 500)):
        rows.append(make_row(d, "partial", flr=0.02 + 0.01 * i,
                             energy=1e-3 + 1e-4 * i))
        rows.append(make_row(d, "always", flr=(0.02, 0.05, 0.09, 0.4, 0.9)[i],
                             energy=2e-3 + 1e-4 * i))
    path = tmp_path / "results.csv"
    write_results(path, rows)
    return path


def test_energy_truncation_matches_hand_count(energy_fixture, tmp_path):
    out = tmp_path / "energy.png"
    spec = FigureSpec(input_csv=str(energy_fixture), kind="energy-vs-distance",
                      output=str(out), group_by="policy", flr_limit=0.1)
    series = render(spec)
    assert out.exists()
    # Hand count: always has FLR .02/.05/.09/.40/.90 -> stops after 300 m.
    assert series["always"][0] == [100.0, 200.0, 300.0]
    assert series["partial"][0] == [100.0, 200.0, 300.0, 400.0, 500.0]
    assert series["always"][1] == pytest.approx([2e-3, 2.1e-3, 2.2e-3])


def test_offload_vs_distance_groups_by_capability(tmp_path):
    rows = []
    for scale, alphas in ((1.0, (0.9, 0.6, 0.3)), (2.0, (0.7, 0.4, 0.1))):
        for d, a in zip((100, 300, 500), alphas):
            for seed in (0, 1):
                rows.append(make_row(d, "partial", seed=seed, alpha=a,
                                     loc_scale=scale))
    path = tmp_path / "results.csv"
    write_results(path, rows)
    out = tmp_path / "offload.svg"
    spec = FigureSpec(input_csv=str(path), kind="offload-vs-distance",
                      output=str(out), group_by="loc_scale")
    series = render(spec)
    assert out.exists()
    assert series["1.0"][1] == pytest.approx([0.9, 0.6, 0.3])
    assert series["2.0"][1] == pytest.approx([0.7, 0.4, 0.1])


def test_regions_strip_renders_three_bands(tmp_path):
    rows = [make_row(d, "partial", alpha=a)
            for d, a in ((100, 0.95), (200, 0.92), (300, 0.5), (400, 0.3),
                         (500, 0.05))]
    path = tmp_path / "results.csv"
    write_results(path, rows)
    out = tmp_path / "regions.png"
    series = render(FigureSpec(input_csv=str(path), kind="regions",
                               output=str(out)))
    assert out.exists()
    regions = [row["region"] for row in series["regions"]]
    assert regions == ["always", "always", "partial", "partial", "never"]


def test_empty_csv_errors_and_writes_nothing(tmp_path):
    path = tmp_path / "empty.csv"
    write_results(path, [])
    out = tmp_path / "fig.png"
    with pytest.raises(FigureError, match="no usable result rows"):
        render(FigureSpec(input_csv=str(path), kind="offload-vs-distance",
                          output=str(out)))
    assert not out.exists()


def test_single_row_renders_single_point(tmp_path):
    path = tmp_path / "one.csv"
    write_results(path, [make_row(250, "partial", alpha=0.4)])
    out = tmp_path / "one.png"
    series = render(FigureSpec(input_csv=str(path), kind="offload-vs-distance",
                               output=str(out)))
    assert out.exists()
    assert series["partial"] == ([250.0], [0.4])


def test_missing_columns_give_descriptive_error(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance", "policy"])
        writer.writerow([100, "partial"])
    with pytest.raises(FigureError, match="missing required columns"):
        render(FigureSpec(input_csv=str(path), kind="energy-vs-distance",
                          output=str(tmp_path / "x.png")))


def test_rows_with_errors_are_skipped(tmp_path):
    rows = [make_row(100, "partial", alpha=0.8)]
    bad = make_row(200, "partial", alpha=0.1)
    bad["error"] = "divergence: synthetic"
    rows.append(bad)
    path = tmp_path / "res.csv"
    write_results(path, rows)
    series = offload_series(
        [r for r in csv.DictReader(open(path)) if not r["error"]],
        "policy", "partial")
    assert series["partial"][0] == [100.0]


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(FigureError, match="unknown figure kind"):
        FigureSpec(input_csv="x.csv", kind="pie", output="x.png")


def test_spec_from_json_file(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "input_csv": "results.csv", "kind": "regions",
        "output": "fig.png", "policy": "partial"}))
    spec = FigureSpec.from_file(spec_path)
    assert spec.kind == "regions"
    assert spec.flr_limit == 0.1
