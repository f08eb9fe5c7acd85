import json

from xrplots.cli import main
from tests.test_figures import make_row, write_results


def test_render_with_flags(tmp_path, capsys):
    results = tmp_path / "results.csv"
    write_results(results, [make_row(d, "partial", alpha=a)
                            for d, a in ((100, 0.9), (300, 0.4))])
    out = tmp_path / "fig.png"
    code = main(["render", "--kind", "offload-vs-distance",
                 "--input", str(results), "--output", str(out),
                 "--group-by", "policy"])
    assert code == 0
    assert out.exists()


def test_render_with_spec_file(tmp_path):
    results = tmp_path / "results.csv"
    write_results(results, [make_row(d, "always", flr=f, energy=2e-3)
                            for d, f in ((100, 0.0), (200, 0.5))])
    spec = tmp_path / "spec.json"
    out = tmp_path / "energy.svg"
    spec.write_text(json.dumps({"input_csv": str(results),
                                "kind": "energy-vs-distance",
                                "output": str(out)}))
    assert main(["render", "--spec", str(spec)]) == 0
    assert out.exists()


def test_render_reports_errors(tmp_path, capsys):
    results = tmp_path / "results.csv"
    write_results(results, [])
    code = main(["render", "--kind", "regions", "--input", str(results),
                 "--output", str(tmp_path / "x.png")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_render_requires_spec_or_flags(capsys):
    assert main(["render"]) == 2
