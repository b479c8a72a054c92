import json
from pathlib import Path

import pytest

from disclosure_game.cli import main

BASIC_TOML = """
p = 0.5
q = 0.3
vhat = 0.4

[dist]
kind = "uniform"
support = [0.0, 1.0]
"""


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.toml"
    path.write_text(BASIC_TOML)
    return str(path)


def test_solve_benchmark_json(model_file, tmp_path, capsys):
    out = tmp_path / "res.json"
    rc = main(["solve", "--model", model_file, "--mode", "benchmark", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["kind"] == "benchmark"
    assert payload["threshold"] == pytest.approx(0.41421356, abs=1e-6)
    assert payload["residual"] <= 1e-9


def test_solve_modes(model_file, tmp_path):
    for extra in (
        ["--mode", "early"],
        ["--mode", "late", "--signal", "0.3"],
        ["--mode", "frequent", "--delta", "0.5"],
        ["--mode", "dynamic", "--cost-early", "0.01", "--cost-late", "0.03"],
    ):
        out = tmp_path / "r.json"
        assert main(["solve", "--model", model_file, *extra, "--out", str(out)]) == 0
        assert json.loads(out.read_text())["threshold"] is not None


def test_curve_csv_deterministic(model_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["curve", "--model", model_file, "--mode", "price", "--out", str(a)]) == 0
    assert main(["curve", "--model", model_file, "--mode", "price", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, *rows = a.read_text().strip().splitlines()
    assert header == "s,price,branch"
    # the two one-sided limits appear as adjacent rows at the threshold
    at = [r for r in rows if r.startswith("0.4,")]
    assert len(at) == 2


def test_beliefs_curve(model_file, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["curve", "--model", model_file, "--mode", "beliefs", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header.split(",") == [
        "s",
        "informed_veracious",
        "informed_noise",
        "uninformed_veracious",
        "uninformed_noise",
    ]


def test_noisy_curve_needs_noise_spec(model_file):
    assert main(["curve", "--model", model_file, "--mode", "noisy"]) == 1


def test_noisy_curve(tmp_path):
    cfg = tmp_path / "m.toml"
    cfg.write_text(
        BASIC_TOML
        + """
[noise]
kind = "uniform"
support = [-0.05, 0.05]
"""
    )
    out = tmp_path / "n.csv"
    assert main(["curve", "--model", str(cfg), "--mode", "noisy", "--grid", "51", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "s,price,tau,q"


def test_missing_config_is_usage_error(tmp_path):
    assert main(["solve", "--model", str(tmp_path / "nope.toml"), "--mode", "benchmark"]) == 1


def test_malformed_toml_is_usage_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("p = [unclosed")
    assert main(["solve", "--model", str(bad), "--mode", "benchmark"]) == 1


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "m.toml"
    cfg.write_text("p = 0.5\nq = 0.3\nbogus = 1\n")
    assert main(["solve", "--model", str(cfg), "--mode", "benchmark"]) == 1


def test_invalid_parameter_is_usage_error(tmp_path):
    cfg = tmp_path / "m.toml"
    cfg.write_text('p = 1.5\nq = 0.3\n')
    assert main(["solve", "--model", str(cfg), "--mode", "benchmark"]) == 1


def test_late_mode_requires_signal(model_file):
    assert main(["solve", "--model", model_file, "--mode", "late"]) == 1


def test_reproduce_rejects_unknown_figure(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["reproduce", "fig99", "--out", str(tmp_path)])


def test_reproduce_fig3_bundle(tmp_path, capsys):
    rc = main(["reproduce", "fig3", "--out", str(tmp_path / "f3")])
    capsys.readouterr()
    assert rc == 0
    summary = json.loads((tmp_path / "f3" / "fig3_summary.json").read_text())
    assert summary["pass"] is True
    assert set(summary["claims"]) == {
        "panel_a_upward_jump",
        "panel_b_continuous",
        "panel_c_downward_jump",
    }
    for f in summary["files"].values():
        assert Path(f).exists()


def test_oracle_check_early(model_file, tmp_path, capsys):
    out = tmp_path / "oc.json"
    rc = main(["oracle-check", "--model", model_file, "--mode", "early", "--grid", "1000", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True
    assert report["gap"] <= 2 * report["grid_step"]
