import csv
import json
import math
import subprocess
import sys

import pytest

from geophase import cli
from geophase.config import ConfigError, parse_config

ALPHA = {
    "mode": "oscillator",
    "base": {"m": 1, "omega": 1, "alpha": [0, 0], "beta": [0, 0]},
    "loop": {"primitive": "circle", "coords": ["alpha1", "alpha2"], "radius": 0.5},
    "samples": 400,
    "levels": [0, 1, 2],
    "dim": 60,
    "convergence_doublings": 0,
}
BETA = {
    "loop": {"primitive": "circle", "coords": ["beta1", "beta2"], "radius": 0.3},
    "samples": 200,
    "levels": [0, 1],
    "dim": 60,
    "convergence_doublings": 0,
}


def write(tmp_path, body, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(body, indent=2) if isinstance(body, dict) else body)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_alpha_circle(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", write(tmp_path, ALPHA), "--out-dir", str(out)]) == 0
    header = (out / "phases.csv").read_text().splitlines()[0]
    assert header == "n,gamma_wilson,gamma_closed,gamma_D,gamma_S,discrepancy,dim,K,converged"
    rows = read_csv(out / "phases.csv")
    assert [r["n"] for r in rows] == ["0", "1", "2"]
    for r in rows:
        assert float(r["gamma_closed"]) == pytest.approx(-math.pi / 2, abs=1e-3)
        assert float(r["discrepancy"]) < 1e-3
        assert r["converged"] == "true" and r["K"] == "400" and r["dim"] == "60"
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"] == ALPHA
    assert abs(report["hannay"]) < 1e-6
    assert {"version", "phases", "timing", "convergence"} <= set(report)
    capsys.readouterr()


def test_run_beta_hannay(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", write(tmp_path, BETA), "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["hannay"] == pytest.approx(0.58266, abs=1e-3)
    capsys.readouterr()


def test_number_format(tmp_path, capsys):
    out = tmp_path / "out"
    cli.main(["run", write(tmp_path, ALPHA), "--out-dir", str(out)])
    for r in read_csv(out / "phases.csv"):
        for key in ("gamma_wilson", "discrepancy"):
            text = r[key]
            assert "E" not in text
            mantissa = text.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(mantissa) <= 12
    assert cli.fmt(1.234e-7) == "1.234e-07"
    assert cli.fmt(True) == "true" and cli.fmt(3) == "3"
    capsys.readouterr()


def test_determinism(tmp_path, capsys):
    cfg = write(tmp_path, BETA)
    cli.main(["run", cfg, "--out-dir", str(tmp_path / "a")])
    cli.main(["run", cfg, "--out-dir", str(tmp_path / "b")])
    assert (tmp_path / "a" / "phases.csv").read_bytes() == (tmp_path / "b" / "phases.csv").read_bytes()
    capsys.readouterr()


def test_global_flags_either_side(tmp_path, capsys):
    cfg = write(tmp_path, BETA)
    assert cli.main(["--out-dir", str(tmp_path / "a"), "--dim", "50", "run", cfg]) == 0
    assert cli.main(["run", cfg, "--out-dir", str(tmp_path / "b"), "--segments", "100"]) == 0
    assert read_csv(tmp_path / "a" / "phases.csv")[0]["dim"] == "50"
    assert read_csv(tmp_path / "b" / "phases.csv")[0]["K"] == "100"
    capsys.readouterr()


def test_emit_integrand(tmp_path, capsys):
    out = tmp_path / "out"
    cli.main(["run", write(tmp_path, BETA), "--out-dir", str(out), "--emit-integrand"])
    rows = read_csv(out / "integrand.csv")
    assert len(rows) == 200 * 2
    total = sum(float(r["wilson"]) for r in rows if r["n"] == "0")
    phases = read_csv(out / "phases.csv")
    assert total == pytest.approx(float(phases[0]["gamma_wilson"]), abs=1e-9)
    closed = sum(float(r["closed"]) for r in rows if r["n"] == "1")
    assert closed == pytest.approx(float(phases[1]["gamma_closed"]), abs=1e-9)
    capsys.readouterr()


def test_k8_rejected_with_line(tmp_path, capsys):
    cfg = write(tmp_path, {**BETA, "samples": 8})
    assert cli.main(["run", cfg, "--out-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "K >= 16" in err
    line = next(i for i, t in enumerate(open(cfg).read().splitlines(), 1) if '"samples"' in t)
    assert f"cfg.json:{line}:" in err


def test_invalid_json_line(tmp_path, capsys):
    cfg = write(tmp_path, '{\n  "samples": 400,\n  "levels": [0,\n}\n')
    assert cli.main(["run", cfg]) == 2
    assert "cfg.json:4:" in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


@pytest.mark.parametrize(
    "patch, message",
    [
        ({"levels": []}, "non-empty"),
        ({"levels": [0, 7]}, "exceed 6"),
        ({"mode": "quantum"}, "mode"),
        ({"dim": 1000}, "dim"),
        ({"loop": {"primitive": "spiral"}}, "primitive"),
        ({"loop": {"primitive": "circle", "coords": ["beta1", "beta1"], "radius": 0.1}}, "distinct"),
        ({"loop": {"primitive": "polyline", "points": [{"alpha": [0, 0]}, {"alpha": [0.1, 0]}, {"alpha": [0.1, 0.1]}]}}, "closed"),
        ({"loop": {"primitive": "circle", "coords": ["beta1", "beta2"], "radius": 8.0}}, "step"),
    ],
)
def test_validation_errors(patch, message):
    with pytest.raises(ConfigError, match=message) as info:
        parse_config(json.dumps({**BETA, **patch}, indent=2), "c.json")
    assert info.value.line is not None


def test_multiphoton_config_requires_zero_alpha():
    body = {**BETA, "mode": "multiphoton", "base": {"alpha": [0.1, 0]}}
    with pytest.raises(ConfigError, match="alpha"):
        parse_config(json.dumps(body))


def test_multiphoton_run(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", write(tmp_path, {**BETA, "mode": "multiphoton", "levels": [1]}), "--out-dir", str(out)]) == 0
    row = read_csv(out / "phases.csv")[0]
    assert float(row["gamma_wilson"]) == pytest.approx(-2.5 * 2 * math.pi * math.sinh(0.3) ** 2, abs=1e-3)
    assert json.loads((out / "report.json").read_text())["hannay"] is None
    capsys.readouterr()


def test_polyline_and_concatenated_configs(tmp_path, capsys):
    poly = {
        "loop": {
            "primitive": "polyline",
            "points": [{"alpha": [0, 0]}, {"alpha": [0.4, 0]}, {"alpha": [0.4, 0.4]}, {"alpha": [0, 0]}],
        },
        "samples": 120,
        "levels": [0],
        "dim": 40,
        "convergence_doublings": 0,
    }
    out = tmp_path / "p"
    assert cli.main(["run", write(tmp_path, poly, "p.json"), "--out-dir", str(out)]) == 0
    # counterclockwise triangle of area 0.08
    assert float(read_csv(out / "phases.csv")[0]["gamma_wilson"]) == pytest.approx(-0.16, abs=1e-9)
    comp = {
        "base": {"alpha": [0.4, 0], "beta": [0.25, 0]},
        "loop": [
            {"primitive": "circle", "coords": ["alpha1", "alpha2"], "radius": 0.4, "center": [0, 0]},
            {"primitive": "circle", "coords": ["beta1", "beta2"], "radius": 0.25, "center": [0, 0]},
        ],
        "samples": 100,
        "levels": [0, 1],
        "dim": 60,
        "convergence_doublings": 0,
    }
    out = tmp_path / "c"
    assert cli.main(["run", write(tmp_path, comp, "c.json"), "--out-dir", str(out)]) == 0
    assert read_csv(out / "phases.csv")[0]["K"] == "200"
    capsys.readouterr()


def test_tolerance_failure_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, {**BETA, "samples": 20, "dim": 40, "tolerance": 1e-6})
    assert cli.main(["run", cfg, "--out-dir", str(tmp_path)]) == 3
    assert read_csv(tmp_path / "phases.csv")[0]["converged"] == "false"
    capsys.readouterr()


def test_run_convergence_table(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", write(tmp_path, {**BETA, "dim": 40, "samples": 100, "convergence_doublings": 1}), "--out-dir", str(out)]) in (0, 3)
    table = json.loads((out / "report.json").read_text())["convergence"]
    assert [(r["dim"], r["K"]) for r in table] == [(40, 100), (40, 100), (80, 200), (80, 200)]
    capsys.readouterr()


def test_sweep_constant_loop(tmp_path, capsys):
    const = {
        "base": {"beta": [0.2, 0.1]},
        "loop": {"primitive": "polyline", "points": [{"alpha": [0.1, 0]}, {"alpha": [0.1, 0]}, {"alpha": [0.1, 0]}]},
        "samples": 16,
        "levels": [0, 1],
        "dim": 30,
    }
    assert cli.main(["sweep", write(tmp_path, const), "--doublings", "2", "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == "level,dim,K,gamma_wilson,delta_prev"
    assert len(rows) == 6
    assert all(float(r["gamma_wilson"]) == 0 for r in rows)
    assert all(r["delta_prev"] in ("", "0") for r in rows)
    capsys.readouterr()


def test_sweep_beta_circle_shrinks(tmp_path, capsys):
    cfg = write(tmp_path, {**BETA, "dim": 40, "samples": 200})
    assert cli.main(["sweep", cfg, "--doublings", "2", "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    for level in ("0", "1"):
        deltas = [float(r["delta_prev"]) for r in rows if r["level"] == level and r["delta_prev"]]
        assert len(deltas) == 2 and deltas[1] < deltas[0] and deltas[1] < 1e-4
    capsys.readouterr()


def test_sweep_guards(tmp_path, capsys):
    cfg = write(tmp_path, BETA)
    assert cli.main(["sweep", cfg, "--doublings", "4"]) == 2
    assert cli.main(["sweep", cfg, "--doublings", "2", "--dim", "200"]) == 2
    assert "512" in capsys.readouterr().err


def test_verify_algebra(capsys):
    assert cli.main(["verify", "algebra"]) == 0
    out = capsys.readouterr().out
    assert "[G, G^dagger] = 1" in out and "[a_1, a_1^dagger]" in out and "[XG, G^dagger]" in out
    assert "FAIL" not in out


def test_verify_unknown_suite(capsys):
    assert cli.main(["verify", "everything"]) == 2
    capsys.readouterr()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "geophase.cli", "run", str(tmp_path / "nope.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


def test_shipped_configs_parse():
    from pathlib import Path

    from geophase.config import load_config

    paths = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))
    assert paths
    for p in paths:
        cfg = load_config(p)
        assert cfg.build_loop().segments >= 16
