import csv
import json
import os
import subprocess
import sys

import pytest

from fbtransducer.cli import main


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_transmission_split_peaks(tmp_path, capsys):
    assert run(tmp_path, "transmission", "--beta", "1", "--cmp", "10") == 0
    header, rows = read_csv(tmp_path / "transmission.csv")
    i = header.index("T_inf")
    best = max(rows, key=lambda r: r[i])
    assert best[i] == pytest.approx(1.0, abs=1e-12)
    assert abs(best[header.index("delta_over_gamma_prime")]) == pytest.approx(1.5, abs=1e-12)
    peaks = [r for r in rows if abs(r[i] - 1) < 1e-12]
    assert sorted(round(r[1], 9) for r in peaks) == [-1.5, 1.5]
    manifest = json.loads((tmp_path / "manifest_transmission.json").read_text())
    assert sorted(os.path.basename(p) for p in manifest["outputs"]) == \
        ["transmission.csv", "transmission.json", "transmission.svg"]
    assert manifest["params"]["cmp"] == 10.0 and manifest["version"]


def test_transmission_grid(tmp_path):
    assert run(tmp_path, "transmission", "--grid", "--format", "csv") == 0
    rep = json.loads((tmp_path / "transmission.json").read_text())
    assert len(rep["panels"]) == 9
    assert not (tmp_path / "transmission.svg").exists()


def test_noise_sweep_vacuum_ratio(tmp_path):
    assert run(tmp_path, "noise-sweep", "--preset", "gold_square") == 0
    rep = json.loads((tmp_path / "noise_sweep.json").read_text())
    assert rep["vacuum_ratio"] == pytest.approx(3.4, rel=0.05)
    assert rep["params"]["eta_l"] == 0.95


def test_oracle_validate_passes(tmp_path):
    assert run(tmp_path, "oracle-validate", "--preset", "fig6", "--seed", "7") == 0
    rep = json.loads((tmp_path / "oracle.json").read_text())
    assert rep["verdict"] == "pass" and rep["segments"] >= 256
    assert rep["report"]["rms_rel"] < 0.05


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["noise-sweep", "--out", str(d), "--format", "csv"]) == 0
    assert (a / "noise_sweep.csv").read_bytes() == (b / "noise_sweep.csv").read_bytes()
    assert (a / "noise_sweep.csv").read_bytes().count(b"\r\n") > 10


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "gold_star", "params": {"nbar": 500.0}, "ratio_range": [0, 1, 3]}))
    assert run(tmp_path, "noise-sweep", "--config", str(cfg), "--eta-d", "0.9") == 0
    rep = json.loads((tmp_path / "noise_sweep.json").read_text())
    assert rep["params"]["nbar"] == 500.0 and rep["params"]["eta_d"] == 0.9
    assert rep["params"]["quality"] == 1e8
    _, rows = read_csv(tmp_path / "noise_sweep.csv")
    assert len(rows) == 3


def test_error_json(tmp_path, capsys):
    assert run(tmp_path, "transmission", "--eta-l", "0.5") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "critical_coupling"
    assert run(tmp_path, "presets", "--preset", "x") == 0
    assert run(tmp_path, "reverse", "--preset", "gold_square") == 2
    assert json.loads(capsys.readouterr().err)["error"] == "invalid_parameter"


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": {"bogus": 1}}))
    assert run(tmp_path, "noise-sweep", "--config", str(cfg)) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "invalid_parameter"


@pytest.mark.parametrize("argv", [
    ["homodyne-gains"], ["homodyne-spectrum"], ["reverse"], ["entanglement", "--r-values", "0,1,10"],
    ["witness-map", "--points", "11"], ["tv-diagram", "--step", "0.1"], ["presets"],
    ["fidelity", "--ratios", "1,10", "--grid-points", "257"],
    ["negativity", "--ratios", "10", "--grid-points", "257"],
])
def test_other_commands_run(tmp_path, argv):
    assert run(tmp_path, *argv) == 0
    name = argv[0]
    assert (tmp_path / f"manifest_{name}.json").exists()


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "fbtransducer.cli", "presets", "--out", str(tmp_path)],
                         capture_output=True, text=True, check=True)
    assert "gold_square" in json.loads(out.stdout)["presets"]
