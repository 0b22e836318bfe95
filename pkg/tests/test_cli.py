from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from cribmac.channels import MacChannel, WiretapMac, and_mac, xor_mac
from cribmac.cli import run

from oracles import hb

UNIFORM = {"p_x1": [0.5, 0.5], "p_x2": [0.5, 0.5]}


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config-sha256: ")
    return list(csv.DictReader(lines[1:]))


def _wiretap(eve):
    legit = MacChannel.deterministic(lambda a, b: 2 * a + b, 2, 2, 4)
    return WiretapMac.from_components(legit, eve).to_json()


def test_region_xor_contains_sum_corner(tmp_path):
    _write(tmp_path, "xor.json", xor_mac().to_json())
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": "xor.json",
                                        "scenario": "degraded", "target": [0.5, 0.5],
                                        "grid_steps": 4, "samples": 4})
    assert run(["region", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    rows = _rows(tmp_path / "out" / "frontier.csv")
    assert any(float(r["r1"]) == 0.0 and abs(float(r["r2"]) - 1.0) < 1e-9 for r in rows)
    laws = json.loads((tmp_path / "out" / "laws.json").read_text())
    assert laws["schema_version"] == 1 and laws["mode"] == "target-Q"


def test_region_and_thresholds(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": and_mac().to_json(),
                                        "scenario": "degraded", "mode": "induced-Q",
                                        "grid_steps": 4, "samples": 1})
    assert run(["region", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    laws = json.loads((tmp_path / "out" / "laws.json").read_text())["laws"]
    uniform = [entry for entry in laws
               if np.allclose(entry["law"]["joint"], 0.25)]
    assert len(uniform) == 1
    cons = {c["label"]: c["b"] for c in uniform[0]["region"]["constraints"]}
    assert cons["R1"] == pytest.approx(hb(0.25) - 0.5, abs=1e-9)
    assert cons["sum"] == pytest.approx(hb(0.25), abs=1e-9)


def test_malformed_channel_exits_nonzero(tmp_path, capsys):
    _write(tmp_path, "bad.json", {"x1_size": 2, "x2_size": 2, "z_size": 2, "w": [[0.2, 0.2]]})
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": "bad.json",
                                        "scenario": "degraded", "target": [0.5, 0.5]})
    out = tmp_path / "out"
    assert run(["region", "--config", str(cfg), "--out", str(out)]) != 0
    err = json.loads(capsys.readouterr().err)
    assert err["error"] and err["command"] == "region"
    assert not out.exists()


def test_missing_channel_file_and_schema(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": "nope.json"})
    assert run(["region", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    cfg = _write(tmp_path, "cfg2.json", {"schema_version": 7, "channel": xor_mac().to_json()})
    assert run(["region", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert capsys.readouterr().err.count("error") == 2


def test_simulate_single_row_and_determinism(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": xor_mac().to_json(),
                                        "scenario": "degraded", "law": UNIFORM,
                                        "rates": [0.3, 1.0], "n_list": [1], "trials": 1,
                                        "seed": 3})
    for name in ("a", "b"):
        assert run(["simulate", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    rows = _rows(tmp_path / "a" / "decay.csv")
    assert len(rows) == 1
    for f in ("decay.csv", "trials.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert run(["simulate", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "c")]) == 0
    first = (tmp_path / "a" / "decay.csv").read_text().splitlines()[0]
    assert first != (tmp_path / "c" / "decay.csv").read_text().splitlines()[0]


def test_simulate_above_threshold_decays(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": xor_mac().to_json(),
                                        "scenario": "degraded", "law": UNIFORM,
                                        "rates": [0.3, 1.0], "n_list": [2, 8], "trials": 50})
    assert run(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    means = [float(r["mean_kl_bits"]) for r in _rows(tmp_path / "o" / "decay.csv")]
    assert means[1] < means[0]


def test_secrecy_constant_eavesdropper_and_bound(tmp_path):
    const = MacChannel(np.full((2, 2, 2), 0.5))
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": _wiretap(const),
                                        "scenario": "degraded", "law": UNIFORM,
                                        "rates": [0.4, 0.4], "dither": [0.3, 0.6],
                                        "n_list": [2, 3]})
    assert run(["secrecy", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = _rows(tmp_path / "o" / "sweep.csv")
    assert list(rows[0]) == ["n", "R1", "R2", "R1p", "R2p", "p_error", "leakage_bits",
                             "resolvability_bound_bits"]
    assert all(abs(float(r["leakage_bits"])) <= 1e-12 for r in rows)
    cfg = _write(tmp_path, "cfg2.json", {"schema_version": 1, "channel": _wiretap(xor_mac(0.2)),
                                         "scenario": "degraded", "law": UNIFORM,
                                         "rates": [0.4, 0.4], "dither": [0.3, 0.6],
                                         "n_list": [3]})
    assert run(["secrecy", "--config", str(cfg), "--out", str(tmp_path / "p")]) == 0
    row = _rows(tmp_path / "p" / "sweep.csv")[0]
    assert float(row["leakage_bits"]) <= float(row["resolvability_bound_bits"]) + 1e-9


def test_secrecy_guard_leaves_no_files(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": _wiretap(xor_mac(0.2)),
                                        "scenario": "degraded", "law": UNIFORM,
                                        "rates": [0.4, 0.4], "dither": [0.3, 0.6],
                                        "n_list": [2, 40]})
    out = tmp_path / "o"
    assert run(["secrecy", "--config", str(cfg), "--out", str(out)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "GuardExceeded"
    assert not out.exists()


def test_chain_command(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"schema_version": 1, "channel": xor_mac().to_json(),
                                        "law": UNIFORM, "r": 2, "B": 2,
                                        "coupling": "estimated"})
    assert run(["chain", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    data = json.loads((tmp_path / "o" / "chain.json").read_text())
    assert data["diagnostics"]["decomposition_holds"] is True
    assert all(c["holds"] for c in data["diagnostics"]["coupling_check"])
