import json

import numpy as np
import pytest

import bandlab as bl
from bandlab.cli import main

LAT_1D = {"dim": 1, "primitive": [[1.0]]}
COSINE = {"coeffs": [{"g": [1], "re": 1.0}, {"g": [-1], "re": 1.0}]}


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_bands_free_electron(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "kdep", "ec": 200.0, "nbands": 1,
        "path": {"nodes": [["G", [0.0]], ["X", [0.5]]], "samples": 4},
        "out": str(out),
    })
    assert main(["bands", "--config", cfg]) == 0
    lines = (out / "bands.csv").read_text().splitlines()
    assert lines[0] == "k_frac_1,band_1"
    assert lines[1].split(",") == ["0", "0"]
    assert len(lines) == 6
    assert json.loads((out / "summary.json").read_text())["n_k"] == 5


def test_bands_deterministic_and_config_roundtrip(tmp_path):
    base = {
        "lattice": LAT_1D, "potential": {"coeffs": COSINE["coeffs"]},
        "scheme": "modified", "blowup": {"m": 1, "p": 1.5, "c": 1.0},
        "ec": 150.0, "nbands": 2, "grid": 6,
    }
    out1, out2, out3 = (tmp_path / d for d in ("a", "b", "c"))
    cfg = write_cfg(tmp_path, "cfg.json", base | {"out": str(out1)})
    assert main(["bands", "--config", cfg]) == 0
    assert main(["bands", "--config", cfg, "--out", str(out2)]) == 0
    first = (out1 / "bands.csv").read_bytes()
    assert first == (out2 / "bands.csv").read_bytes()
    # the echoed config reproduces the run byte for byte
    resolved = str(out1 / "resolved_config.json")
    assert main(["bands", "--config", resolved, "--out", str(out3)]) == 0
    assert first == (out3 / "bands.csv").read_bytes()


def test_flag_overrides_config(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "kdep", "ec": 25.0, "nbands": 1,
        "grid": 4, "out": str(out),
    })
    assert main(["bands", "--config", cfg, "--ec", "200"]) == 0
    resolved = json.loads((out / "resolved_config.json").read_text())
    assert resolved["ec"] == 200.0


def test_fermi_free_electrons(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "kdep", "ec": 200.0, "grid": 16,
        "electrons": 1.0, "out": str(out),
    })
    assert main(["fermi", "--config", cfg]) == 0
    payload = json.loads((out / "fermi.json").read_text())
    assert payload["mu"] == pytest.approx(0.5 * np.pi**2, abs=1e-12)


def test_dos_sweep(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "potential": {"coeffs": COSINE["coeffs"]},
        "scheme": "kdep", "ec": 100.0, "grid": 8, "nbands": 3, "out": str(out),
    })
    assert main(["dos", "--config", cfg]) == 0
    lines = (out / "dos.csv").read_text().splitlines()
    assert lines[0] == "mu,idos,idoe"
    assert len(lines) == 201
    summary = json.loads((out / "summary.json").read_text())
    assert isinstance(summary["truncated_top_band"], bool)


def test_converge_emits_rates(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D,
        "potential": {"synth": {"t": 2.1, "gmax": 4, "seed": 1}},
        "scheme": "kdep", "ec_ladder": [25.0, 50.0], "ec_reference": 400.0,
        "grid": 4, "band_index": 1, "out": str(out),
    })
    assert main(["converge", "--config", cfg]) == 0
    payload = json.loads((out / "converge.json").read_text())
    assert "fitted_rate" in payload
    assert payload["r_potential"] == pytest.approx(1.6)
    assert len((out / "converge.csv").read_text().splitlines()) == 3


def test_regularity_probe_run(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D,
        "potential": {"synth": {"t": 1.55, "gmax": 8, "seed": 7}},
        "ec": 750.0, "blowup": {"m": 0, "p": 0.5, "c": 1.0},
        "deltas": [8e-3, 4e-3, 2e-3], "derivative_order": 1, "out": str(out),
    })
    assert main(["regularity", "--config", cfg]) == 0
    payload = json.loads((out / "regularity.json").read_text())
    assert payload["verdict"] in ("BoundedDerivative", "UnboundedDerivative")
    assert len((out / "regularity.csv").read_text().splitlines()) == 4


def test_periodicity_report_run(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "potential": {"coeffs": COSINE["coeffs"]},
        "ec": 25.0, "k_samples": 6, "nbands": 1, "seed": 2,
        "blowup": {"m": 1, "p": 1.5, "c": 1.0}, "out": str(out),
    })
    assert main(["periodicity", "--config", cfg]) == 0
    payload = json.loads((out / "periodicity.json").read_text())
    assert payload["uniform"] > 1e-3
    assert payload["kdependent"] <= 1e-9
    assert payload["modified"] <= 1e-9


def test_cellscan_run(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "ec": 50.0, "grid": 4, "nbands": 3,
        "electrons": 1.0, "a_ladder": {"center": 1.0, "span": 0.05, "count": 7},
        "blowup": {"m": 1, "p": 1.5, "c": 1.0}, "out": str(out),
    })
    assert main(["cellscan", "--config", cfg]) == 0
    assert len((out / "cellscan.csv").read_text().splitlines()) == 8
    payload = json.loads((out / "cellscan.json").read_text())
    assert set(payload["second_differences"]) == {"kdependent", "modified"}


def test_potential_synth_roundtrip(tmp_path, lat1d):
    out = tmp_path / "pot"
    cfg = write_cfg(tmp_path, "cfg.json", {"lattice": LAT_1D, "out": str(out)})
    assert main(["potential", "synth", "--config", cfg,
                 "--t", "2.1", "--gmax", "3", "--seed", "9"]) == 0
    saved = bl.load_potential(out / "potential.json")
    assert saved.digest() == bl.synth_power_law(lat1d, t=2.1, gmax=3, seed=9).digest()


def test_blowup_check_ok(capsys):
    assert main(["blowup", "check", "--m", "1", "--p", "1.5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["m"] == 1 and payload["C"] == 1.0
    assert payload["value_at_half"] == pytest.approx(0.25, rel=1e-12)
    assert payload["junction_mismatch"] <= 1e-4
    assert payload["domination_margin"] >= -1e-12


def test_blowup_check_ill_posed(capsys):
    assert main(["blowup", "check", "--m", "1", "--p", "0.5"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err and "Traceback" not in err


def test_missing_field_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "kdep", "grid": 4,
        "out": str(tmp_path / "run"),
    })
    assert main(["bands", "--config", cfg]) == 2
    assert "ec" in capsys.readouterr().err


def test_unknown_scheme_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "banana", "ec": 25.0, "grid": 4,
        "out": str(tmp_path / "run"),
    })
    assert main(["bands", "--config", cfg]) == 2


def test_band_count_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "cfg.json", {
        "lattice": LAT_1D, "scheme": "kdep", "ec": 25.0, "grid": 4,
        "nbands": 10, "out": str(tmp_path / "run"),
    })
    assert main(["bands", "--config", cfg]) == 2
    assert "plane waves" in capsys.readouterr().err
