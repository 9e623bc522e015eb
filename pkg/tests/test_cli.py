import json

import numpy as np
from click.testing import CliRunner

from fockent.analysis import WignerGrid
from fockent.cli import main


def _run(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def _manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_state_command(tmp_path):
    res = _run(["state", '{"kind": "fock", "n": 2}', "--cutoff", "4", "--out", str(tmp_path)])
    assert res.exit_code == 0
    rows = np.loadtxt(tmp_path / "amplitudes.csv", delimiter=",", skiprows=1)
    assert rows.shape == (5, 4) and rows[2, 3] == 1.0
    man = _manifest(tmp_path)
    assert man["command"] == "state" and len(man["config_hash"]) == 64
    assert {"versions", "outputs", "wall_time_ms"} <= set(man)


def test_config_hash_is_stable(tmp_path):
    spec = {"kind": "coherent", "alpha": [0.5, 0.0]}
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(spec))
    _run(["state", "--config", str(cfg), "--out", str(tmp_path / "a")])
    _run(["state", json.dumps(spec, indent=4), "--out", str(tmp_path / "b")])
    assert _manifest(tmp_path / "a")["config_hash"] == _manifest(tmp_path / "b")["config_hash"]


def test_invalid_input_exit_code(tmp_path):
    assert _run(["state", '{"kind": "thermal"}', "--out", str(tmp_path)]).exit_code == 2
    assert _run(["state", "{not json", "--out", str(tmp_path)]).exit_code == 2
    assert _run(["state", '{"kind": "squeezed_vacuum", "r": -1}', "--out", str(tmp_path)]).exit_code == 2


def _sweep_config(tmp_path, device, state, parameter, start, stop, points):
    cfg = {
        "device": device,
        "state_a": state,
        "state_b": state,
        "sweep": {"parameter": parameter, "start": start, "stop": stop, "points": points},
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(cfg))
    return path


def test_sweep_delta_phi(tmp_path):
    state = {"kind": "squeezed_vacuum", "r": 0.4}
    cfg = _sweep_config(tmp_path, {"kind": "beam_splitter", "theta": 0.01}, state, "delta_phi", 0.0, 3.141592653589793, 7)
    res = _run(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--threads", "2"])
    assert res.exit_code == 0
    data = np.loadtxt(tmp_path / "sweep.csv", delimiter=",", skiprows=1)
    assert data.shape == (7, 5)
    assert np.all(np.diff(data[:, 1]) > 0)
    man = _manifest(tmp_path)
    assert man["argmin"] == 0.0 and man["argmax"] == data[-1, 0]


def test_sweep_truncation_exit_code(tmp_path):
    state = {"kind": "coherent", "alpha": 2.0, "cutoff": 24}
    cfg = _sweep_config(tmp_path, {"kind": "two_mode_squeezer", "r": 0.1}, state, "r", 0.1, 4.0, 3)
    res = CliRunner().invoke(main, ["sweep", "--config", str(cfg), "--out", str(tmp_path)])
    assert res.exit_code == 3
    assert "at r = 2.05:" in res.output


def test_sweep_rejects_unknown_parameter(tmp_path):
    cfg = _sweep_config(tmp_path, {"kind": "beam_splitter", "theta": 0.01}, {"kind": "fock", "n": 1}, "gain", 0, 1, 2)
    assert _run(["sweep", "--config", str(cfg), "--out", str(tmp_path)]).exit_code == 2


def test_wigner_command(tmp_path):
    spec = '{"kind": "higher_cat", "alpha": 2.0, "n": 3}'
    res = _run(["wigner", spec, "--points", "41", "--symmetry", "3", "--out", str(tmp_path)])
    assert res.exit_code == 0
    values = WignerGrid.read_binary(tmp_path / "wigner_state.bin")
    csv = np.loadtxt(tmp_path / "wigner_state.csv", delimiter=",", skiprows=1)
    assert values.shape == (41, 41)
    assert np.array_equal(csv[:, 2], values.ravel())
    grids = _manifest(tmp_path)["grids"]
    assert grids["state"]["symmetry_deviation"] < 1e-9
    assert grids["state"]["undersampled"] is False


def test_wigner_fig1_preset(tmp_path):
    res = _run(["wigner", "--preset", "fig1", "--points", "31", "--out", str(tmp_path)])
    assert res.exit_code == 0
    grids = _manifest(tmp_path)["grids"]
    assert set(grids) == {"cat_n2", "cat_n5", "cat_n8"}
    assert all(g["symmetry_deviation"] < 1e-6 for g in grids.values())


def test_search_command(tmp_path):
    cfg = tmp_path / "search.json"
    cfg.write_text(json.dumps({"N": 1.0, "cutoff": 10, "restarts": 2}))
    res = _run(["search", "--config", str(cfg), "--out", str(tmp_path), "--seed", "3"])
    assert res.exit_code == 0
    body = json.loads((tmp_path / "search_max.json").read_text())
    assert body["config"]["seed"] == 3
    assert abs(body["result"]["best_value_over_strength_sq"] - 1.5) < 0.03


def test_search_invalid_config(tmp_path):
    cfg = tmp_path / "search.json"
    cfg.write_text(json.dumps({"N": 4.0, "cutoff": 5}))
    assert _run(["search", "--config", str(cfg), "--out", str(tmp_path)]).exit_code == 2


def test_verify_report(tmp_path):
    res = _run(["verify", "inequalities", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "verify_inequalities.json").read_text())
    assert [c["criterion"] for c in report["checks"]] == [7, 8, 9]
    assert res.exit_code == (0 if report["passed"] else 4)
    assert res.output.count("PASS") + res.output.count("FAIL") == 3
