import json

import numpy as np
import pytest

from succmeter import GaussianMeter, quasi_probability, random_density, pauli
from succmeter import io as sio
from succmeter.cli import main
from succmeter.reconstruction import W11Record


def test_matrix_json_round_trip():
    m = random_density(3, 2)
    obj = json.loads(json.dumps(sio.matrix_to_json(m)))
    assert obj["dim"] == 3
    np.testing.assert_array_equal(sio.matrix_from_json(obj), m)


def test_matrix_json_real_entries():
    np.testing.assert_array_equal(sio.matrix_from_json([[1, 0], [0, 0]]), np.diag([1, 0]))
    with pytest.raises(ValueError):
        sio.matrix_from_json({"dim": 3, "data": [[1, 0], [0, 1]]})


def test_table_csv_round_trip():
    t = quasi_probability(random_density(2, 1), pauli("x"), pauli("z"), GaussianMeter(0.7, 1.1))
    text = sio.table_csv(t, ["succmeter test"])
    back = sio.table_from_csv(text)
    np.testing.assert_array_equal(back.values, t.values)
    assert back.epsilon1 == 1.1 and back.sigma_q1 == 0.7


def test_records_csv_round_trip():
    recs = [W11Record(0, 1, 0.1 + 0.2j, 1.0, 0.5), W11Record(1, 1, -1e-17 + 0j, 1.0, 0.5)]
    assert sio.records_from_csv(sio.records_csv(recs)) == recs


def test_floats_have_17_digits():
    assert sio.fmt(0.1) == "0.10000000000000001"


def write_config(tmp_path, **overrides):
    cfg = {
        "dimension": 2,
        "state": "y+",
        "A": "pauli-x",
        "B": "pauli-z",
        "meter": {"epsilon1": 1.0, "epsilon2": 1.0, "sigma_q1": 1.0, "sigma_q2": 1.0},
    }
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def run(tmp_path, *args, **overrides):
    cfg = write_config(tmp_path, **overrides)
    out = tmp_path / "out"
    return main([args[0], "--config", str(cfg), "--out", str(out), *args[1:]]), out


def test_quasiprob_weak_limit(tmp_path):
    code, out = run(tmp_path, "quasiprob", meter={"epsilon1": 1e-7, "sigma_q1": 1.0})
    assert code == 0
    t = sio.table_from_csv((out / "quasiprob.csv").read_text())
    assert abs(t.values[0, 0] - (1 + 1j) / 4) < 1e-12
    comments, header, _ = sio.read_csv((out / "quasiprob.csv").read_text())
    assert header == ["a_n", "b_m", "re", "im"]
    assert comments[0].startswith("succmeter 0.1.0 config_sha256=")


def test_deterministic_outputs(tmp_path):
    run(tmp_path, "scan", epsilon_scan=[0.01, 0.1, 1.0, 10.0])
    first = (tmp_path / "out" / "scan.csv").read_bytes()
    run(tmp_path, "scan", epsilon_scan=[0.01, 0.1, 1.0, 10.0])
    assert (tmp_path / "out" / "scan.csv").read_bytes() == first


def test_scan_columns(tmp_path, monkeypatch):
    monkeypatch.setenv("SUCCMETER_THREADS", "2")
    eps = list(np.geomspace(0.01, 10, 12))
    code, out = run(tmp_path, "scan", epsilon_scan=eps)
    assert code == 0
    _, header, rows = sio.read_csv((out / "scan.csv").read_text())
    assert header[-2:] == ["distance_to_wigner", "distance_to_kirkwood"]
    dw = [float(r[7]) for r in rows[::4]]
    assert all(b <= a for a, b in zip(dw, dw[1:]))
    assert float(rows[0][8]) <= 1e-4


def test_reconstruct_random_d3(tmp_path):
    code, out = run(tmp_path, "reconstruct", "--format", "json", dimension=3, state={"random_seed": 4},
                    A="computational", B="fourier")
    assert code == 0
    rep = json.loads((out / "reconstruction.json").read_text())
    assert rep["residuals"]["max_abs_error"] <= 1e-9
    assert not rep["conditioning"]["ill_conditioned"]
    assert (out / "records.csv").exists()


@pytest.mark.parametrize("cmd", ["single", "limits", "oracle-check"])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_workflows_run(tmp_path, cmd, fmt):
    code, out = run(tmp_path, cmd, "--format", fmt)
    assert code == 0
    assert any(out.iterdir())


def test_single_grid(tmp_path):
    code, out = run(tmp_path, "single", "--grid", "51")
    assert code == 0
    _, header, rows = sio.read_csv((out / "pointer_samples.csv").read_text())
    assert header == ["q", "p"] and len(rows) == 51
    summary = json.loads((out / "single.json").read_text())
    assert summary["pointer_mean_over_epsilon"] == pytest.approx(0.0, abs=1e-15)


def test_run_dispatches_on_workflow(tmp_path):
    code, out = run(tmp_path, "run", workflow="limits")
    assert code == 0 and (out / "kirkwood.csv").exists()


def test_oracle_check_report(tmp_path):
    code, out = run(tmp_path, "oracle-check")
    rep = json.loads((out / "oracle_report.json").read_text())
    assert rep["max_abs_diff"] <= 1e-6 and rep["refinement_change"] <= 1e-9


def test_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["quasiprob", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "parse"


def test_missing_key_is_parse_error(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"dimension": 2}))
    assert main(["quasiprob", "--config", str(path)]) == 2


def test_validation_error(tmp_path, capsys):
    code, _ = run(tmp_path, "quasiprob", state={"matrix": [[1.2, 0], [0, -0.2]]})
    assert code == 3
    assert json.loads(capsys.readouterr().err)["error"] == "validation"


def test_numerical_error(tmp_path, capsys):
    code, _ = run(tmp_path, "oracle-check", grid_points=16, meter={"sigma_q1": 0.05, "epsilon1": 1.0})
    assert code == 4
    assert json.loads(capsys.readouterr().err)["error"] == "numerical"
