import csv
import io
import json

import numpy as np
import pytest

from pibound import cli
from pibound.dgp import MissingDataConfig, generate_missing_data
from pibound.inference import BootstrapDraws
from pibound.model import Dataset, serialize_model, write_csv


@pytest.fixture
def missing_files(tmp_path):
    s = generate_missing_data(MissingDataConfig(400, 1.0, seed=2))
    model, data = tmp_path / "m.json", tmp_path / "d.csv"
    model.write_text(serialize_model(s.spec))
    write_csv(s.data, data)
    return str(model), str(data)


def write_model(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def dummy_data(tmp_path, n=3):
    path = tmp_path / "z.csv"
    write_csv(Dataset({"z": np.zeros(n)}), path)
    return str(path)


def lit_doc(moments, lo=-5.0, hi=5.0):
    return {"d_theta": 1, "theta_lower": [lo], "theta_upper": [hi],
            "objective": {"coeffs": [{"lit": 1}], "const": {"lit": 0}},
            "moments": [{"label": f"m{j}", "sense": "leq", "coeffs": [{"lit": a}],
                         "const": {"lit": b}} for j, (a, b) in enumerate(moments)]}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate(missing_files, capsys):
    model, data = missing_files
    code, out, _ = run(["estimate", "--model", model, "--data", data], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["lb"] <= doc["ub"]
    assert len(doc["theta_lb"]) == 10
    assert set(doc["multipliers"]) == {"lb", "ub"}
    assert doc["relaxation_used"] == 0.0


def test_malformed_spec_exit_2(tmp_path, capsys):
    model = write_model(tmp_path, {"d_theta": 1, "theta_lower": [0], "theta_upper": [1],
                                   "objective": {"coeffs": [{"lit": 1}]},
                                   "moments": [{"label": "m", "sense": "leq",
                                                "coeffs": [{"col": "y_star"}]}]})
    code, _, err = run(["estimate", "--model", model, "--data", dummy_data(tmp_path)], capsys)
    assert code == 2
    assert "y_star" in err and "moments[0].coeffs[0]" in err


def test_unreadable_data_exit_2(tmp_path, capsys):
    model = write_model(tmp_path, lit_doc([]))
    code, _, err = run(["estimate", "--model", model, "--data", str(tmp_path / "nope.csv")],
                       capsys)
    assert code == 2


def test_relaxed_estimate(tmp_path, capsys):
    model = write_model(tmp_path, lit_doc([(1.0, 1.0), (-1.0, 0.0)]))
    code, out, _ = run(["estimate", "--model", model, "--data", dummy_data(tmp_path)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["relaxation_used"] > 0.5
    assert doc["c_star"] == pytest.approx(0.5)


def test_solver_failure_exit_3(tmp_path, capsys):
    model = write_model(tmp_path, lit_doc([(1.0, 1.0), (-1.0, 0.0)]))
    code, _, err = run(["estimate", "--model", model, "--data", dummy_data(tmp_path),
                        "--relax", "off"], capsys)
    assert code == 3
    assert "infeasible" in err


def test_infer_identical_across_threads(missing_files, capsys):
    model, data = missing_files
    base = ["infer", "--model", model, "--data", data, "--boot", "60", "--seed", "3"]
    outs = [run(base + ["--threads", t], capsys) for t in ("1", "1", "2")]
    assert all(code == 0 for code, _, _ in outs)
    assert outs[0][1] == outs[1][1] == outs[2][1]
    doc = json.loads(outs[0][1])
    cs = doc["confidence_set"]
    assert cs["lower"] <= doc["estimate"]["lb"] and cs["upper"] >= doc["estimate"]["ub"]
    assert doc["bootstrap"]["B"] == 60


def test_threads_env_fallback(missing_files, capsys, monkeypatch):
    model, data = missing_files
    monkeypatch.setenv(cli.THREADS_ENV, "2")
    code, out, _ = run(["infer", "--model", model, "--data", data, "--boot", "20"], capsys)
    assert code == 0
    monkeypatch.setenv(cli.THREADS_ENV, "zero")
    code, _, err = run(["infer", "--model", model, "--data", data, "--boot", "20"], capsys)
    assert code == 2 and cli.THREADS_ENV in err


def test_single_draw_warns(missing_files, capsys):
    model, data = missing_files
    code, out, _ = run(["infer", "--model", model, "--data", data, "--boot", "1"], capsys)
    assert code == 0
    assert any("degenerate" in w for w in json.loads(out)["warnings"])


def test_degenerate_data_ci_equals_estimate(tmp_path, capsys):
    doc = {"d_theta": 1, "theta_lower": [0], "theta_upper": [1],
           "objective": {"coeffs": [{"lit": 1}], "const": {"lit": 0}},
           "moments": [{"label": "m", "sense": "leq", "coeffs": [{"lit": -1}],
                        "const": {"col": "z"}}]}
    path = tmp_path / "c.csv"
    write_csv(Dataset({"z": np.full(8, 0.25)}), path)
    code, out, _ = run(["infer", "--model", write_model(tmp_path, doc), "--data", str(path),
                        "--boot", "30"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["confidence_set"]["lower"] == doc["estimate"]["lb"] == 0.25
    assert doc["confidence_set"]["upper"] == doc["estimate"]["ub"] == 1.0


def test_calibration_failure_exit_4(missing_files, capsys, monkeypatch):
    model, data = missing_files

    def all_failed(spec, data, B, seed, options, est):
        nan = np.full(B, np.nan)
        return BootstrapDraws(nan, nan, ("failed",) * B, seed, data.n)

    monkeypatch.setattr(cli, "bootstrap_value_functions", all_failed)
    code, _, err = run(["infer", "--model", model, "--data", data, "--boot", "5"], capsys)
    assert code == 4


def test_diagnose_missing_data(missing_files, capsys, tmp_path):
    model, data = missing_files
    out_path = tmp_path / "report.json"
    code, _, _ = run(["diagnose", "--model", model, "--data", data, "-o", str(out_path),
                      "--probe-trials", "10"], capsys)
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["schema_version"] == 1
    assert doc["licq_min_eig_lb"] == pytest.approx(1.0)
    assert not any("gradients" in w for w in doc["warnings"])


def test_diagnose_duplicated_rows_exit_5(tmp_path, capsys):
    model = write_model(tmp_path, lit_doc([(-1.0, 0.3), (-1.0, 0.3)], 0.0, 1.0))
    code, out, _ = run(["diagnose", "--model", model, "--data", dummy_data(tmp_path),
                        "--probe-trials", "0"], capsys)
    assert code == 5
    assert json.loads(out)["hard_licq_violation"]


def test_simulate_one_row(capsys):
    code, out, _ = run(["simulate", "--example", "missing-data", "--n", "100", "--c", "1",
                        "--reps", "1", "--boot", "20", "--threads", "1"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert list(rows[0]) == ["n", "c", "alpha", "reps", "boot", "coverage", "avg_lb", "avg_ub",
                             "avg_ci_lower", "avg_ci_upper", "failures", "wall_seconds"]
    assert 0.0 <= float(rows[0]["coverage"]) <= 1.0
    assert "\r" not in out


def test_simulate_grid_and_pretty(capsys):
    code, out, _ = run(["simulate", "--example", "interval-regression", "--n", "100,200",
                        "--c", "5", "--reps", "2", "--boot", "10", "--threads", "1",
                        "--pretty"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3 and lines[0].split()[0] == "n"


def test_simulate_deterministic_apart_from_time(capsys):
    argv = ["simulate", "--example", "missing-data", "--n", "100", "--reps", "3",
            "--boot", "15", "--threads", "1"]
    a = run(argv, capsys)[1].splitlines()
    b = run(argv, capsys)[1].splitlines()
    strip = [ln.rsplit(",", 1)[0] for ln in a]
    assert strip == [ln.rsplit(",", 1)[0] for ln in b]


def test_unknown_example_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--example", "policy"])
    assert exc.value.code == 2


def test_bad_alpha_exit_2(missing_files):
    model, data = missing_files
    with pytest.raises(SystemExit) as exc:
        cli.main(["infer", "--model", model, "--data", data, "--alpha", "1.5"])
    assert exc.value.code == 2
