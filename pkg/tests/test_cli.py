import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from optdesign.cli import EXIT_CONFIG, EXIT_NOT_CERTIFIED, EXIT_NUMERICAL, EXIT_OK, main
from optdesign.config import PRESETS, ConfigError, RunConfig, load_config
from optdesign.solver import IterationCapReached


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])


def write(path, text):
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------- config


def test_defaults():
    cfg = RunConfig.from_dict({})
    assert cfg.gamma == 5e-4 and cfg.delta == 1e-4
    assert cfg.criterion == "D" and cfg.algorithm == "proposed"
    assert cfg.thread_count == 1


def test_config_echo_round_trip():
    cfg = RunConfig.from_dict({"preset": "wynn", "criterion": "A", "gamma": 1e-6,
                               "output": {"design": "d.csv"}, "benchmark": {"sizes": [5, 7]}})
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert again.space == PRESETS["wynn"]["space"]


def test_config_errors_list_keys():
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({"gama": 1, "benchmark": {"size": 3}, "output": {"x": "y"}})
    assert set(err.value.keys) == {"gama", "benchmark.size", "output.x"}
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({"gamma": -1.0, "space": {"kind": "hexagon"}})
    assert set(err.value.keys) == {"gamma", "space"}
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({"preset": "torus"})
    assert err.value.keys == ["preset"]


def test_load_config_file(tmp_path):
    p = write(tmp_path / "c.json", json.dumps({"preset": "cube", "criterion": "A"}))
    cfg = load_config(p, {"gamma": 1e-5, "delta": None})
    assert cfg.gamma == 1e-5 and cfg.delta == 1e-4 and cfg.criterion == "A"
    bad = write(tmp_path / "bad.json", "{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


# ---------------------------------------------------------------- solve


def test_solve_square_writes_outputs(tmp_path, capsys):
    code, doc = run_cli(
        capsys, "solve", "--preset", "square",
        "--out-result", str(tmp_path / "r.json"),
        "--out-design", str(tmp_path / "d.csv"),
        "--out-trace", str(tmp_path / "t.csv"),
    )
    assert code == EXIT_OK
    assert doc["design"]["objective"] == pytest.approx(4.4718, abs=1e-3)
    rows = list(csv.reader(open(tmp_path / "d.csv")))
    assert rows[0] == ["x1", "x2", "weight"]
    assert len(rows) == 10
    result = json.load(open(tmp_path / "r.json"))
    assert result["prng"]["algorithm"] == "numpy.random.PCG64"
    assert RunConfig.from_dict(result["config"]).space == PRESETS["square"]["space"]
    assert result["certificate"]["certified"] is True
    assert open(tmp_path / "t.csv").readline().strip() == "iteration,objective,drift,gap,support_size,elapsed_s"


def test_result_config_reparses_equal(tmp_path, capsys):
    cfg_path = write(tmp_path / "c.json", json.dumps({"preset": "cube", "criterion": "A",
                                                      "gamma": 1e-5}))
    res = tmp_path / "r.json"
    code, _ = run_cli(capsys, "solve", "--config", cfg_path, "--out-result", str(res))
    assert code == EXIT_OK
    echoed = RunConfig.from_dict(json.load(open(res))["config"])
    expected = load_config(cfg_path, {"output": {"result": str(res)}})
    assert echoed == expected


def test_solve_disk_center_weight(capsys):
    code, doc = run_cli(capsys, "solve", "--preset", "disk", "--gamma", "1e-6")
    assert code == EXIT_OK
    pts = np.array(doc["design"]["support_points"])
    wts = np.array(doc["design"]["support_weights"])
    centre = wts[np.all(pts == 0.0, axis=1)].sum()
    assert centre == pytest.approx(1 / 6, abs=0.005)
    assert wts.sum() - centre == pytest.approx(5 / 6, abs=0.005)


def test_solve_support_collapse_record(tmp_path, capsys):
    res = tmp_path / "r.json"
    code, doc = run_cli(capsys, "solve", "--preset", "square", "--delta", "0.2",
                        "--out-result", str(res))
    assert code == EXIT_NUMERICAL
    assert doc["status"] == "error" and doc["error"] == "SupportCollapse"
    assert json.load(open(res))["error"] == "SupportCollapse"


def test_solve_singular_record(capsys):
    code, doc = run_cli(capsys, "solve", "--space", '{"kind": "custom", "points": [[0, 0], [1, 1]]}')
    assert code == EXIT_NUMERICAL
    assert doc["error"] == "SingularInformation"


def test_solve_not_certified_exit(capsys):
    with pytest.warns(IterationCapReached):
        code, doc = run_cli(capsys, "solve", "--preset", "square", "--max-iterations", "2",
                            "--max-restart-rounds", "1")
    assert code == EXIT_NOT_CERTIFIED
    assert doc["certificate"]["certified"] is False


def test_config_error_exit(tmp_path, capsys):
    p = write(tmp_path / "c.json", json.dumps({"gamma": 0, "colour": "red"}))
    code, doc = run_cli(capsys, "solve", "--config", p)
    assert code == EXIT_CONFIG
    assert set(doc["keys"]) == {"colour"}
    code, doc = run_cli(capsys, "solve", "--gamma", "0")
    assert code == EXIT_CONFIG and doc["keys"] == ["gamma"]


# ---------------------------------------------------------------- verify


def design_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "weight"])
        w.writerows(rows)
    return str(path)


FACTORIAL = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]


def reference_rows():
    by_norm = {2: 0.1457, 1: 0.0803, 0: 0.0960}
    w = np.array([by_norm[abs(a) + abs(b)] for a, b in FACTORIAL])
    w = w / w.sum()
    return [(a, b, wt) for (a, b), wt in zip(FACTORIAL, w)]


def test_verify_reference_weights_certified(tmp_path, capsys):
    p = design_csv(tmp_path / "d.csv", reference_rows())
    code, doc = run_cli(capsys, "verify", "--preset", "square", p)
    assert code == EXIT_OK
    assert doc["certificate"]["certified"] is True


def test_verify_on_fine_grid(tmp_path, capsys):
    p = design_csv(tmp_path / "d.csv", reference_rows())
    code, doc = run_cli(capsys, "verify", "--space", '{"kind": "square_grid", "side": 21}', p)
    assert code == EXIT_OK
    assert doc["candidates"]["n"] == 441


def test_verify_uniform_not_certified(tmp_path, capsys):
    p = design_csv(tmp_path / "d.csv", [(a, b, 1 / 9) for a, b in FACTORIAL])
    code, doc = run_cli(capsys, "verify", "--preset", "square", p)
    assert code == EXIT_NOT_CERTIFIED
    assert doc["certificate"]["gap"] > 0


def test_verify_weight_sum_error(tmp_path, capsys):
    p = design_csv(tmp_path / "d.csv", [(a, b, 0.1) for a, b in FACTORIAL])
    code, doc = run_cli(capsys, "verify", "--preset", "square", p)
    assert code == EXIT_CONFIG
    assert "sum" in doc["message"]


@pytest.mark.parametrize("text", [
    "x1,x2,w\n0,0,1\n",
    "x1,x2,weight\n0,zero,1\n",
    "x1,x2,weight\n0,0\n",
    "x1,x2,weight\n",
])
def test_verify_malformed_csv(tmp_path, capsys, text):
    p = write(tmp_path / "d.csv", text)
    code, doc = run_cli(capsys, "verify", "--preset", "square", p)
    assert code == EXIT_CONFIG
    assert doc["status"] == "error"


def test_verify_point_outside_space(tmp_path, capsys):
    p = design_csv(tmp_path / "d.csv", [(2.0, 0.0, 0.5), (0.0, 0.0, 0.5)])
    code, doc = run_cli(capsys, "verify", "--preset", "square", p)
    assert code == EXIT_CONFIG
    assert "outside" in doc["message"]


def test_solve_verify_round_trip(tmp_path, capsys):
    for args in (["--preset", "square", "--space", '{"kind": "square_grid", "side": 11}'],
                 ["--preset", "wynn", "--criterion", "A", "--gamma", "1e-5"]):
        d = str(tmp_path / "d.csv")
        code, solved = run_cli(capsys, "solve", *args, "--out-design", d)
        assert code == EXIT_OK
        code, verified = run_cli(capsys, "verify", *args, d)
        assert code == EXIT_OK
        assert verified["certificate"]["gap"] == pytest.approx(solved["certificate"]["gap"], abs=1e-9)


# ---------------------------------------------------------------- experiments


def test_benchmark_deterministic_with_tick_clock(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"b{k}.csv"
        code, doc = run_cli(capsys, "benchmark", "--preset", "cube", "--sizes", "5",
                            "--budget", "5", "--tick-clock", "--out-csv", str(path))
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(open(tmp_path / "b0.csv")))
    assert list(rows[0]) == ["criterion", "algorithm", "n", "iteration", "elapsed_s", "objective",
                             "efficiency_vs_reference"]
    assert doc["rows"] == len(rows)
    assert {r["algorithm"] for r in rows} == {"proposed", "vdm", "mul"}


def test_converge_n_command(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, doc = run_cli(capsys, "converge-n", "--space", '{"kind": "square_random", "n": 10, "seed": 0}',
                        "--n-schedule", "30,300", "--replicates", "3", "--out-csv", str(path))
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 6
    assert list(rows[0]) == ["n", "replicate", "seed", "objective", "gap_to_continuous_reference"]
    assert doc["reference_objective"] == pytest.approx(4.4718, abs=1e-3)


def test_converge_n_below_p(capsys):
    code, doc = run_cli(capsys, "converge-n", "--space", '{"kind": "square_random", "n": 10, "seed": 0}',
                        "--n-schedule", "4", "--replicates", "1")
    assert code == EXIT_NUMERICAL
    assert doc["error"] == "SingularInformation"


def test_converge_n_needs_random_space(capsys):
    code, doc = run_cli(capsys, "converge-n", "--preset", "square")
    assert code == EXIT_CONFIG


def test_quad_scaling_command(tmp_path, capsys):
    path = tmp_path / "q.csv"
    code, doc = run_cli(capsys, "quad-scaling", "--q-list", "3", "--iterations", "20",
                        "--out-csv", str(path))
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(path)))
    assert rows[0]["p"] == "10"
    assert len(rows) == 21


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "optdesign", "--version"], capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip()
