import json
import subprocess
import sys

import pytest

from tanhqi import cli
from tanhqi.experiments import ConfigError, example_config, parse_config, run_experiment

SMALL_TOML = """
name = "small"
target = "bump4"
h = 0.05
truncation_radius = 30
delta_set = [-4, -3, -2, -1, 0, 1, 2, 3, 4]

[grid]
lower = -1.0
upper = 1.0
num = 21

[kernels.g2]
family = "tanh_power"
beta = 3.0

[check]
kind = "factor"
tol = 2.0
reference = { g2 = 8e-5 }
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- configs

def test_example_configs_parse():
    cfg = example_config("example3")
    assert cfg.dim == 2 and len(cfg.delta_set) == 21
    assert cfg.symbols["g2"].family.value == "power_log"
    assert example_config("example1", h=0.01).h == 0.01


@pytest.mark.parametrize("raw,match", [
    ({"target": "nope", "h": 0.1, "kernels": {"a": {"family": "power", "beta": 3}}}, "unknown target"),
    ({"target": "bump4", "kernels": {"a": {"family": "power", "beta": 3}}}, "h is required"),
    ({"target": "bump4", "h": -1, "kernels": {"a": {"family": "power", "beta": 3}}}, "positive"),
    ({"target": "bump4", "h": 0.1, "kernels": {}}, "kernel"),
    ({"target": "bump4", "h": 0.1, "kernels": {"a": {"beta": 3}}}, "family"),
    ({"target": "bump4", "h": 0.1, "kernels": {"a": {"family": "tanhpow", "beta": -2}}}, "kernels.a"),
    ({"target": "bump4", "h": 0.1, "bogus": 1, "kernels": {"a": {"family": "power", "beta": 3}}}, "unknown config"),
    ({"target": "example3", "h": 0.1, "kernels": {"a": {"family": "power", "beta": 3}}}, "truncation_radius"),
    ({"target": "bump4", "h": 0.1, "grid": {"lower": 1, "upper": 0, "num": 3},
      "kernels": {"a": {"family": "power", "beta": 3}}}, "grid"),
    ({"target": "bump4", "h": 0.1, "delta_set": [[0, 1]], "kernels": {"a": {"family": "power", "beta": 3}}},
     "delta_set"),
])
def test_config_errors(raw, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(raw)


def test_unknown_example():
    with pytest.raises(ConfigError):
        example_config("example9")


def test_toml_config_runs_and_checks(tmp_path, capsys):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_TOML)
    code, out, _ = run(capsys, "experiment", str(path), "--check")
    assert code == 0, out
    assert "PASS g2" in out


def test_bad_toml_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("target = \n")
    assert run(capsys, "experiment", str(path))[0] == 2
    assert run(capsys, "experiment", str(tmp_path / "missing.toml"))[0] == 2
    path.write_text(SMALL_TOML.replace("h = 0.05", "h = -0.05"))
    code, _, err = run(capsys, "experiment", str(path))
    assert code == 2 and "config error" in err


def test_check_failure_exits_4(tmp_path, capsys):
    path = tmp_path / "strict.toml"
    path.write_text(SMALL_TOML.replace("g2 = 8e-5", "g2 = 1e-12"))
    code, out, _ = run(capsys, "experiment", str(path), "--check")
    assert code == 4 and "FAIL g2" in out


# ---------------------------------------------------------------- transform

def test_transform_prints_expansion(capsys):
    code, out, _ = run(capsys, "transform", "--kernel", "power", "--beta", "3", "--dim", "1")
    assert code == 0 and out.strip() == "12 * s^-4"


def test_transform_excluded_beta(capsys):
    code, _, err = run(capsys, "transform", "--kernel", "power", "--beta", "2", "--dim", "1")
    assert code == 2
    assert "excluded case beta = 2k" in err


def test_transform_compares_values(capsys):
    code, out, _ = run(capsys, "transform", "--kernel", "tanhpow", "--beta", "3", "--at", "0.1", "0.5")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "s,expansion,oracle,difference"
    assert all(abs(float(r.split(",")[3])) < 1e-8 for r in rows[1:])


def test_transform_outside_expansion_range(capsys):
    code, _, err = run(capsys, "transform", "--kernel", "tanhpow", "--beta", "3", "--at", "2.0")
    assert code == 2 and "error" in err


def test_transform_odd_dim_route(capsys):
    code, out, _ = run(capsys, "transform", "--kernel", "tanhpow", "--beta", "3", "--route", "odd-dim",
                       "--at", "1.0", "3.0")
    assert code == 0
    assert all(abs(float(r.split(",")[3])) < 1e-9 for r in out.strip().splitlines()[1:])
    code, _, _ = run(capsys, "transform", "--kernel", "tanhpow", "--beta", "3", "--dim", "2",
                     "--route", "odd-dim", "--at", "1.0")
    assert code == 2


def test_transform_bad_kernel(capsys):
    assert run(capsys, "transform", "--kernel", "nonsense", "--beta", "1")[0] == 2


# ---------------------------------------------------------------- coeffs and series

def test_coeffs_example1(tmp_path, capsys):
    manifest = tmp_path / "m.json"
    code, out, _ = run(capsys, "coeffs", "example1", "--label", "g2", "--manifest", str(manifest))
    assert code == 0
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert len(lines) == 9
    assert float(lines[0].split()[1]) * 2880 == pytest.approx(7.0, abs=1e-10)
    info = json.loads(manifest.read_text())["kernels"]["g2"]
    assert info["M"] == 3 and info["b_vector"] == {"5": pytest.approx(2.0)}
    assert info["symmetric"]


def test_coeffs_inconsistent_system_exits_3(tmp_path, capsys):
    path = tmp_path / "tiny.toml"
    path.write_text(SMALL_TOML.replace("delta_set = [-4, -3, -2, -1, 0, 1, 2, 3, 4]", "delta_set = [-1, 0, 1]"))
    code, _, err = run(capsys, "coeffs", str(path))
    assert code == 3 and "inconsistent" in err


def test_glf_series_with_oracle(capsys):
    code, out, _ = run(capsys, "glf-series", "--exponent", "3", "--head", "6", "--oracle")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 6
    assert all(abs(float(r.split(",")[3])) < 1e-12 for r in rows)


def test_glf_series_errors(capsys):
    assert run(capsys, "glf-series", "--n-coeffs", "1000")[0] == 2
    assert run(capsys, "glf-series", "--kind", "h", "--dim", "2")[0] == 2
    assert run(capsys, "glf-series", "--kind", "h", "--d0", "2", "--head", "3")[0] == 0


# ---------------------------------------------------------------- experiments

def test_example2_check_passes(capsys):
    code, out, _ = run(capsys, "experiment", "example2", "--check")
    assert code == 0
    assert out.count("PASS") == 2


def test_artifacts_are_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        code, _, _ = run(capsys, "experiment", "example1", "--h", "0.02", "--grid-num", "51", "--out", str(d))
        assert code == 0
    for name in ("g1_error.csv", "g2_error.csv", "g1_psi.csv", "g1_coeffs.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    m = json.loads((a / "manifest.json").read_text())
    assert set(m["runs"]) == {"g1", "g2"}
    assert m["config"]["h"] == 0.02


def test_run_experiment_manifest():
    cfg = example_config("example1", h=0.02, grid={"lower": -1.0, "upper": 1.0, "num": 11})
    man = run_experiment(cfg)
    run = man.runs["g1"]
    assert run["report"]["rmse"] <= run["report"]["max_error"]
    assert run["case"] == "EvenInteger" and run["n_coeffs"] == 9
    assert json.loads(man.to_json())["version"]


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("checks passed")
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "tanhqi.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("tanhqi ")
