import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from fracwave.cli import main
from fracwave.config import parse_config
from fracwave.fieldio import read_field
from fracwave.runner import RunError, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def load(name, out: Path, **over):
    path = CONFIGS / name
    doc = json.loads(path.read_text())
    doc["output_dir"] = str(out)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(doc.get(key), dict):
            doc[key] = {**doc[key], **value}
        else:
            doc[key] = value
    return json.dumps(doc).encode(), CONFIGS


def write_config(tmp_path, name, **over) -> Path:
    data, _ = load(name, tmp_path / "out", **over)
    doc = json.loads(data)
    # field paths are relative to configs/
    for slot in ("g", "m", "b", "u0", "u1"):
        coef = doc.get("problem", {}).get(slot, {})
        if "file" in coef:
            coef["file"] = str(CONFIGS / coef["file"])
    f = doc.get("problem", {}).get("f")
    if f and "file" in f["spatial"]:
        f["spatial"]["file"] = str(CONFIGS / f["spatial"]["file"])
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def csv_bodies(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}


def test_solve_single_mode(tmp_path):
    data, base = load("solve_single_mode.json", tmp_path)
    man = run(parse_config(data, base), config_bytes=data)
    assert man.verdicts == {"energy_conservation": "PASS"} and man.passed
    assert man.config_sha256 == hashlib.sha256(data).hexdigest()
    assert set(man.outputs) == {"trajectory.csv", "final_u.csv", "final_u.csv.json", "final_ut.csv",
                                "final_ut.csv.json", "manifest.json"}
    assert all((tmp_path / f).exists() for f in man.outputs)
    assert not list(tmp_path.glob(".*.tmp"))
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["verdicts"] == man.verdicts and on_disk["config_sha256"] == man.config_sha256
    assert read_field(tmp_path / "final_u.csv").grid.n == 64
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,u_l2,frac_u_l2,ut_l2,energy,dissipation_residual"


def test_solve_damped_and_singular(tmp_path):
    data, base = load("solve_damped.json", tmp_path / "a")
    assert run(parse_config(data, base)).verdicts == {"energy_monotone": "PASS"}
    doc = {"experiment": "solve", "output_dir": str(tmp_path / "b"), "grid": {"dim": 1, "n": 128, "L": 1.0},
           "problem": {"s": 0.5, "T": 0.2, "u0": {"singular": {"kind": "delta", "center": [0.5]}}},
           "mollifier": {"epsilon": 0.125}}
    man = run(parse_config(json.dumps(doc).encode()))
    # s = 0.5 on a coarse grid: RK4 damping of the top modes is ~1e-4, above the 1e-6 default
    assert set(man.verdicts) == {"energy_conservation"} and man.summary["max_relative_drift"] < 1e-3
    assert read_field(tmp_path / "b" / "final_u.csv").samples.max() > 1


def test_sweep_delta_slope_band(tmp_path):
    data, base = load("sweep_delta.json", tmp_path)
    man = run(parse_config(data, base), threads=2)
    assert man.verdicts == {"power_law_fit": "PASS", "slope_band": "PASS"}
    assert abs(man.summary["fitted_slope"] + 0.916) <= 0.1
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == "epsilon,sup_norm1"


def test_twin_identical_zero(tmp_path):
    data, base = load("twin_identical.json", tmp_path)
    man = run(parse_config(data, base))
    assert man.verdicts == {"unique": "PASS"} and man.summary["max_difference"] == 0.0


def test_duhamel_check(tmp_path):
    data, base = load("duhamel_check.json", tmp_path, problem={"T": 1.0}, solver={"dt_override": 1 / 64})
    man = run(parse_config(data, base))
    assert man.passed and man.summary["max_discrepancy"] < 1e-4
    assert json.loads((tmp_path / "duhamel.json").read_text())["n_tau"] == 64


def test_bounds_and_probes_small(tmp_path):
    data, base = load("bounds.json", tmp_path / "b", params={"n_samples": 4, "estimate": "E1"})
    man = run(parse_config(data, base))
    assert set(man.verdicts) == {"E1_below_c_star", "E1_scale_invariant"} and man.passed
    data, base = load("bounds.json", tmp_path / "c", params={"n_samples": 4, "c_star": 1e-6})
    assert run(parse_config(data, base)).verdicts["E2_below_c_star"] == "FAIL"
    data, base = load("probes.json", tmp_path / "p", params={"n_values": [32, 64], "n_samples": 5, "band": 4})
    man = run(parse_config(data, base))
    assert man.summary["sobolev"]["relative_spread"] < 1e-12  # fixed band: same functions
    assert "probe_kato_ponce_n64.csv" in man.outputs


def test_byte_identical_reruns(tmp_path):
    for name, over in (("sweep_delta.json", {}), ("probes.json", {"params": {"n_values": [32, 64], "n_samples": 6}}),
                       ("solve_single_mode.json", {})):
        data, base = load(name, tmp_path / "one", **over)
        run(parse_config(data, base), threads=1)
        data2, _ = load(name, tmp_path / "two", **over)
        run(parse_config(data2, base), threads=3)
        one, two = csv_bodies(tmp_path / "one"), csv_bodies(tmp_path / "two")
        assert one and one == two


def test_module_errors_surface_with_context(tmp_path):
    data, base = load("solve_single_mode.json", tmp_path, solver={"dt_override": 1.0})
    with pytest.raises(RunError, match="experiment 'solve'"):
        run(parse_config(data, base))


class TestCli:
    def test_pass_exit_zero(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "twin_identical.json")
        assert main(["twin", "--config", str(cfg)]) == 0
        assert "PASS unique" in capsys.readouterr().out

    def test_fail_exit_one(self, tmp_path):
        cfg = write_config(tmp_path, "twin_bump_gaussian.json")
        assert main(["twin", "--config", str(cfg)]) == 1
        man = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert man["verdicts"] == {"unique": "FAIL"}

    def test_config_errors_exit_two(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "twin_identical.json")
        assert main(["sweep", "--config", str(cfg)]) == 2
        assert main(["twin", "--config", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text('{"experiment": "twin", "grid": {"dim": 1, "n": 64, "L": 1.0, "h": 2}}')
        assert main(["twin", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "config error: grid.h: Unexpected keyword argument" in err

    def test_relative_field_paths_follow_the_config(self, tmp_path):
        out = tmp_path / "out"
        assert main(["solve", "--config", str(CONFIGS / "solve_single_mode.json"), "--output-dir", str(out)]) == 0
        assert (out / "trajectory.csv").exists()

    def test_overrides_and_threads_env(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, "probes.json", params={"n_values": [32, 64], "n_samples": 4, "band": 4})
        monkeypatch.setenv("FRACWAVE_THREADS", "3")
        assert main(["probes", "--config", str(cfg), "--seed", "5", "--output-dir", str(tmp_path / "s5")]) == 0
        man = json.loads((tmp_path / "s5" / "manifest.json").read_text())
        assert man["seed"] == 5 and man["threads"] == 3
        assert man["config_sha256"] == hashlib.sha256(cfg.read_bytes()).hexdigest()
        assert main(["probes", "--config", str(cfg), "--threads", "1", "--output-dir", str(tmp_path / "s0")]) == 0
        assert json.loads((tmp_path / "s0" / "manifest.json").read_text())["threads"] == 1
        r5 = np.loadtxt(tmp_path / "s5" / "probe_sobolev_n32.csv", delimiter=",", skiprows=1)
        r0 = np.loadtxt(tmp_path / "s0" / "probe_sobolev_n32.csv", delimiter=",", skiprows=1)
        assert not np.array_equal(r5, r0)
        monkeypatch.setenv("FRACWAVE_THREADS", "many")
        assert main(["probes", "--config", str(cfg)]) == 2
        assert main(["probes", "--config", str(cfg), "--threads", "0"]) == 2
