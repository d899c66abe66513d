import json
import subprocess
import sys

import numpy as np
import pytest

from nodalqmc.cli import ConfigError, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, atomic_write, main, parse_config


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def run_cli(*args):
    return main([str(a) for a in args])


def test_parse_defaults_and_auto_node():
    cfg = parse_config("[run]\nsystem = li\nwavefunction = li_rhf\n")
    assert cfg["run"]["node"] == "li_rhf"
    assert cfg["dmc"]["population"] == 1000
    assert cfg["run"]["seed"] == 1


@pytest.mark.parametrize("text", [
    "[run]\nsystem = li\nwavefunction = li_rhf\ncolour = red\n",
    "[run]\nsystem = li\nwavefunction = li_rhf\n[dmcc]\ntau = 0.1\n",
    "[run]\nsystem = boron\nwavefunction = li_rhf\n",
    "[run]\nwavefunction = li_rhf\n",
    "[run]\nsystem = li\nwavefunction = li_rhf\nnode = spherical\n",
    "[run]\nsystem = li\nwavefunction = li_rhf\n[dmc]\ntau = fast\n",
    "[run]\nsystem = li\nwavefunction = li_rhf\n[scan]\nrays = 1 0; 0 1 0\n",
    "not an ini file",
])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_atomic_write(tmp_path):
    p = tmp_path / "sub" / "x.txt"
    atomic_write(p, "hello")
    atomic_write(p, "world")
    assert p.read_text() == "world"
    assert [f.name for f in p.parent.iterdir()] == ["x.txt"]


def test_scan_be_hf(tmp_path):
    out = tmp_path / "out"
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_hf
seed = 4
output = {out}
[scan]
draws = 2
""")
    assert run_cli("scan", cfg) == EXIT_OK
    for k in range(2):
        rows = np.loadtxt(out / f"grid_{k}.csv", delimiter=",", skiprows=1)
        assert np.array_equal(rows[:, 2], np.sign(rows[:, 0] * rows[:, 1]))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["run"]["seed"] == 4
    assert manifest["version"]
    assert "grid_0.csv" in manifest["outputs"]
    first = (out / "grid_0.csv").read_bytes()
    assert run_cli("scan", cfg) == EXIT_OK
    assert (out / "grid_0.csv").read_bytes() == first


def test_scan_rejects_resolution_one(tmp_path):
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_hf
output = {tmp_path / "o"}
[scan]
rays = 1 0 0; 0 1 0; 0 0 1; 1 1 0
midpoints = 1.0 1.0
resolution = 1
""")
    assert run_cli("scan", cfg) == EXIT_CONFIG
    assert not (tmp_path / "o" / "manifest.json").exists()


def test_manifest_rerun_reproduces(tmp_path):
    out = tmp_path / "a"
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_two_config
output = {out}
[overrides]
c2 = 0.2
[scan]
rays = 1 0 0; 0 1 0; 1 0.3 0; 0.2 1 0
midpoints = 1.0 1.2
resolution = 17
""")
    assert run_cli("scan", cfg) == EXIT_OK
    first = (out / "grid.csv").read_bytes()
    (out / "grid.csv").unlink()
    manifest = out / "manifest.json"
    copy = tmp_path / "manifest_copy.json"
    copy.write_text(manifest.read_text())
    assert run_cli("scan", copy) == EXIT_OK
    assert (out / "grid.csv").read_bytes() == first


def test_topology_two_config(tmp_path):
    out = tmp_path / "t"
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_two_config
output = {out}
[overrides]
c2 = 0.05
[topology]
reference = be_rotation
""")
    assert run_cli("topology", cfg) == EXIT_OK
    rep = json.loads((out / "topology.json").read_text())
    assert rep["regions"] == 2
    assert rep["connected_by"] == ["rotation"]
    assert rep["rotation_test"]["max_relative_deviation"] < 1e-10


def test_topology_be_hf(tmp_path):
    out = tmp_path / "t"
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_hf
output = {out}
[topology]
budget = 300
""")
    assert run_cli("topology", cfg) == EXIT_OK
    rep = json.loads((out / "topology.json").read_text())
    assert rep["regions"] == 4
    assert rep["no_path_found"] == [[1, 0, 3, 2]]
    assert rep["rotation_test"]["outcome"] == "undetermined"


def test_topology_rotation_reference_invalid_for_hf(tmp_path):
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_hf
output = {tmp_path / "t"}
[topology]
reference = be_rotation
""")
    assert run_cli("topology", cfg) == EXIT_CONFIG


def test_vmc_and_energies_csv(tmp_path):
    out = tmp_path / "v"
    cfg = write(tmp_path, f"""
[run]
system = li
wavefunction = li_rhf
output = {out}
[vmc]
n_steps = 100
n_walkers = 50
step_size = 0.25
burn_in = 200
energies_csv = true
""")
    assert run_cli("vmc", cfg) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert {"system", "guide", "energy", "error", "acceptance", "seed", "population", "steps"} <= set(s)
    assert len((out / "energies.csv").read_text().splitlines()) == 101


def test_dmc_ladder_and_workers(tmp_path):
    base = """
[run]
system = li
wavefunction = li_rhf
output = {out}
[dmc]
taus = 0.02 0.01
population = 150
equilibration_steps = 50
measurement_steps = 100
vmc_step_size = 0.25
"""
    outs = []
    for w in (1, 2):
        out = tmp_path / f"d{w}"
        cfg = write(tmp_path, base.format(out=out), f"d{w}.ini")
        assert run_cli("dmc", cfg, "--workers", w) == EXIT_OK
        outs.append((out / "summary.json").read_text())
    assert outs[0] == outs[1]
    s = json.loads(outs[0])
    assert "extrapolated" in s and len(s["runs"]) == 2
    assert s["node"] == "li_rhf" and s["tau"] == 0.0


def test_dmc_population_abort(tmp_path):
    cfg = write(tmp_path, f"""
[run]
system = li
wavefunction = li_rhf
output = {tmp_path / "d"}
[dmc]
tau = 0.2
population = 100
equilibration_steps = 50
measurement_steps = 64
population_relaxation = 100000
population_bounds = 0.99 1.01
""")
    assert run_cli("dmc", cfg) == EXIT_RUNTIME


def test_wrong_system_for_wavefunction(tmp_path):
    cfg = write(tmp_path, f"[run]\nsystem = be\nwavefunction = li_rhf\noutput = {tmp_path}\n")
    assert run_cli("vmc", cfg) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert run_cli("vmc", tmp_path / "nope.ini") == EXIT_CONFIG


def test_crossings_li_self(tmp_path):
    out = tmp_path / "c"
    cfg = write(tmp_path, f"""
[run]
system = li
wavefunction = li_rhf
output = {out}
[crossings]
n_steps = 200
n_walkers = 30
burn_in = 300
""")
    assert run_cli("crossings", cfg) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert s["non_coincident"] == 0 and s["total_crossings"] > 0
    assert (out / "crossings.jsonl").read_text() == ""


def test_optimize_variational_cli(tmp_path):
    out = tmp_path / "o"
    cfg = write(tmp_path, f"""
[run]
system = li
wavefunction = li_rhf
output = {out}
[vmc]
n_steps = 100
n_walkers = 50
step_size = 0.25
burn_in = 300
[optimize]
method = variational
parameters = en_k 0.1 1.0 0.6
iterations = 1
maxfev = 20
""")
    assert run_cli("optimize", cfg) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert 0.1 <= s["parameters"]["en_k"] <= 1.0


def test_optimize_rejects_unknown_method(tmp_path):
    cfg = write(tmp_path, f"[run]\nsystem = be\nwavefunction = be_hf\noutput = {tmp_path}\n[optimize]\nmethod = gradient\n")
    assert run_cli("optimize", cfg) == EXIT_CONFIG


def test_node_scan_requires_zero(tmp_path):
    cfg = write(tmp_path, f"""
[run]
system = be
wavefunction = be_hf
output = {tmp_path / "n"}
[optimize]
a_values = 0.1 0.2
""")
    assert run_cli("optimize", cfg) == EXIT_CONFIG


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "nodalqmc.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "nodalqmc" in r.stdout
    r = subprocess.run([sys.executable, "-m", "nodalqmc.cli", "scan"], capture_output=True, text=True)
    assert r.returncode == 2


def test_dmc_bad_population_bounds(tmp_path):
    cfg = write(tmp_path, f"""
[run]
system = li
wavefunction = li_rhf
output = {tmp_path / "d"}
[dmc]
population = 100
measurement_steps = 64
population_bounds = 1.5 4
""")
    assert run_cli("dmc", cfg) == EXIT_CONFIG
