"""Command-line entry point: ``nodalqmc <subcommand> <config.ini> [--workers N]``.

The config is a sectioned ``key = value`` file.  ``[run]`` is always
required; each subcommand reads its own section.  Unknown sections and keys
are rejected.  A manifest (``manifest.json``) echoing the fully resolved
configuration is written next to every output, and can itself be passed back
as the config to reproduce a run.

Exit codes: 0 success, 2 configuration error, 3 runtime abort.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .configuration import ElectronConfiguration, make_be_reference_point, random_positions
from .nodal import (
    CrossSectionSpec,
    WaveFunctionSign,
    crossing_coincidence,
    make_node,
    random_spec,
    scan_cross_section,
)
from .nodeopt import (
    ParameterSpace,
    be_node_guide_factory,
    linear_method,
    optimize_variational,
    scan_node_parameter,
)
from .qmc import DMCParams, PopulationError, SamplingError, VMCParams, dmc_fixed_node, dmc_ladder, vmc_run
from .rng import derive_rng, derive_seed
from .topology import ReferencePoint, count_nodal_regions, rotation_path_test, tiling_spot_check
from .wavefunction import (
    NodeError,
    WaveFunctionFileError,
    dump_wavefunction,
    load_shipped,
    load_wavefunction,
    orbital_1s,
    orbital_2s,
)
from .wavefunction.jastrow import ProductWaveFunction
from .wavefunction.wffile import SHIPPED

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

SYSTEMS = {"he_triplet": (2, 2, "exact_triplet"), "li": (3, 3, "li_rhf"), "be": (4, 4, "product")}
NODE_CHOICES = ("auto", "guide", "exact_triplet", "li_rhf", "product", "conjectured_be")


class ConfigError(ValueError):
    pass


# --- schema --------------------------------------------------------------
# section -> key -> (type, default); a default of None means "not set".

SCHEMA = {
    "run": {
        "system": ("str", None),
        "wavefunction": ("str", None),
        "node": ("str", "auto"),
        "seed": ("int", 1),
        "output": ("str", "nodalqmc-output"),
    },
    "node": {"a": ("float", 0.0)},
    "overrides": {},  # free keys, all floats: builder arguments or Jastrow fields
    "vmc": {
        "n_steps": ("int", 2000),
        "n_walkers": ("int", 200),
        "step_size": ("float", 0.3),
        "burn_in": ("int", 500),
        "energies_csv": ("bool", False),
    },
    "dmc": {
        "tau": ("float", 0.01),
        "taus": ("floats", None),
        "scale_steps": ("bool", False),
        "population": ("int", 1000),
        "equilibration_steps": ("int", 2000),
        "measurement_steps": ("int", 20000),
        "population_relaxation": ("int", 50),
        "population_bounds": ("floats", [0.25, 4.0]),
        "et_update_period": ("int", 10),
        "vmc_step_size": ("float", 0.3),
        "vmc_burn_in": ("int", 300),
        "energies_csv": ("bool", False),
    },
    "scan": {
        "target": ("str", "wavefunction"),
        "mode": ("str", "radial_pairs"),
        "rays": ("vectors", None),
        "midpoints": ("floats", None),
        "t_range": ("float", 0.8),
        "resolution": ("int", 33),
        "r12_range": ("floats", None),
        "draws": ("int", 0),
    },
    "topology": {
        "reference": ("str", "auto"),
        "r1": ("floats", [1.0, 0.3, 0.2]),
        "r3": ("floats", [0.4, 1.2, -0.3]),
        "positions": ("vectors", None),
        "strategy": ("str", "auto"),
        "budget": ("int", 2000),
        "rotation_steps": ("int", 256),
        "tiling_references": ("int", 0),
    },
    "crossings": {
        "n_steps": ("int", 1001),
        "n_walkers": ("int", 100),
        "step_size": ("float", 0.25),
        "burn_in": ("int", 1500),
        "radius": ("float", 1e-3),
        "tol": ("float", 1e-10),
    },
    "optimize": {
        "method": ("str", "node_scan"),
        "a_values": ("floats", [-0.2, -0.1, 0.0, 0.1, 0.2]),
        "refine": ("int", 0),
        "zeta_1s": ("float", 4.0),
        "zeta_2s": ("float", 1.4),
        "parameters": ("params", None),
        "iterations": ("int", 4),
        "maxfev": ("int", 200),
        "final_steps": ("int", 0),
        "shift": ("float", 1e-3),
    },
}

def _convert(kind, text, where):
    t = text.strip()
    try:
        if kind == "str":
            return t
        if kind == "int":
            return int(t)
        if kind == "float":
            return float(t)
        if kind == "bool":
            low = t.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {t!r}")
        if kind == "floats":
            return [float(x) for x in t.replace(",", " ").split()]
        if kind == "vectors":
            rows = [[float(x) for x in r.replace(",", " ").split()] for r in t.replace("\n", ";").split(";") if r.strip()]
            if any(len(r) != 3 for r in rows):
                raise ValueError("each vector needs three components")
            return rows
        if kind == "params":
            out = {}
            for item in t.replace("\n", ";").split(";"):
                if not item.strip():
                    continue
                name, lo, hi, x0 = item.split()
                out[name] = [float(lo), float(hi), float(x0)]
            return out
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise AssertionError(kind)


def parse_config(text: str) -> dict:
    """Parse and validate config text into the resolved dict (defaults filled in).

    Raises:
        ConfigError: on syntax errors, unknown sections or keys, or bad values.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    extra = set(cp.sections()) - set(SCHEMA)
    if extra:
        raise ConfigError(f"unknown sections {sorted(extra)}")
    out = {}
    for name, keys in SCHEMA.items():
        sec = cp[name] if cp.has_section(name) else {}
        if name == "overrides":
            out[name] = {k: _convert("float", v, f"[overrides] {k}") for k, v in sec.items()}
            continue
        unknown = set(sec.keys()) - set(keys)
        if unknown:
            raise ConfigError(f"[{name}]: unknown keys {sorted(unknown)}")
        out[name] = {k: (_convert(kind, sec[k], f"[{name}] {k}") if k in sec else default)
                     for k, (kind, default) in keys.items()}
    return resolve(out)


def resolve(cfg: dict) -> dict:
    run = cfg["run"]
    for key in ("system", "wavefunction"):
        if not run.get(key):
            raise ConfigError(f"[run] {key} is required")
    if run["system"] not in SYSTEMS:
        raise ConfigError(f"[run] system must be one of {sorted(SYSTEMS)}")
    if run["node"] not in NODE_CHOICES:
        raise ConfigError(f"[run] node must be one of {NODE_CHOICES}")
    if run["node"] == "auto":
        run["node"] = SYSTEMS[run["system"]][2]
    return cfg


def load_config(path) -> dict:
    """Read an INI config, or the ``config`` entry of a manifest (``.json``)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if path.suffix == ".json":
        try:
            cfg = json.loads(text)["config"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"not a manifest: {exc}") from None
        return parse_config(config_to_ini(cfg))
    return parse_config(text)


def _format_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, dict):
        return "; ".join(f"{k} {' '.join(repr(float(x)) for x in b)}" for k, b in v.items())
    if isinstance(v, list):
        if v and isinstance(v[0], list):
            return "; ".join(" ".join(repr(float(x)) for x in row) for row in v)
        return " ".join(repr(float(x)) for x in v)
    return str(v)


def config_to_ini(cfg: dict) -> str:
    lines = []
    for name, sec in cfg.items():
        lines.append(f"[{name}]")
        lines += [f"{k} = {_format_value(v)}" for k, v in sec.items() if v is not None]
        lines.append("")
    return "\n".join(lines)


# --- output --------------------------------------------------------------

def atomic_write(path: Path, text: str):
    """Write via a temporary file in the same directory and rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


class Outputs:
    def __init__(self, directory):
        self.dir = Path(directory)
        self.files = []

    def write(self, name, text):
        atomic_write(self.dir / name, text)
        self.files.append(name)
        logger.info("wrote %s", self.dir / name)


# --- building blocks -----------------------------------------------------

def build_wavefunction(cfg, extra_overrides=None):
    run = cfg["run"]
    over = dict(cfg["overrides"])
    over.update(extra_overrides or {})
    src = run["wavefunction"]
    try:
        if src in SHIPPED and not Path(src).exists():
            wf = load_shipped(src, over or None)
        else:
            wf = load_wavefunction(src, over or None)
    except OSError as exc:
        raise ConfigError(f"cannot read wave function {src!r}: {exc}") from None
    except WaveFunctionFileError as exc:
        raise ConfigError(f"wave function {src!r}: {exc}") from None
    n, Z, _ = SYSTEMS[run["system"]]
    if wf.n_electrons != n or getattr(wf, "Z", Z) != Z:
        raise ConfigError(f"wave function {src!r} has {wf.n_electrons} electrons and Z = {wf.Z}; "
                          f"system {run['system']} needs {n} and Z = {Z}")
    return wf


def build_node(cfg, wf):
    kind = cfg["run"]["node"]
    if kind == "guide":
        return WaveFunctionSign(wf)
    params = {"a": cfg["node"]["a"]} if kind == "conjectured_be" else {}
    node = make_node(kind, **params)
    if node.n_electrons != wf.n_electrons or tuple(node.spins) != tuple(wf.spins):
        raise ConfigError(f"node {kind!r} does not fit the {cfg['run']['system']} electron layout")
    return node


def vmc_params(cfg, label="vmc"):
    v = cfg["vmc"]
    return VMCParams(n_steps=v["n_steps"], n_walkers=v["n_walkers"], step_size=v["step_size"], burn_in=v["burn_in"],
                     seed=derive_seed(cfg["run"]["seed"], label))


def dmc_params(cfg):
    d = cfg["dmc"]
    return DMCParams(tau=d["tau"], target_population=d["population"], equilibration_steps=d["equilibration_steps"],
                     measurement_steps=d["measurement_steps"], et_update_period=d["et_update_period"],
                     seed=cfg["run"]["seed"], population_relaxation=d["population_relaxation"],
                     population_bounds=tuple(d["population_bounds"]),
                     vmc_burn_in=d["vmc_burn_in"], vmc_step_size=d["vmc_step_size"])


def _series_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _label(cfg):
    return Path(cfg["run"]["wavefunction"]).stem


# --- subcommands ---------------------------------------------------------

def cmd_vmc(cfg, out, workers):
    wf = build_wavefunction(cfg)
    p = vmc_params(cfg)
    r = vmc_run(wf, p, workers=workers)
    summary = {"system": cfg["run"]["system"], "guide": _label(cfg), "node": None, "tau": None,
               "population": p.n_walkers, "steps": p.n_steps, "energy": r.estimate.mean, "error": r.estimate.error,
               "acceptance": r.acceptance, "seed": cfg["run"]["seed"], "variance": r.variance,
               "plateau": r.estimate.plateau}
    out.write("summary.json", to_json(summary))
    if cfg["vmc"]["energies_csv"]:
        out.write("energies.csv", _series_csv(["step", "energy"], [(i, float(e)) for i, e in enumerate(r.energies)]))
    return summary


def cmd_dmc(cfg, out, workers):
    wf = build_wavefunction(cfg)
    node = build_node(cfg, wf)
    p = dmc_params(cfg)
    d = cfg["dmc"]
    base = {"system": cfg["run"]["system"], "guide": _label(cfg), "node": cfg["run"]["node"],
            "population": p.target_population, "seed": cfg["run"]["seed"]}
    if d["taus"]:
        lad = dmc_ladder(wf, node, p, taus=tuple(d["taus"]), workers=workers, scale_steps=d["scale_steps"])
        ex = lad.extrapolated
        summary = {**base, "tau": 0.0, "steps": [r.params.measurement_steps for r in lad.runs],
                   "energy": ex.mean, "error": ex.error,
                   "acceptance": float(np.mean([r.acceptance for r in lad.runs])),
                   "extrapolated": ex.as_dict(), "runs": [r.summary() for r in lad.runs]}
        runs = lad.runs
    else:
        r = dmc_fixed_node(wf, node, p, workers=workers)
        summary = {**base, **r.summary()}
        runs = [r]
    out.write("summary.json", to_json(summary))
    if d["energies_csv"]:
        rows = [(float(r.params.tau), i, float(e)) for r in runs for i, e in enumerate(r.energies)]
        out.write("energies.csv", _series_csv(["tau", "step", "energy"], rows))
    return summary


def _scan_specs(cfg):
    s = cfg["scan"]
    n = cfg_n_electrons(cfg)
    if s["draws"] > 0:
        return [random_spec(derive_rng(cfg["run"]["seed"], "scan", k), n_electrons=n, t_range=s["t_range"],
                            resolution=s["resolution"]) for k in range(s["draws"])]
    if s["rays"] is None or s["midpoints"] is None:
        raise ConfigError("[scan] needs rays and midpoints, or draws > 0")
    kw = {}
    if s["r12_range"] is not None:
        kw["r12_range"] = tuple(s["r12_range"])
    try:
        return [CrossSectionSpec(np.array(s["rays"]), tuple(s["midpoints"]), s["t_range"], s["resolution"],
                                 mode=s["mode"], **kw)]
    except ValueError as exc:
        raise ConfigError(f"[scan]: {exc}") from None


def cfg_n_electrons(cfg):
    return SYSTEMS[cfg["run"]["system"]][0]


def cmd_scan(cfg, out, workers):
    wf = build_wavefunction(cfg)
    target = cfg["scan"]["target"]
    if target not in ("wavefunction", "node"):
        raise ConfigError("[scan] target must be 'wavefunction' or 'node'")
    f = build_node(cfg, wf) if target == "node" else wf
    specs = _scan_specs(cfg)
    sections = []
    for k, spec in enumerate(specs):
        cs = scan_cross_section(f, spec)
        name = "grid.csv" if len(specs) == 1 else f"grid_{k}.csv"
        out.write(name, cs.to_csv())
        sections.append({"file": name, "rays": spec.rays.tolist(), "midpoints": list(spec.midpoints),
                         "positive": int(np.sum(cs.signs > 0)), "negative": int(np.sum(cs.signs < 0)),
                         "zero": int(np.sum(cs.signs == 0)),
                         "quadrants_connected": {"+": cs.quadrant_connected(1), "-": cs.quadrant_connected(-1)}})
    summary = {"system": cfg["run"]["system"], "target": target, "grids": sections}
    out.write("summary.json", to_json(summary))
    return summary


def _random_reference(wf, seed):
    rng = derive_rng(seed, "topology-reference")
    for _ in range(1000):
        pos = random_positions(rng, wf.n_electrons, 1.5)
        if wf.value(pos[None])[0] != 0.0:
            return ElectronConfiguration(pos, wf.spins, wf.Z)
    raise ConfigError("could not draw a reference point off the node")


def cmd_topology(cfg, out, workers):
    wf = build_wavefunction(cfg)
    t = cfg["topology"]
    seed = cfg["run"]["seed"]
    if t["reference"] not in ("auto", "be_rotation", "random", "positions"):
        raise ConfigError("[topology] reference must be auto, be_rotation, random or positions")
    if t["strategy"] not in ("auto", "rotation", "search"):
        raise ConfigError("[topology] strategy must be auto, rotation or search")
    report = {"system": cfg["run"]["system"], "wavefunction": _label(cfg)}
    reference = None
    if t["reference"] in ("auto", "be_rotation") and cfg["run"]["system"] == "be":
        be_ref = make_be_reference_point(t["r1"], t["r3"], Z=wf.Z)
        rot = rotation_path_test(wf, be_ref, t["rotation_steps"])
        report["rotation_test"] = rot.as_dict()
        if ReferencePoint.at(wf, be_ref.config).valid:
            reference = be_ref
        elif t["reference"] == "be_rotation":
            raise ConfigError("psi vanishes at the rotation reference point; choose other r1, r3")
    elif t["reference"] == "be_rotation":
        raise ConfigError("the rotation reference exists only for Be")
    if reference is None:
        if t["reference"] == "positions":
            if t["positions"] is None:
                raise ConfigError("[topology] reference = positions needs positions")
            try:
                reference = ElectronConfiguration(np.array(t["positions"]), wf.spins, wf.Z)
            except ValueError as exc:
                raise ConfigError(f"[topology] positions: {exc}") from None
        else:
            reference = _random_reference(wf, seed)
    try:
        rc = count_nodal_regions(wf, reference, path_strategy=t["strategy"], budget=t["budget"],
                                 seed=derive_seed(seed, "topology"), rotation_steps=t["rotation_steps"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ref_cfg = reference.config if hasattr(reference, "axis") else reference
    report["reference"] = {"positions": np.asarray(ref_cfg.positions).tolist(), "spins": list(ref_cfg.spins),
                           "kind": "be_rotation" if hasattr(reference, "axis") else t["reference"]}
    report.update(rc.as_dict())
    kinds = {e.get("kind") for e in rc.evidence if e.get("outcome") == "connected"}
    report["connected_by"] = sorted(k for k in kinds if k)
    report["no_path_found"] = [e["to"] for e in rc.evidence if e.get("outcome") != "connected"]
    if t["tiling_references"] > 0:
        report["tiling"] = tiling_spot_check(wf, t["tiling_references"], t["budget"], seed=seed).as_dict()
    out.write("topology.json", to_json(report))
    return report


def cmd_crossings(cfg, out, workers):
    wf = build_wavefunction(cfg)
    node = build_node(cfg, wf)
    c = cfg["crossings"]
    if c["n_steps"] < 2:
        raise ConfigError("[crossings] n_steps must be at least 2")
    p = VMCParams(n_steps=c["n_steps"], n_walkers=c["n_walkers"], step_size=c["step_size"], burn_in=c["burn_in"],
                  seed=derive_seed(cfg["run"]["seed"], "crossings"), measure_energy=False, record_stream=True)
    walk = vmc_run(wf, p).stream
    rep = crossing_coincidence(wf, node, walk, radius=c["radius"], tol=c["tol"], workers=workers)
    buf = io.StringIO()
    rep.to_jsonl(buf)
    out.write("crossings.jsonl", buf.getvalue())
    summary = {"system": cfg["run"]["system"], "wavefunction": _label(cfg), "node": cfg["run"]["node"],
               "seed": cfg["run"]["seed"], **rep.summary()}
    out.write("summary.json", to_json(summary))
    return summary


def cmd_optimize(cfg, out, workers):
    o = cfg["optimize"]
    method = o["method"]
    if method == "node_scan":
        if cfg["run"]["system"] != "be":
            raise ConfigError("node_scan optimises the Be node family only")
        wf = build_wavefunction(cfg)
        jas = wf.jastrow if isinstance(wf, ProductWaveFunction) else None
        factory = be_node_guide_factory(orbital_1s(o["zeta_1s"]), orbital_2s(o["zeta_2s"], 4), jas, Z=4)
        d = cfg["dmc"]
        try:
            res = scan_node_parameter(factory, o["a_values"], dmc_params(cfg), taus=tuple(d["taus"] or ()) or None,
                                      refine=o["refine"], workers=workers)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        out.write("scan.csv", res.to_csv())
        summary = {"system": "be", "method": method, "seed": cfg["run"]["seed"], **res.summary()}
    elif method == "variational":
        if not o["parameters"]:
            raise ConfigError("[optimize] variational needs parameters = name lower upper initial; ...")
        try:
            space = ParameterSpace.from_dict(o["parameters"])
        except ValueError as exc:
            raise ConfigError(f"[optimize] parameters: {exc}") from None
        build_wavefunction(cfg, space.as_dict(space.initial))

        def family(**kw):
            try:
                return build_wavefunction(cfg, kw)
            except ConfigError as exc:
                raise ValueError(str(exc)) from None

        res = optimize_variational(family, space, vmc_params(cfg, "optimize"), n_iterations=o["iterations"],
                                   maxfev=o["maxfev"], final_steps=o["final_steps"] or None)
        summary = {"system": cfg["run"]["system"], "method": method, "seed": cfg["run"]["seed"], **res.as_dict()}
    elif method == "linear":
        wf = build_wavefunction(cfg)
        base = wf.base if isinstance(wf, ProductWaveFunction) else wf
        if not hasattr(base, "with_coefficients"):
            raise ConfigError("the linear method needs a Hylleraas expansion wave function")
        if base is not wf:
            raise ConfigError("the linear method needs an expansion without a Jastrow factor")
        new, e_low = linear_method(wf, vmc_params(cfg, "optimize"), shift=o["shift"], n_iterations=o["iterations"])
        out.write("optimized.wf", dump_wavefunction(new))
        summary = {"system": cfg["run"]["system"], "method": method, "seed": cfg["run"]["seed"],
                   "sampled_eigenvalue": e_low, "coefficients": list(map(float, new.expansion.coefficients))}
    else:
        raise ConfigError("[optimize] method must be node_scan, variational or linear")
    out.write("summary.json", to_json(summary))
    return summary


COMMANDS = {"scan": cmd_scan, "vmc": cmd_vmc, "dmc": cmd_dmc, "topology": cmd_topology,
            "crossings": cmd_crossings, "optimize": cmd_optimize}


def build_parser():
    ap = argparse.ArgumentParser(prog="nodalqmc", description="Nodal structure and fixed-node QMC for He, Li and Be.")
    ap.add_argument("--version", action="version", version=f"nodalqmc {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", help="INI config file, or a manifest.json from an earlier run")
    ap.add_argument("--workers", type=int, default=1, help="parallel evaluation threads (results do not depend on it)")
    ap.add_argument("--log-level", default="WARNING")
    return ap


def run(command: str, config_path, workers: int = 1) -> int:
    """Run one subcommand and return the exit code."""
    try:
        if workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = load_config(config_path)
        out = Outputs(cfg["run"]["output"])
        COMMANDS[command](cfg, out, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PopulationError, SamplingError, NodeError, FloatingPointError) as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag:
            print(json.dumps(diag, default=_json_default), file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        # invalid parameter combinations surface from the dataclass validators
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest = {"tool": "nodalqmc", "version": __version__, "command": command, "seed": cfg["run"]["seed"],
                "workers": workers, "outputs": out.files, "config": cfg}
    out.write("manifest.json", to_json(manifest))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args.command, args.config, args.workers)


if __name__ == "__main__":
    sys.exit(main())
