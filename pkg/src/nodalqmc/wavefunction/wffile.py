"""Plain-text wave-function files (sectioned ``key = value``).

Three kinds are understood::

    [wavefunction]
    kind = ci                 # determinant products of Slater orbitals
    Z = 3
    spins = up down up
    name = li_rhf

    [orbital.s1]
    type = 1s
    zeta = 3.0

    [orbital.s2]
    type = 2s
    zeta = 1.0
    offset = cusp             # or a number

    [term.1]
    coefficient = 1.0
    up = s1 s2
    down = s1

``kind = hylleraas`` takes ``scheme`` (pairwise | li_2s) and an
``[expansion]`` section whose ``terms`` value holds one line per term:
coefficient, then the M integer powers, then the M exponents, over the
distance list ``r_1 .. r_N, r_12, r_13, ..``.

``kind = builder`` names one of the ready-made constructors
(``function = be_two_config``) and passes the remaining keys as arguments.

Any kind may add a ``[jastrow]`` section with the :class:`JastrowFactor`
fields.  Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
from importlib import resources

import numpy as np

from ..configuration import DOWN, UP
from . import builders
from .determinant import CIWaveFunction, DeterminantProduct
from .hylleraas import DistanceExpansion, HylleraasWaveFunction, SCHEMES, build_he_triplet_hylleraas
from .jastrow import JastrowFactor, ProductWaveFunction
from .orbitals import KINDS, SlaterOrbital, cusp_shift

BUILDERS = {
    "hydrogenic": builders.build_hydrogenic,
    "li_rhf": builders.build_li_rhf,
    "be_hf": builders.build_be_hf,
    "be_two_config": builders.build_be_two_config,
    "be_phi2": builders.build_be_phi2,
    "he_triplet_hylleraas": build_he_triplet_hylleraas,
}
_INT_ARGS = {"Z", "n_terms"}
_JASTROW_KEYS = {"b_parallel": float, "b_antiparallel": float, "cusp": "bool", "en_k": float, "en_b": float}

SHIPPED = ("he_triplet", "li_rhf", "li_hylleraas", "be_hf", "be_two_config")


class WaveFunctionFileError(ValueError):
    pass


def _parser():
    p = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    p.optionxform = str
    return p


def _check_keys(section, allowed, required=()):
    keys = set(section.keys())
    extra = keys - set(allowed)
    if extra:
        raise WaveFunctionFileError(f"[{section.name}]: unknown keys {sorted(extra)}")
    missing = set(required) - keys
    if missing:
        raise WaveFunctionFileError(f"[{section.name}]: missing keys {sorted(missing)}")


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise WaveFunctionFileError(f"not a boolean: {text!r}")


def _jastrow(cp, overrides=None):
    if not cp.has_section("jastrow") and not overrides:
        return None
    kw = {}
    if cp.has_section("jastrow"):
        sec = cp["jastrow"]
        _check_keys(sec, _JASTROW_KEYS)
        kw = {k: (_bool(v) if _JASTROW_KEYS[k] == "bool" else float(v)) for k, v in sec.items()}
    kw.update(overrides or {})
    return JastrowFactor(**kw)


def _orbitals(cp, Z):
    out = {}
    for name in cp.sections():
        if not name.startswith("orbital."):
            continue
        sec = cp[name]
        _check_keys(sec, {"type", "zeta", "offset"}, {"type", "zeta"})
        kind = sec["type"].strip()
        if kind not in KINDS:
            raise WaveFunctionFileError(f"[{name}]: unknown orbital type {kind!r}")
        zeta = float(sec["zeta"])
        coeffs = ()
        if kind == "2s":
            off = sec.get("offset", "cusp").strip()
            coeffs = (cusp_shift(Z, zeta) if off == "cusp" else float(off),)
        elif "offset" in sec:
            raise WaveFunctionFileError(f"[{name}]: only 2s orbitals take an offset")
        out[name.split(".", 1)[1]] = SlaterOrbital(kind, zeta, coeffs)
    return out


def _builder_args(sec):
    kw = {}
    for k, v in sec.items():
        if k in ("kind", "function", "name"):
            continue
        kw[k] = int(v) if k in _INT_ARGS else float(v)
    return kw


def parse_wavefunction(text: str, overrides: dict | None = None):
    """Build a wave function from file text.

    Args:
        overrides: builder arguments replacing those in the file (``kind = builder`` only)
            and Jastrow fields, which any kind accepts.

    Raises:
        WaveFunctionFileError: on unknown sections, keys or values.
    """
    overrides = dict(overrides or {})
    jastrow_over = {k: overrides.pop(k) for k in list(overrides) if k in _JASTROW_KEYS}
    builder_over = overrides
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise WaveFunctionFileError(str(exc)) from exc
    if not cp.has_section("wavefunction"):
        raise WaveFunctionFileError("missing [wavefunction] section")
    head = cp["wavefunction"]
    kind = head.get("kind", "").strip()
    allowed_sections = {"wavefunction", "jastrow"}
    if kind == "ci":
        _check_keys(head, {"kind", "Z", "spins", "name", "s_state"}, {"Z", "spins"})
        Z = int(head["Z"])
        spins = tuple(head["spins"].split())
        if any(s not in (UP, DOWN) for s in spins):
            raise WaveFunctionFileError(f"spins must be 'up' or 'down', got {spins}")
        orbs = _orbitals(cp, Z)
        terms = []
        for name in cp.sections():
            if name.startswith("orbital."):
                allowed_sections.add(name)
            if not name.startswith("term."):
                continue
            allowed_sections.add(name)
            sec = cp[name]
            _check_keys(sec, {"coefficient", "up", "down"}, {"up"})
            try:
                up = tuple(orbs[o] for o in sec["up"].split())
                down = tuple(orbs[o] for o in sec.get("down", "").split())
            except KeyError as exc:
                raise WaveFunctionFileError(f"[{name}]: unknown orbital {exc}") from None
            terms.append(DeterminantProduct(up, down, float(sec.get("coefficient", "1"))))
        if not terms:
            raise WaveFunctionFileError("a ci wave function needs at least one [term.*] section")
        try:
            wf = CIWaveFunction(terms, spins, Z, s_state=_bool(head.get("s_state", "true")), name=head.get("name", "ci"))
        except ValueError as exc:
            raise WaveFunctionFileError(str(exc)) from exc
    elif kind == "hylleraas":
        _check_keys(head, {"kind", "Z", "scheme", "name"}, {"Z", "scheme"})
        allowed_sections.add("expansion")
        if not cp.has_section("expansion"):
            raise WaveFunctionFileError("missing [expansion] section")
        sec = cp["expansion"]
        _check_keys(sec, {"n_electrons", "terms"}, {"n_electrons", "terms"})
        n = int(sec["n_electrons"])
        m = n + n * (n - 1) // 2
        rows = [line.split() for line in sec["terms"].strip().splitlines() if line.strip()]
        if any(len(r) != 1 + 2 * m for r in rows):
            raise WaveFunctionFileError(f"each expansion term needs {1 + 2 * m} numbers")
        table = np.array(rows, dtype=float)
        powers = table[:, 1:1 + m]
        if np.any(powers != np.round(powers)):
            raise WaveFunctionFileError("powers must be integers")
        scheme = head["scheme"].strip()
        if scheme not in SCHEMES:
            raise WaveFunctionFileError(f"unknown scheme {scheme!r}")
        try:
            exp = DistanceExpansion(table[:, 0], powers.astype(int), table[:, 1 + m:], n)
            wf = HylleraasWaveFunction(exp, scheme, int(head["Z"]), name=head.get("name", "hylleraas"))
        except ValueError as exc:
            raise WaveFunctionFileError(str(exc)) from exc
    elif kind == "builder":
        fn = head.get("function", "").strip()
        if fn not in BUILDERS:
            raise WaveFunctionFileError(f"unknown builder {fn!r}; choose from {sorted(BUILDERS)}")
        try:
            kw = _builder_args(head)
            kw.update(builder_over)
            wf = BUILDERS[fn](**kw)
        except (TypeError, ValueError) as exc:
            raise WaveFunctionFileError(f"builder {fn}: {exc}") from exc
        if "name" in head:
            wf.name = head["name"]
    else:
        raise WaveFunctionFileError(f"unknown wave-function kind {kind!r} (ci, hylleraas or builder)")
    if builder_over and kind != "builder":
        raise WaveFunctionFileError("only Jastrow parameters can be overridden outside builder files")
    extra = set(cp.sections()) - allowed_sections
    if extra:
        raise WaveFunctionFileError(f"unknown sections {sorted(extra)}")
    try:
        jas = _jastrow(cp, jastrow_over)
    except ValueError as exc:
        raise WaveFunctionFileError(str(exc)) from exc
    if jas is not None:
        wf = ProductWaveFunction(wf, jas, name=wf.name)
    return wf


def load_wavefunction(path, overrides: dict | None = None):
    with open(path, encoding="utf-8") as fh:
        return parse_wavefunction(fh.read(), overrides)


def shipped_path(name: str):
    """Path of one of the wave-function files bundled with the package."""
    if name not in SHIPPED:
        raise ValueError(f"no shipped wave function {name!r}; choose from {SHIPPED}")
    return resources.files("nodalqmc") / "data" / f"{name}.wf"


def load_shipped(name: str, overrides: dict | None = None):
    return parse_wavefunction(shipped_path(name).read_text(encoding="utf-8"), overrides)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def dump_wavefunction(wf) -> str:
    """Text for a :class:`CIWaveFunction` or :class:`HylleraasWaveFunction`, optionally times a Jastrow."""
    jas = None
    if isinstance(wf, ProductWaveFunction):
        if wf.extra:
            raise WaveFunctionFileError("only a plain Jastrow factor can be written")
        jas = wf.jastrow
        base = wf.base
    else:
        base = wf
    lines = ["[wavefunction]"]
    if isinstance(base, CIWaveFunction):
        lines += ["kind = ci", f"name = {base.name}", f"Z = {base.Z}", f"spins = {' '.join(base.spins)}",
                  f"s_state = {str(base.s_state).lower()}", ""]
        labels = {}
        for t in base.terms:
            for o in t.up_orbitals + t.down_orbitals:
                if o not in labels:
                    labels[o] = f"o{len(labels) + 1}"
                    lines += [f"[orbital.{labels[o]}]", f"type = {o.kind}", f"zeta = {_fmt(o.zeta)}"]
                    if o.kind == "2s":
                        lines.append(f"offset = {_fmt(o.coeffs[0])}")
                    lines.append("")
        for k, t in enumerate(base.terms, start=1):
            lines += [f"[term.{k}]", f"coefficient = {_fmt(t.coefficient)}",
                      f"up = {' '.join(labels[o] for o in t.up_orbitals)}"]
            if t.down_orbitals:
                lines.append(f"down = {' '.join(labels[o] for o in t.down_orbitals)}")
            lines.append("")
    elif isinstance(base, HylleraasWaveFunction):
        e = base.expansion
        lines += ["kind = hylleraas", f"name = {base.name}", f"Z = {base.Z}", f"scheme = {base.scheme}", "",
                  "[expansion]", f"n_electrons = {e.n_electrons}", "terms ="]
        for c, p, b in zip(e.coefficients, e.powers, e.exponents):
            lines.append("    " + " ".join([_fmt(c)] + [str(int(x)) for x in p] + [_fmt(x) for x in b]))
        lines.append("")
    else:
        raise WaveFunctionFileError(f"cannot write {type(base).__name__}")
    if jas is not None:
        lines += ["[jastrow]", f"b_parallel = {_fmt(jas.b_parallel)}", f"b_antiparallel = {_fmt(jas.b_antiparallel)}",
                  f"cusp = {str(jas.cusp).lower()}", f"en_k = {_fmt(jas.en_k)}", f"en_b = {_fmt(jas.en_b)}", ""]
    return "\n".join(lines)
