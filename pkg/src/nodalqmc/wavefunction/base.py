"""Common interface for trial wave functions and the local-energy machinery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..configuration import ElectronConfiguration, electron_distances

ZERO_RTOL = 1e-10
PROBE_RADIUS = 0.1


class NodeError(ValueError):
    """Raised when a ratio such as grad(psi)/psi is requested at a node or a coalescence point."""


class WaveFunction:
    """Base class for real trial wave functions of a single atom.

    Subclasses implement :meth:`derivatives`, returning the unnormalised value
    ``psi``, the gradient ``grad psi`` with shape ``(W, N, 3)`` and the total
    Laplacian ``sum_i lap_i psi`` with shape ``(W,)`` for a batch of positions
    ``(W, N, 3)``.  No division by psi happens at this level, so evaluation on
    nodes is well defined.
    """

    spins: tuple[str, ...] = ()
    Z: int = 1
    s_state: bool = False
    name: str = "wavefunction"

    @property
    def n_electrons(self) -> int:
        return len(self.spins)

    def value(self, pos: np.ndarray) -> np.ndarray:
        return self.derivatives(pos)[0]

    def derivatives(self, pos: np.ndarray):
        raise NotImplementedError

    def check_layout(self, config: ElectronConfiguration):
        if tuple(config.spins) != tuple(self.spins):
            raise ValueError(f"{self.name}: expected spins {self.spins}, got {config.spins}")


def _batch(pos) -> tuple[np.ndarray, bool]:
    pos = np.asarray(pos, dtype=float)
    if pos.ndim == 2:
        return pos[None], True
    return pos, False


def evaluate(wf: WaveFunction, config: ElectronConfiguration) -> float:
    """Value of ``wf`` at one configuration."""
    wf.check_layout(config)
    return float(wf.value(config.positions[None])[0])


def evaluate_batch(wf: WaveFunction, pos) -> np.ndarray:
    pos, single = _batch(pos)
    v = wf.value(pos)
    return v[0] if single else v


@dataclass(frozen=True)
class Evaluation:
    """Value, drift ``grad psi / psi`` (flattened 3N vector), ``lap psi / psi`` and local energy."""

    value: float
    gradient: np.ndarray
    laplacian_over_psi: float
    local_energy: float


def potential_energy(pos: np.ndarray, Z: float) -> np.ndarray:
    """Coulomb potential of the clamped-nucleus atomic Hamiltonian for a batch of positions."""
    r, rij = electron_distances(pos)
    n = pos.shape[-2]
    v = -Z * np.sum(1.0 / r, axis=-1)
    iu, ju = np.triu_indices(n, 1)
    if len(iu):
        v = v + np.sum(1.0 / rij[..., iu, ju], axis=-1)
    return v


def local_quantities(wf: WaveFunction, pos: np.ndarray, Z: float | None = None):
    """Batched ``(psi, drift, lap_over_psi, local_energy)``.

    Entries at nodes or coalescence points come back as ``nan``/``inf``; callers
    decide what to do with them.
    """
    Z = wf.Z if Z is None else Z
    psi, grad, lap = wf.derivatives(pos)
    with np.errstate(divide="ignore", invalid="ignore"):
        drift = grad / psi[:, None, None]
        lap_over = lap / psi
        e_loc = -0.5 * lap_over + potential_energy(pos, Z)
    return psi, drift, lap_over, e_loc


def gradient_and_laplacian(wf: WaveFunction, config: ElectronConfiguration, Z: float | None = None) -> Evaluation:
    """Analytic derivatives at one configuration.

    Raises:
        NodeError: at an exact node, where the ratios are undefined.
    """
    wf.check_layout(config)
    Z = config.Z if Z is None else Z
    psi, drift, lap_over, e_loc = local_quantities(wf, config.positions[None], Z)
    if psi[0] == 0.0 or not np.isfinite(lap_over[0]):
        raise NodeError(f"{wf.name}: psi vanishes at this configuration, derivative ratios undefined")
    return Evaluation(float(psi[0]), drift[0].reshape(-1), float(lap_over[0]), float(e_loc[0]))


def local_energy(wf: WaveFunction, config: ElectronConfiguration, Z: float | None = None) -> float:
    """``E_L = -1/2 sum_i lap_i psi / psi + V`` in hartree.

    Raises:
        NodeError: on a node or when two particles coincide.
    """
    r, rij = electron_distances(config.positions)
    n = config.n_electrons
    if np.any(r == 0.0) or (n > 1 and np.any(rij[np.triu_indices(n, 1)] == 0.0)):
        raise NodeError("coalescence point: potential energy is singular")
    ev = gradient_and_laplacian(wf, config, Z)
    if not np.isfinite(ev.local_energy):
        raise NodeError("local energy is not finite at this configuration")
    return ev.local_energy


def probe_scale(wf: WaveFunction, pos: np.ndarray, radius: float = PROBE_RADIUS, n_probe: int = 64, seed: int = 0) -> np.ndarray:
    """Max ``|psi|`` over a deterministic probe ball around each configuration (batched)."""
    pos, single = _batch(pos)
    rng = np.random.default_rng(seed)
    n = pos.shape[1]
    d = rng.standard_normal((n_probe, n, 3))
    d *= radius * rng.random((n_probe, 1, 1)) ** (1.0 / (3 * n)) / np.linalg.norm(d.reshape(n_probe, -1), axis=1)[:, None, None]
    probes = pos[:, None] + d[None]
    vals = np.abs(wf.value(probes.reshape(-1, n, 3))).reshape(pos.shape[0], n_probe)
    scale = np.maximum(vals.max(axis=1), np.abs(wf.value(pos)))
    return scale[0] if single else scale


def is_zero(wf: WaveFunction, pos, rtol: float = ZERO_RTOL) -> np.ndarray | bool:
    """Scale-free zero test ``|psi| < rtol * (max |psi| over a 0.1 bohr ball)``."""
    pos_b, single = _batch(pos)
    val = np.abs(wf.value(pos_b))
    out = val <= rtol * probe_scale(wf, pos_b)
    return bool(out[0]) if single else out
