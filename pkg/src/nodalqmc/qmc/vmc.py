"""Metropolis sampling of |psi|^2 and variational energies."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..configuration import random_positions
from ..rng import derive_rng
from ..wavefunction.base import local_quantities
from .stats import EnergyEstimate, blocking_error

logger = logging.getLogger(__name__)


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class VMCParams:
    n_steps: int = 2000
    step_size: float = 0.3
    burn_in: int = 200
    seed: int = 1
    n_walkers: int = 200
    measure_energy: bool = True
    record_stream: bool = False

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step size must be positive")
        if self.n_steps < 1 or self.n_walkers < 1 or self.burn_in < 0:
            raise ValueError("n_steps and n_walkers must be positive, burn_in non-negative")


@dataclass
class VMCResult:
    estimate: EnergyEstimate | None
    acceptance: float
    positions: np.ndarray
    energies: np.ndarray | None = None
    stream: np.ndarray | None = field(default=None, repr=False)
    variance: float | None = None


def batched(fn, pos, workers: int = 1):
    """Apply a walker-wise function over ``pos`` in ``workers`` contiguous chunks."""
    if workers <= 1 or len(pos) < 2 * workers:
        return fn(pos)
    chunks = np.array_split(pos, workers)
    with ThreadPoolExecutor(workers) as ex:
        parts = list(ex.map(fn, chunks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def initial_positions(wf, n_walkers: int, rng: np.random.Generator) -> np.ndarray:
    """Random start with radii on the scale of the outer shell; configurations with psi = 0 are redrawn."""
    n = wf.n_electrons
    scale = 1.5 if n > 2 else 1.0
    pos = random_positions(rng, n, scale, size=n_walkers)
    for _ in range(100):
        bad = ~(np.abs(wf.value(pos)) > 0)
        if not bad.any():
            break
        pos[bad] = random_positions(rng, n, scale, size=int(bad.sum()))
    return pos


def metropolis_sweep(wf, pos, psi, step_size, rng):
    """One all-electron symmetric Gaussian move per walker; returns new (pos, psi, accepted)."""
    prop = pos + step_size * rng.standard_normal(pos.shape)
    psi_new = wf.value(prop)
    u = rng.random(len(pos))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = (psi_new / psi) ** 2
    acc = (u < ratio) & np.isfinite(psi_new) & (psi_new != 0.0)
    pos = np.where(acc[:, None, None], prop, pos)
    psi = np.where(acc, psi_new, psi)
    return pos, psi, acc


def vmc_run(wf, params: VMCParams, init: np.ndarray | None = None, Z: float | None = None, workers: int = 1) -> VMCResult:
    """Sample ``|wf|^2`` with ``n_walkers`` independent Metropolis chains.

    Step ``t`` of every chain uses the generator derived from ``(seed, t)``.
    The energy is the average local energy; its error bar comes from blocking
    the per-step population averages.  ``record_stream`` keeps the sampled
    configurations, shape ``(n_steps, n_walkers, N, 3)``, for crossing scans.

    Raises:
        SamplingError: when no move is ever accepted.
    """
    rng0 = derive_rng(params.seed, "vmc-init")
    pos = initial_positions(wf, params.n_walkers, rng0) if init is None else np.array(init, dtype=float)
    psi = wf.value(pos)
    for t in range(params.burn_in):
        pos, psi, _ = metropolis_sweep(wf, pos, psi, params.step_size, derive_rng(params.seed, "vmc-burn", t))
    n_acc = 0
    energies = np.empty(params.n_steps) if params.measure_energy else None
    sq = np.empty(params.n_steps) if params.measure_energy else None
    stream = np.empty((params.n_steps,) + pos.shape) if params.record_stream else None
    for t in range(params.n_steps):
        pos, psi, acc = metropolis_sweep(wf, pos, psi, params.step_size, derive_rng(params.seed, "vmc", t))
        n_acc += int(acc.sum())
        if params.measure_energy:
            el = batched(lambda p: local_quantities(wf, p, Z)[3], pos, workers)
            energies[t] = el.mean()
            sq[t] = np.mean(el * el)
        if stream is not None:
            stream[t] = pos
    acceptance = n_acc / (params.n_steps * params.n_walkers)
    if n_acc == 0:
        raise SamplingError(f"no Metropolis move accepted with step size {params.step_size}")
    est = None
    variance = None
    if params.measure_energy:
        if params.n_steps >= 64:
            b = blocking_error(energies)
            est = EnergyEstimate(b.mean, b.error, b.n_blocks, acceptance=acceptance, plateau=b.plateau)
        else:
            est = EnergyEstimate(float(energies.mean()), float("nan"), 0, acceptance=acceptance, plateau=False)
        variance = float(np.mean(sq) - np.mean(energies) ** 2)
    logger.info("vmc %s: acceptance %.3f energy %s", getattr(wf, "name", "wf"), acceptance, est)
    return VMCResult(est, acceptance, pos, energies, stream, variance)
