"""Importance-sampled fixed-node diffusion Monte Carlo with branching.

The move is the usual drift-diffusion proposal followed by a Metropolis test
on the importance-sampled Green's function.  Any proposal whose end point has a
different node sign than its start is rejected, so walkers stay inside the
nodal pocket they were born in.  Branching uses the expected local energy of
the move and an effective time step, and the trial energy follows the
logarithm of the population.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..rng import derive_rng, derive_seed
from ..wavefunction.base import local_quantities
from .stats import EnergyEstimate, blocking_error, timestep_extrapolate
from .vmc import VMCParams, batched, vmc_run

logger = logging.getLogger(__name__)

DEFAULT_TAUS = (0.01, 0.005, 0.0025)


class PopulationError(RuntimeError):
    """Population collapsed or exploded beyond the allowed band."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class DMCParams:
    tau: float = 0.01
    target_population: int = 1000
    equilibration_steps: int = 2000
    measurement_steps: int = 20000
    et_update_period: int = 10
    seed: int = 1
    population_relaxation: int = 50
    population_bounds: tuple[float, float] = (0.25, 4.0)
    vmc_burn_in: int = 300
    vmc_step_size: float = 0.3

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("time step must be positive")
        if self.target_population < 100:
            raise ValueError("target population must be at least 100")
        if self.measurement_steps < 64:
            raise ValueError("need at least 64 measurement steps for blocking")
        if len(self.population_bounds) != 2 or not 0 < self.population_bounds[0] < 1 < self.population_bounds[1]:
            raise ValueError("population_bounds must be (lo, hi) with 0 < lo < 1 < hi")


@dataclass
class Walker:
    """Single-walker view: configuration, cached evaluation, weight and age."""

    positions: np.ndarray
    psi: float
    local_energy: float
    weight: float = 1.0
    age: int = 0


@dataclass
class DMCResult:
    estimate: EnergyEstimate
    energies: np.ndarray = field(repr=False)
    populations: np.ndarray = field(repr=False)
    tau_eff: float = 0.0
    acceptance: float = 0.0
    params: DMCParams | None = None
    node_rejections: int = 0

    def summary(self, **extra) -> dict:
        p = self.params
        out = {"tau": p.tau, "tau_eff": self.tau_eff, "population": p.target_population,
               "steps": p.measurement_steps, "energy": self.estimate.mean, "error": self.estimate.error,
               "acceptance": self.acceptance, "seed": p.seed, "node_rejections": self.node_rejections,
               "mean_population": float(np.mean(self.populations)), "plateau": self.estimate.plateau}
        out.update(extra)
        return out


def _limit_drift(v, tau, a=1.0):
    """Per-electron drift limiting near nodes (Umrigar-Nightingale-Runge form)."""
    v2 = np.sum(v * v, axis=-1, keepdims=True)
    x = a * v2 * tau
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(x > 1e-12, (np.sqrt(1.0 + 2.0 * x) - 1.0) / np.where(x > 1e-12, x, 1.0), 1.0)
    return v * f


class _State:
    __slots__ = ("pos", "psi", "drift", "el", "sign", "age")

    def __init__(self, pos, psi, drift, el, sign):
        self.pos, self.psi, self.drift, self.el, self.sign = pos, psi, drift, el, sign
        self.age = np.zeros(len(pos), dtype=int)

    def take(self, idx):
        s = _State(self.pos[idx], self.psi[idx], self.drift[idx], self.el[idx], self.sign[idx])
        s.age = self.age[idx]
        return s

    def walkers(self):
        return [Walker(self.pos[i], float(self.psi[i]), float(self.el[i]), 1.0, int(self.age[i])) for i in range(len(self.pos))]


def _node_sign(node, guide, pos, psi):
    if node is None:
        return np.sign(psi).astype(int)
    return node.sign(pos)


def dmc_fixed_node(guide, node=None, params: DMCParams = DMCParams(), init: np.ndarray | None = None,
                   workers: int = 1, Z: float | None = None) -> DMCResult:
    """Fixed-node DMC energy (mixed estimator) for the node of ``node`` (or of ``guide``).

    The guide provides the importance function ``|guide|`` and the local
    energy; the node function decides which moves cross the fixed-node
    boundary.  Random numbers for step ``t`` come from the generator keyed by
    ``(seed, t)`` and are drawn for the whole population in walker order, so
    the result does not depend on how evaluation is split across ``workers``.

    Raises:
        PopulationError: if the population leaves ``population_bounds`` times the target.
    """
    p = params
    tau = p.tau
    Z = guide.Z if Z is None else Z

    def evaluate(pos):
        psi, drift, _, el = batched(lambda x: local_quantities(guide, x, Z), pos, workers)
        return psi, drift, el

    if init is None:
        vp = VMCParams(n_steps=1, step_size=p.vmc_step_size, burn_in=p.vmc_burn_in,
                       seed=derive_seed(p.seed, "dmc-vmc"), n_walkers=p.target_population, measure_energy=False)
        init = vmc_run(guide, vp).positions
    pos = np.array(init, dtype=float)
    psi, drift, el = evaluate(pos)
    sign = _node_sign(node, guide, pos, psi)
    good = np.isfinite(el) & (psi != 0) & (sign != 0)
    if not good.all():
        pos, psi, drift, el, sign = pos[good], psi[good], drift[good], el[good], sign[good]
    state = _State(pos, psi, drift, el, sign)

    n_elec = pos.shape[1]
    e_cut = 0.2 * np.sqrt(n_elec / tau)
    e_ref = float(np.mean(el))
    e_trial = e_ref
    tau_eff = tau
    total = p.equilibration_steps + p.measurement_steps
    energies = np.empty(p.measurement_steps)
    weights = np.empty(p.measurement_steps)
    populations = np.empty(p.measurement_steps)
    acc_sum = acc_n = 0.0
    dr2_acc = dr2_prop = 0.0
    rejections = 0
    recent = []
    lo, hi = p.population_bounds

    for step in range(total):
        rng = derive_rng(p.seed, "dmc", step)
        w_count = len(state.pos)
        chi = rng.standard_normal(state.pos.shape)
        u_acc = rng.random(w_count)
        u_branch = rng.random(w_count)

        vbar = _limit_drift(state.drift, tau)
        prop = state.pos + tau * vbar + np.sqrt(tau) * chi
        psi_n, drift_n, el_n = evaluate(prop)
        sign_n = _node_sign(node, guide, prop, psi_n)
        valid = np.isfinite(el_n) & (psi_n != 0.0) & (sign_n != 0)
        crossed = valid & (sign_n != state.sign)
        rejections += int(crossed.sum())
        ok = valid & ~crossed

        vbar_n = _limit_drift(np.where(ok[:, None, None], drift_n, 0.0), tau)
        back = state.pos - prop - tau * vbar_n
        log_g = -np.sum(back * back, axis=(1, 2)) / (2 * tau) + 0.5 * np.sum(chi * chi, axis=(1, 2))
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            ratio = (psi_n / state.psi) ** 2 * np.exp(log_g)
        pacc = np.where(ok, np.minimum(1.0, np.nan_to_num(ratio, nan=0.0, posinf=1.0)), 0.0)
        accept = u_acc < pacc

        dr2 = np.sum((prop - state.pos) ** 2, axis=(1, 2))
        dr2_prop += float(np.sum(dr2))
        dr2_acc += float(np.sum(pacc * dr2))
        if dr2_prop > 0:
            tau_eff = tau * dr2_acc / dr2_prop
        acc_sum += float(pacc.sum())
        acc_n += w_count

        el_old = np.clip(state.el, e_ref - e_cut, e_ref + e_cut)
        el_new = np.clip(np.where(ok, el_n, state.el), e_ref - e_cut, e_ref + e_cut)
        s_mix = pacc * 0.5 * (el_old + el_new) + (1.0 - pacc) * el_old
        weight = np.exp(tau_eff * (e_trial - s_mix))
        e_expect = pacc * el_new + (1.0 - pacc) * el_old

        new_pos = np.where(accept[:, None, None], prop, state.pos)
        new_psi = np.where(accept, psi_n, state.psi)
        new_drift = np.where(accept[:, None, None], drift_n, state.drift)
        new_el = np.where(accept, el_n, state.el)
        state.age = np.where(accept, 0, state.age + 1)
        state.pos, state.psi, state.drift, state.el = new_pos, new_psi, new_drift, new_el

        w_sum = float(weight.sum())
        e_step = float(np.sum(weight * e_expect) / w_sum)
        if step >= p.equilibration_steps:
            k = step - p.equilibration_steps
            energies[k] = e_step
            weights[k] = w_sum
            populations[k] = w_count

        copies = np.floor(weight + u_branch).astype(int)
        state = state.take(np.repeat(np.arange(w_count), copies))
        n_new = len(state.pos)
        if not lo * p.target_population <= n_new <= hi * p.target_population:
            raise PopulationError(f"population {n_new} left the band around {p.target_population} at step {step}",
                                  {"step": step, "population": n_new, "e_trial": e_trial, "e_ref": e_ref, "tau": tau})

        recent.append(e_step)
        if (step + 1) % p.et_update_period == 0:
            if step < p.equilibration_steps:
                e_ref = float(np.mean(recent[-max(p.population_relaxation, p.et_update_period):]))
            else:
                k = step - p.equilibration_steps + 1
                e_ref = float(np.sum(energies[:k] * weights[:k]) / np.sum(weights[:k]))
            e_trial = e_ref - np.log(n_new / p.target_population) / (tau_eff * p.population_relaxation)
            recent = recent[-p.population_relaxation:]

    b = blocking_error(energies)
    mean = float(np.sum(energies * weights) / np.sum(weights))
    est = EnergyEstimate(mean, b.error, b.n_blocks, tau=tau, acceptance=acc_sum / acc_n, plateau=b.plateau,
                         extra={"tau_eff": tau_eff, "node_rejections": rejections})
    logger.info("dmc tau=%g: E=%s acc=%.4f pop=%.0f", tau, est, acc_sum / acc_n, populations.mean())
    return DMCResult(est, energies, populations, tau_eff, acc_sum / acc_n, p, rejections)


@dataclass
class LadderResult:
    runs: list
    extrapolated: EnergyEstimate

    def summary(self):
        return {"runs": [r.summary() for r in self.runs], "extrapolated": self.extrapolated.as_dict()}


def dmc_ladder(guide, node=None, params: DMCParams = DMCParams(), taus=DEFAULT_TAUS, workers: int = 1,
               scale_steps: bool = False) -> LadderResult:
    """Fixed-node runs at each time step plus the linear extrapolation to ``tau = 0``.

    Each run gets a seed derived from ``(seed, index)``.  With ``scale_steps``
    the step counts grow as ``tau_max / tau`` so every run covers the same
    imaginary time.
    """
    runs = []
    tmax = max(taus)
    for i, tau in enumerate(taus):
        f = tmax / tau if scale_steps else 1.0
        p = replace(params, tau=tau, seed=derive_seed(params.seed, "ladder", i),
                    measurement_steps=int(round(params.measurement_steps * f)),
                    equilibration_steps=int(round(params.equilibration_steps * f)))
        runs.append(dmc_fixed_node(guide, node, p, workers=workers))
    extrap = timestep_extrapolate([(r.params.tau, r.estimate) for r in runs])
    return LadderResult(runs, extrap)
