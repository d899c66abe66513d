"""Variational optimisation of trial-function parameters from VMC samples.

Nonlinear parameters are optimised with Nelder-Mead on a correlated-sampling
estimate of the energy: one set of configurations is drawn from the current
best function and re-weighted for every trial point, so comparisons inside an
iteration are free of independent noise.  Linear coefficients of an
expansion can instead be obtained in one shot from the sampled generalised
eigenproblem (the linear method).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, optimize

from ..qmc.stats import EnergyEstimate
from ..qmc.vmc import VMCParams, vmc_run
from ..rng import derive_seed
from ..wavefunction.base import local_quantities

logger = logging.getLogger(__name__)

MAX_DIMENSION = 64
MAX_SAMPLES = 50_000


@dataclass(frozen=True)
class ParameterSpace:
    """Named parameters with finite bounds and a starting point."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    initial: tuple[float, ...]

    def __post_init__(self):
        n = len(self.names)
        if not 1 <= n <= MAX_DIMENSION:
            raise ValueError(f"parameter space dimension must be between 1 and {MAX_DIMENSION}")
        if not (len(self.lower) == len(self.upper) == len(self.initial) == n):
            raise ValueError("names, bounds and initial values must have equal length")
        lo, hi, x0 = (np.asarray(v, dtype=float) for v in (self.lower, self.upper, self.initial))
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds must be finite")
        if np.any(lo >= hi):
            raise ValueError("every lower bound must be below its upper bound")
        if np.any(x0 < lo) or np.any(x0 > hi):
            raise ValueError("initial point lies outside the bounds")

    @classmethod
    def from_dict(cls, spec: dict) -> "ParameterSpace":
        """``{name: (lower, upper, initial)}``."""
        names = tuple(spec)
        lo, hi, x0 = zip(*(spec[k] for k in names))
        return cls(names, lo, hi, x0)

    @property
    def bounds(self):
        return list(zip(self.lower, self.upper))

    def clip(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def as_dict(self, x) -> dict:
        return {k: float(v) for k, v in zip(self.names, x)}


@dataclass
class OptimizationResult:
    parameters: dict
    energy: EnergyEstimate | None
    history: list = field(default_factory=list)
    improved: bool = True
    iterations: int = 0

    def as_dict(self):
        return {"parameters": self.parameters, "energy": None if self.energy is None else self.energy.as_dict(),
                "improved": self.improved, "iterations": self.iterations, "history": self.history}


def reweighted_energy(wf_new, wf_ref, pos, psi_ref=None) -> float:
    """Correlated-sampling energy of ``wf_new`` from configurations distributed as ``|wf_ref|^2``."""
    psi_ref = wf_ref.value(pos) if psi_ref is None else psi_ref
    psi, _, _, el = local_quantities(wf_new, pos)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        w = (psi / psi_ref) ** 2
    ok = np.isfinite(el) & np.isfinite(w)
    w, el = w[ok], el[ok]
    if w.sum() <= 0:
        return np.inf
    # guard against a handful of samples carrying all the weight
    ess = w.sum() ** 2 / np.sum(w * w)
    if ess < 0.1 * len(w):
        return np.inf
    return float(np.sum(w * el) / np.sum(w))


def _samples(wf, params: VMCParams, seed, max_samples: int = MAX_SAMPLES):
    p = replace(params, seed=seed, measure_energy=False, record_stream=True)
    res = vmc_run(wf, p)
    thin = max(1, -(-p.n_steps * p.n_walkers // max_samples))
    return res.stream[::thin].reshape(-1, *res.positions.shape[1:]), res.positions


def optimize_variational(family, space: ParameterSpace, vmc: VMCParams = VMCParams(n_steps=400, n_walkers=200),
                         n_iterations: int = 4, maxfev: int = 200, final_steps: int | None = None,
                         max_samples: int = MAX_SAMPLES) -> OptimizationResult:
    """Minimise the VMC energy of ``family(**params)`` over ``space``.

    Each outer iteration draws fresh samples from the current best function
    and runs a bounded Nelder-Mead on the re-weighted energy.  A move is kept
    only when its re-weighted energy beats the current point on the same
    samples, so the best-so-far objective never increases.  ``improved`` is
    False when no iteration found a better point.

    Args:
        family: callable taking the parameters as keyword arguments and
            returning a wave function.
        vmc: sampling parameters; ``seed`` is the base of the per-iteration seeds.
        final_steps: if given, a fresh VMC run of this length reports the
            final energy with an error bar.
        max_samples: the recorded walk is thinned to at most this many
            configurations per iteration.
    """
    x = space.clip(space.initial)
    history = []
    improved = False
    for it in range(n_iterations):
        wf0 = family(**space.as_dict(x))
        pos, _ = _samples(wf0, vmc, derive_seed(vmc.seed, "opt", it), max_samples)
        psi0 = wf0.value(pos)
        e0 = reweighted_energy(wf0, wf0, pos, psi0)

        def objective(y):
            y = space.clip(y)
            try:
                return reweighted_energy(family(**space.as_dict(y)), wf0, pos, psi0)
            except ValueError:
                return np.inf

        res = optimize.minimize(objective, x, method="Nelder-Mead", bounds=space.bounds,
                                options={"maxfev": maxfev, "xatol": 1e-4, "fatol": 1e-7})
        y = space.clip(res.x)
        e1 = objective(y)
        accepted = e1 < e0
        history.append({"iteration": it, "start": space.as_dict(x), "start_energy": e0,
                        "proposal": space.as_dict(y), "proposal_energy": e1, "accepted": bool(accepted)})
        logger.info("opt iteration %d: %.6f -> %.6f (%s)", it, e0, e1, "kept" if accepted else "rejected")
        if accepted:
            x = y
            improved = True
    estimate = None
    if final_steps:
        p = replace(vmc, n_steps=final_steps, seed=derive_seed(vmc.seed, "opt-final"), record_stream=False, measure_energy=True)
        estimate = vmc_run(family(**space.as_dict(x)), p).estimate
    return OptimizationResult(space.as_dict(x), estimate, history, improved, n_iterations)


def linear_method(wf, vmc: VMCParams = VMCParams(n_steps=1000, n_walkers=200), shift: float = 1e-3,
                  n_iterations: int = 1, seed_label: str = "linear"):
    """Optimise the linear coefficients of an expansion wave function.

    ``wf`` must provide ``with_coefficients`` and ``expansion.coefficients``.
    Samples from ``|wf|^2`` give the overlap and (non-symmetric) Hamiltonian
    matrices in the space of basis functions; the lowest eigenvector of the
    generalised problem becomes the new coefficient vector.

    Returns:
        (new wave function, sampled lowest eigenvalue).
    """
    e_low = np.nan
    for it in range(n_iterations):
        pos, _ = _samples(wf, vmc, derive_seed(vmc.seed, seed_label, it))
        c = np.asarray(wf.expansion.coefficients, dtype=float)
        n = len(c)
        psi = wf.value(pos)
        phi = np.empty((len(pos), n))
        hphi = np.empty((len(pos), n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            b = wf.with_coefficients(e)
            v, _, _, el = local_quantities(b, pos)
            phi[:, k] = v / psi
            hphi[:, k] = np.where(v != 0.0, el * v, 0.0) / psi
        ok = np.all(np.isfinite(phi), axis=1) & np.all(np.isfinite(hphi), axis=1)
        phi, hphi = phi[ok], hphi[ok]
        S = phi.T @ phi / len(phi)
        H = phi.T @ hphi / len(phi)
        d = np.sqrt(np.diag(S))
        S = S / np.outer(d, d)
        H = H / np.outer(d, d)
        H = H + shift * np.eye(n)
        w, V = linalg.eig(H, S)
        real = np.abs(w.imag) < 1e-8 * np.maximum(1.0, np.abs(w.real))
        idx = np.flatnonzero(real)
        best = idx[np.argmin(w.real[idx])]
        e_low = float(w.real[best]) - shift
        new = V[:, best].real / d
        # keep the sign convention of the start vector
        if np.dot(new, c) < 0:
            new = -new
        new = new / np.max(np.abs(new))
        wf = wf.with_coefficients(new)
        logger.info("linear method iteration %d: lowest eigenvalue %.6f", it, e_low)
    return wf, e_low
