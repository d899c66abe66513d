"""Blocking error analysis and time-step extrapolation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

MIN_SERIES = 64


@dataclass(frozen=True)
class BlockingResult:
    mean: float
    error: float
    level: int
    n_blocks: int
    plateau: bool
    errors_by_level: np.ndarray = field(repr=False)


def blocking_error(series) -> BlockingResult:
    """Autocorrelation-aware standard error of the mean by pairwise blocking.

    The blocking level is chosen with the automated M-test of Jonsson (Phys.
    Rev. E 98, 043304): the first level whose remaining lag-1
    autocorrelations are consistent with zero at the 99% level.  ``plateau``
    is False when no level passes, in which case the largest-level error is
    returned.

    Raises:
        ValueError: for series shorter than 64 points.
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.size < MIN_SERIES:
        raise ValueError(f"blocking needs at least {MIN_SERIES} points, got {x.size}")
    mean = float(x.mean())
    levels_s, levels_g, levels_n = [], [], []
    y = x.copy()
    while y.size >= 2:
        n = y.size
        mu = y.mean()
        s = np.mean((y - mu) ** 2)
        g = np.sum((y[:-1] - mu) * (y[1:] - mu)) / n
        levels_s.append(s)
        levels_g.append(g)
        levels_n.append(n)
        if n % 2:
            y = y[:-1]
        y = 0.5 * (y[0::2] + y[1::2])
    s = np.array(levels_s)
    g = np.array(levels_g)
    n = np.array(levels_n, dtype=float)
    errors = np.sqrt(s / n)
    if s[0] == 0.0:
        return BlockingResult(mean, 0.0, 0, int(n[0]), True, errors)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(s > 0, n * (g / s) ** 2, 0.0)
    M = np.cumsum(terms[::-1])[::-1]
    d = len(s)
    q = stats.chi2.ppf(0.99, d - np.arange(d))
    level = None
    for k in range(d):
        if M[k] < q[k] and n[k] >= 8:
            level = k
            break
    plateau = level is not None
    if level is None:
        level = int(np.argmax(n < 8) - 1) if np.any(n < 8) else d - 1
        level = max(level, 0)
    return BlockingResult(mean, float(errors[level]), int(level), int(n[level]), plateau, errors)


@dataclass(frozen=True)
class EnergyEstimate:
    """Energy in hartree with a 1-sigma error bar."""

    mean: float
    error: float
    n_blocks: int = 0
    tau: float | None = None
    acceptance: float | None = None
    plateau: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def __str__(self):
        return format_energy(self.mean, self.error)

    def as_dict(self):
        return {"energy": self.mean, "error": self.error, "n_blocks": self.n_blocks, "tau": self.tau,
                "acceptance": self.acceptance, "plateau": self.plateau}


def format_energy(mean: float, error: float) -> str:
    """``-7.47803(5)`` style formatting."""
    if not error > 0:
        return f"{mean:.8f}"
    digits = max(0, -int(np.floor(np.log10(error))))
    scaled = int(round(error * 10**digits))
    if scaled >= 10 and digits > 0:
        digits -= 1
        scaled = int(round(error * 10**digits))
    return f"{mean:.{digits}f}({scaled})"


def timestep_extrapolate(estimates) -> EnergyEstimate:
    """Weighted straight-line fit ``E(tau) = E0 + k tau`` evaluated at ``tau = 0``.

    Args:
        estimates: iterable of ``(tau, EnergyEstimate)``.

    Raises:
        ValueError: with fewer than two distinct time steps.
    """
    pts = [(float(t), e) for t, e in estimates]
    taus = np.array([t for t, _ in pts])
    if len(np.unique(taus)) < 2:
        raise ValueError("time-step extrapolation needs at least two distinct time steps")
    E = np.array([e.mean for _, e in pts])
    err = np.array([e.error for _, e in pts])
    if np.all(err > 0):
        w = 1.0 / err**2
    else:
        w = np.ones_like(E)
    A = np.stack([np.ones_like(taus), taus], axis=1)
    cov = np.linalg.inv(A.T @ (w[:, None] * A))
    coef = cov @ (A.T @ (w * E))
    e0_err = float(np.sqrt(cov[0, 0])) if np.all(err > 0) else 0.0
    chi2 = float(np.sum(w * (E - A @ coef) ** 2)) if np.all(err > 0) else 0.0
    return EnergyEstimate(float(coef[0]), e0_err, tau=0.0,
                          extra={"slope": float(coef[1]), "slope_error": float(np.sqrt(cov[1, 1])) if np.all(err > 0) else 0.0,
                                 "chi2": chi2, "dof": len(E) - 2})
