"""Spin-factored determinant products and their linear (CI) combinations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..configuration import DOWN, UP
from .base import WaveFunction
from .orbitals import SlaterOrbital


@dataclass(frozen=True)
class DeterminantProduct:
    """``coefficient * D_up(up_orbitals) * D_down(down_orbitals)``."""

    up_orbitals: tuple[SlaterOrbital, ...]
    down_orbitals: tuple[SlaterOrbital, ...]
    coefficient: float = 1.0


def _cofactors(a: np.ndarray) -> np.ndarray:
    """Cofactor matrices ``C[..., i, j]`` of square matrices ``a[..., i, j]``; valid for singular ``a``."""
    n = a.shape[-1]
    if n == 1:
        return np.ones_like(a)
    if n == 2:
        c = np.empty_like(a)
        c[..., 0, 0] = a[..., 1, 1]
        c[..., 0, 1] = -a[..., 1, 0]
        c[..., 1, 0] = -a[..., 0, 1]
        c[..., 1, 1] = a[..., 0, 0]
        return c
    c = np.empty_like(a)
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[..., idx != i, :][..., :, idx != j]
            c[..., i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return c


def _det(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, 0]
    if n == 2:
        return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    return np.linalg.det(a)


def determinant_derivatives(values, grads, laps):
    """Determinant, per-electron gradient and total Laplacian.

    ``values[..., i, j]`` is orbital ``j`` at electron ``i``; ``grads`` adds a
    trailing axis of 3.  A determinant is linear in each electron's row, so the
    row-wise derivatives contract against cofactors exactly.
    """
    n = values.shape[-1]
    if n == 0:
        shape = values.shape[:-2]
        return np.ones(shape), np.zeros(shape + (0, 3)), np.zeros(shape)
    cof = _cofactors(values)
    det = _det(values)
    grad = np.sum(grads * cof[..., None], axis=-2)
    lap = np.sum(laps * cof, axis=(-1, -2))
    return det, grad, lap


class CIWaveFunction(WaveFunction):
    """Linear combination of spin-factored determinant products.

    Args:
        terms: the determinant products.
        spins: spin label for each electron slot; the k-th up electron fills row k
            of every up determinant.
        Z: nuclear charge used for local energies.
        s_state: whether the combination is known to be rotationally invariant.
    """

    def __init__(self, terms, spins, Z: int, s_state: bool = True, name: str = "ci"):
        self.terms = tuple(terms)
        self.spins = tuple(spins)
        self.Z = Z
        self.s_state = s_state
        self.name = name
        self.up_index = [i for i, s in enumerate(self.spins) if s == UP]
        self.down_index = [i for i, s in enumerate(self.spins) if s == DOWN]
        for t in self.terms:
            if len(t.up_orbitals) != len(self.up_index) or len(t.down_orbitals) != len(self.down_index):
                raise ValueError("determinants must be square: one orbital per electron of each spin")

    def _spin_block(self, pos, index, orbitals_of):
        cache = {}
        out = []
        sub = pos[:, index, :]
        for t in self.terms:
            orbs = orbitals_of(t)
            key = orbs
            if key not in cache:
                if not orbs:
                    cache[key] = determinant_derivatives(np.zeros(sub.shape[:1] + (0, 0)), None, None)
                else:
                    evals = [o.evaluate(sub) for o in orbs]
                    vals = np.stack([e[0] for e in evals], axis=-1)
                    grads = np.stack([e[1] for e in evals], axis=-2)
                    laps = np.stack([e[2] for e in evals], axis=-1)
                    cache[key] = determinant_derivatives(vals, grads, laps)
            out.append(cache[key])
        return out

    def derivatives(self, pos):
        pos = np.asarray(pos, dtype=float)
        up = self._spin_block(pos, self.up_index, lambda t: t.up_orbitals)
        dn = self._spin_block(pos, self.down_index, lambda t: t.down_orbitals)
        psi = np.zeros(pos.shape[0])
        grad = np.zeros(pos.shape)
        lap = np.zeros(pos.shape[0])
        for t, (du, gu, lu), (dd, gd, ld) in zip(self.terms, up, dn):
            c = t.coefficient
            psi += c * du * dd
            if self.up_index:
                grad[:, self.up_index, :] += (c * dd)[:, None, None] * gu
            if self.down_index:
                grad[:, self.down_index, :] += (c * du)[:, None, None] * gd
            lap += c * (lu * dd + du * ld)
        return psi, grad, lap
