"""Symmetric positive correlation factors and products of wave-function factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import WaveFunction
from .distfun import distance_features, pair_list


@dataclass(frozen=True)
class JastrowFactor:
    """``J = exp(sum_{i<j} a r_ij / (1 + b r_ij) + sum_i k r_i^2 / (1 + g r_i))``.

    ``a`` is fixed by the electron-electron cusp (1/2 for antiparallel, 1/4 for
    parallel spins) when ``cusp`` is true; ``b_parallel`` and ``b_antiparallel``
    control the range.  The optional one-body term (``en_k``, ``en_b``) has zero
    slope at the nucleus, so the orbital cusp survives; at large r it acts like
    a shift of the orbital exponents.  J > 0 everywhere and is symmetric under
    exchange of like-spin electrons, so it never moves a node.
    """

    b_parallel: float = 1.0
    b_antiparallel: float = 1.0
    cusp: bool = True
    en_k: float = 0.0
    en_b: float = 1.0

    def __post_init__(self):
        if not (self.b_parallel > 0 and self.b_antiparallel > 0 and self.en_b > 0):
            raise ValueError("Jastrow range parameters must be positive")

    def coefficients(self, spins):
        pairs = pair_list(len(spins))
        if not self.cusp:
            return pairs, np.zeros(len(pairs)), np.zeros(len(pairs))
        a = np.array([0.25 if spins[i] == spins[j] else 0.5 for i, j in pairs])
        b = np.array([self.b_parallel if spins[i] == spins[j] else self.b_antiparallel for i, j in pairs])
        return pairs, a, b

    def log_derivatives(self, pos: np.ndarray, spins):
        """``u = log J``, ``grad u`` (W, N, 3) and ``lap u`` (W,)."""
        pos = np.asarray(pos, dtype=float)
        n = len(spins)
        pairs, a, b = self.coefficients(spins)
        d, U, lapd = distance_features(pos)
        rij = d[:, n:]
        den = 1.0 + b * rij
        u = np.sum(a * rij / den, axis=1)
        u1 = a / den**2
        u2 = -2.0 * a * b / den**3
        grad = np.sum(u1[:, :, None, None] * U[:, n:], axis=1)
        # each pair distance has |grad_i r_ij|^2 = 1 for both electrons
        lap = np.sum(u1 * lapd[:, n:] + 2.0 * u2, axis=1)
        if self.en_k != 0.0:
            r = d[:, :n]
            den = 1.0 + self.en_b * r
            k, g = self.en_k, self.en_b
            u = u + np.sum(k * r * r / den, axis=1)
            v1 = k * r * (2.0 + g * r) / den**2
            v2 = 2.0 * k / den**3
            grad = grad + np.einsum("wi,wixk->wxk", v1, U[:, :n])
            lap = lap + np.sum(v1 * lapd[:, :n] + v2, axis=1)
        return u, grad, lap

    def value(self, pos, spins):
        return np.exp(self.log_derivatives(pos, spins)[0])


class ProductWaveFunction(WaveFunction):
    """Product of a wave function (or node function) with positive symmetric factors.

    ``base`` supplies ``derivatives``; ``jastrow`` is an optional
    :class:`JastrowFactor`; ``extra`` factors are objects with a
    ``derivatives(pos)`` method returning (value, grad, lap).
    """

    def __init__(self, base, jastrow: JastrowFactor | None = None, extra=(), spins=None, Z=None, s_state=None, name=None):
        self.base = base
        self.jastrow = jastrow
        self.extra = tuple(extra)
        self.spins = tuple(spins if spins is not None else base.spins)
        self.Z = Z if Z is not None else base.Z
        self.s_state = s_state if s_state is not None else getattr(base, "s_state", False)
        self.name = name or f"{getattr(base, 'name', 'base')}*J"

    def _factors(self, pos):
        out = [self.base.derivatives(pos)]
        for f in self.extra:
            out.append(f.derivatives(pos))
        if self.jastrow is not None:
            u, gu, lu = self.jastrow.log_derivatives(pos, self.spins)
            j = np.exp(u)
            out.append((j, j[:, None, None] * gu, j * (lu + np.sum(gu * gu, axis=(1, 2)))))
        return out

    def derivatives(self, pos):
        factors = self._factors(np.asarray(pos, dtype=float))
        return product_rule(factors)

    def value(self, pos):
        pos = np.asarray(pos, dtype=float)
        v = self.base.value(pos)
        for f in self.extra:
            v = v * f.value(pos)
        if self.jastrow is not None:
            v = v * self.jastrow.value(pos, self.spins)
        return v


def product_rule(factors):
    """Value, gradient and Laplacian of a product from per-factor (value, grad, lap)."""
    vals = [f[0] for f in factors]
    psi = np.prod(vals, axis=0)
    grad = np.zeros_like(factors[0][1])
    lap = np.zeros_like(psi)
    k = len(factors)
    for i in range(k):
        others = np.prod([vals[m] for m in range(k) if m != i], axis=0) if k > 1 else 1.0
        grad = grad + factors[i][1] * np.asarray(others)[..., None, None]
        lap = lap + factors[i][2] * others
        for j in range(i + 1, k):
            rest = np.prod([vals[m] for m in range(k) if m not in (i, j)], axis=0) if k > 2 else 1.0
            lap = lap + 2.0 * np.sum(factors[i][1] * factors[j][1], axis=(1, 2)) * rest
    return psi, grad, lap


def with_jastrow(wf: WaveFunction, jastrow: JastrowFactor | None = None) -> ProductWaveFunction:
    return ProductWaveFunction(wf, jastrow or JastrowFactor())
