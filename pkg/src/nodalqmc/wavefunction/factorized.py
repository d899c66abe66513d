"""Guides of the form ``node(R) x positive symmetric factor``.

A closed-shell 1s/2s determinant factorises exactly as
``D(1s, 2s)(x, y) = -1s(x) 1s(y) (x - y) Q(x, y)`` where ``Q`` is the divided
difference of ``f = 2s/1s``.  ``Q > 0`` whenever ``f`` is increasing, so the
Hartree-Fock functions are a radial-difference polynomial times a positive
factor, and replacing the polynomial by any other node function gives a guide
whose zero set is exactly that node.
"""

from __future__ import annotations

import numpy as np

from .jastrow import JastrowFactor, ProductWaveFunction
from .orbitals import SlaterOrbital

_GL_S, _GL_W = np.polynomial.legendre.leggauss(40)
_GL_S = 0.5 * (_GL_S + 1.0)
_GL_W = 0.5 * _GL_W


class RadialPairFactor:
    """``prod_pairs n1^2 exp(-z1 (x+y)) Q(x, y) * prod_singles 1s(r)``, a function of the r_i only."""

    def __init__(self, orb_1s: SlaterOrbital, orb_2s: SlaterOrbital, pairs, singles=(), n_electrons=None):
        if orb_1s.kind != "1s" or orb_2s.kind != "2s":
            raise ValueError("need a 1s and a 2s orbital")
        z1, z2 = orb_1s.zeta, orb_2s.zeta
        self.z1 = z1
        self.n1 = orb_1s.norm
        self.K = orb_2s.norm / orb_1s.norm
        self.k = z1 - z2
        self.c = orb_2s.coeffs[0]
        if self.k < 0 or 1.0 - self.k * self.c < 0:
            raise ValueError("2s/1s is not increasing for these exponents; the factor would not be positive")
        self.pairs = tuple(pairs)
        self.singles = tuple(singles)
        used = [i for p in self.pairs for i in p] + list(self.singles)
        self.n_electrons = n_electrons or (max(used) + 1)

    def _fder(self, r, n):
        # n-th derivative of f = K (r - c) exp(k r), times exp(-z1 * anchor) applied by caller
        return self.K * (self.k**n * (r - self.c) + n * self.k ** (n - 1))

    def _block(self, x, y):
        s = _GL_S[None, :]
        w = _GL_W[None, :]
        z = x[:, None] + s * (y - x)[:, None]
        # exp(k z - z1 (x + y)) keeps the magnitudes bounded
        e = np.exp(self.k * z - self.z1 * (x + y)[:, None]) * self.n1**2
        f1 = self._fder(z, 1) * e
        f2 = self._fder(z, 2) * e
        f3 = self._fder(z, 3) * e
        Q = np.sum(w * f1, axis=1)
        Qx = np.sum(w * (1 - s) * f2, axis=1)
        Qy = np.sum(w * s * f2, axis=1)
        Qxx = np.sum(w * (1 - s) ** 2 * f3, axis=1)
        Qyy = np.sum(w * s**2 * f3, axis=1)
        a = self.z1
        # B = exp(-a (x+y)) Q, with the exponential already folded into Q.. terms
        B = Q
        Bx = Qx - a * Q
        By = Qy - a * Q
        Bxx = Qxx - 2 * a * Qx + a * a * Q
        Byy = Qyy - 2 * a * Qy + a * a * Q
        return B, Bx, By, Bxx, Byy

    def derivatives(self, pos):
        pos = np.asarray(pos, dtype=float)
        r = np.linalg.norm(pos, axis=-1)
        w, n = r.shape
        val = np.ones(w)
        d1 = np.zeros((w, n))  # d log P / d r_i
        d2 = np.zeros((w, n))  # (d^2 P / d r_i^2) / P
        for i, j in self.pairs:
            B, Bx, By, Bxx, Byy = self._block(r[:, i], r[:, j])
            val = val * B
            d1[:, i] = Bx / B
            d1[:, j] = By / B
            d2[:, i] = Bxx / B
            d2[:, j] = Byy / B
        for i in self.singles:
            val = val * self.n1 * np.exp(-self.z1 * r[:, i])
            d1[:, i] = -self.z1
            d2[:, i] = self.z1**2
        with np.errstate(divide="ignore", invalid="ignore"):
            rhat = np.nan_to_num(pos / r[..., None])
            lap = val * np.sum(d2 + 2.0 * d1 / r, axis=1)
        grad = (val[:, None] * d1)[..., None] * rhat
        return val, grad, lap

    def value(self, pos):
        return self.derivatives(pos)[0]


def node_guide(node, orb_1s: SlaterOrbital, orb_2s: SlaterOrbital, jastrow: JastrowFactor | None = None, Z=None, name=None) -> ProductWaveFunction:
    """Guide ``node(R) * P(R) [* J(R)]`` for a Li (up, down, up) or Be (up, up, down, down) node."""
    n = node.n_electrons
    if n == 4:
        factor = RadialPairFactor(orb_1s, orb_2s, pairs=[(0, 1), (2, 3)])
        Z = 4 if Z is None else Z
    elif n == 3:
        factor = RadialPairFactor(orb_1s, orb_2s, pairs=[(0, 2)], singles=[1])
        Z = 3 if Z is None else Z
    else:
        raise ValueError("node guides are defined for the Li and Be layouts")
    return ProductWaveFunction(node, jastrow=jastrow, extra=(factor,), spins=node.spins, Z=Z, s_state=True, name=name or f"{node.name}_guide")
