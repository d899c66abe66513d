"""Deterministic Rayleigh-Ritz solver for antisymmetrised two-electron Hylleraas expansions.

All matrix elements reduce to integrals of ``r1^l r2^m r12^n exp(-A r1 - B r2)``,
which are evaluated exactly in perimetric coordinates
``r1 = (v + w)/2, r2 = (u + w)/2, r12 = (u + v)/2`` where ``u, v, w`` run
independently over ``[0, inf)``.  This gives a benchmark that shares no code
with the Monte Carlo path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg, optimize
from scipy.special import comb, gammaln

from ..wavefunction.hylleraas import build_he_triplet_hylleraas, he_triplet_terms

_FOUR_PI_SQ_OVER_2 = 2.0 * np.pi**2  # 8 pi^2 times the perimetric Jacobian 1/4


def _moments(p: float, nmax: int) -> np.ndarray:
    k = np.arange(nmax + 1)
    return np.exp(gammaln(k + 1) - (k + 1) * np.log(p))


@lru_cache(maxsize=None)
def _binom_row(n: int) -> np.ndarray:
    return comb(n, np.arange(n + 1), exact=False)


@lru_cache(maxsize=200_000)
def radial_integral(l: int, m: int, n: int, A: float, B: float) -> float:
    """``int d^3r1 d^3r2 r1^l r2^m r12^n exp(-A r1 - B r2)`` for ``l, m, n >= -1``."""
    L, M, N = l + 1, m + 1, n + 1
    if min(L, M, N) < 0:
        raise ValueError("integrand too singular")
    p, q, s = B / 2.0, A / 2.0, (A + B) / 2.0
    top = L + M + N
    U, V, W = _moments(p, top), _moments(q, top), _moments(s, top)
    cL, cM, cN = _binom_row(L), _binom_row(M), _binom_row(N)
    a = np.arange(L + 1)[:, None, None]  # v power from r1
    b = np.arange(M + 1)[None, :, None]  # u power from r2
    g = np.arange(N + 1)[None, None, :]  # u power from r12
    terms = cL[a] * cM[b] * cN[g] * U[b + g] * V[a + N - g] * W[(L - a) + (M - b)]
    return float(_FOUR_PI_SQ_OVER_2 * terms.sum() / 2.0 ** top)


# a primitive is (coef, i, j, k, a, b): coef r1^i r2^j r12^k exp(-a r1 - b r2)

def _primitives(powers, alpha, beta):
    """Direct and exchange primitives of each antisymmetrised basis function."""
    out = []
    for i, j, k in powers:
        out.append([(1.0, i, j, k, alpha, beta), (-1.0, j, i, k, beta, alpha)])
    return out


def _monomial_product(x, y):
    out = {}
    for kx, cx in x.items():
        for ky, cy in y.items():
            key = (kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2])
            out[key] = out.get(key, 0.0) + cx * cy
    return out


def _add(*dicts):
    out = {}
    for d in dicts:
        for k, v in d.items():
            out[k] = out.get(k, 0.0) + v
    return out


_GEO1 = {(1, 0, -1): 0.5, (-1, 2, -1): -0.5, (-1, 0, 1): 0.5}  # rhat1 . rhat12
_GEO2 = {(0, 1, -1): 0.5, (2, -1, -1): -0.5, (0, -1, 1): 0.5}  # rhat2 . rhat21


def _primitive_elements(P, Q, Z):
    """Overlap, kinetic and potential integrals between two primitives."""
    cp, i, j, k, a, b = P
    cq, i2, j2, k2, a2, b2 = Q
    base = (i + i2, j + j2, k + k2)
    A, B = a + a2, b + b2

    def integrate(mono):
        total = 0.0
        for (dl, dm, dn), c in mono.items():
            if c != 0.0:
                total += c * radial_integral(base[0] + dl, base[1] + dm, base[2] + dn, A, B)
        return total

    d1p = {(-1, 0, 0): float(i), (0, 0, 0): -a}
    d2p = {(0, -1, 0): float(j), (0, 0, 0): -b}
    d12p = {(0, 0, -1): float(k)}
    d1q = {(-1, 0, 0): float(i2), (0, 0, 0): -a2}
    d2q = {(0, -1, 0): float(j2), (0, 0, 0): -b2}
    d12q = {(0, 0, -1): float(k2)}
    grad1 = _add(_monomial_product(d1p, d1q), _monomial_product(d12p, d12q),
                 _monomial_product(_GEO1, _add(_monomial_product(d1p, d12q), _monomial_product(d12p, d1q))))
    grad2 = _add(_monomial_product(d2p, d2q), _monomial_product(d12p, d12q),
                 _monomial_product(_GEO2, _add(_monomial_product(d2p, d12q), _monomial_product(d12p, d2q))))
    s = integrate({(0, 0, 0): 1.0})
    t = 0.5 * integrate(_add(grad1, grad2))
    v = integrate({(-1, 0, 0): -Z, (0, -1, 0): -Z, (0, 0, -1): 1.0})
    c = cp * cq
    return c * s, c * t, c * v


def hamiltonian_matrices(powers, alpha: float, beta: float, Z: float = 2.0):
    """Overlap ``S`` and Hamiltonian ``H`` for the antisymmetrised basis."""
    prims = _primitives(powers, alpha, beta)
    n = len(prims)
    S = np.zeros((n, n))
    H = np.zeros((n, n))
    for p in range(n):
        for q in range(p, n):
            s_pq = h_pq = 0.0
            for P in prims[p]:
                for Q in prims[q]:
                    s, t, v = _primitive_elements(P, Q, Z)
                    s_pq += s
                    h_pq += t + v
            S[p, q] = S[q, p] = s_pq
            H[p, q] = H[q, p] = h_pq
    return S, H


def lowest_eigenpair(S, H, cutoff: float = 1e-12):
    """Lowest generalised eigenpair with canonical orthogonalisation of near-dependent directions."""
    d = np.sqrt(np.diag(S))
    Sn = S / np.outer(d, d)
    Hn = H / np.outer(d, d)
    w, V = linalg.eigh(Sn)
    keep = w > cutoff * w.max()
    X = V[:, keep] / np.sqrt(w[keep])
    e, C = linalg.eigh(X.T @ Hn @ X)
    c = X @ C[:, 0] / d
    return float(e[0]), c


@dataclass(frozen=True)
class RitzResult:
    energy: float
    alpha: float
    beta: float
    powers: tuple
    coefficients: np.ndarray

    def wavefunction(self):
        return build_he_triplet_hylleraas(len(self.powers), self.alpha, self.beta, coefficients=self.coefficients)


def ritz_energy(powers, alpha, beta, Z=2.0):
    S, H = hamiltonian_matrices(powers, alpha, beta, Z)
    return lowest_eigenpair(S, H)


def he_triplet_benchmark(n_terms: int = 35, alpha0: float = 2.0, beta0: float = 0.6, Z: float = 2.0, optimize_exponents: bool = True) -> RitzResult:
    """Variationally optimised antisymmetrised He 2^3S expansion.

    Linear coefficients come from the generalised eigenproblem; the two
    screening exponents are optimised by Nelder-Mead on the lowest eigenvalue.
    The overall sign is fixed so that ``psi / (r1 - r2) > 0``.
    """
    powers = tuple(he_triplet_terms(n_terms, distinct_exponents=True))
    if optimize_exponents:
        res = optimize.minimize(lambda x: ritz_energy(powers, x[0], x[1], Z)[0], [alpha0, beta0],
                                method="Nelder-Mead", options={"xatol": 1e-4, "fatol": 1e-10})
        alpha, beta = res.x
    else:
        alpha, beta = alpha0, beta0
    energy, c = ritz_energy(powers, alpha, beta, Z)
    result = RitzResult(energy, float(alpha), float(beta), powers, c)
    wf = result.wavefunction()
    probe = np.array([[[0.5, 0.0, 0.0], [0.0, 2.0, 0.0]]])
    if wf.value(probe)[0] / (0.5 - 2.0) < 0:
        result = RitzResult(energy, float(alpha), float(beta), powers, -c)
    return result
