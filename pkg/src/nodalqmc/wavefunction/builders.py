"""Ready-made trial functions for H-like ions, the He triplet, Li and Be."""

from __future__ import annotations

import numpy as np

from ..configuration import DOWN, UP
from .determinant import CIWaveFunction, DeterminantProduct
from .orbitals import SlaterOrbital, cusp_shift

LI_SPINS = (UP, DOWN, UP)
BE_SPINS = (UP, UP, DOWN, DOWN)


def orbital_1s(zeta: float) -> SlaterOrbital:
    return SlaterOrbital("1s", zeta)


def orbital_2s(zeta: float, Z: float, c: float | None = None) -> SlaterOrbital:
    return SlaterOrbital("2s", zeta, (cusp_shift(Z, zeta) if c is None else c,))


def build_hydrogenic(Z: int = 1, zeta: float | None = None) -> CIWaveFunction:
    """One electron in a 1s orbital; exact for ``zeta == Z``."""
    zeta = float(Z) if zeta is None else zeta
    return CIWaveFunction([DeterminantProduct((orbital_1s(zeta),), ())], (UP,), Z, name="hydrogenic")


def _check_exponents(*zetas):
    if any(not z > 0 for z in zetas):
        raise ValueError("orbital exponents must be positive")


def build_li_rhf(zeta_1s: float = 3.0, zeta_2s: float = 0.65, Z: int = 3, c_2s: float | None = None) -> CIWaveFunction:
    """``(1s(r1) 2s(r3) - 1s(r3) 2s(r1)) 1s(r2)``; electrons 1 and 3 are spin up.

    The 2s orbital is ``(r - c) exp(-zeta_2s r)`` with ``c`` from the nuclear
    cusp.  Adding any multiple of 1s to it leaves the determinant unchanged, and
    for ``zeta_2s <= zeta_1s <= Z`` the ratio 2s/1s is increasing, so the zero set
    is exactly ``r1 = r3``.
    """
    _check_exponents(zeta_1s, zeta_2s)
    s1, s2 = orbital_1s(zeta_1s), orbital_2s(zeta_2s, Z, c_2s)
    term = DeterminantProduct((s1, s2), (s1,))
    return CIWaveFunction([term], LI_SPINS, Z, name="li_rhf")


def build_be_hf(zeta_1s: float = 4.0, zeta_2s: float = 1.0, Z: int = 4, c_2s: float | None = None) -> CIWaveFunction:
    """``phi_1 = (1s)^2 (2s)^2`` as a product of an up and a down 2x2 determinant."""
    _check_exponents(zeta_1s, zeta_2s)
    s1, s2 = orbital_1s(zeta_1s), orbital_2s(zeta_2s, Z, c_2s)
    return CIWaveFunction([DeterminantProduct((s1, s2), (s1, s2))], BE_SPINS, Z, name="be_hf")


def be_two_config_terms(c2: float, zeta_1s: float, zeta_2s: float, zeta_2p: float, Z: int, c_2s=None):
    s1, s2 = orbital_1s(zeta_1s), orbital_2s(zeta_2s, Z, c_2s)
    terms = [DeterminantProduct((s1, s2), (s1, s2), 1.0)]
    for m in ("2p_x", "2p_y", "2p_z"):
        p = SlaterOrbital(m, zeta_2p)
        terms.append(DeterminantProduct((s1, p), (s1, p), c2 / np.sqrt(3.0)))
    return terms


def build_be_two_config(c2: float, zeta_1s: float = 4.0, zeta_2s: float = 1.0, zeta_2p: float = 1.0, Z: int = 4, c_2s: float | None = None) -> CIWaveFunction:
    """``phi_1 + c2 phi_2`` with ``phi_2 = 3^{-1/2} sum_m D_up(1s, 2p_m) D_down(1s, 2p_m)``.

    The m-summed p pair is what keeps the combination rotationally invariant.
    """
    if not abs(c2) < 1.0:
        raise ValueError("|c2| must be < 1 (c1 is fixed to 1)")
    _check_exponents(zeta_1s, zeta_2s, zeta_2p)
    return CIWaveFunction(be_two_config_terms(c2, zeta_1s, zeta_2s, zeta_2p, Z, c_2s), BE_SPINS, Z, name="be_two_config")


def build_be_phi2(zeta_1s: float = 4.0, zeta_2p: float = 1.0, Z: int = 4) -> CIWaveFunction:
    """The ``(1s)^2 (2p)^2`` configuration alone."""
    s1 = orbital_1s(zeta_1s)
    terms = [DeterminantProduct((s1, SlaterOrbital(m, zeta_2p)), (s1, SlaterOrbital(m, zeta_2p)), 1.0 / np.sqrt(3.0)) for m in ("2p_x", "2p_y", "2p_z")]
    return CIWaveFunction(terms, BE_SPINS, Z, name="be_phi2")
