"""Normalised Slater-type orbitals (1s, 2s, 2p) with analytic gradient and Laplacian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("1s", "2s", "2p_x", "2p_y", "2p_z")
_P_AXIS = {"2p_x": 0, "2p_y": 1, "2p_z": 2}


def cusp_shift(Z: float, zeta: float) -> float:
    """Offset ``c`` making ``(r - c) exp(-zeta r)`` satisfy the electron-nucleus cusp."""
    if zeta >= Z:
        raise ValueError("the cusp-corrected 2s form needs zeta_2s < Z")
    return 1.0 / (Z - zeta)


@dataclass(frozen=True)
class SlaterOrbital:
    """One Slater-type orbital.

    ``1s``: ``exp(-zeta r)``; ``2s``: ``(r - c) exp(-zeta r)`` where ``c`` is
    ``coeffs[0]``; ``2p_m``: ``x_m exp(-zeta r)``, i.e. ``g(r) x_m`` with
    ``g > 0``.  All three are normalised to one.
    """

    kind: str
    zeta: float
    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown orbital kind {self.kind!r}")
        if not self.zeta > 0:
            raise ValueError("orbital exponent must be positive")
        if self.kind == "2s" and len(self.coeffs) != 1:
            raise ValueError("2s orbital needs exactly one radial coefficient (the offset c)")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def norm(self) -> float:
        z = self.zeta
        if self.kind == "1s":
            return np.sqrt(z**3 / np.pi)
        if self.kind == "2s":
            c = self.coeffs[0]
            a = 2.0 * z
            integral = 4.0 * np.pi * (24.0 / a**5 - 2.0 * c * 6.0 / a**4 + c * c * 2.0 / a**3)
            return 1.0 / np.sqrt(integral)
        return np.sqrt(z**5 / np.pi)

    def value(self, pos: np.ndarray) -> np.ndarray:
        return self.evaluate(pos)[0]

    def evaluate(self, pos: np.ndarray):
        """Value, gradient (..., 3) and Laplacian for positions of shape (..., 3)."""
        pos = np.asarray(pos, dtype=float)
        r = np.sqrt(np.sum(pos * pos, axis=-1))
        z = self.zeta
        e = self.norm * np.exp(-z * r)
        with np.errstate(divide="ignore", invalid="ignore"):
            rhat = pos / r[..., None]
            inv_r = 1.0 / r
        if self.kind == "1s":
            val = e
            grad = (-z * e)[..., None] * rhat
            lap = e * (z * z - 2.0 * z * inv_r)
        elif self.kind == "2s":
            c = self.coeffs[0]
            val = (r - c) * e
            d1 = e * (1.0 - z * (r - c))
            d2 = e * (-2.0 * z + z * z * (r - c))
            grad = d1[..., None] * rhat
            lap = d2 + 2.0 * d1 * inv_r
        else:
            m = _P_AXIS[self.kind]
            xm = pos[..., m]
            val = xm * e
            grad = (-z * xm * e)[..., None] * rhat
            grad[..., m] += e
            lap = xm * e * (z * z - 4.0 * z * inv_r)
        return val, np.nan_to_num(grad), lap
