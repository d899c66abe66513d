"""Electron configurations, distance tables, spin-preserving permutations and rotations.

Everything here works in the clamped-nucleus frame: one nucleus of charge Z at the
origin, atomic units (bohr) throughout.  Batched helpers accept arrays shaped
``(..., n_electrons, 3)`` so the Monte Carlo code can reuse them on whole walker
populations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

UP = "up"
DOWN = "down"
_AXIS_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ElectronConfiguration:
    """Positions of N electrons around a nucleus of charge ``Z`` at the origin.

    Args:
        positions: ``(N, 3)`` array of electron coordinates in bohr.
        spins: per-electron spin label, ``"up"`` or ``"down"``.
        Z: nuclear charge.
    """

    positions: np.ndarray
    spins: tuple[str, ...]
    Z: int = 1

    def __post_init__(self):
        pos = _frozen(self.positions)
        if pos.ndim == 1 and pos.size == 3:
            pos = _frozen(pos.reshape(1, 3))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError(f"positions must have shape (N, 3) with N >= 1, got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        spins = tuple(self.spins)
        if len(spins) != pos.shape[0]:
            raise ValueError("one spin label per electron is required")
        if any(s not in (UP, DOWN) for s in spins):
            raise ValueError(f"spin labels must be 'up' or 'down', got {spins}")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "spins", spins)

    @property
    def n_electrons(self) -> int:
        return self.positions.shape[0]

    @property
    def R(self) -> np.ndarray:
        """The flattened point in R^3N."""
        return self.positions.reshape(-1)

    def with_positions(self, positions) -> "ElectronConfiguration":
        return ElectronConfiguration(positions, self.spins, self.Z)

    def distances(self) -> "DistanceTable":
        return interparticle_distances(self)


@dataclass(frozen=True)
class DistanceTable:
    """Nucleus-electron distances ``r[i]`` and the symmetric electron-electron table ``rij``."""

    r: np.ndarray
    rij: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.r))
        object.__setattr__(self, "rij", _frozen(self.rij))


def electron_distances(pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched distances: returns ``r`` of shape (..., N) and ``rij`` of shape (..., N, N)."""
    pos = np.asarray(pos, dtype=float)
    r = np.sqrt(np.sum(pos * pos, axis=-1))
    diff = pos[..., :, None, :] - pos[..., None, :, :]
    rij = np.sqrt(np.sum(diff * diff, axis=-1))
    return r, rij


def interparticle_distances(config: ElectronConfiguration) -> DistanceTable:
    """Distance table of a configuration. Coincident electrons give ``rij == 0``."""
    r, rij = electron_distances(config.positions)
    return DistanceTable(r, rij)


@dataclass(frozen=True)
class SpinPermutation:
    """A permutation of electron labels; ``mapping[k]`` is the electron moved into slot ``k``."""

    mapping: tuple[int, ...]
    parity: int = field(init=False)

    def __post_init__(self):
        m = tuple(int(i) for i in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"not a bijection on electron indices: {m}")
        object.__setattr__(self, "mapping", m)
        object.__setattr__(self, "parity", permutation_parity(m))

    @classmethod
    def identity(cls, n: int) -> "SpinPermutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "SpinPermutation":
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return cls(tuple(m))

    def compose(self, other: "SpinPermutation") -> "SpinPermutation":
        """Permutation equivalent to applying ``other`` first, then ``self``."""
        return SpinPermutation(tuple(other.mapping[k] for k in self.mapping))

    def preserves(self, spins) -> bool:
        return all(spins[k] == spins[src] for k, src in enumerate(self.mapping))

    def __len__(self):
        return len(self.mapping)


def permutation_parity(mapping) -> int:
    seen = [False] * len(mapping)
    parity = 1
    for start in range(len(mapping)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = mapping[k]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def spin_preserving_permutations(spins) -> list[SpinPermutation]:
    """All permutations that only exchange like-spin electrons, identity first."""
    n = len(spins)
    groups = [[i for i in range(n) if spins[i] == s] for s in (UP, DOWN)]
    perms = []
    for up_img in itertools.permutations(groups[0]):
        for dn_img in itertools.permutations(groups[1]):
            m = list(range(n))
            for src, dst in zip(groups[0], up_img):
                m[src] = dst
            for src, dst in zip(groups[1], dn_img):
                m[src] = dst
            perms.append(SpinPermutation(tuple(m)))
    return perms


def permute_positions(pos: np.ndarray, perm: SpinPermutation) -> np.ndarray:
    return np.asarray(pos)[..., list(perm.mapping), :]


def apply_permutation(config: ElectronConfiguration, perm: SpinPermutation) -> ElectronConfiguration:
    """Permute electron positions; the spin label of every slot is left unchanged.

    Raises:
        ValueError: if ``perm`` would move an electron into a slot of the other spin.
    """
    if len(perm) != config.n_electrons:
        raise ValueError("permutation size does not match electron count")
    if not perm.preserves(config.spins):
        raise ValueError(f"permutation {perm.mapping} mixes spins {config.spins}")
    return config.with_positions(permute_positions(config.positions, perm))


def _check_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float).reshape(3)
    if abs(np.linalg.norm(axis) - 1.0) > _AXIS_TOL:
        raise ValueError(f"rotation axis must have unit norm, |axis| = {np.linalg.norm(axis)!r}")
    return axis


def rotation_matrix(axis, angle: float) -> np.ndarray:
    axis = _check_axis(axis)
    return Rotation.from_rotvec(float(angle) * axis).as_matrix()


def rotate_positions(pos: np.ndarray, axis, angle: float) -> np.ndarray:
    m = rotation_matrix(axis, angle)
    return np.asarray(pos, dtype=float) @ m.T


def rotate_all(config: ElectronConfiguration, axis, angle: float) -> ElectronConfiguration:
    """Rotate every electron by ``angle`` radians about ``axis`` through the nucleus."""
    return config.with_positions(rotate_positions(config.positions, axis, angle))


@dataclass(frozen=True)
class RotationPath:
    """Rigid rotation of all electrons: ``t`` in [0, 1] maps to a rotation by ``t * total_angle``."""

    axis: np.ndarray
    start: ElectronConfiguration
    total_angle: float = np.pi

    def __post_init__(self):
        object.__setattr__(self, "axis", _frozen(_check_axis(self.axis)))
        if not 0.0 <= self.total_angle <= np.pi:
            raise ValueError("total_angle must lie in [0, pi]")

    def __call__(self, t: float) -> ElectronConfiguration:
        return rotate_all(self.start, self.axis, t * self.total_angle)

    def positions(self, ts) -> np.ndarray:
        """Batched path positions, shape ``(len(ts), N, 3)``."""
        ts = np.asarray(ts, dtype=float)
        rots = Rotation.from_rotvec(np.outer(ts * self.total_angle, self.axis)).as_matrix()
        return np.einsum("tab,nb->tna", rots, self.start.positions)


@dataclass(frozen=True)
class BeReferencePoint:
    config: ElectronConfiguration
    perpendicular: bool
    parallel: bool
    axis: np.ndarray


def _perpendicular_unit(v: np.ndarray) -> np.ndarray:
    trial = np.eye(3)[np.argmin(np.abs(v))]
    w = np.cross(v, trial)
    return w / np.linalg.norm(w)


def make_be_reference_point(r1, r3, Z: int = 4, tol: float = 1e-12) -> BeReferencePoint:
    """Build ``R* = (r1, -r1, r3, -r3)`` (up, up, down, down) and its rotation axis.

    ``axis`` is ``r1 x r3`` normalised; when the vectors are parallel any axis
    perpendicular to ``r1`` is returned instead.
    """
    r1 = np.asarray(r1, dtype=float).reshape(3)
    r3 = np.asarray(r3, dtype=float).reshape(3)
    n1, n3 = np.linalg.norm(r1), np.linalg.norm(r3)
    if n1 == 0.0 or n3 == 0.0:
        raise ValueError("r1 and r3 must be non-zero")
    config = ElectronConfiguration(np.array([r1, -r1, r3, -r3]), (UP, UP, DOWN, DOWN), Z)
    cross = np.cross(r1, r3)
    parallel = np.linalg.norm(cross) <= tol * n1 * n3
    perpendicular = abs(np.dot(r1, r3)) <= tol * n1 * n3
    axis = _perpendicular_unit(r1) if parallel else cross / np.linalg.norm(cross)
    return BeReferencePoint(config, bool(perpendicular), bool(parallel), _frozen(axis))


def random_positions(rng: np.random.Generator, n_electrons: int, scale: float = 1.0, size=None) -> np.ndarray:
    """Exponentially distributed radii with isotropic directions; handy for property tests."""
    shape = (n_electrons,) if size is None else (size, n_electrons)
    direction = rng.standard_normal(shape + (3,))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    radius = rng.exponential(scale, shape)
    return direction * radius[..., None]
