"""Two-dimensional cross-sections of a wave function's sign through configuration space.

Electrons sit on fixed rays from the nucleus.  In ``radial_pairs`` mode the
two axes are ``t1 = r_a - r_b`` and ``t2 = r_c - r_d`` for two electron pairs,
each pair moving symmetrically about its midpoint radius.  In ``pair_distance``
mode (two electrons) the axes are ``t1 = r1 - r2`` and the separation ``r12``;
the angle between the two position vectors is solved from ``r12``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..wavefunction.base import WaveFunction, is_zero

MIN_RESOLUTION = 16
MODES = ("radial_pairs", "pair_distance")


def _unit_rows(a):
    a = np.asarray(a, dtype=float)
    n = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("ray directions must be nonzero")
    return a / n


@dataclass(frozen=True)
class CrossSectionSpec:
    """Frozen geometry plus the grid.

    Args:
        rays: one direction per electron (normalised on construction).  In
            ``pair_distance`` mode only ``rays[0]`` and the plane it spans with
            ``rays[1]`` are used.
        midpoints: mean radius of each scanned pair (bohr).
        t_range: half-width of the grid along t1 (and t2 in ``radial_pairs``).
        resolution: points per axis, at least 16.
        pairs: the two scanned electron pairs (``radial_pairs`` mode).
        radii: fixed radii of electrons outside both pairs.
        r12_range: ``(min, max)`` separation for ``pair_distance`` mode.
    """

    rays: np.ndarray
    midpoints: tuple[float, ...]
    t_range: float = 1.0
    resolution: int = 33
    mode: str = "radial_pairs"
    pairs: tuple = ((0, 1), (2, 3))
    radii: dict = field(default_factory=dict)
    r12_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown scan mode {self.mode!r}")
        if int(self.resolution) != self.resolution or self.resolution < MIN_RESOLUTION:
            raise ValueError(f"resolution must be an integer >= {MIN_RESOLUTION}")
        if not self.t_range > 0:
            raise ValueError("t_range must be positive (grids are symmetric about 0)")
        rays = _unit_rows(self.rays)
        rays.flags.writeable = False
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "midpoints", tuple(float(m) for m in self.midpoints))
        if self.mode == "radial_pairs":
            if len(self.pairs) != 2 or len(self.midpoints) != 2:
                raise ValueError("radial_pairs mode needs two pairs and two midpoints")
            used = {i for p in self.pairs for i in p}
            missing = set(range(len(rays))) - used - set(self.radii)
            if missing:
                raise ValueError(f"no radius given for frozen electrons {sorted(missing)}")
            if min(self.midpoints) <= self.t_range / 2:
                raise ValueError("midpoint radii must exceed t_range / 2 so all radii stay positive")
        else:
            if len(rays) != 2 or len(self.midpoints) != 1:
                raise ValueError("pair_distance mode needs two rays and one midpoint")
            if self.r12_range is None:
                raise ValueError("pair_distance mode needs r12_range")
            lo, hi = self.r12_range
            m = self.midpoints[0]
            if not (self.t_range <= lo < hi <= 2 * m - self.t_range / 2) or m <= self.t_range / 2:
                raise ValueError("r12_range must lie inside [t_range, 2 m - t_range/2] so every grid point is a triangle")

    @property
    def n_electrons(self) -> int:
        return len(self.rays)

    def axes(self):
        t1 = np.linspace(-self.t_range, self.t_range, self.resolution)
        if self.mode == "radial_pairs":
            t2 = t1.copy()
        else:
            t2 = np.linspace(self.r12_range[0], self.r12_range[1], self.resolution)
        return t1, t2

    def positions(self) -> np.ndarray:
        """Configurations for the whole grid, shape (n1 * n2, N, 3), row-major in (t1, t2)."""
        t1, t2 = self.axes()
        T1, T2 = np.meshgrid(t1, t2, indexing="ij")
        T1, T2 = T1.ravel(), T2.ravel()
        if self.mode == "radial_pairs":
            r = np.empty((T1.size, self.n_electrons))
            for i, rad in self.radii.items():
                r[:, int(i)] = rad
            (a, b), (c, d) = self.pairs
            m1, m2 = self.midpoints
            r[:, a], r[:, b] = m1 + T1 / 2, m1 - T1 / 2
            r[:, c], r[:, d] = m2 + T2 / 2, m2 - T2 / 2
            return r[..., None] * self.rays[None]
        m = self.midpoints[0]
        r1, r2 = m + T1 / 2, m - T1 / 2
        cos = np.clip((r1**2 + r2**2 - T2**2) / (2 * r1 * r2), -1.0, 1.0)
        sin = np.sqrt(1.0 - cos**2)
        e1 = self.rays[0]
        e2 = self.rays[1] - np.dot(self.rays[1], e1) * e1
        if np.linalg.norm(e2) < 1e-12:
            e2 = np.cross(e1, [1.0, 0.0, 0.0] if abs(e1[0]) < 0.9 else [0.0, 1.0, 0.0])
        e2 = e2 / np.linalg.norm(e2)
        pos = np.empty((T1.size, 2, 3))
        pos[:, 0] = r1[:, None] * e1
        pos[:, 1] = r2[:, None] * (cos[:, None] * e1 + sin[:, None] * e2)
        return pos


def random_spec(rng: np.random.Generator, n_electrons: int = 4, t_range: float = 0.8, resolution: int = 33,
                midpoint_range=(0.6, 2.0)) -> CrossSectionSpec:
    """Be-style spec with random rays and midpoints (a random frozen remainder)."""
    rays = rng.standard_normal((n_electrons, 3))
    mids = rng.uniform(*midpoint_range, size=2)
    mids = np.maximum(mids, 0.5 * t_range + 0.1)
    return CrossSectionSpec(rays, tuple(mids), t_range, resolution)


@dataclass
class CrossSection:
    spec: CrossSectionSpec
    t1: np.ndarray
    t2: np.ndarray
    values: np.ndarray
    signs: np.ndarray

    def rows(self):
        n1, n2 = len(self.t1), len(self.t2)
        for i in range(n1):
            for j in range(n2):
                yield self.t1[i], self.t2[j], int(self.signs[i, j]), self.values[i, j]

    def to_csv(self, handle=None) -> str:
        """CSV with header ``t1,t2,sign,value`` (17 significant digits)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t1", "t2", "sign", "value"])
        for a, b, s, v in self.rows():
            w.writerow([f"{a:.17g}", f"{b:.17g}", s, f"{v:.17g}"])
        text = buf.getvalue()
        if handle is not None:
            handle.write(text)
        return text

    def components(self, sign: int):
        """Connected components (4-neighbour) of grid points with the given sign."""
        return ndimage.label(self.signs == sign)

    def quadrant_connected(self, sign: int, window: int | None = None) -> bool:
        """True when the two origin-adjacent quadrants with ``sign`` share a component.

        Only the central ``window`` x ``window`` block is used when given.
        """
        s = self.signs
        n1, n2 = s.shape
        c1, c2 = n1 // 2, n2 // 2
        if window:
            h = window // 2
            s = s[c1 - h:c1 + h + 1, c2 - h:c2 + h + 1]
            c1, c2 = h, h
        labels, _ = ndimage.label(s == sign)
        q = {"pp": labels[c1 + 1:, c2 + 1:], "mm": labels[:c1, :c2], "pm": labels[c1 + 1:, :c2], "mp": labels[:c1, c2 + 1:]}
        for a, b in (("pp", "mm"), ("pm", "mp")):
            la = set(np.unique(q[a])) - {0}
            lb = set(np.unique(q[b])) - {0}
            if la & lb:
                return True
        return False


def scan_cross_section(wf, spec: CrossSectionSpec) -> CrossSection:
    """Evaluate ``wf`` on the grid; ``sign`` is 0 where ``|wf|`` is below the zero tolerance."""
    if wf.n_electrons != spec.n_electrons:
        raise ValueError(f"spec has {spec.n_electrons} electrons, wave function {wf.n_electrons}")
    pos = spec.positions()
    vals = np.asarray(wf.value(pos), dtype=float)
    sg = np.sign(vals).astype(int)
    nz = np.flatnonzero(sg)
    if nz.size and isinstance(wf, WaveFunction):
        sg[nz[is_zero(wf, pos[nz])]] = 0
    elif hasattr(wf, "sign"):
        sg = wf.sign(pos)
    t1, t2 = spec.axes()
    shape = (len(t1), len(t2))
    return CrossSection(spec, t1, t2, vals.reshape(shape), sg.reshape(shape))
