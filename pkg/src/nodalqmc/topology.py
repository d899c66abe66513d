"""Counting nodal regions: permutation images, sign-constant paths and the rotation argument.

A nodal region is taken relative to a reference point R with psi(R) != 0.
Every spin-preserving permutation P maps R to an image PR with
``psi(PR) = parity(P) psi(R)``, so the even images share the sign of R and at
most ``#perms`` regions can exist.  Finding a path of constant sign from R to
an even image merges two of those candidate regions.  Failing to find one is
never a proof that none exists; counts are upper bounds with the evidence
attached.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .configuration import (
    BeReferencePoint,
    ElectronConfiguration,
    RotationPath,
    SpinPermutation,
    permute_positions,
    spin_preserving_permutations,
)
from .nodal.crossings import bisect_crossing
from .rng import derive_rng
from .wavefunction.base import ZERO_RTOL, is_zero, probe_scale

logger = logging.getLogger(__name__)

CONNECTED = "connected"
CROSSED = "crossed_node"
UNDETERMINED = "undetermined"
ROTATION_STEPS = 256
CONSTANCY_RTOL = 1e-10
CERTIFY_DEPTH = 12


@dataclass(frozen=True)
class ReferencePoint:
    configuration: ElectronConfiguration
    value: float
    valid: bool

    @classmethod
    def at(cls, wf, config: ElectronConfiguration) -> "ReferencePoint":
        wf.check_layout(config)
        v = float(wf.value(config.positions[None])[0])
        return cls(config, v, v != 0.0 and not is_zero(wf, config.positions))


@dataclass
class PathVerdict:
    """Outcome of testing one path for constant sign.

    ``ts`` and ``values`` are the sampled path parameters and wave-function
    values; ``waypoints`` the configurations defining a piecewise-linear path
    (empty for analytic paths).
    """

    outcome: str
    ts: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    min_abs: float
    crossing_t: float | None = None
    waypoints: list = field(default_factory=list, repr=False)
    kind: str = "linear"
    constant: bool | None = None
    max_deviation: float | None = None
    endpoint_error: float | None = None
    note: str = ""

    @property
    def connected(self) -> bool:
        return self.outcome == CONNECTED

    def as_dict(self, include_samples: bool = False) -> dict:
        out = {"outcome": self.outcome, "kind": self.kind, "min_abs_psi": self.min_abs, "crossing_t": self.crossing_t,
               "constant": self.constant, "max_relative_deviation": self.max_deviation,
               "endpoint_error": self.endpoint_error, "note": self.note,
               "waypoints": [np.asarray(w).tolist() for w in self.waypoints]}
        if include_samples:
            out["ts"] = np.asarray(self.ts).tolist()
            out["values"] = np.asarray(self.values).tolist()
        return out


def _judge(wf, positions, ts, sign0):
    """Verdict for sampled path points; bisects the first sign change if any."""
    vals = wf.value(positions)
    s = np.sign(vals).astype(int)
    zero = np.zeros(len(vals), dtype=bool)
    nz = np.flatnonzero(s)
    if nz.size:
        zero[nz] = is_zero(wf, positions[nz])
    s[zero] = 0
    bad = np.flatnonzero(s != sign0)
    min_abs = float(np.min(np.abs(vals)))
    if bad.size == 0:
        return CONNECTED, vals, min_abs, None
    k = int(bad[0])
    t_cross = float(ts[k])
    if s[k] != 0 and k > 0 and s[k - 1] != 0:
        rec = bisect_crossing(wf, positions[k - 1], positions[k])
        if rec is not None:
            t_cross = float(ts[k - 1] + rec.t * (ts[k] - ts[k - 1]))
    return CROSSED, vals, min_abs, t_cross


def certify_path(wf, positions, sign0, max_depth: int = CERTIFY_DEPTH):
    """Check that psi keeps ``sign0`` between the samples of a piecewise-linear path.

    On a straight piece with end values ``va, vb`` a zero is impossible when
    ``|va| + |vb|`` exceeds the largest slope along the piece.  The slope is
    estimated as twice the larger end derivative; pieces failing the test are
    bisected up to ``max_depth`` times.  This catches paths that graze the node
    or cross it twice between samples, which sampled signs alone miss.

    Returns:
        (certified, number of extra evaluations)
    """
    pending = [(positions[k], positions[k + 1], 0) for k in range(len(positions) - 1)]
    extra = 0
    while pending:
        a = np.array([p[0] for p in pending])
        b = np.array([p[1] for p in pending])
        depth = np.array([p[2] for p in pending])
        psi_a, grad_a, _ = wf.derivatives(a)
        psi_b, grad_b, _ = wf.derivatives(b)
        extra += 2 * len(pending)
        d = b - a
        slope = 2.0 * np.maximum(np.abs(np.sum(grad_a * d, axis=(1, 2))), np.abs(np.sum(grad_b * d, axis=(1, 2))))
        va, vb = sign0 * psi_a, sign0 * psi_b
        if np.any(va <= 0) or np.any(vb <= 0):
            return False, extra
        fail = va + vb <= slope
        if np.any(fail & (depth >= max_depth)):
            return False, extra
        pending = []
        for k in np.flatnonzero(fail):
            mid = 0.5 * (a[k] + b[k])
            pending += [(a[k], mid, depth[k] + 1), (mid, b[k], depth[k] + 1)]
    return True, extra


def rotation_path_test(wf, reference: BeReferencePoint, n_steps: int = ROTATION_STEPS) -> PathVerdict:
    """Follow the rigid 180 degree rotation of ``R* = (r1, -r1, r3, -r3)`` about its axis.

    The rotation carries R* onto ``P12 P34 R*``.  For an S-state function the
    value is constant along the way; ``max_deviation`` is the largest relative
    departure from ``psi(R*)`` and ``endpoint_error`` the largest coordinate
    difference between the path end and the permuted reference.
    """
    config = reference.config
    path = RotationPath(reference.axis, config, np.pi)
    ts = np.linspace(0.0, 1.0, n_steps + 1)
    pos = path.positions(ts)
    target = permute_positions(config.positions, SpinPermutation((1, 0, 3, 2)))
    endpoint_error = float(np.max(np.abs(pos[-1] - target)))
    v0 = float(wf.value(config.positions[None])[0])
    note = "r1 . r3 = 0: reference of the degenerate perpendicular form" if reference.perpendicular else ""
    if v0 == 0.0 or is_zero(wf, config.positions):
        vals = wf.value(pos)
        return PathVerdict(UNDETERMINED, ts, vals, float(np.min(np.abs(vals))), kind="rotation",
                           endpoint_error=endpoint_error, note=(note + "; " if note else "") + "psi(R*) = 0: invalid reference")
    outcome, vals, min_abs, t_cross = _judge(wf, pos, ts, int(np.sign(v0)))
    dev = float(np.max(np.abs(vals - v0)) / abs(v0))
    constant = dev <= CONSTANCY_RTOL if getattr(wf, "s_state", False) else None
    return PathVerdict(outcome, ts, vals, min_abs, t_cross, kind="rotation", constant=constant, max_deviation=dev,
                       endpoint_error=endpoint_error, note=note)


def kabsch_rotation(a: np.ndarray, b: np.ndarray):
    """Best proper rotation taking the rows of ``a`` onto ``b`` (about the origin) and its RMS residual."""
    rot, rssd = Rotation.align_vectors(b, a)
    return rot, float(rssd / np.sqrt(len(a)))


def _polyline(points: np.ndarray, per_segment: int):
    """Dense samples along a piecewise-linear path; returns (ts, positions)."""
    k = len(points) - 1
    s = np.linspace(0.0, 1.0, per_segment + 1)[:-1]
    seg = points[:-1, None] + s[None, :, None, None] * (points[1:] - points[:-1])[:, None]
    pos = np.concatenate([seg.reshape(-1, *points.shape[1:]), points[-1:]])
    ts = np.concatenate([(np.arange(k)[:, None] + s[None]).ravel(), [k]]) / k
    return ts, pos


def stochastic_path_search(wf, config_a, config_b, budget: int = 2000, n_waypoints: int = 6, per_segment: int = 24,
                           seed: int = 0, step: float = 0.3) -> PathVerdict:
    """Search for a path of constant sign between two configurations.

    Candidates, in order: the rigid rotation taking a onto b when one exists
    (RMS residual below 1e-8 bohr), the straight segment, then piecewise-linear
    paths whose interior waypoints are moved by simulated annealing on the
    smallest signed, scale-normalised psi along the path.  The annealing
    schedule does not depend on ``budget``, so a larger budget only extends the
    same search.  ``budget`` counts annealing moves.

    Raises:
        ValueError: if an endpoint is on the node or the endpoint signs differ.
    """
    a = np.asarray(getattr(config_a, "positions", config_a), dtype=float)
    b = np.asarray(getattr(config_b, "positions", config_b), dtype=float)
    va, vb = wf.value(np.stack([a, b]))
    if va == 0.0 or vb == 0.0 or np.any(is_zero(wf, np.stack([a, b]))):
        raise ValueError("path endpoints must not lie on the node")
    sign0 = int(np.sign(va))
    if np.sign(vb) != sign0:
        raise ValueError("endpoints have opposite signs; no sign-constant path can join them")
    if np.array_equal(a, b):
        return PathVerdict(CONNECTED, np.array([0.0]), np.array([va]), abs(float(va)), waypoints=[a], kind="trivial")

    rot, resid = kabsch_rotation(a, b)
    if resid < 1e-8:
        rv = rot.as_rotvec()
        angle = float(np.linalg.norm(rv))
        ts = np.linspace(0.0, 1.0, 4 * per_segment + 1)
        if angle > 0:
            rots = Rotation.from_rotvec(np.outer(ts, rv)).as_matrix()
            pos = np.einsum("tab,nb->tna", rots, a)
        else:
            pos = np.repeat(a[None], len(ts), axis=0)
        outcome, vals, min_abs, t_cross = _judge(wf, pos, ts, sign0)
        if outcome == CONNECTED:
            return PathVerdict(CONNECTED, ts, vals, min_abs, waypoints=[a, b], kind="rotation",
                               note=f"rigid rotation by {angle:.6g} rad")

    scale = float(np.mean(probe_scale(wf, np.stack([a, b]))))

    def score(points):
        ts, pos = _polyline(points, per_segment)
        vals = wf.value(pos) * sign0 / scale
        return float(vals.min()), ts, pos, vals

    points = np.linspace(0.0, 1.0, n_waypoints + 2)[:, None, None] * (b - a)[None] + a[None]
    best, ts, pos, vals = score(points)
    best_points = points.copy()
    current = best
    rng = derive_rng(seed, "path-search")
    temp0 = 0.05
    for k in range(budget):
        if best > ZERO_RTOL:
            break
        trial = points.copy()
        j = 1 + rng.integers(n_waypoints)
        width = step * max(0.995**k, 0.05)
        trial[j] += width * rng.standard_normal(a.shape)
        f, _, _, _ = score(trial)
        temp = temp0 * 0.99**k + 1e-12
        if f >= current or rng.random() < np.exp((f - current) / temp):
            points, current = trial, f
            if f > best:
                best, best_points = f, trial.copy()
    ts, pos = _polyline(best_points, per_segment)
    outcome, vals, min_abs, t_cross = _judge(wf, pos, ts, sign0)
    note = ""
    if outcome == CONNECTED and not certify_path(wf, pos, sign0)[0]:
        outcome = UNDETERMINED
        note = "best path grazes or tunnels through the node between samples; "
    if outcome != CONNECTED:
        outcome = UNDETERMINED
        note += f"no sign-constant path found within budget {budget}"
    return PathVerdict(outcome, ts, vals, min_abs, None, waypoints=list(best_points), kind="search", note=note)


@dataclass
class RegionCount:
    """Upper bound on the number of nodal regions with the evidence behind it."""

    count: int
    bound: int
    images: list
    evidence: list
    classes: list

    def as_dict(self) -> dict:
        return {"regions": self.count, "upper_bound": self.bound, "images": self.images,
                "evidence": self.evidence, "classes": self.classes,
                "note": "a missing path is not a proof of disconnection; the count is an upper bound"}


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)


def count_nodal_regions(wf, reference, path_strategy: str = "auto", budget: int = 2000, seed: int = 0,
                        rotation_steps: int = ROTATION_STEPS) -> RegionCount:
    """Upper bound on the number of nodal regions from connections between permutation images.

    Args:
        reference: a :class:`ReferencePoint`, an ``ElectronConfiguration`` or a
            :class:`BeReferencePoint`.  The rotation path is used for the
            ``P12 P34`` image of a Be reference point; everything else goes to
            :func:`stochastic_path_search`.
        path_strategy: ``auto``, ``rotation`` (analytic path only) or ``search``.

    Once R is joined to an even image PR, applying any permutation Q to that
    path joins QR to QPR, so the odd images pair up by symmetry.

    Raises:
        ValueError: for a reference with psi = 0.
    """
    if path_strategy not in ("auto", "rotation", "search"):
        raise ValueError(f"unknown path strategy {path_strategy!r}")
    be_ref = reference if isinstance(reference, BeReferencePoint) else None
    if be_ref is not None:
        reference = be_ref.config
    if isinstance(reference, ElectronConfiguration):
        reference = ReferencePoint.at(wf, reference)
    if not reference.valid:
        raise ValueError("invalid reference: psi vanishes at the reference point")
    config = reference.configuration
    perms = spin_preserving_permutations(config.spins)
    index = {p.mapping: i for i, p in enumerate(perms)}
    uf = _UnionFind(len(perms))
    images, evidence = [], []
    pos0 = config.positions
    for i, p in enumerate(perms):
        images.append({"mapping": list(p.mapping), "parity": p.parity,
                       "sign": int(np.sign(wf.value(permute_positions(pos0, p)[None])[0]))})
    for i, p in enumerate(perms):
        if i == 0 or p.parity < 0:
            continue
        target = permute_positions(pos0, p)
        verdict = None
        swap_pairs = p.mapping == (1, 0, 3, 2)
        if be_ref is not None and swap_pairs and path_strategy in ("auto", "rotation"):
            verdict = rotation_path_test(wf, be_ref, rotation_steps)
        if (verdict is None or not verdict.connected) and path_strategy in ("auto", "search"):
            searched = stochastic_path_search(wf, pos0, target, budget=budget, seed=seed + i)
            if verdict is None or searched.connected:
                verdict = searched
        if verdict is None:
            continue
        evidence.append({"from": list(perms[0].mapping), "to": list(p.mapping), **verdict.as_dict()})
        if verdict.connected:
            for q in perms:
                uf.union(index[q.mapping], index[q.compose(p).mapping])
    roots = {}
    for i in range(len(perms)):
        roots.setdefault(uf.find(i), []).append(list(perms[i].mapping))
    classes = list(roots.values())
    count = len(classes)
    logger.info("%s: %d nodal regions (bound %d)", getattr(wf, "name", "wf"), count, len(perms))
    return RegionCount(count, len(perms), images, evidence, classes)


@dataclass
class TilingReport:
    pairs_tested: int
    connected: int
    opposite_sign: int
    details: list

    @property
    def success_fraction(self) -> float:
        return self.connected / self.pairs_tested if self.pairs_tested else float("nan")

    def as_dict(self):
        return {"pairs_tested": self.pairs_tested, "connected": self.connected, "success_fraction": self.success_fraction,
                "opposite_sign_pairs": self.opposite_sign, "details": self.details}


def tiling_spot_check(wf, n_references: int = 10, budget: int = 1000, seed: int = 0, sampler=None) -> TilingReport:
    """Sampled check that same-sign points reach each other up to a permutation.

    Pairs of random references are drawn; for a same-sign pair (A, B) the
    images PB with the sign of A are tried in turn until one connects.
    Opposite-sign pairs are counted but never tested.
    """
    rng = derive_rng(seed, "tiling")
    n = wf.n_electrons
    perms = spin_preserving_permutations(wf.spins)
    tested = ok = opposite = 0
    details = []
    for k in range(n_references):
        while True:
            pos = sampler(rng, 2) if sampler is not None else rng.standard_normal((2, n, 3))
            if not np.any(is_zero(wf, pos)):
                break
        a, b = pos
        sa, sb = np.sign(wf.value(pos))
        if sa != sb:
            opposite += 1
            details.append({"pair": k, "outcome": "opposite_sign"})
            continue
        tested += 1
        found = None
        for p in perms:
            pb = permute_positions(b, p)
            if np.sign(wf.value(pb[None])[0]) != sa:
                continue
            v = stochastic_path_search(wf, a, pb, budget=budget, seed=seed + 1000 * k + len(details))
            if v.connected:
                found = p
                break
        ok += found is not None
        details.append({"pair": k, "outcome": CONNECTED if found else UNDETERMINED,
                        "image": list(found.mapping) if found else None})
    return TilingReport(tested, ok, opposite, details)
