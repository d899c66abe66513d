"""Sign queries, bisection of node crossings along segments, and crossing statistics."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..configuration import ElectronConfiguration
from ..wavefunction.base import NodeError, WaveFunction, is_zero
from .functions import NodeFunction, WaveFunctionSign

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
COINCIDENCE_RADIUS = 1e-3


def as_node(f) -> NodeFunction:
    """Wrap a wave function so that it answers ``sign`` like a node function."""
    if isinstance(f, NodeFunction):
        return f
    if isinstance(f, WaveFunction):
        return WaveFunctionSign(f)
    raise TypeError(f"expected a NodeFunction or WaveFunction, got {type(f).__name__}")


def _positions(config, spins=None):
    if isinstance(config, ElectronConfiguration):
        return config.positions
    return np.asarray(config, dtype=float)


def node_sign(f, config) -> int:
    """Sign (+1, -1 or 0) of a node function or wave function at one configuration.

    Raises:
        ValueError: if the configuration's spin layout does not match.
    """
    node = as_node(f)
    if isinstance(config, ElectronConfiguration):
        node.check_layout(config)
    pos = _positions(config)
    if pos.shape != (node.n_electrons, 3):
        raise ValueError(f"{node.name}: expected {node.n_electrons} electrons, got shape {pos.shape}")
    return int(node.sign(pos[None])[0])


def signs(f, pos: np.ndarray) -> np.ndarray:
    """Batched signs, shape (W,)."""
    return as_node(f).sign(np.asarray(pos, dtype=float))


@dataclass(frozen=True)
class CrossingRecord:
    """A located sign change of ``f`` on the straight segment ``start -> end``.

    ``t`` is the crossing parameter in (0, 1); ``bracket`` the final
    bisection interval.  ``coincidence`` maps node names to whether that node
    also crosses at the same place (filled by :func:`crossing_coincidence`).
    """

    start: np.ndarray
    end: np.ndarray
    t: float
    configuration: np.ndarray
    bracket: tuple[float, float]
    value: float
    coincidence: dict = field(default_factory=dict)
    walker: int | None = None
    step: int | None = None

    @property
    def segment_length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def as_dict(self) -> dict:
        return {
            "walker": self.walker,
            "step": self.step,
            "t": self.t,
            "bracket": list(self.bracket),
            "value": self.value,
            "segment_length": self.segment_length,
            "start": self.start.tolist(),
            "end": self.end.tolist(),
            "crossing": self.configuration.tolist(),
            "coincidence": dict(self.coincidence),
        }


def bisect_crossing(f, config_a, config_b, tol: float = DEFAULT_TOL, max_iter: int = 200) -> CrossingRecord | None:
    """Locate a sign change of ``f`` on the segment between two configurations.

    Bisection stops once the bracket is shorter than ``tol`` bohr in the full
    3N-dimensional configuration space.  Segments whose endpoints share a
    sign return None, so an even number of crossings goes unnoticed.

    Raises:
        NodeError: if either endpoint lies on the node.
    """
    node = as_node(f)
    a = _positions(config_a)
    b = _positions(config_b)
    sa, sb = node.sign(np.stack([a, b]))
    if sa == 0 or sb == 0:
        raise NodeError("segment endpoint lies on the node")
    if sa == sb:
        return None
    length = float(np.linalg.norm(b - a))
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        if (hi - lo) * length <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        x = a + mid * (b - a)
        v = float(node.value(x[None])[0])
        if v == 0.0:
            lo = hi = mid
            break
        if np.sign(v) == sa:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    x = a + t * (b - a)
    return CrossingRecord(a.copy(), b.copy(), t, x, (lo, hi), float(node.value(x[None])[0]))


@dataclass
class PositivityReport:
    n_samples: int
    n_used: int
    fraction_positive: float
    worst_violation: float

    def as_dict(self):
        return dict(self.__dict__)


CHUNK = 4096


def factorization_positivity(wf, node: NodeFunction, n_samples: int = 10000, sampler=None, seed: int = 0) -> PositivityReport:
    """Fraction of samples where ``wf / node > 0``.

    ``sampler(rng, n)`` returns positions of shape (n, N, 3); by default
    electrons are drawn from a Gaussian cloud of width 1.5 bohr.  Samples
    where either function is zero are skipped.  ``worst_violation`` is the most
    negative ratio divided by the median absolute ratio (0 when none).
    """
    rng = np.random.default_rng(seed)
    if sampler is None:
        pos = 1.5 * rng.standard_normal((n_samples, node.n_electrons, 3))
    else:
        pos = np.asarray(sampler(rng, n_samples), dtype=float)
    chunks = range(0, len(pos), CHUNK)
    psi = np.concatenate([wf.value(pos[i:i + CHUNK]) for i in chunks])
    nv = np.concatenate([node.value(pos[i:i + CHUNK]) for i in chunks])
    ok = (np.concatenate([node.sign(pos[i:i + CHUNK]) for i in chunks]) != 0) & (psi != 0.0)
    # only apparent violations can be numerical zeros worth discarding
    if isinstance(wf, WaveFunction):
        bad = np.flatnonzero(ok & (psi * nv < 0))
        if bad.size:
            ok[bad[is_zero(wf, pos[bad])]] = False
    ratio = psi[ok] / nv[ok]
    if ratio.size == 0:
        return PositivityReport(len(pos), 0, float("nan"), 0.0)
    frac = float(np.mean(ratio > 0))
    scale = float(np.median(np.abs(ratio)))
    worst = float(min(0.0, ratio.min() / scale)) if scale > 0 else 0.0
    return PositivityReport(len(pos), int(ratio.size), frac, worst)


@dataclass
class CoincidenceReport:
    n_segments: int
    total: int
    coincident: int
    non_coincident: int
    node_only: int
    records: list = field(default_factory=list, repr=False)

    @property
    def fraction(self) -> float:
        return self.non_coincident / self.total if self.total else 0.0

    def summary(self) -> dict:
        return {"segments": self.n_segments, "total_crossings": self.total, "coincident": self.coincident,
                "non_coincident": self.non_coincident, "non_coincident_fraction": self.fraction,
                "node_only_crossings": self.node_only}

    def to_jsonl(self, handle):
        for rec in self.records:
            handle.write(json.dumps(rec.as_dict()) + "\n")


def _chain_crossings(wf_node, node, chain, walker, tol, radius):
    """Crossings along one walker's ordered samples (T, N, 3)."""
    sw = wf_node.sign(chain)
    sn = node.sign(chain)
    records = []
    coincident = node_only = 0
    moved = np.any(chain[1:] != chain[:-1], axis=(1, 2))
    for k in np.flatnonzero(moved):
        flip_wf = sw[k] != sw[k + 1] and sw[k] != 0 and sw[k + 1] != 0
        flip_node = sn[k] != sn[k + 1] and sn[k] != 0 and sn[k + 1] != 0
        if not flip_wf:
            node_only += int(flip_node)
            continue
        rec = bisect_crossing(wf_node, chain[k], chain[k + 1], tol)
        hit = False
        distance = None
        if flip_node:
            other = bisect_crossing(node, chain[k], chain[k + 1], tol)
            distance = abs(other.t - rec.t) * rec.segment_length
            hit = distance <= radius
        rec.coincidence[node.name] = hit
        rec.coincidence["distance"] = distance
        rec = CrossingRecord(rec.start, rec.end, rec.t, rec.configuration, rec.bracket, rec.value,
                             rec.coincidence, walker, int(k))
        if hit:
            coincident += 1
        else:
            records.append(rec)
    return int(np.sum(sw[1:] * sw[:-1] < 0)), coincident, node_only, records


def crossing_coincidence(wf, node: NodeFunction, walk: np.ndarray, radius: float = COINCIDENCE_RADIUS,
                         tol: float = DEFAULT_TOL, workers: int = 1) -> CoincidenceReport:
    """Compare the crossings of ``wf``'s node with those of ``node`` along a random walk.

    Args:
        walk: ordered samples, shape (T, N, 3) for one chain or (T, W, N, 3)
            for W independent chains (as recorded by ``vmc_run``).
        radius: two crossings on the same segment coincide when the bisected
            points are within this distance (bohr, configuration space).

    Only the non-coincident crossings are kept as full records.
    """
    walk = np.asarray(walk, dtype=float)
    if walk.ndim == 3:
        walk = walk[:, None]
    n_steps, n_chains = walk.shape[:2]
    wf_node = as_node(wf)

    def run(w):
        return _chain_crossings(wf_node, node, walk[:, w], w, tol, radius)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, range(n_chains)))
    else:
        parts = [run(w) for w in range(n_chains)]
    total = sum(p[0] for p in parts)
    coincident = sum(p[1] for p in parts)
    node_only = sum(p[2] for p in parts)
    records = [r for p in parts for r in p[3]]
    report = CoincidenceReport((n_steps - 1) * n_chains, total, coincident, total - coincident, node_only, records)
    logger.info("crossings: %d total, %d non-coincident over %d segments", total, report.non_coincident, report.n_segments)
    return report
