"""Direct node optimisation: fixed-node DMC energy as a function of a node parameter."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from ..nodal.functions import ConjecturedBeNode
from ..qmc.dmc import DMCParams, PopulationError, dmc_fixed_node, dmc_ladder
from ..wavefunction.factorized import node_guide

logger = logging.getLogger(__name__)


@dataclass
class ScanResult:
    """Energies ``E(a)`` with error bars and the location of the minimum.

    ``significant`` is True when the lowest energy is below the runner-up by
    at least two combined standard deviations; otherwise the scan is flat
    within noise.
    """

    values: np.ndarray
    energies: np.ndarray
    errors: np.ndarray
    parameter: str = "a"
    runs: list = field(default_factory=list, repr=False)

    @property
    def argmin(self) -> float:
        return float(self.values[int(np.argmin(self.energies))])

    @property
    def separation(self) -> float:
        """Gap between the best and second-best energies in units of their combined error."""
        if len(self.energies) < 2:
            return float("nan")
        order = np.argsort(self.energies)
        i, j = order[0], order[1]
        err = np.hypot(self.errors[i], self.errors[j])
        gap = self.energies[j] - self.energies[i]
        return float(gap / err) if err > 0 else float("inf")

    @property
    def significant(self) -> bool:
        return bool(self.separation >= 2.0)

    def to_csv(self, handle=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.parameter, "energy", "error"])
        for v, e, s in zip(self.values, self.energies, self.errors):
            w.writerow([f"{v:.17g}", f"{e:.17g}", f"{s:.17g}"])
        text = buf.getvalue()
        if handle is not None:
            handle.write(text)
        return text

    def summary(self) -> dict:
        return {"parameter": self.parameter, "values": self.values.tolist(), "energies": self.energies.tolist(),
                "errors": self.errors.tolist(), "argmin": self.argmin, "separation_sigma": self.separation,
                "significant": self.significant,
                "verdict": "minimum separated by >= 2 sigma" if self.significant else "flat within noise"}


def be_node_guide_factory(orb_1s, orb_2s, jastrow=None, Z: int = 4):
    """Callable ``a -> (guide, node)`` with the factorised guide for ``ConjecturedBeNode(a)``."""

    def make(a):
        node = ConjecturedBeNode(a)
        return node_guide(node, orb_1s, orb_2s, jastrow, Z=Z), node

    return make


def scan_node_parameter(factory, a_values, params: DMCParams = DMCParams(), taus=None, refine: int = 0,
                        workers: int = 1) -> ScanResult:
    """Fixed-node DMC energy for each value of the node parameter.

    Every point runs with the same seed, so differences between neighbouring
    values are correlated.  With ``taus`` each point is a time-step ladder and
    the extrapolated energy is used.  ``refine`` extra rounds insert the
    midpoints next to the current minimum.

    Args:
        factory: ``a -> (guide, node)``, e.g. :func:`be_node_guide_factory`.

    Raises:
        ValueError: if ``a_values`` does not contain 0.
        PopulationError: from the DMC run, with the offending ``a`` in its diagnostics.
    """
    values = sorted(float(a) for a in a_values)
    if 0.0 not in values:
        raise ValueError("the scan must include a = 0 (the Hartree-Fock node)")
    results = {}

    def run(a):
        guide, node = factory(a)
        try:
            if taus:
                lad = dmc_ladder(guide, node, params, taus=taus, workers=workers)
                return lad.extrapolated, lad
            r = dmc_fixed_node(guide, node, params, workers=workers)
            return r.estimate, r
        except PopulationError as exc:
            exc.diagnostics["a"] = a
            raise PopulationError(f"DMC aborted at a = {a}: {exc}", exc.diagnostics) from exc

    for a in values:
        results[a] = run(a)
        logger.info("node scan a=%g: %s", a, results[a][0])
    for _ in range(refine):
        keys = sorted(results)
        best = min(keys, key=lambda k: results[k][0].mean)
        i = keys.index(best)
        for j in (i - 1, i + 1):
            if 0 <= j < len(keys):
                mid = 0.5 * (keys[i] + keys[j])
                if mid not in results:
                    results[mid] = run(mid)
    keys = sorted(results)
    return ScanResult(np.array(keys), np.array([results[k][0].mean for k in keys]),
                      np.array([results[k][0].error for k in keys]), runs=[results[k][1] for k in keys])
