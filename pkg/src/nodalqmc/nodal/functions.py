"""Node functions: low-order polynomials in the distances whose sign defines a nodal partition."""

from __future__ import annotations

import numpy as np

from ..configuration import DOWN, UP, ElectronConfiguration

NODE_RTOL = 1e-12


def _radial_difference(pos, i, j):
    ri = np.linalg.norm(pos[:, i, :], axis=-1)
    rj = np.linalg.norm(pos[:, j, :], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        gi = np.nan_to_num(pos[:, i, :] / ri[:, None])
        gj = np.nan_to_num(pos[:, j, :] / rj[:, None])
        lap = 2.0 / ri - 2.0 / rj
    grad = np.zeros(pos.shape)
    grad[:, i] = gi
    grad[:, j] = -gj
    return ri - rj, grad, lap, ri + rj


class NodeFunction:
    """Base class.  ``derivatives`` returns (value, grad (W,N,3), total Laplacian)."""

    spins: tuple[str, ...] = ()
    name = "node"
    Z = None
    s_state = True

    @property
    def n_electrons(self):
        return len(self.spins)

    def value(self, pos):
        return self.derivatives(np.asarray(pos, dtype=float))[0]

    def derivatives(self, pos):
        raise NotImplementedError

    def scale(self, pos):
        """Natural magnitude of the node value, used for the zero test."""
        return np.ones(np.asarray(pos).shape[0])

    def sign(self, pos):
        pos = np.asarray(pos, dtype=float)
        v = self.value(pos)
        s = np.sign(v).astype(int)
        s[np.abs(v) <= NODE_RTOL * self.scale(pos)] = 0
        return s

    def check_layout(self, config: ElectronConfiguration):
        if tuple(config.spins) != tuple(self.spins):
            raise ValueError(f"{self.name}: expected spins {self.spins}, got {config.spins}")


class ExactTripletNode(NodeFunction):
    """``r1 - r2`` for the two like-spin electrons of a two-electron triplet."""

    name = "exact_triplet"

    def __init__(self, spins=(UP, UP), pair=(0, 1)):
        self.spins = tuple(spins)
        self.pair = pair

    def derivatives(self, pos):
        v, g, l, _ = _radial_difference(np.asarray(pos, dtype=float), *self.pair)
        return v, g, l

    def scale(self, pos):
        return _radial_difference(np.asarray(pos, dtype=float), *self.pair)[3]


class LiRHFNode(ExactTripletNode):
    """``r1 - r3``: the restricted Hartree-Fock node of lithium (electrons 1 and 3 are spin up)."""

    name = "li_rhf"

    def __init__(self):
        super().__init__(spins=(UP, DOWN, UP), pair=(0, 2))


class ConjecturedBeNode(NodeFunction):
    """``(r1 - r2)(r3 - r4) + a (r1vec - r2vec).(r3vec - r4vec)``; electrons 1,2 up and 3,4 down."""

    name = "conjectured_be"

    def __init__(self, a: float = 0.0):
        self.a = float(a)
        self.spins = (UP, UP, DOWN, DOWN)

    def derivatives(self, pos):
        pos = np.asarray(pos, dtype=float)
        t1, g1, l1, _ = _radial_difference(pos, 0, 1)
        t2, g2, l2, _ = _radial_difference(pos, 2, 3)
        val = t1 * t2
        grad = g1 * t2[:, None, None] + g2 * t1[:, None, None]
        lap = l1 * t2 + l2 * t1
        if self.a != 0.0:
            x12 = pos[:, 0] - pos[:, 1]
            x34 = pos[:, 2] - pos[:, 3]
            val = val + self.a * np.sum(x12 * x34, axis=-1)
            grad = grad.copy()
            grad[:, 0] += self.a * x34
            grad[:, 1] -= self.a * x34
            grad[:, 2] += self.a * x12
            grad[:, 3] -= self.a * x12
        return val, grad, lap

    def scale(self, pos):
        pos = np.asarray(pos, dtype=float)
        s = _radial_difference(pos, 0, 1)[3] * _radial_difference(pos, 2, 3)[3]
        if self.a != 0.0:
            s = s + abs(self.a) * np.linalg.norm(pos[:, 0] - pos[:, 1], axis=-1) * np.linalg.norm(pos[:, 2] - pos[:, 3], axis=-1)
        return s


class ProductNode(ConjecturedBeNode):
    """``(r1 - r2)(r3 - r4)``: the Hartree-Fock node of beryllium."""

    name = "product"

    def __init__(self):
        super().__init__(0.0)


class WaveFunctionSign(NodeFunction):
    """Sign of an attached trial function; its zero set is the trial node."""

    name = "wavefunction_sign"

    def __init__(self, wf):
        self.wf = wf
        self.spins = tuple(wf.spins)
        self.s_state = wf.s_state

    def value(self, pos):
        return self.wf.value(np.asarray(pos, dtype=float))

    def derivatives(self, pos):
        return self.wf.derivatives(pos)

    def sign(self, pos):
        from ..wavefunction.base import is_zero

        pos = np.asarray(pos, dtype=float)
        s = np.sign(self.value(pos)).astype(int)
        nz = np.flatnonzero(s)
        if nz.size:
            zero = is_zero(self.wf, pos[nz])
            s[nz[zero]] = 0
        return s


NODES = {
    "exact_triplet": ExactTripletNode,
    "li_rhf": LiRHFNode,
    "product": ProductNode,
    "conjectured_be": ConjecturedBeNode,
}


def make_node(kind: str, **params) -> NodeFunction:
    try:
        cls = NODES[kind]
    except KeyError:
        raise ValueError(f"unknown node {kind!r}; choose from {sorted(NODES)}") from None
    return cls(**params)
