"""Chain rule for functions of the interparticle distances.

Distances are ordered ``r_1 .. r_N`` (electron-nucleus) followed by the pairs
``r_ij`` with ``i < j`` in row-major order, so for three electrons the list is
``(r1, r2, r3, r12, r13, r23)``.
"""

from __future__ import annotations

import numpy as np


def pair_list(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def distance_features(pos: np.ndarray):
    """Distances ``d`` (W, M), unit gradients ``U`` (W, M, N, 3) and ``sum_i lap_i d`` (W, M)."""
    w, n, _ = pos.shape
    pairs = pair_list(n)
    m = n + len(pairs)
    d = np.empty((w, m))
    U = np.zeros((w, m, n, 3))
    lapd = np.empty((w, m))
    r = np.sqrt(np.sum(pos * pos, axis=-1))
    d[:, :n] = r
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            U[:, i, i, :] = pos[:, i, :] / r[:, i, None]
        lapd[:, :n] = 2.0 / r
        for a, (i, j) in enumerate(pairs, start=n):
            diff = pos[:, i, :] - pos[:, j, :]
            rij = np.sqrt(np.sum(diff * diff, axis=-1))
            d[:, a] = rij
            u = diff / rij[:, None]
            U[:, a, i, :] = u
            U[:, a, j, :] = -u
            lapd[:, a] = 4.0 / rij
    return d, np.nan_to_num(U), lapd


def chain_rule(U: np.ndarray, lapd: np.ndarray, Fa: np.ndarray, Fab: np.ndarray):
    """Gradient (W, N, 3) and total Laplacian (W,) from first and second distance partials."""
    grad = np.sum(Fa[:, :, None, None] * U, axis=1)
    lap = np.sum(Fa * lapd, axis=1)
    gram = np.sum(U[:, :, None] * U[:, None, :], axis=(-1, -2))
    lap = lap + np.sum(Fab * gram, axis=(1, 2))
    return grad, lap
