"""Explicitly correlated (Hylleraas-type) expansions and their antisymmetrisation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..configuration import SpinPermutation, UP, DOWN, permute_positions
from .base import WaveFunction
from .distfun import chain_rule, distance_features, pair_list

# (sign, slot mapping) pairs.  f evaluated on the permuted positions.
HE_TRIPLET_SCHEME = ((1, (0, 1)), (-1, (1, 0)))
LI_2S_SCHEME = ((1, (0, 1, 2)), (1, (1, 0, 2)), (-1, (2, 1, 0)), (-1, (1, 2, 0)))

SCHEMES = {"pairwise": HE_TRIPLET_SCHEME, "li_2s": LI_2S_SCHEME}


def _pow(d: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``d**q`` with the convention that negative ``q`` gives 0 (its prefactor is 0 anyway)."""
    safe = np.where(q >= 0, q, 0)
    return np.where(q >= 0, d**safe, 0.0)


@dataclass(frozen=True)
class DistanceExpansion:
    """``f = sum_n c_n prod_a d_a^{p_na} exp(-b_na d_a)`` over the distance list of N electrons.

    Args:
        coefficients: ``c_n``, shape (T,).
        powers: non-negative integer powers, shape (T, M).
        exponents: screening exponents per distance (1/bohr), shape (T, M).
        n_electrons: N; fixes M = N + N(N-1)/2.
    """

    coefficients: np.ndarray
    powers: np.ndarray
    exponents: np.ndarray
    n_electrons: int

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        p = np.atleast_2d(np.asarray(self.powers, dtype=int))
        b = np.atleast_2d(np.asarray(self.exponents, dtype=float))
        m = self.n_electrons + len(pair_list(self.n_electrons))
        if p.shape != (len(c), m) or b.shape != (len(c), m):
            raise ValueError(f"term table must have shape ({len(c)}, {m})")
        if np.any(p < 0):
            raise ValueError("powers must be non-negative")
        for name, v in (("coefficients", c), ("powers", p), ("exponents", b)):
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    @property
    def n_terms(self) -> int:
        return len(self.coefficients)

    def with_coefficients(self, coefficients) -> "DistanceExpansion":
        return DistanceExpansion(coefficients, self.powers, self.exponents, self.n_electrons)

    def basis_values(self, d: np.ndarray) -> np.ndarray:
        """Values of each term without its coefficient, shape (W, T)."""
        return np.prod(_pow(d[:, None, :], self.powers[None]) * np.exp(-self.exponents[None] * d[:, None, :]), axis=-1)

    def __call__(self, d: np.ndarray) -> np.ndarray:
        return self.basis_values(d) @ self.coefficients

    def basis_partials(self, d: np.ndarray):
        """Per-term value, first and second distance partials: (W,T), (W,T,M), (W,T,M,M)."""
        p = self.powers[None].astype(float)
        pi = self.powers[None]
        b = self.exponents[None]
        x = d[:, None, :]
        e = np.exp(-b * x)
        f0 = _pow(x, pi) * e
        f1 = (p * _pow(x, pi - 1) - b * _pow(x, pi)) * e
        f2 = (p * (p - 1) * _pow(x, pi - 2) - 2.0 * b * p * _pow(x, pi - 1) + b * b * _pow(x, pi)) * e
        w, t, m = f0.shape
        val = np.prod(f0, axis=-1)
        first = np.empty((w, t, m))
        second = np.empty((w, t, m, m))
        idx = np.arange(m)
        for a in range(m):
            rest = np.prod(f0[..., idx != a], axis=-1)
            first[..., a] = f1[..., a] * rest
            second[..., a, a] = f2[..., a] * rest
            for c in range(a + 1, m):
                keep = (idx != a) & (idx != c)
                v = f1[..., a] * f1[..., c] * np.prod(f0[..., keep], axis=-1)
                second[..., a, c] = v
                second[..., c, a] = v
        return val, first, second

    def partials(self, d: np.ndarray):
        val, first, second = self.basis_partials(d)
        c = self.coefficients
        return val @ c, np.einsum("wta,t->wa", first, c), np.einsum("wtab,t->wab", second, c)


class HylleraasWaveFunction(WaveFunction):
    """``psi(R) = sum_k sign_k f(P_k R)`` for a distance expansion ``f`` and a fixed scheme.

    ``"pairwise"`` gives ``f(r1, r2, r12) - f(r2, r1, r12)`` (two like-spin
    electrons); ``"li_2s"`` is the four-term doublet combination for spins
    (up, down, up).
    """

    def __init__(self, expansion: DistanceExpansion, scheme: str, Z: int, name: str = "hylleraas"):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown antisymmetrisation scheme {scheme!r}")
        self.expansion = expansion
        self.scheme = scheme
        self.perms = [(s, SpinPermutation(m)) for s, m in SCHEMES[scheme]]
        n = len(SCHEMES[scheme][0][1])
        if expansion.n_electrons != n:
            raise ValueError(f"scheme {scheme!r} needs a {n}-electron expansion")
        self.spins = (UP, UP) if scheme == "pairwise" else (UP, DOWN, UP)
        self.Z = Z
        self.s_state = True
        self.name = name

    def with_coefficients(self, coefficients) -> "HylleraasWaveFunction":
        return HylleraasWaveFunction(self.expansion.with_coefficients(coefficients), self.scheme, self.Z, self.name)

    def basis_values(self, pos: np.ndarray) -> np.ndarray:
        """Antisymmetrised basis functions (without coefficients), shape (W, T)."""
        pos = np.asarray(pos, dtype=float)
        out = 0.0
        for sign, perm in self.perms:
            d = distance_features(permute_positions(pos, perm))[0]
            out = out + sign * self.expansion.basis_values(d)
        return out

    def value(self, pos):
        return self.basis_values(pos) @ self.expansion.coefficients

    def derivatives(self, pos):
        pos = np.asarray(pos, dtype=float)
        psi = np.zeros(pos.shape[0])
        grad = np.zeros(pos.shape)
        lap = np.zeros(pos.shape[0])
        for sign, perm in self.perms:
            d, U, lapd = distance_features(permute_positions(pos, perm))
            f, fa, fab = self.expansion.partials(d)
            g, l = chain_rule(U, lapd, fa, fab)
            psi += sign * f
            grad[:, list(perm.mapping), :] += sign * g
            lap += sign * l
        return psi, grad, lap


class Projected2S(WaveFunction):
    """Doublet projection of an arbitrary callable ``f(r1, r2, r3, r12, r13, r23)``; values only."""

    def __init__(self, f, Z: int = 3, name: str = "projected_2s"):
        self.f = f
        self.spins = (UP, DOWN, UP)
        self.Z = Z
        self.s_state = True
        self.name = name

    def value(self, pos):
        pos = np.asarray(pos, dtype=float)
        out = 0.0
        for sign, m in LI_2S_SCHEME:
            d = distance_features(permute_positions(pos, SpinPermutation(m)))[0]
            out = out + sign * np.asarray(self.f(*d.T), dtype=float)
        return out

    def derivatives(self, pos):
        raise TypeError("derivatives need an analytic DistanceExpansion; use project_2S on one")


def project_2S(f, Z: int = 3):
    """Doublet-S combination ``f(1,2,3) + f(2,1,3) - f(3,2,1) - f(2,3,1)`` of a distance function.

    Electrons 1 and 3 are the like-spin (up) pair.  A :class:`DistanceExpansion`
    gives a fully differentiable :class:`HylleraasWaveFunction`; any other
    callable of the six distances gives a value-only wave function.
    """
    if isinstance(f, DistanceExpansion):
        return HylleraasWaveFunction(f, "li_2s", Z, name="li_hylleraas")
    return Projected2S(f, Z)


def he_triplet_terms(n_terms: int, distinct_exponents: bool = False) -> list[tuple[int, int, int]]:
    """First ``n_terms`` powers ``(i, j, k)`` of ``r1^i r2^j r12^k`` ordered by total degree.

    With a common exponent only ``i < j`` is independent; with two exponents
    every ``(i, j)`` pair is.
    """
    out = []
    omega = 0
    while len(out) < n_terms:
        shell = []
        for k in range(omega + 1):
            for i in range(omega - k + 1):
                j = omega - k - i
                if distinct_exponents or i < j:
                    shell.append((i, j, k))
        shell.sort(key=lambda t: (t[2], t[0]))
        out.extend(shell)
        omega += 1
    return out[:n_terms]


def he_triplet_expansion(powers, alpha: float, beta: float | None = None, coefficients=None) -> DistanceExpansion:
    beta = alpha if beta is None else beta
    powers = np.asarray(powers, dtype=int).reshape(-1, 3)
    t = len(powers)
    exps = np.zeros((t, 3))
    exps[:, 0] = alpha
    exps[:, 1] = beta
    c = np.ones(t) if coefficients is None else np.asarray(coefficients, dtype=float)
    return DistanceExpansion(c, powers, exps, 2)


def build_he_triplet_hylleraas(n_terms: int, alpha: float, beta: float | None = None, coefficients=None, Z: int = 2) -> HylleraasWaveFunction:
    """Antisymmetrised He triplet expansion ``sum_n c_n (r1^i r2^j - r2^i r1^j) r12^k exp(...)``.

    With ``beta`` given, each direct term carries ``exp(-alpha r1 - beta r2)``
    and its exchange partner the swapped exponential.  Without coefficients the
    first term gets 1 and the rest 0.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    distinct = beta is not None and beta != alpha
    powers = he_triplet_terms(n_terms, distinct)
    if coefficients is None:
        coefficients = np.zeros(n_terms)
        coefficients[0] = 1.0
    return HylleraasWaveFunction(he_triplet_expansion(powers, alpha, beta, coefficients), "pairwise", Z, name="he_triplet")


def li_hylleraas_terms(n_terms: int) -> list[tuple[int, ...]]:
    """Powers of ``(r1, r2, r3, r12, r13, r23)`` for a lithium doublet expansion.

    Electrons 1 and 2 form the screened inner pair and electron 3 the outer
    one.  Terms related by the exchange 1 <-> 2 (with r13 <-> r23) project to
    the same function and only the first of each pair is kept; ordering is by
    total degree.
    """
    seen = set()
    out = []
    degree = 0
    while len(out) < n_terms:
        shell = []
        for p in itertools.product(range(degree + 1), repeat=6):
            if sum(p) != degree:
                continue
            twin = (p[1], p[0], p[2], p[3], p[5], p[4])
            if twin in seen or p in seen:
                continue
            seen.add(p)
            shell.append(p)
        shell.sort(key=lambda q: (q[3] + q[4] + q[5], q[::-1]))
        out.extend(shell)
        degree += 1
    return out[:n_terms]


def build_li_hylleraas(n_terms: int = 30, alpha: float = 2.7, beta: float = 0.65, coefficients=None, Z: int = 3) -> HylleraasWaveFunction:
    """Projected lithium expansion ``sum_n c_n r^p_n exp(-alpha (r1 + r2) - beta r3)``.

    Without coefficients only the constant term is switched on, which gives a
    function whose node is exactly ``r1 = r3``.
    """
    if not 1 <= n_terms <= 64:
        raise ValueError("n_terms must be between 1 and 64")
    powers = np.array(li_hylleraas_terms(n_terms), dtype=int)
    exps = np.zeros((n_terms, 6))
    exps[:, 0] = exps[:, 1] = alpha
    exps[:, 2] = beta
    if coefficients is None:
        coefficients = np.zeros(n_terms)
        coefficients[0] = 1.0
    exp = DistanceExpansion(np.asarray(coefficients, dtype=float), powers, exps, 3)
    return HylleraasWaveFunction(exp, "li_2s", Z, name="li_hylleraas")
