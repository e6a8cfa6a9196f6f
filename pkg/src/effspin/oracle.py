"""Brute-force many-spin simulator used to check the effective-operator picture.

Every spin is kept explicitly, so the Hilbert space has dimension
``(2s+1)^N``; with the default memory bound that allows about 14 spins-1/2.
Single-spin operators are written in the ``s_x`` eigenbasis (index 0 is
``m_x = -s``), so the ladder vacuum, all spins along ``-x``, is basis
state 0 and ``s_+ = s_y + i s_z`` raises ``s_x``.

Collective operators are sparse Kronecker sums.  The HP ladder operator of
a mode with unit coefficient vector ``f`` is
``a = sum_j f_j s_-^(j) / sqrt(2s)``, which gives ``<[a, a^dag]> = 1``
on the fully polarised state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .coupling import CouplingVector, effective_params, overlap_J
from .ladder import HPValidityWarning, PureState, SpinLadder, dicke, interval_probability
from .mismatch import expand_dicke

__all__ = [
    "DEFAULT_MAX_DIM",
    "DimensionError",
    "spin_matrices",
    "ManyBodyState",
    "CollectiveOperator",
    "EffectiveOperators",
    "collective_operator",
    "ladder_operator",
    "ground_state",
    "build_effective_ops",
    "effective_dicke_exact",
    "SpectralDistribution",
    "measure_Sbeta_exact",
    "hp_tv_distance",
    "hp_counterpart",
    "commutator_identity_residual",
    "verify_expansion_exact",
    "orthogonal_commutator_ratio",
]

DEFAULT_MAX_DIM = 2**14


class DimensionError(ValueError):
    """The many-body space exceeds the configured memory bound."""


def spin_matrices(s: float = 0.5) -> dict:
    """Single-spin ``x, y, z, +, -`` matrices in the ``s_x`` eigenbasis."""
    d = int(round(2 * s + 1))
    m = np.arange(d) - s
    raise_ = np.zeros((d, d))
    for i in range(d - 1):
        raise_[i + 1, i] = math.sqrt((s - m[i]) * (s + m[i] + 1))
    lower = raise_.T
    return {
        "x": np.diag(m).astype(complex),
        "y": ((raise_ + lower) / 2).astype(complex),
        "z": ((raise_ - lower) / 2j).astype(complex),
        "+": raise_.astype(complex),
        "-": lower.astype(complex),
    }


def _dim(N: int, s: float, max_dim: int) -> int:
    d = int(round(2 * s + 1))
    if N * math.log(d) > math.log(max_dim) + 1e-12:
        raise DimensionError(f"{N} spins of s={s} need dimension {d}^{N} > {max_dim}")
    return d**N


@dataclass(frozen=True, eq=False)
class ManyBodyState:
    N: int
    s: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        d = int(round(2 * self.s + 1))
        if amps.size != d**self.N:
            raise ValueError(f"{amps.size} amplitudes for {self.N} spins of s={self.s}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"many-body state not normalised ({norm!r})")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True, eq=False)
class CollectiveOperator:
    label: str
    matrix: sp.csr_matrix

    def __matmul__(self, vec):
        return self.matrix @ vec

    def expect(self, state: ManyBodyState) -> complex:
        v = state.amplitudes
        return complex(np.vdot(v, self.matrix @ v))

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def collective_operator(weights, single: np.ndarray, label: str = "") -> CollectiveOperator:
    """``sum_j weights[j] * single^(j)`` as a sparse matrix."""
    weights = np.asarray(weights)
    N = weights.size
    d = single.shape[0]
    total = sp.csr_matrix((d**N, d**N), dtype=complex)
    for j, w in enumerate(weights):
        if w == 0:
            continue
        left = sp.identity(d**j, format="csr")
        right = sp.identity(d ** (N - j - 1), format="csr")
        total = total + w * sp.kron(sp.kron(left, sp.csr_matrix(single)), right, format="csr")
    return CollectiveOperator(label, total.tocsr())


def ladder_operator(coeffs, s: float, label: str = "a", max_dim: int = DEFAULT_MAX_DIM):
    """Annihilation and creation operators ``sum_j f_j s_-^(j) / sqrt(2s)`` and adjoint."""
    coeffs = np.asarray(coeffs, dtype=float)
    _dim(coeffs.size, s, max_dim)
    ops = spin_matrices(s)
    scale = 1.0 / math.sqrt(2 * s)
    a = collective_operator(coeffs * scale, ops["-"], label)
    adag = collective_operator(coeffs * scale, ops["+"], label + "^dag")
    return a, adag


def ground_state(N: int, s: float = 0.5, max_dim: int = DEFAULT_MAX_DIM) -> ManyBodyState:
    """All spins along ``-x``."""
    amps = np.zeros(_dim(N, s, max_dim), dtype=complex)
    amps[0] = 1.0
    return ManyBodyState(N, s, amps)


@dataclass(frozen=True, eq=False)
class EffectiveOperators:
    Sx: CollectiveOperator
    Sy: CollectiveOperator
    Sz: CollectiveOperator
    a: CollectiveOperator
    adag: CollectiveOperator
    cv: CouplingVector

    def __getitem__(self, key):
        return getattr(self, key)


def build_effective_ops(cv: CouplingVector, max_dim: int = DEFAULT_MAX_DIM) -> EffectiveOperators:
    """Effective spin components ``(1/eta_eff) sum_j eta_j s_alpha^(j)`` and the mode-0 ladder pair."""
    _dim(cv.N, cv.s, max_dim)
    params = effective_params(cv)
    ops = spin_matrices(cv.s)
    w = cv.eta / params.eta_eff
    f0 = cv.eta / np.linalg.norm(cv.eta)
    a, adag = ladder_operator(f0, cv.s, "a_eta", max_dim)
    return EffectiveOperators(
        Sx=collective_operator(w, ops["x"], "S~x"),
        Sy=collective_operator(w, ops["y"], "S~y"),
        Sz=collective_operator(w, ops["z"], "S~z"),
        a=a,
        adag=adag,
        cv=cv,
    )


def _apply_power(op: CollectiveOperator, vec: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        vec = op @ vec
    return vec


def effective_dicke_exact(cv: CouplingVector, n: int, ops: Optional[EffectiveOperators] = None,
                          max_dim: int = DEFAULT_MAX_DIM) -> ManyBodyState:
    """Normalised ``(a_eta^dag)^n |0>`` for the coupling ``cv``."""
    if n < 0:
        raise ValueError("excitation number must be >= 0")
    if n > 0.1 * effective_params(cv).s_eff:
        warnings.warn(f"n={n} is not small against S_e; HP picture will be off", HPValidityWarning, stacklevel=2)
    if ops is None:
        ops = build_effective_ops(cv, max_dim)
    vec = _apply_power(ops.adag, ground_state(cv.N, cv.s, max_dim).amplitudes, n)
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise ValueError(f"(a^dag)^{n}|0> vanishes for {cv.N} spins of s={cv.s}")
    return ManyBodyState(cv.N, cv.s, vec / norm)


@dataclass(frozen=True, eq=False)
class SpectralDistribution:
    """Distinct eigenvalues of a measured observable and their probabilities."""

    values: np.ndarray
    probs: np.ndarray

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot((self.values - mu) ** 2, self.probs))

    def coarse_grain(self, edges: np.ndarray) -> np.ndarray:
        masses, _ = np.histogram(self.values, bins=edges, weights=self.probs)
        return masses


def measure_Sbeta_exact(state: ManyBodyState, cv: CouplingVector, beta: float,
                        decimals: int = 9) -> SpectralDistribution:
    """Exact distribution of ``S~z cos(beta) + S~y sin(beta)`` in ``state``.

    The observable is a weighted sum of commuting single-spin terms, so its
    eigenbasis is the product of single-spin eigenbases: rotate each spin,
    read off probabilities, and label each product state by its weighted
    eigenvalue sum.  Eigenvalues equal to ``decimals`` places are merged.
    """
    if state.N != cv.N or abs(state.s - cv.s) > 1e-12:
        raise ValueError("state and coupling vector describe different ensembles")
    ops = spin_matrices(cv.s)
    local = math.cos(beta) * ops["z"] + math.sin(beta) * ops["y"]
    w, U = np.linalg.eigh(local)
    d = w.size
    N = cv.N
    psi = state.amplitudes.reshape((d,) * N)
    for j in range(N):
        psi = np.moveaxis(np.tensordot(U.conj().T, psi, axes=([1], [j])), 0, j)
    probs = np.abs(psi.ravel()) ** 2
    weights = cv.eta / effective_params(cv).eta_eff
    vals = np.zeros((d,) * N)
    for j in range(N):
        shape = [1] * N
        shape[j] = d
        vals = vals + weights[j] * w.reshape(shape)
    keys, inverse = np.unique(np.round(vals.ravel(), decimals), return_inverse=True)
    merged = np.bincount(inverse, weights=probs)
    return SpectralDistribution(keys, merged)


def hp_tv_distance(dist: SpectralDistribution, hp_state: PureState, beta: float = 0.0,
                   bin_width: Optional[float] = None) -> float:
    """Total-variation distance between a binned exact spectrum and the HP prediction.

    Bins are centred on zero with width ``sqrt(S_e)/8`` unless given.
    Probability the HP density puts outside the binned range counts as
    mismatch.
    """
    s_eff = hp_state.ladder.s_eff
    width = bin_width if bin_width is not None else math.sqrt(s_eff) / 8
    reach = max(np.abs(dist.values).max(), 12 * math.sqrt(s_eff * (2 * hp_state.ladder.cutoff + 1)))
    half = int(math.ceil(reach / width)) + 1
    edges = (np.arange(-half, half + 1) + 0.5) * width
    exact = dist.coarse_grain(edges)
    predicted = np.array([interval_probability(hp_state, beta, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])
    return 0.5 * (np.abs(exact - predicted).sum() + max(0.0, 1.0 - predicted.sum()))


def hp_counterpart(cv: CouplingVector, n: int) -> PureState:
    """The HP-ladder Dicke state the exact ``effective_dicke_exact(cv, n)`` should match."""
    s_eff = effective_params(cv).s_eff
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HPValidityWarning)
        ladder = SpinLadder(s_eff, max(n, 1))
    return dicke(ladder, n)


def commutator_identity_residual(cv: CouplingVector, max_dim: int = DEFAULT_MAX_DIM) -> float:
    """``|<[S~y, S~z]> - i <S~x>|`` on the fully polarised state."""
    ops = build_effective_ops(cv, max_dim)
    css = ground_state(cv.N, cv.s, max_dim)
    v = css.amplitudes
    comm = np.vdot(ops.Sy @ v, ops.Sz @ v) - np.vdot(ops.Sz @ v, ops.Sy @ v)
    return float(abs(comm - 1j * ops.Sx.expect(css)))


def verify_expansion_exact(cv_eta: CouplingVector, cv_xi: CouplingVector, n: int,
                           max_dim: int = DEFAULT_MAX_DIM) -> float:
    """Largest deviation of exact readout-basis overlaps from :func:`expand_dicke`.

    Builds ``d_1 = (a_eta - J a_xi)/sqrt(1 - J^2)`` explicitly and compares
    ``<(a_xi^dag)^(n-k) (d_1^dag)^k 0 | (a_eta^dag)^n 0>`` (with factorial
    normalisations) against the binomial amplitudes.
    """
    J = overlap_J(cv_eta, cv_xi)
    if abs(cv_eta.s - cv_xi.s) > 1e-12:
        raise ValueError("coupling vectors describe different spins")
    f_eta = cv_eta.eta / np.linalg.norm(cv_eta.eta)
    f_xi = cv_xi.eta / np.linalg.norm(cv_xi.eta)
    if 1 - abs(J) < 1e-12:
        if not np.allclose(f_eta, np.sign(J) * f_xi, atol=1e-10):
            raise AssertionError("|J| = 1 but modes are not proportional")
        return 0.0
    s, N = cv_eta.s, cv_eta.N
    f_d = (f_eta - J * f_xi) / math.sqrt(1 - J * J)
    _, adag_eta = ladder_operator(f_eta, s, "a_eta", max_dim)
    _, adag_xi = ladder_operator(f_xi, s, "a_xi", max_dim)
    _, ddag = ladder_operator(f_d, s, "d_1", max_dim)
    vac = ground_state(N, s, max_dim).amplitudes
    target = _apply_power(adag_eta, vac, n) / math.sqrt(math.factorial(n))
    expected = expand_dicke(n, J)
    residual = 0.0
    for k in range(n + 1):
        basis = _apply_power(adag_xi, _apply_power(ddag, vac, k), n - k)
        basis /= math.sqrt(math.factorial(n - k) * math.factorial(k))
        residual = max(residual, abs(np.vdot(basis, target) - expected[k]))
    return float(residual)


def orthogonal_commutator_ratio(cv: CouplingVector, n: int, seed: int = 0,
                                max_dim: int = DEFAULT_MAX_DIM) -> float:
    """``||[G, b_1] psi_n|| / ||[G, a] psi_n||`` with ``G = sum_j eta_j s_z^(j)``.

    ``b_1`` is a mode orthogonal to the coupled one (random, seeded) and
    ``psi_n`` the ``n``-th effective Dicke state.  In the HP limit the
    generator commutes with every orthogonal mode, so the ratio shrinks
    with ``N``.
    """
    f0 = cv.eta / np.linalg.norm(cv.eta)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=cv.N)
    v -= np.dot(v, f0) * f0
    f1 = v / np.linalg.norm(v)
    ops = spin_matrices(cv.s)
    gen = collective_operator(cv.eta, ops["z"], "G")
    a, _ = ladder_operator(f0, cv.s, "a", max_dim)
    b1, _ = ladder_operator(f1, cv.s, "b_1", max_dim)
    psi = effective_dicke_exact(cv, n, max_dim=max_dim).amplitudes

    def comm_norm(op):
        return np.linalg.norm(gen @ (op @ psi) - op @ (gen @ psi))

    return float(comm_norm(b1) / comm_norm(a))
