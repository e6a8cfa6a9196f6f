"""Preparation/readout mode mismatch as a beamsplitter followed by a trace-out.

The preparation ladder operator decomposes as
``a_eta = J a_xi + sqrt(1 - J^2) d_1`` with ``d_1`` orthogonal to the readout
mode.  Each excitation therefore reaches the readout ladder with amplitude
``J`` and is lost to ``d_1`` otherwise, which is a pure-loss channel of
transmissivity ``J^2``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .ladder import HPValidityWarning, PureState, SpinLadder

__all__ = [
    "DensityMatrix",
    "expand_dicke",
    "loss_kraus",
    "apply_mismatch",
    "mismatched_variance",
]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    ladder: SpinLadder
    rho: np.ndarray

    herm_tol = 1e-12
    trace_tol = 1e-12
    psd_tol = 1e-10

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        dim = self.ladder.dim
        if rho.shape != (dim, dim):
            raise ValueError(f"density matrix shape {rho.shape} does not match ladder dimension {dim}")
        if np.max(np.abs(rho - rho.conj().T)) > self.herm_tol:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1) > self.trace_tol:
            raise ValueError(f"density matrix trace is {tr!r}")
        if np.linalg.eigvalsh(rho).min() < -self.psd_tol:
            raise ValueError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return cls(state.ladder, np.outer(state.c, state.c.conj()))

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.rho).real.copy()

    def purity(self) -> float:
        return float(np.vdot(self.rho, self.rho).real)

    def to_json(self) -> str:
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.rho]
        return json.dumps({"s_eff": self.ladder.s_eff, "cutoff": self.ladder.cutoff, "rho": rows})

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        data = json.loads(text)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HPValidityWarning)
            ladder = SpinLadder(data["s_eff"], data["cutoff"])
        rho = np.array([[complex(re, im) for re, im in row] for row in data["rho"]])
        return cls(ladder, rho)


def _check_J(J: float) -> float:
    J = float(J)
    if abs(J) > 1 + 1e-12:
        raise ValueError(f"|J| = {abs(J)} exceeds 1")
    return max(-1.0, min(1.0, J))


def _log_pow(base: float, expo: np.ndarray) -> np.ndarray:
    # log(base**expo) with 0**0 = 1
    if base > 0:
        return expo * math.log(base)
    return np.where(expo > 0, -np.inf, 0.0)


def _amplitude_table(J: float, n_max: int) -> np.ndarray:
    """``A[n, k] = sqrt(C(n,k)) J^(n-k) (1-J^2)^(k/2)``, zero for ``k > n``.

    Entries come from log space, so tiny ones keep their relative accuracy;
    each row is then rescaled to its exact unit norm to remove the rounding
    the logarithms accumulate.
    """
    n = np.arange(n_max + 1)[:, None]
    k = np.arange(n_max + 1)[None, :]
    valid = k <= n
    kept = np.where(valid, n - k, 0)
    lost = np.where(valid, k, 0)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(kept + 1) - gammaln(lost + 1))
    log_t = _log_pow(abs(J), kept)
    log_l = _log_pow(math.sqrt((1.0 - J) * (1.0 + J)), lost)
    sign = np.where((kept % 2 == 1) & (J < 0), -1.0, 1.0)
    table = np.where(valid, sign * np.exp(log_binom + log_t + log_l), 0.0)
    return table / np.linalg.norm(table, axis=1, keepdims=True)


def expand_dicke(n: int, J: float) -> np.ndarray:
    """Readout-basis amplitudes of the ``n``-th preparation Dicke state.

    Entry ``k`` is the amplitude of ``n - k`` quanta in the readout mode and
    ``k`` in the orthogonal mode.
    """
    J = _check_J(J)
    if n < 0:
        raise ValueError("Dicke index must be >= 0")
    return _amplitude_table(J, n)[n, : n + 1].copy()


def loss_kraus(J: float, n_max: int) -> np.ndarray:
    """Kraus operators ``E_k`` (shape ``(n_max+1,)*3``) of the mismatch channel.

    ``E_k`` removes ``k`` quanta: ``E_k |n> = A[n,k] |n-k>``.
    """
    J = _check_J(J)
    table = _amplitude_table(J, n_max)
    dim = n_max + 1
    kraus = np.zeros((dim, dim, dim))
    for k in range(dim):
        n = np.arange(k, dim)
        kraus[k, n - k, n] = table[n, k]
    return kraus


def apply_mismatch(state: Union[PureState, DensityMatrix], J: float) -> DensityMatrix:
    """Readout-mode density matrix of ``state`` prepared in a mode with overlap ``J``.

    Accepts pure states or density matrices (the channel is linear), so
    channels compose: two mismatches ``J1`` then ``J2`` equal one of ``J1*J2``.
    """
    J = _check_J(J)
    ladder = state.ladder
    dim = ladder.dim
    table = _amplitude_table(J, ladder.cutoff)
    rho_in = np.outer(state.c, state.c.conj()) if isinstance(state, PureState) else state.rho
    rho = np.zeros((dim, dim), dtype=complex)
    # E_k is a k-shifted diagonal, so E_k rho E_k^dag is a weighted sub-block
    for k in range(dim):
        w = table[k:, k]
        if not np.any(w):
            continue
        rho[: dim - k, : dim - k] += w[:, None] * rho_in[k:, k:] * w[None, :]
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(ladder, rho)


def mismatched_variance(var_in: float, J: float, S: float, attenuate_input: bool = True) -> float:
    """Readout variance of ``S_z`` for a prepared variance ``var_in`` (spin units squared).

    The default is the loss-channel map ``J^2 var_in + (1 - J^2) S/2``:
    coherent spin states (``var_in = S/2``) are fixed points.  With
    ``attenuate_input=False`` the input noise passes unattenuated and the
    mismatch only adds ``(1 - J^2) S/2``; that is the near-``J = 1`` form
    under which ``var_in = 1`` gives exactly ``1 + (1 - J^2) S/2``.
    """
    if var_in < 0:
        raise ValueError("input variance must be non-negative")
    if S <= 0:
        raise ValueError("S must be positive")
    J = _check_J(J)
    added = (1 - J * J) * S / 2
    if attenuate_input:
        return J * J * var_in + added
    return var_in + added
