"""Collective states on the Holstein-Primakoff ladder of one coupling mode.

A state is a list of amplitudes ``c_n`` over effective Dicke states
``|S_e, -S_e + n>``.  Bloch-sphere curvature is neglected, so the ladder is
a harmonic oscillator and a measurement of ``S_beta`` reads the rotated
position quadrature.  Internally the dimensionless quadrature is
``x = S_beta / sqrt(S_e)``; the vacuum then has ``Var(x) = 1/2``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "HPValidityWarning",
    "SpinLadder",
    "PureState",
    "hermite_functions",
    "dicke",
    "heralded_cat",
    "squeezed",
    "squeezing_db_to_r",
    "squeezed_cutoff",
    "rotate",
    "quadrature_amplitude",
    "measurement_pdf",
    "interval_probability",
    "variance_Sbeta",
]

NORM_TOL = 1e-12
TAIL_TOL = 1e-10


class HPValidityWarning(UserWarning):
    """The ladder cutoff is not small compared with the effective spin."""


@dataclass(frozen=True)
class SpinLadder:
    s_eff: float
    cutoff: int

    def __post_init__(self):
        if not self.s_eff > 0:
            raise ValueError("effective spin must be positive")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError("ladder cutoff must be an integer >= 1")
        object.__setattr__(self, "cutoff", int(self.cutoff))
        if self.cutoff > 0.1 * self.s_eff:
            warnings.warn(
                f"cutoff {self.cutoff} exceeds 0.1*S_e = {0.1 * self.s_eff:g}; "
                "HP ladder may be inaccurate",
                HPValidityWarning,
                stacklevel=3,
            )

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True, eq=False)
class PureState:
    ladder: SpinLadder
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=complex).ravel()
        if c.size != self.ladder.dim:
            raise ValueError(f"{c.size} amplitudes for a ladder of dimension {self.ladder.dim}")
        norm = np.vdot(c, c).real
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalised: sum |c_n|^2 = {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_amplitudes(cls, ladder: SpinLadder, c, normalize: bool = True) -> "PureState":
        c = np.zeros(ladder.dim, dtype=complex) + np.asarray(c, dtype=complex)
        if normalize:
            c = c / np.linalg.norm(c)
        return cls(ladder, c)

    def mean_excitation(self) -> float:
        return float(np.dot(np.arange(self.ladder.dim), np.abs(self.c) ** 2))

    def to_json(self) -> str:
        return json.dumps(
            {
                "s_eff": self.ladder.s_eff,
                "cutoff": self.ladder.cutoff,
                "amplitudes": [[float(z.real), float(z.imag)] for z in self.c],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        data = json.loads(text)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HPValidityWarning)
            ladder = SpinLadder(data["s_eff"], data["cutoff"])
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(ladder, amps)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised Hermite functions ``psi_0 .. psi_{n_max}`` at ``x``.

    Uses the three-term recurrence, which stays finite for large ``n``
    where evaluating ``H_n`` directly would overflow.
    Returns an array of shape ``(n_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def dicke(ladder: SpinLadder, n: int) -> PureState:
    """The ``n``-th effective Dicke state, ``c_k = delta_{kn}``."""
    if not 0 <= n <= ladder.cutoff:
        raise ValueError(f"Dicke index {n} outside ladder 0..{ladder.cutoff}")
    c = np.zeros(ladder.dim, dtype=complex)
    c[n] = 1.0
    return PureState(ladder, c)


def heralded_cat(ladder: SpinLadder, m: int) -> PureState:
    """Normalised ``x^m |0>``: quadrature wavefunction ``x^m exp(-x^2/2)``.

    Each heralded photon applies one power of the ``S_z`` quadrature, so
    ``m`` heralding events give ``x^m``.  The result lives exactly on
    ``n <= m`` with the parity of ``m``.
    """
    if m < 0:
        raise ValueError("heralding count must be >= 0")
    if m > ladder.cutoff:
        raise ValueError(f"cat with m={m} needs cutoff >= {m}, ladder has {ladder.cutoff}")
    dim = m + 1
    root = np.sqrt(np.arange(1, dim))
    x_op = (np.diag(root, 1) + np.diag(root, -1)) / math.sqrt(2.0)
    v = np.zeros(dim)
    v[0] = 1.0
    for _ in range(m):
        v = x_op @ v
        v /= np.linalg.norm(v)
    c = np.zeros(ladder.dim, dtype=complex)
    c[:dim] = v
    return PureState(ladder, c)


def squeezing_db_to_r(db: float) -> float:
    """Squeeze parameter for a quadrature variance reduced by ``db`` decibels."""
    return db * math.log(10.0) / 20.0


def squeezed_cutoff(r: float, tail_tol: float = TAIL_TOL) -> int:
    """Smallest even cutoff that holds all but ``tail_tol`` of a squeezed state."""
    if r == 0:
        return 1
    t2 = math.tanh(abs(r)) ** 2
    # |c_{2k}|^2 = t2^k C(2k,k) / (4^k cosh r)
    term = 1.0 / math.cosh(r)
    kept = term
    k = 0
    while 1.0 - kept > tail_tol:
        term *= t2 * (2 * k + 1) * (2 * k + 2) / (4.0 * (k + 1) ** 2)
        kept += term
        k += 1
    return max(2 * k, 1)


def squeezed(ladder: SpinLadder, r: float, tail_tol: float = TAIL_TOL) -> PureState:
    """Gaussian state with ``Var(S_z) = exp(-2r) S_e/2`` (``r > 0`` squeezes ``S_z``).

    The coefficients are the Hermite-function projections of the squeezed
    Gaussian, ``c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))``.
    Raises if more than ``tail_tol`` of the norm falls beyond the cutoff.
    """
    c = np.zeros(ladder.dim, dtype=complex)
    if r == 0:
        c[0] = 1.0
        return PureState(ladder, c)
    t = math.tanh(abs(r))
    k = np.arange(ladder.cutoff // 2 + 1)
    log_mag = (
        k * math.log(t)
        + 0.5 * gammaln(2 * k + 1)
        - k * math.log(2.0)
        - gammaln(k + 1)
        - 0.5 * math.log(math.cosh(r))
    )
    sign = -1.0 if r > 0 else 1.0
    amps = np.exp(log_mag) * sign**k
    c[2 * k] = amps
    tail = 1.0 - np.sum(amps**2)
    if tail > tail_tol:
        raise ValueError(
            f"cutoff {ladder.cutoff} leaves {tail:.2e} of the squeezed state's norm outside the ladder"
        )
    c /= np.linalg.norm(c)
    return PureState(ladder, c)


def rotate(state: PureState, beta: float) -> PureState:
    """Apply the readout rotation: ``c_n -> exp(i n beta) c_n``."""
    phase = np.exp(1j * beta * np.arange(state.ladder.dim))
    return PureState(state.ladder, state.c * phase)


def quadrature_amplitude(ladder: SpinLadder, n: int, beta: float, s_beta):
    """Amplitude ``g(S_beta, n)`` to find ``S_beta`` in the ``n``-th Dicke state.

    ``|g|^2`` integrates to one over ``S_beta`` (spin units).
    """
    if not 0 <= n <= ladder.cutoff:
        raise ValueError(f"Dicke index {n} outside ladder 0..{ladder.cutoff}")
    s_beta = np.asarray(s_beta, dtype=float)
    scale = math.sqrt(ladder.s_eff)
    psi = hermite_functions(n, s_beta / scale)[n]
    return np.exp(1j * n * beta) * psi / math.sqrt(scale)


def _wavefunction(state: PureState, beta: float, s_beta: np.ndarray) -> np.ndarray:
    scale = math.sqrt(state.ladder.s_eff)
    psi = hermite_functions(state.ladder.cutoff, s_beta / scale)
    coeffs = state.c * np.exp(1j * beta * np.arange(state.ladder.dim))
    return np.tensordot(coeffs, psi, axes=(0, 0)) / math.sqrt(scale)


def interval_probability(state: PureState, beta: float, lo: float, hi: float) -> float:
    """Probability that ``S_beta`` falls in ``[lo, hi]``."""
    # composite Gauss-Legendre, panels of half a vacuum width
    scale = math.sqrt(state.ladder.s_eff)
    panels = max(1, int(math.ceil((hi - lo) / (0.5 * scale))))
    nodes, weights = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(np.sum(w * np.abs(_wavefunction(state, beta, pts)) ** 2))


def measurement_pdf(state: PureState, beta: float, grid, check_tail: bool = True, tail_tol: float = 1e-6) -> np.ndarray:
    """Probability density of ``S_beta = S_z cos(beta) + S_y sin(beta)`` on ``grid``.

    ``grid`` is in spin units.  With ``check_tail`` the probability outside
    ``[min(grid), max(grid)]`` is integrated and a ``ValueError`` raised if it
    exceeds ``tail_tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if check_tail:
        outside = 1.0 - interval_probability(state, beta, float(grid.min()), float(grid.max()))
        if outside > tail_tol:
            raise ValueError(f"grid misses {outside:.2e} of the distribution")
    return np.abs(_wavefunction(state, beta, grid)) ** 2


def variance_Sbeta(state: PureState, beta: float) -> float:
    """Variance of ``S_beta`` in spin units, from ladder-operator moments."""
    dim = state.ladder.dim + 2
    c = np.zeros(dim, dtype=complex)
    c[: state.ladder.dim] = state.c
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    x = (np.exp(1j * beta) * a + np.exp(-1j * beta) * a.T) / math.sqrt(2.0)
    xc = x @ c
    mean = np.vdot(c, xc).real
    second = np.vdot(xc, xc).real
    return float(state.ladder.s_eff * (second - mean**2))
