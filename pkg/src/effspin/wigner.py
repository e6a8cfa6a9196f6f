"""Wigner function of ladder states as a displaced-parity expectation.

``W(x, p) = Tr[rho D(alpha) P D(alpha)^dag]`` with ``alpha = (x + i p)/sqrt(2)``
and ``P = (-1)^n``.  With this normalisation ``W`` lies in ``[-1, 1]``, the
vacuum peaks at ``+1`` and ``integral W dx dp = pi``.

Since ``D(alpha) P D(-alpha) = D(2 alpha) P``, only Fock matrix elements of
one displacement are needed; those have a closed Laguerre form, evaluated
with log-factorial prefactors so large ladders do not overflow.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize
from scipy.special import eval_genlaguerre, gammaln

from .ladder import PureState
from .mismatch import DensityMatrix

__all__ = [
    "TruncationWarning",
    "GridSpec",
    "WignerGrid",
    "wigner_values",
    "wigner_point",
    "wigner_origin_dicke1",
    "wigner_grid",
    "min_wigner",
    "quadrature_to_angles",
]

EDGE_TOL = 1e-6


class TruncationWarning(UserWarning):
    """The state has appreciable weight at the top of its ladder."""


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    xmax: float
    nx: int
    pmin: float
    pmax: float
    np_: int

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"xmin:xmax:n,pmin:pmax:n"``."""
        try:
            xs, ps = text.split(",")
            x0, x1, nx = xs.split(":")
            p0, p1, npts = ps.split(":")
            spec = cls(float(x0), float(x1), int(nx), float(p0), float(p1), int(npts))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r}; expected 'xmin:xmax:n,pmin:pmax:n'") from exc
        if spec.nx < 1 or spec.np_ < 1 or spec.xmax < spec.xmin or spec.pmax < spec.pmin:
            raise ValueError(f"bad grid spec {text!r}")
        return spec

    @classmethod
    def square(cls, radius: float, n: int) -> "GridSpec":
        return cls(-radius, radius, n, -radius, radius, n)

    def __str__(self):
        return f"{self.xmin:g}:{self.xmax:g}:{self.nx},{self.pmin:g}:{self.pmax:g}:{self.np_}"

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.pmin, self.pmax, self.np_)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """``values[i, j] = W(x[i], p[j])``."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.p, axis=1), self.x))

    def rows(self):
        for i, xv in enumerate(self.x):
            for j, pv in enumerate(self.p):
                yield float(xv), float(pv), float(self.values[i, j])


def _as_rho(state: Union[PureState, DensityMatrix]) -> np.ndarray:
    if isinstance(state, PureState):
        return np.outer(state.c, state.c.conj())
    return state.rho


def _edge_check(rho: np.ndarray):
    if rho.shape[0] > 1 and rho[-1, -1].real > EDGE_TOL:
        warnings.warn(
            f"state has weight {rho[-1, -1].real:.2e} on the last ladder level; it may be truncated",
            TruncationWarning,
            stacklevel=3,
        )


def _values(rho: np.ndarray, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    dim = rho.shape[0]
    beta = np.sqrt(2.0) * (x + 1j * p)  # 2 * alpha
    r2 = np.abs(beta) ** 2
    log_abs = np.log(np.abs(beta), out=np.full(beta.shape, -np.inf), where=r2 > 0)
    phase = np.exp(1j * np.angle(beta))
    parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    total = np.zeros(x.shape)
    for k in range(dim):
        n = np.arange(dim - k)
        coeff = parity[n] * np.diagonal(rho, offset=k)  # rho[n, n+k]
        if not np.any(coeff):
            continue
        lag = eval_genlaguerre(n[:, None], k, r2[None, :])
        log_pref = 0.5 * (gammaln(n + 1) - gammaln(n + k + 1))[:, None] - 0.5 * r2[None, :]
        if k > 0:
            log_pref = log_pref + k * log_abs[None, :]
        elem = np.exp(log_pref) * lag  # |D_{n+k, n}(beta)| up to the phase
        term = coeff @ elem
        if k == 0:
            total += term.real
        else:
            total += 2.0 * (term * phase**k).real
    return total


def wigner_values(state: Union[PureState, DensityMatrix], x, p) -> np.ndarray:
    """Vectorised displaced-parity Wigner function at points ``(x, p)``."""
    rho = _as_rho(state)
    _edge_check(rho)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    out = _values(rho, x.ravel(), p.ravel())
    return out.reshape(x.shape)


def wigner_point(state: Union[PureState, DensityMatrix], x: float, p: float) -> float:
    return float(wigner_values(state, x, p))


def wigner_origin_dicke1(J: float) -> float:
    """``W(0)`` of the first Dicke state read out through overlap ``J``: ``1 - 2 J^2``."""
    if abs(J) > 1 + 1e-12:
        raise ValueError(f"|J| = {abs(J)} exceeds 1")
    return 1.0 - 2.0 * J * J


def wigner_grid(state: Union[PureState, DensityMatrix], grid: GridSpec, workers: Optional[int] = None) -> WignerGrid:
    """Evaluate ``W`` on ``grid``, one row of constant ``x`` at a time.

    Rows are independent, so ``workers > 1`` runs them in a thread pool
    and gives bit-identical results.
    """
    rho = _as_rho(state)
    _edge_check(rho)
    xs, ps = grid.x, grid.p

    def row(xv):
        return _values(rho, np.full(ps.shape, xv), ps)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, xs))
    else:
        rows = [row(xv) for xv in xs]
    return WignerGrid(xs, ps, np.vstack(rows))


def min_wigner(state: Union[PureState, DensityMatrix], grid: GridSpec, return_location: bool = False):
    """Minimum of ``W`` over ``grid``, polished by a local search from the grid minimum."""
    wg = wigner_grid(state, grid)
    i, j = np.unravel_index(np.argmin(wg.values), wg.values.shape)
    best = float(wg.values[i, j])
    loc = (float(wg.x[i]), float(wg.p[j]))
    rho = _as_rho(state)
    bounds = [(grid.xmin, grid.xmax), (grid.pmin, grid.pmax)]

    def f(v):
        return float(_values(rho, np.array([v[0]]), np.array([v[1]]))[0])

    res = minimize(f, np.array(loc), method="Nelder-Mead", bounds=bounds,
                   options={"xatol": 1e-6, "fatol": 1e-12})
    if res.fun < best:
        best, loc = float(res.fun), (float(res.x[0]), float(res.x[1]))
    return (best, loc) if return_location else best


def quadrature_to_angles(x, p, s_eff: float):
    """Small-angle map from planar quadratures to sphere angles ``(phi, theta)``.

    The ladder vacuum sits at ``(0, pi/2)``; ``x`` tilts the azimuth and
    ``p`` the polar angle by ``1/sqrt(S_e)`` per unit.
    """
    scale = 1.0 / math.sqrt(s_eff)
    return np.asarray(x) * scale, math.pi / 2 + np.asarray(p) * scale
