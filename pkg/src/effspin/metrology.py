"""Metrological gain when a squeezed state is read out through a mismatched mode.

Gains are ``S / Var(S_z)`` at readout.  The mismatch adds ``(1 - J^2) S/2``
of unattenuated noise (see :func:`effspin.mismatch.mismatched_variance`
with ``attenuate_input=False``), which makes the best achievable gain,
reached at the Heisenberg floor ``Var = 1``, exactly
``1 / [(1 - J^2)/2 + 1/S]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from .mismatch import mismatched_variance

__all__ = [
    "GainCurve",
    "Breakdown",
    "gain_bound",
    "gain",
    "to_db",
    "input_variance_from_db",
    "heisenberg_breakdown",
    "fig3_dataset",
]


def to_db(value):
    return 10.0 * np.log10(value)


def _check(J: float, S: float):
    if abs(J) > 1 + 1e-12:
        raise ValueError(f"|J| = {abs(J)} exceeds 1")
    if S <= 0:
        raise ValueError("S must be positive")


def gain_bound(J: float, S: float) -> float:
    """Upper bound ``1 / [(1 - J^2)/2 + 1/S]`` on the gain of any squeezed state."""
    _check(J, S)
    return 1.0 / ((1.0 - J * J) / 2.0 + 1.0 / S)


def gain(var_in: float, J: float, S: float) -> float:
    """Gain ``1 / [(1 - J^2)/2 + var_in/S]`` of a state with prepared variance ``var_in``.

    ``var_in`` is in spin units squared and may not go below the
    Heisenberg floor of 1.
    """
    _check(J, S)
    if var_in < 1:
        raise ValueError(f"input variance {var_in} is below the Heisenberg floor 1")
    return S / mismatched_variance(var_in, J, S, attenuate_input=False)


def input_variance_from_db(db: float, S: float) -> float:
    """``Var(S_z)`` of a state squeezed ``db`` decibels below the coherent ``S/2``."""
    return S / 2.0 * 10.0 ** (-db / 10.0)


@dataclass(frozen=True)
class Breakdown:
    regime: str
    variance_ratio: float  # Var(S_z)/S^2
    threshold: float  # value of 1-|J| separating the regimes


def heisenberg_breakdown(N: int, J: float, s: float = 0.5, factor: float = 0.1) -> Breakdown:
    """Whether a mismatch ``J`` preserves Heisenberg scaling for ``N`` atoms.

    Scaling survives while ``1 - |J| < factor / N``; ``factor`` encodes how
    much smaller than ``1/N`` the mismatch must be.  The reported variance
    is the best readout ``1/S^2 + (1 - J^2)/(2S)`` with ``S = N s``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    S = N * s
    _check(J, S)
    threshold = factor / N
    regime = "heisenberg" if 1.0 - abs(J) < threshold else "standard"
    ratio = mismatched_variance(1.0, J, S, attenuate_input=False) / S**2
    return Breakdown(regime, ratio, threshold)


@dataclass(frozen=True, eq=False)
class GainCurve:
    J: np.ndarray
    gain: np.ndarray
    label: str

    def __post_init__(self):
        if np.any(self.gain <= 0):
            raise ValueError("gain must be positive")

    @property
    def gain_db(self) -> np.ndarray:
        return to_db(self.gain)

    def rows(self):
        for j, g in zip(self.J, self.gain_db):
            yield float(j), float(g), self.label


def fig3_dataset(db_list: Iterable[float] = (15.0, 10.0, 5.0), S: float = 2000.0,
                 J_grid: Sequence[float] = None) -> List[GainCurve]:
    """Gain-versus-``J`` curves for each input squeezing, followed by the bound."""
    if J_grid is None:
        J_grid = np.linspace(0.0, 1.0, 201)
    J_grid = np.asarray(J_grid, dtype=float)
    curves = []
    for db in db_list:
        var_in = input_variance_from_db(db, S)
        values = np.array([gain(var_in, j, S) for j in J_grid])
        curves.append(GainCurve(J_grid, values, f"{db:g}dB"))
    curves.append(GainCurve(J_grid, np.array([gain_bound(j, S) for j in J_grid]), "bound"))
    return curves
