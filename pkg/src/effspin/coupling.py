"""Per-atom coupling strengths, effective ensemble parameters and mode overlaps.

An ensemble of ``N`` atoms couples to an optical mode with strengths
``eta_j`` in ``[0, 1]``.  Everything downstream only needs a handful of
scalars derived from that vector: the first two moments, the effective
coupling ``<eta^2>/<eta>``, the effective atom number
``N <eta>^2/<eta^2>``, and the normalised overlap between two modes.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import constants

__all__ = [
    "ModeProfile",
    "AtomCloud",
    "CouplingVector",
    "EffectiveParams",
    "GeometryError",
    "sample_couplings",
    "effective_params",
    "overlap_J",
    "thermal_overlap",
    "required_temperature",
    "trap_depth_joules",
]

MODE_KINDS = ("uniform", "standing_wave", "gaussian_beam", "custom")
CLOUD_KINDS = ("uniform_line", "gaussian_radial", "explicit")

# standing-wave clouds with no explicit length span this many wavelengths
DEFAULT_WAVELENGTHS = 100


class GeometryError(ValueError):
    """Raised for inconsistent mode/cloud combinations."""


@dataclass(frozen=True, eq=False)
class ModeProfile:
    """Intensity profile of one optical mode.

    Use the classmethod constructors rather than filling fields by hand.
    """

    kind: str
    wavelength: Optional[float] = None
    waist: Optional[float] = None
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in MODE_KINDS:
            raise GeometryError(f"unknown mode kind {self.kind!r}; expected one of {MODE_KINDS}")
        if self.kind == "standing_wave":
            if self.wavelength is None or not self.wavelength > 0:
                raise GeometryError("standing_wave needs a positive wavelength")
        if self.kind == "gaussian_beam":
            if self.waist is None or not self.waist > 0:
                raise GeometryError("gaussian_beam needs a positive waist")
        if self.kind == "custom":
            if self.table is None:
                raise GeometryError("custom profile needs a table of eta values")
            table = np.array(self.table, dtype=float).ravel()
            if not np.all(np.isfinite(table)) or np.any(table < 0):
                raise GeometryError("custom eta table must be finite and non-negative")
            if table.size and table.max() > 1:
                warnings.warn("custom eta table has entries above 1; used as-is", stacklevel=3)
            table.setflags(write=False)
            object.__setattr__(self, "table", table)

    @classmethod
    def uniform(cls) -> "ModeProfile":
        return cls("uniform")

    @classmethod
    def standing_wave(cls, wavelength: float) -> "ModeProfile":
        return cls("standing_wave", wavelength=wavelength)

    @classmethod
    def gaussian_beam(cls, waist: float) -> "ModeProfile":
        return cls("gaussian_beam", waist=waist)

    @classmethod
    def custom(cls, table: Sequence[float]) -> "ModeProfile":
        return cls("custom", table=np.asarray(table, dtype=float))

    def evaluate(self, positions: np.ndarray) -> np.ndarray:
        """Coupling strength at each position.

        ``positions`` is ``(N,)`` for axial coordinates, ``(N, 2)`` for
        transverse ``(x, y)`` or ``(N, 3)`` for ``(x, y, z)``.
        """
        pos = np.asarray(positions, dtype=float)
        n = pos.shape[0]
        if self.kind == "uniform":
            return np.ones(n)
        if self.kind == "custom":
            if self.table.size != n:
                raise GeometryError(f"custom table has {self.table.size} entries for {n} atoms")
            return np.array(self.table)
        if self.kind == "standing_wave":
            if pos.ndim == 1:
                z = pos
            elif pos.ndim == 2 and pos.shape[1] == 3:
                z = pos[:, 2]
            else:
                raise GeometryError("standing_wave needs axial positions")
            k = 2 * np.pi / self.wavelength
            return np.sin(k * z) ** 2
        # gaussian_beam
        if pos.ndim != 2 or pos.shape[1] not in (2, 3):
            raise GeometryError("gaussian_beam needs transverse (x, y) positions")
        r2 = pos[:, 0] ** 2 + pos[:, 1] ** 2
        return np.exp(-2 * r2 / self.waist**2)


@dataclass(frozen=True, eq=False)
class AtomCloud:
    """Spatial distribution of ``N`` atoms.

    ``uniform_line`` samples axial positions on ``[0, length)``; leaving
    ``length`` unset means a whole number of wavelengths of whatever
    standing wave it is paired with.  ``gaussian_radial`` samples ``x`` and
    ``y`` independently with standard deviation ``sigma_r``.
    """

    N: int
    distribution: str = "uniform_line"
    length: Optional[float] = None
    sigma_r: Optional[float] = None
    positions: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        if self.distribution not in CLOUD_KINDS:
            raise GeometryError(f"unknown cloud distribution {self.distribution!r}")
        if self.distribution == "explicit":
            if self.positions is None:
                raise GeometryError("explicit cloud needs positions")
            pos = np.array(self.positions, dtype=float)
            pos.setflags(write=False)
            object.__setattr__(self, "positions", pos)
            object.__setattr__(self, "N", int(pos.shape[0]))
        if int(self.N) < 1:
            raise GeometryError("atom cloud needs N >= 1")
        if self.distribution == "gaussian_radial" and not (self.sigma_r is not None and self.sigma_r > 0):
            raise GeometryError("gaussian_radial needs sigma_r > 0")
        if self.length is not None and not self.length > 0:
            raise GeometryError("length must be positive")

    def sample_positions(self, wavelength: Optional[float] = None) -> np.ndarray:
        if self.distribution == "explicit":
            return np.array(self.positions)
        rng = np.random.default_rng(self.seed)
        if self.distribution == "uniform_line":
            length = self.length
            if length is None:
                if wavelength is None:
                    raise GeometryError("uniform_line without length needs a wavelength to span")
                length = DEFAULT_WAVELENGTHS * wavelength
            return rng.uniform(0.0, length, size=self.N)
        return rng.normal(0.0, self.sigma_r, size=(self.N, 2))


@dataclass(frozen=True, eq=False)
class CouplingVector:
    """Coupling strengths ``eta_1 .. eta_N`` of one mode, plus the atomic spin.

    ``atoms`` fingerprints the sampled positions so that overlaps are only
    taken between vectors describing the same atoms.
    """

    eta: np.ndarray
    s: float = 0.5
    atoms: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float).ravel()
        if eta.size < 1:
            raise ValueError("coupling vector needs at least one atom")
        if not np.all(np.isfinite(eta)):
            raise ValueError("coupling vector has non-finite entries")
        if np.any(eta < 0):
            raise ValueError("coupling strengths must be non-negative")
        if not np.any(eta > 0):
            raise ValueError("coupling vector is identically zero")
        if not self.s > 0 or abs(2 * self.s - round(2 * self.s)) > 1e-12:
            raise ValueError(f"spin must be a positive half-integer, got {self.s}")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @property
    def N(self) -> int:
        return self.eta.size

    def __len__(self):
        return self.eta.size

    def scaled(self, factor: float) -> "CouplingVector":
        return CouplingVector(self.eta * factor, self.s, self.atoms)


def _fingerprint(positions: np.ndarray) -> str:
    data = np.ascontiguousarray(positions, dtype=float).tobytes()
    return hashlib.sha1(data).hexdigest()[:16]


def sample_couplings(profile: ModeProfile, cloud: AtomCloud, s: float = 0.5) -> CouplingVector:
    """Evaluate ``profile`` at positions drawn from ``cloud``.

    Deterministic for a fixed ``cloud.seed``.  Pairing two profiles with the
    same cloud yields vectors over the same atoms, which is what
    :func:`overlap_J` needs.
    """
    if profile.kind == "standing_wave" and cloud.distribution == "gaussian_radial":
        raise GeometryError("standing_wave needs axial positions, cloud is gaussian_radial")
    if profile.kind == "gaussian_beam" and cloud.distribution == "uniform_line":
        raise GeometryError("gaussian_beam needs transverse positions, cloud is uniform_line")
    if profile.kind in ("uniform", "custom") and cloud.distribution == "uniform_line" and cloud.length is None:
        # nothing to span: positions are irrelevant for the profile anyway
        positions = cloud.sample_positions(wavelength=1.0)
    else:
        positions = cloud.sample_positions(wavelength=profile.wavelength)
    eta = profile.evaluate(positions)
    return CouplingVector(eta, s=s, atoms=_fingerprint(positions) + f":{cloud.seed}")


@dataclass(frozen=True)
class EffectiveParams:
    mean_eta: float
    mean_eta_sq: float
    eta_eff: float
    n_eff: float
    s_eff: float
    N: int

    def to_record(self, j_overlap: Optional[float] = None) -> dict:
        return {
            "mean_eta": self.mean_eta,
            "mean_eta_sq": self.mean_eta_sq,
            "eta_eff": self.eta_eff,
            "n_eff": self.n_eff,
            "s_eff": self.s_eff,
            "j_overlap": j_overlap,
        }


def effective_params(cv: CouplingVector) -> EffectiveParams:
    """Moments, effective coupling and effective atom number of ``cv``.

    ``n_eff`` is kept real-valued; ``n_eff <= N`` with equality only for
    uniform coupling.
    """
    eta = cv.eta
    total = eta.sum()
    if total <= 0:
        raise ValueError("all-zero coupling vector")
    total_sq = np.dot(eta, eta)
    n = eta.size
    eta_eff = total_sq / total
    n_eff = total * total / total_sq
    return EffectiveParams(
        mean_eta=float(total / n),
        mean_eta_sq=float(total_sq / n),
        eta_eff=float(eta_eff),
        n_eff=float(n_eff),
        s_eff=float(n_eff * cv.s),
        N=n,
    )


def overlap_J(cv_eta: CouplingVector, cv_xi: CouplingVector) -> float:
    """Normalised overlap ``sum(eta*xi) / sqrt(sum(eta^2) sum(xi^2))``.

    Both vectors must describe the same atoms in the same order.
    """
    if cv_eta.N != cv_xi.N:
        raise ValueError(f"coupling vectors pair {cv_eta.N} with {cv_xi.N} atoms")
    if cv_eta.atoms is not None and cv_xi.atoms is not None and cv_eta.atoms != cv_xi.atoms:
        raise ValueError("coupling vectors come from different atom samples; J needs paired atoms")
    a, b = cv_eta.eta, cv_xi.eta
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("zero coupling vector")
    j = float(np.dot(a / na, b / nb))
    return min(1.0, max(-1.0, j))


def trap_depth_joules(trap_depth: float, units: str = "hz") -> float:
    """Trap depth as an energy. ``units`` is ``"hz"`` (h*f) or ``"kelvin"`` (k_B*T)."""
    if units == "hz":
        return constants.h * trap_depth
    if units == "kelvin":
        return constants.k * trap_depth
    raise ValueError(f"unknown trap-depth units {units!r}")


def thermal_overlap(temperature: float, trap_depth: float, units: str = "hz") -> float:
    """Overlap ``1 - (k_B T / U)^2`` left after thermal motion in a trap of depth ``U``.

    Only meaningful for ``k_B T << U``; ``k_B T >= U`` raises.
    """
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if trap_depth <= 0:
        raise ValueError("trap depth must be positive")
    ratio = constants.k * temperature / trap_depth_joules(trap_depth, units)
    if ratio >= 1:
        raise ValueError(f"k_B T / U = {ratio:.3g} >= 1 is outside the perturbative regime")
    return 1.0 - ratio**2


def required_temperature(trap_depth: float, N: int, units: str = "hz") -> float:
    """Temperature in kelvin below which the thermal mismatch stays under ``1/N``."""
    if trap_depth <= 0:
        raise ValueError("trap depth must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    return trap_depth_joules(trap_depth, units) / (constants.k * math.sqrt(N))
