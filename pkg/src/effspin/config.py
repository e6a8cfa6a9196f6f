"""YAML scenario files for the command-line tool.

Schema (every key optional; defaults describe
2000 spin-1 atoms on a standing wave read out by a uniform mode)::

    seed: 7
    spin: 1.0
    atoms: 2000
    cloud:
      distribution: uniform_line     # uniform_line | gaussian_radial
      length: null                   # uniform_line; null = whole wavelengths
      sigma_r: null                  # gaussian_radial
    modes:
      preparation: {kind: standing_wave, wavelength: 1.0}
      readout: {kind: uniform}       # uniform | standing_wave | gaussian_beam
    overlap: null                    # explicit J, overrides the geometry
    state: {kind: dicke, n: 1}       # or {kind: cat, m: 5} / {kind: squeezed, db: 10}
    cutoff: null                     # ladder cutoff, null = smallest that fits
    grid: "-4:4:81,-4:4:81"
    gain: {db: [15, 10, 5], S: 2000, points: 201}
    thermal: {temperature: 1.0e-7, trap_depth_hz: 1.0e7, atoms: 1.0e8}
    verify: {n_min: 6, n_max: 12, seeds: 5, tv_atoms: 12}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional, Tuple

import yaml

from .coupling import AtomCloud, ModeProfile
from .wigner import GridSpec

__all__ = ["ConfigError", "ModeSpec", "CloudSpec", "StateSpec", "ScenarioConfig", "load_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class ModeSpec:
    kind: str = "uniform"
    wavelength: Optional[float] = None
    waist: Optional[float] = None

    def profile(self) -> ModeProfile:
        return ModeProfile(self.kind, wavelength=self.wavelength, waist=self.waist)


@dataclass(frozen=True)
class CloudSpec:
    distribution: str = "uniform_line"
    length: Optional[float] = None
    sigma_r: Optional[float] = None


@dataclass(frozen=True)
class StateSpec:
    kind: str = "dicke"
    n: Optional[int] = None
    m: Optional[int] = None
    db: Optional[float] = None


@dataclass(frozen=True)
class GainSpec:
    db: Tuple[float, ...] = (15.0, 10.0, 5.0)
    S: float = 2000.0
    points: int = 201


@dataclass(frozen=True)
class ThermalSpec:
    temperature: float = 1.0e-7
    trap_depth_hz: float = 1.0e7
    atoms: float = 1.0e8


@dataclass(frozen=True)
class VerifySpec:
    n_min: int = 6
    n_max: int = 12
    seeds: int = 5
    tv_atoms: int = 12


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 7
    spin: float = 1.0
    atoms: int = 2000
    cloud: CloudSpec = CloudSpec()
    preparation: ModeSpec = ModeSpec("standing_wave", wavelength=1.0)
    readout: ModeSpec = ModeSpec("uniform")
    overlap: Optional[float] = None
    state: StateSpec = StateSpec("dicke", n=1)
    cutoff: Optional[int] = None
    grid: str = "-4:4:81,-4:4:81"
    gain: GainSpec = GainSpec()
    thermal: ThermalSpec = ThermalSpec()
    verify: VerifySpec = VerifySpec()

    def cloud_model(self) -> AtomCloud:
        return AtomCloud(
            self.atoms,
            distribution=self.cloud.distribution,
            length=self.cloud.length,
            sigma_r=self.cloud.sigma_r,
            seed=self.seed,
        )

    def grid_spec(self) -> GridSpec:
        return GridSpec.parse(self.grid)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["modes"] = {"preparation": d.pop("preparation"), "readout": d.pop("readout")}
        d["gain"]["db"] = list(d["gain"]["db"])
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)

    def with_grid(self, grid: str) -> "ScenarioConfig":
        GridSpec.parse(grid)
        return replace(self, grid=grid)

    @classmethod
    def from_yaml(cls, text: str) -> "ScenarioConfig":
        try:
            data = yaml.safe_load(text) or {}
            lines = _line_index(yaml.compose(text))
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"invalid YAML: {exc}", mark.line + 1 if mark else None) from exc
        return _build(data, lines)


def _line_index(node, path=()) -> Dict[tuple, int]:
    index = {}
    if node is None:
        return index
    index[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            sub = path + (key.value,)
            index.update(_line_index(value, sub))
            index[sub] = key.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            index.update(_line_index(item, path + (i,)))
    return index


class _Reader:
    def __init__(self, lines: Dict[tuple, int]):
        self.lines = lines

    def fail(self, path: tuple, message: str):
        line = None
        while path is not None:
            if path in self.lines:
                line = self.lines[path]
                break
            path = path[:-1] if path else None
        raise ConfigError(message, line)

    def section(self, data, path, spec_cls):
        if data is None:
            return spec_cls()
        if not isinstance(data, dict):
            self.fail(path, f"{'.'.join(map(str, path))} must be a mapping")
        known = {f.name: f for f in fields(spec_cls)}
        values = {}
        for key, raw in data.items():
            if key not in known:
                self.fail(path + (key,), f"unknown key {'.'.join(map(str, path + (key,)))!r}")
            values[key] = self.scalar(raw, path + (key,), known[key].type)
        return spec_cls(**values)

    def scalar(self, raw, path, typ):
        name = ".".join(map(str, path))
        if raw is None:
            if "Optional" in str(typ):
                return None
            self.fail(path, f"{name} may not be null")
        typ = str(typ)
        try:
            if "Tuple" in typ:
                if not isinstance(raw, list):
                    raise TypeError
                return tuple(float(v) for v in raw)
            if "int" in typ:
                if isinstance(raw, bool) or float(raw) != int(float(raw)):
                    raise TypeError
                return int(float(raw))
            if "float" in typ:
                if isinstance(raw, bool):
                    raise TypeError
                return float(raw)
            if not isinstance(raw, str):
                raise TypeError
            return raw
        except (TypeError, ValueError):
            self.fail(path, f"{name} has invalid value {raw!r} (expected {typ})")


_TOP_SCALARS = {"seed": "int", "spin": "float", "atoms": "int", "overlap": "Optional[float]",
                "cutoff": "Optional[int]", "grid": "str"}
_SECTIONS = {"cloud": CloudSpec, "state": StateSpec, "gain": GainSpec, "thermal": ThermalSpec,
             "verify": VerifySpec}


def _build(data, lines) -> ScenarioConfig:
    rd = _Reader(lines)
    if not isinstance(data, dict):
        rd.fail((), "config must be a mapping")
    values = {}
    for key, raw in data.items():
        if key in _TOP_SCALARS:
            values[key] = rd.scalar(raw, (key,), _TOP_SCALARS[key])
        elif key in _SECTIONS:
            values[key] = rd.section(raw, (key,), _SECTIONS[key])
        elif key == "modes":
            if not isinstance(raw, dict):
                rd.fail((key,), "modes must be a mapping")
            for role, spec in raw.items():
                if role not in ("preparation", "readout"):
                    rd.fail((key, role), f"unknown mode role {role!r}")
                values[role] = rd.section(spec, (key, role), ModeSpec)
        else:
            rd.fail((key,), f"unknown key {key!r}")
    cfg = ScenarioConfig(**values)
    _validate(cfg, rd)
    return cfg


def _validate(cfg: ScenarioConfig, rd: _Reader):
    if cfg.atoms < 1:
        rd.fail(("atoms",), "atoms must be >= 1")
    if not cfg.spin > 0 or abs(2 * cfg.spin - round(2 * cfg.spin)) > 1e-12:
        rd.fail(("spin",), "spin must be a positive half-integer")
    for role in ("preparation", "readout"):
        spec = getattr(cfg, role)
        try:
            spec.profile()
        except ValueError as exc:
            rd.fail(("modes", role), str(exc))
    try:
        cfg.cloud_model()
    except ValueError as exc:
        rd.fail(("cloud",), str(exc))
    if cfg.overlap is not None and abs(cfg.overlap) > 1:
        rd.fail(("overlap",), "overlap must satisfy |J| <= 1")
    st = cfg.state
    needed = {"dicke": "n", "cat": "m", "squeezed": "db"}
    if st.kind not in needed:
        rd.fail(("state", "kind"), f"state kind must be one of {sorted(needed)}")
    if getattr(st, needed[st.kind]) is None:
        rd.fail(("state",), f"{st.kind} state needs '{needed[st.kind]}'")
    if st.kind in ("dicke", "cat") and getattr(st, needed[st.kind]) < 0:
        rd.fail(("state", needed[st.kind]), "excitation count must be >= 0")
    if cfg.cutoff is not None and cfg.cutoff < 1:
        rd.fail(("cutoff",), "cutoff must be >= 1")
    try:
        GridSpec.parse(cfg.grid)
    except ValueError as exc:
        rd.fail(("grid",), str(exc))
    if cfg.gain.S <= 0 or cfg.gain.points < 2:
        rd.fail(("gain",), "gain needs S > 0 and at least 2 points")
    if cfg.verify.n_min < 2 or cfg.verify.n_max < cfg.verify.n_min or cfg.verify.seeds < 1:
        rd.fail(("verify",), "verify needs 2 <= n_min <= n_max and seeds >= 1")


def load_config(path: Optional[str]) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    with open(path) as fh:
        return ScenarioConfig.from_yaml(fh.read())
