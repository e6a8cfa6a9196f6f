"""Command-line front end.

Every subcommand reads an optional YAML scenario (``--config``), prints a
short table or ``--json`` report, and with ``--out DIR`` writes plot-ready
files.  Each file starts with a metadata header (tool version, seed and
config hash).  Exit codes: 0 success, 1 invalid input, 2 failed
verification.
"""

from __future__ import annotations

import csv
import json
import os
import sys
import warnings
from typing import Iterable, Optional, Sequence

import click
import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, load_config
from .coupling import (
    effective_params,
    overlap_J,
    required_temperature,
    sample_couplings,
    thermal_overlap,
)
from .ladder import (
    HPValidityWarning,
    SpinLadder,
    dicke,
    heralded_cat,
    squeezed,
    squeezed_cutoff,
    squeezing_db_to_r,
)
from .metrology import fig3_dataset
from .mismatch import apply_mismatch
from .verification import run_suite
from .wigner import min_wigner, wigner_grid, wigner_point

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2


class VerificationFailed(Exception):
    def __init__(self, failed: Sequence[str]):
        self.failed = list(failed)
        super().__init__("failed checks: " + ", ".join(self.failed))


# ---------------------------------------------------------------- scenario


def scenario_couplings(cfg: ScenarioConfig):
    """Preparation and readout coupling vectors over one shared cloud."""
    cloud = cfg.cloud_model()
    prep = sample_couplings(cfg.preparation.profile(), cloud, s=cfg.spin)
    read = sample_couplings(cfg.readout.profile(), cloud, s=cfg.spin)
    return prep, read


def scenario_overlap(cfg: ScenarioConfig) -> float:
    if cfg.overlap is not None:
        return float(cfg.overlap)
    prep, read = scenario_couplings(cfg)
    return overlap_J(prep, read)


def build_state(cfg: ScenarioConfig, s_eff: float):
    """The configured state on a ladder of effective spin ``s_eff``.

    Without an explicit cutoff the ladder keeps one empty level above the
    state's support, so truncation checks see a clean edge.
    """
    st = cfg.state
    if st.kind == "squeezed":
        r = squeezing_db_to_r(st.db)
        cutoff = cfg.cutoff or squeezed_cutoff(r) + 1
        return squeezed(SpinLadder(s_eff, cutoff), r)
    top = st.n if st.kind == "dicke" else st.m
    cutoff = cfg.cutoff or top + 1
    ladder = SpinLadder(s_eff, cutoff)
    return dicke(ladder, top) if st.kind == "dicke" else heralded_cat(ladder, top)


# ---------------------------------------------------------------- output


def metadata(cfg: ScenarioConfig, command: str) -> dict:
    return {
        "tool": "effspin",
        "version": __version__,
        "command": command,
        "seed": cfg.seed,
        "config_sha256": cfg.digest(),
    }


def _header(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def write_csv(path: str, meta: dict, columns: Sequence[str], rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_header(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def write_json(path: str, meta: dict, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump({"metadata": meta, **payload}, fh, indent=2)
        fh.write("\n")


def read_csv(path: str):
    """Parse a CSV written by this tool into ``(metadata, header, rows)``."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path} has no metadata header")
        meta = dict(item.split("=", 1) for item in first[2:].split())
        reader = csv.reader(fh)
        header = next(reader)
        return meta, header, [row for row in reader]


def _emit(report: dict, as_json: bool, lines: Sequence[str]) -> None:
    if as_json:
        click.echo(json.dumps(report, indent=2))
    else:
        for line in lines:
            click.echo(line)


def _outdir(out: Optional[str]) -> Optional[str]:
    if out is not None:
        os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands


def _common(f):
    f = click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")(f)
    f = click.option("--out", type=click.Path(file_okay=False), help="Directory for output files.")(f)
    f = click.option("--seed", type=int, help="Override the scenario seed.")(f)
    f = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="YAML scenario file.")(f)
    return f


def _load(config_path, seed, grid=None) -> ScenarioConfig:
    cfg = load_config(config_path)
    if seed is not None:
        cfg = cfg.with_seed(seed)
    if grid is not None:
        try:
            cfg = cfg.with_grid(grid)
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--grid") from exc
    return cfg


@click.group()
@click.version_option(__version__, prog_name="effspin")
def cli():
    """Effective collective spins of inhomogeneously coupled atoms."""


@cli.command()
@_common
def params(config_path, seed, out, as_json):
    """Effective spin parameters of both modes and their overlap J."""
    cfg = _load(config_path, seed)
    prep, read = scenario_couplings(cfg)
    j = overlap_J(prep, read)
    report = {
        "config": cfg.to_dict(),
        "preparation": effective_params(prep).to_record(j),
        "readout": effective_params(read).to_record(j),
        "j_overlap": j,
    }
    lines = [f"{'mode':<12}{'<eta>':>12}{'<eta^2>':>12}{'eta_eff':>12}{'N_e':>12}{'S_e':>12}"]
    for role in ("preparation", "readout"):
        r = report[role]
        lines.append(f"{role:<12}{r['mean_eta']:>12.6f}{r['mean_eta_sq']:>12.6f}"
                     f"{r['eta_eff']:>12.6f}{r['n_eff']:>12.2f}{r['s_eff']:>12.2f}")
    lines.append(f"J = {j:.6f}")
    _emit(report, as_json, lines)
    if _outdir(out):
        write_json(os.path.join(out, "params.json"), metadata(cfg, "params"), report)


@cli.command()
@_common
@click.option("--grid", help="Grid 'xmin:xmax:n,pmin:pmax:n' in quadrature units.")
@click.option("--sweep", type=int, default=0, help="Also tabulate W(0,0) at this many J values in [0,1].")
@click.option("--workers", type=int, default=None, help="Threads for the grid evaluation.")
def wigner(config_path, seed, out, as_json, grid, sweep, workers):
    """Wigner function of the configured state seen through the readout mode."""
    cfg = _load(config_path, seed, grid)
    prep, read = scenario_couplings(cfg)
    j = float(cfg.overlap) if cfg.overlap is not None else overlap_J(prep, read)
    s_eff = effective_params(prep).s_eff
    state = build_state(cfg, s_eff)
    rho = apply_mismatch(state, j)
    spec = cfg.grid_spec()
    wg = wigner_grid(rho, spec, workers=workers)
    w_min, w_loc = min_wigner(rho, spec, return_location=True)
    summary = {
        "config": cfg.to_dict(),
        "J": j,
        "s_eff": s_eff,
        "cutoff": state.ladder.cutoff,
        "origin": wigner_point(rho, 0.0, 0.0),
        "min_W": w_min,
        "min_location": list(w_loc),
        "integral_over_pi": wg.integral() / np.pi,
        "grid": str(spec),
    }
    sweep_rows = []
    if sweep:
        for jv in np.linspace(0.0, 1.0, sweep):
            sweep_rows.append((float(jv), wigner_point(apply_mismatch(state, jv), 0.0, 0.0)))
        summary["origin_vs_J"] = [list(r) for r in sweep_rows]
    lines = [
        f"state {cfg.state.kind}  J = {j:.6f}  S_e = {s_eff:.2f}",
        f"W(0,0) = {summary['origin']:.6f}",
        f"min W = {w_min:.6f} at x={w_loc[0]:.4f}, p={w_loc[1]:.4f}",
    ]
    _emit(summary, as_json, lines)
    if _outdir(out):
        meta = metadata(cfg, "wigner")
        write_csv(os.path.join(out, "wigner.csv"), meta, ("x", "p", "W"), wg.rows())
        write_json(os.path.join(out, "wigner.json"), meta,
                   {"x": wg.x.tolist(), "p": wg.p.tolist(), "W": wg.values.tolist()})
        write_json(os.path.join(out, "wigner_summary.json"), meta, summary)
        if sweep_rows:
            write_csv(os.path.join(out, "wigner_origin_vs_J.csv"), meta, ("J", "W_origin"), sweep_rows)


@cli.command()
@_common
def gain(config_path, seed, out, as_json):
    """Metrological gain versus J for each input squeezing, plus the bound."""
    cfg = _load(config_path, seed)
    g = cfg.gain
    curves = fig3_dataset(g.db, g.S, np.linspace(0.0, 1.0, g.points))
    report = {
        "config": cfg.to_dict(),
        "curves": {c.label: {"J": c.J.tolist(), "gain_dB": c.gain_db.tolist()} for c in curves},
    }
    lines = [f"{'label':<10}{'G(J=0) dB':>12}{'G(J=1) dB':>12}"]
    lines += [f"{c.label:<10}{c.gain_db[0]:>12.4f}{c.gain_db[-1]:>12.4f}" for c in curves]
    _emit(report, as_json, lines)
    if _outdir(out):
        rows = (row for c in curves for row in c.rows())
        write_csv(os.path.join(out, "gain.csv"), metadata(cfg, "gain"), ("J", "gain_dB", "label"), rows)


@cli.command()
@_common
def verify(config_path, seed, out, as_json):
    """Run the exact small-N checks of the effective-operator picture."""
    cfg = _load(config_path, seed)
    v = cfg.verify
    results = run_suite(range(v.n_min, v.n_max + 1), range(v.seeds), tv_atoms=v.tv_atoms)
    records = [r.to_record() for r in results]
    report = {"config": cfg.to_dict(), "checks": records, "pass": all(r.passed for r in results)}
    lines = [f"{'check':<24}{'residual':>12}{'tolerance':>12}  result"]
    lines += [f"{r.check:<24}{r.residual:>12.3e}{r.tolerance:>12.1e}  {'pass' if r.passed else 'FAIL'}"
              for r in results]
    _emit(report, as_json, lines)
    if _outdir(out):
        write_json(os.path.join(out, "verify.json"), metadata(cfg, "verify"), report)
    if not report["pass"]:
        raise VerificationFailed([r.check for r in results if not r.passed])


@cli.command()
@_common
@click.option("--temperature", type=float, help="Atom temperature in kelvin.")
@click.option("--trap-depth", type=float, help="Trap depth in Hz.")
@click.option("--atoms", type=float, help="Atom number for the temperature requirement.")
def thermal(config_path, seed, out, as_json, temperature, trap_depth, atoms):
    """Overlap left after thermal motion, and the temperature that keeps 1-J below 1/N."""
    cfg = _load(config_path, seed)
    t = cfg.thermal
    temperature = t.temperature if temperature is None else temperature
    trap_depth = t.trap_depth_hz if trap_depth is None else trap_depth
    atoms = t.atoms if atoms is None else atoms
    j = thermal_overlap(temperature, trap_depth)
    t_max = required_temperature(trap_depth, atoms)
    report = {
        "config": cfg.to_dict(),
        "temperature_K": temperature,
        "trap_depth_hz": trap_depth,
        "atoms": atoms,
        "J": j,
        "one_minus_J": 1.0 - j,
        "T_max_K": t_max,
        "heisenberg_ok": bool(temperature <= t_max),
    }
    lines = [
        f"T = {temperature:.4g} K, U/h = {trap_depth:.4g} Hz  ->  J = {j:.12f}",
        f"1 - J = {1 - j:.3e}; need T < {t_max:.4g} K for N = {atoms:.4g}",
    ]
    _emit(report, as_json, lines)
    if _outdir(out):
        write_json(os.path.join(out, "thermal.json"), metadata(cfg, "thermal"), report)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point mapping failures onto the documented exit codes."""
    with warnings.catch_warnings():
        warnings.simplefilter("default", HPValidityWarning)
        try:
            rv = cli.main(args=list(argv) if argv is not None else None,
                          prog_name="effspin", standalone_mode=False)
        except VerificationFailed as exc:
            click.echo(f"error: {exc}", err=True)
            return EXIT_VERIFY_FAILED
        except click.ClickException as exc:
            exc.show()
            return EXIT_INVALID
        except click.exceptions.Abort:
            click.echo("aborted", err=True)
            return EXIT_INVALID
        except (ConfigError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            return EXIT_INVALID
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
