"""Oracle checks of the effective-operator picture, bundled as a report."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .coupling import CouplingVector
from .ladder import HPValidityWarning
from .oracle import (
    build_effective_ops,
    commutator_identity_residual,
    effective_dicke_exact,
    hp_counterpart,
    hp_tv_distance,
    measure_Sbeta_exact,
    spin_matrices,
    collective_operator,
    verify_expansion_exact,
)

__all__ = [
    "VerificationResult",
    "random_couplings",
    "check_uniform_sanity",
    "check_commutator_identity",
    "check_single_excitation_expansion",
    "expansion_scaling",
    "check_expansion_slope",
    "check_tv_distance",
    "run_suite",
]

COMMUTATOR_TOL = 1e-12
SLOPE_TOL = 0.3
TV_TOL = 0.05


@dataclass
class VerificationResult:
    check: str
    residual: float
    tolerance: float
    parameters: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_record(self) -> dict:
        return {
            "check": self.check,
            "parameters": self.parameters,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


def random_couplings(N: int, seed: int, s: float = 0.5) -> CouplingVector:
    """Couplings drawn uniformly from ``(0, 1]``, seeded by ``(seed, N)``."""
    rng = np.random.default_rng([seed, N])
    return CouplingVector(1.0 - rng.uniform(0.0, 1.0, N), s=s)


def check_uniform_sanity(N: int = 2) -> VerificationResult:
    """With uniform coupling the effective ``S_z`` is the plain total ``S_z``."""
    cv = CouplingVector(np.ones(N))
    ops = build_effective_ops(cv)
    plain = collective_operator(np.ones(N), spin_matrices(0.5)["z"])
    diff = abs(ops.Sz.matrix - plain.matrix).max()
    return VerificationResult("uniform_sanity", float(diff), COMMUTATOR_TOL, {"N": N})


def check_commutator_identity(N_values: Sequence[int], seeds: Sequence[int]) -> VerificationResult:
    worst = max(
        commutator_identity_residual(random_couplings(N, seed))
        for N in N_values
        for seed in seeds
    )
    return VerificationResult(
        "commutator_identity", worst, COMMUTATOR_TOL,
        {"N": list(N_values), "seeds": list(seeds)},
    )


def check_single_excitation_expansion(N_values: Sequence[int], seeds: Sequence[int]) -> VerificationResult:
    worst = max(
        verify_expansion_exact(random_couplings(N, seed), random_couplings(N, seed + 10_000), 1)
        for N in N_values
        for seed in seeds
    )
    return VerificationResult(
        "expansion_n1", worst, COMMUTATOR_TOL,
        {"N": list(N_values), "seeds": list(seeds)},
    )


def expansion_scaling(N_values: Sequence[int], n: int, seeds: Sequence[int]):
    """Seed-averaged expansion residuals and their log-log slope against ``N``."""
    Ns = np.asarray(list(N_values), dtype=float)
    means = np.array([
        np.mean([
            verify_expansion_exact(random_couplings(int(N), seed), random_couplings(int(N), seed + 10_000), n)
            for seed in seeds
        ])
        for N in Ns
    ])
    slope = float(np.polyfit(np.log(Ns), np.log(means), 1)[0])
    return Ns, means, slope


def check_expansion_slope(N_values: Sequence[int], n: int, seeds: Sequence[int]) -> VerificationResult:
    Ns, means, slope = expansion_scaling(N_values, n, seeds)
    return VerificationResult(
        f"expansion_slope_n{n}", abs(slope + 1.0), SLOPE_TOL,
        {"n": n, "N": [int(v) for v in Ns], "mean_residual": means.tolist(), "slope": slope},
    )


def check_tv_distance(N: int, n: int, seeds: Sequence[int], beta: float = 0.0) -> VerificationResult:
    """Worst total-variation distance between exact and HP ``S_beta`` statistics."""
    distances = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HPValidityWarning)
        for seed in seeds:
            cv = random_couplings(N, seed)
            state = effective_dicke_exact(cv, n)
            dist = measure_Sbeta_exact(state, cv, beta)
            distances.append(hp_tv_distance(dist, hp_counterpart(cv, n), beta))
    return VerificationResult(
        f"tv_distance_n{n}", max(distances), TV_TOL,
        {"N": N, "n": n, "beta": beta, "seeds": list(seeds), "distances": distances},
    )


def run_suite(N_values: Sequence[int] = range(6, 13), seeds: Sequence[int] = range(5),
              tv_atoms: int = 12, tv_levels: Sequence[int] = (0, 1, 2)) -> List[VerificationResult]:
    N_values = list(N_values)
    seeds = list(seeds)
    results = [
        check_uniform_sanity(),
        check_commutator_identity(N_values, seeds),
        check_single_excitation_expansion(N_values, seeds),
    ]
    for n in (2, 3):
        results.append(check_expansion_slope(N_values, n, seeds))
    for n in tv_levels:
        results.append(check_tv_distance(tv_atoms, n, seeds))
    return results
