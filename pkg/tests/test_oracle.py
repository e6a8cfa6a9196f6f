import math
import warnings

import numpy as np
import pytest

from effspin.coupling import CouplingVector, effective_params
from effspin.ladder import HPValidityWarning, variance_Sbeta
from effspin.oracle import (
    DimensionError,
    build_effective_ops,
    collective_operator,
    commutator_identity_residual,
    effective_dicke_exact,
    ground_state,
    hp_counterpart,
    hp_tv_distance,
    measure_Sbeta_exact,
    orthogonal_commutator_ratio,
    spin_matrices,
    verify_expansion_exact,
)
from effspin.verification import random_couplings

pytestmark = pytest.mark.filterwarnings("ignore::effspin.ladder.HPValidityWarning")


@pytest.mark.parametrize("s", [0.5, 1.0, 1.5])
def test_spin_algebra(s):
    m = spin_matrices(s)
    assert np.allclose(m["x"] @ m["y"] - m["y"] @ m["x"], 1j * m["z"])
    assert np.allclose(m["y"] @ m["z"] - m["z"] @ m["y"], 1j * m["x"])
    casimir = m["x"] @ m["x"] + m["y"] @ m["y"] + m["z"] @ m["z"]
    assert np.allclose(casimir, s * (s + 1) * np.eye(int(2 * s + 1)))
    # index 0 is the lowest s_x eigenvalue
    assert np.allclose(np.diag(m["x"]), np.arange(int(2 * s + 1)) - s)


def test_uniform_coupling_reduces_to_total_spin():
    cv = CouplingVector(np.ones(3))
    ops = build_effective_ops(cv)
    plain = collective_operator(np.ones(3), spin_matrices(0.5)["z"])
    assert abs(ops.Sz.matrix - plain.matrix).max() == 0


@pytest.mark.parametrize("N", [4, 7, 10])
def test_commutator_identity(N):
    assert commutator_identity_residual(random_couplings(N, 1)) < 1e-12


def test_ladder_commutator_on_vacuum():
    cv = random_couplings(6, 0)
    ops = build_effective_ops(cv)
    vac = ground_state(6).amplitudes
    comm = np.vdot(vac, ops.a @ (ops.adag @ vac)) - np.vdot(vac, ops.adag @ (ops.a @ vac))
    assert comm == pytest.approx(1.0, abs=1e-12)


def test_expansion_single_excitation_exact():
    for N in (5, 8):
        assert verify_expansion_exact(random_couplings(N, 2), random_couplings(N, 3), 1) < 1e-12


def test_expansion_identical_modes():
    cv = random_couplings(6, 4)
    assert verify_expansion_exact(cv, cv, 3) == 0.0


def test_expansion_residual_shrinks():
    small = np.mean([verify_expansion_exact(random_couplings(6, s), random_couplings(6, s + 99), 2) for s in range(3)])
    large = np.mean([verify_expansion_exact(random_couplings(11, s), random_couplings(11, s + 99), 2) for s in range(3)])
    assert large < small


def test_spectrum_matches_dense_diagonalisation():
    cv = random_couplings(4, 5)
    ops = build_effective_ops(cv)
    state = effective_dicke_exact(cv, 1, ops)
    beta = 0.6
    dense = math.cos(beta) * ops.Sz.dense() + math.sin(beta) * ops.Sy.dense()
    vals, vecs = np.linalg.eigh(dense)
    probs = np.abs(vecs.conj().T @ state.amplitudes) ** 2
    dist = measure_Sbeta_exact(state, cv, beta)
    keys, inverse = np.unique(np.round(vals, 9), return_inverse=True)
    merged = np.bincount(inverse, weights=probs)
    assert np.allclose(dist.values, keys)
    assert np.allclose(dist.probs, merged, atol=1e-12)


def test_spin_one_spectrum_variance():
    cv = CouplingVector([1.0, 0.6, 0.8], s=1.0)
    ops = build_effective_ops(cv)
    vac = ground_state(3, 1.0)
    dist = measure_Sbeta_exact(vac, cv, 0.0)
    sz = ops.Sz.dense()
    v = vac.amplitudes
    assert dist.variance() == pytest.approx(np.vdot(v, sz @ sz @ v).real, rel=1e-12)
    # product vacuum: variance of the weighted sum equals sum of w_j^2 s/2
    w = cv.eta / effective_params(cv).eta_eff
    assert dist.variance() == pytest.approx(np.sum(w**2) * 0.5, rel=1e-12)


def test_vacuum_variance_is_hp_value():
    cv = random_couplings(10, 6)
    dist = measure_Sbeta_exact(ground_state(10), cv, 1.0)
    s_eff = effective_params(cv).s_eff
    # eigenvalues are merged at 9 decimals, which limits the agreement
    assert dist.variance() == pytest.approx(s_eff / 2, rel=1e-9)


def test_dicke_variance_approaches_hp():
    gaps = []
    for N in (6, 12):
        cv = CouplingVector(np.ones(N))
        exact = measure_Sbeta_exact(effective_dicke_exact(cv, 1), cv, 0.0).variance()
        gaps.append(abs(exact / variance_Sbeta(hp_counterpart(cv, 1), 0.0) - 1))
    assert gaps[1] < gaps[0]


def test_tv_distance_decreases_with_N():
    def mean_tv(N):
        out = []
        for seed in range(3):
            cv = random_couplings(N, seed)
            dist = measure_Sbeta_exact(effective_dicke_exact(cv, 1), cv, 0.0)
            out.append(hp_tv_distance(dist, hp_counterpart(cv, 1)))
        return np.mean(out)

    assert mean_tv(12) < mean_tv(8)


@pytest.mark.parametrize("N", [6, 8, 10])
def test_uniform_orthogonal_commutator_ratio(N):
    cv = CouplingVector(np.ones(N))
    for seed in (0, 3):
        assert orthogonal_commutator_ratio(cv, 1, seed=seed) == pytest.approx(2 / (N - 2), rel=1e-10)


def test_random_orthogonal_commutator_ratio_shrinks_on_average():
    def avg(N):
        return np.mean([orthogonal_commutator_ratio(random_couplings(N, s), 1, seed=s) for s in range(5)])

    assert avg(12) < avg(6)


def test_dimension_guard():
    with pytest.raises(DimensionError):
        ground_state(20)
    with pytest.raises(DimensionError):
        build_effective_ops(random_couplings(9, 0), max_dim=2**8)


def test_hp_warning_for_large_n():
    with pytest.warns(HPValidityWarning):
        warnings.simplefilter("always")
        effective_dicke_exact(random_couplings(6, 0), 2)
