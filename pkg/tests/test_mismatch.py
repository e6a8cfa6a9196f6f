import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import comb

from effspin.ladder import PureState, SpinLadder, dicke, heralded_cat
from effspin.mismatch import (
    DensityMatrix,
    apply_mismatch,
    expand_dicke,
    loss_kraus,
    mismatched_variance,
)

LAD = SpinLadder(1e4, 8)
js = st.floats(-1.0, 1.0)


def random_state(rng, ladder=LAD):
    c = rng.normal(size=ladder.dim) + 1j * rng.normal(size=ladder.dim)
    return PureState.from_amplitudes(ladder, c)


def test_expand_dicke_examples():
    J = 0.6
    assert np.allclose(expand_dicke(1, J), [J, math.sqrt(1 - J * J)])
    assert np.allclose(expand_dicke(7, 1.0), np.eye(8)[0])
    assert np.allclose(expand_dicke(2, math.sqrt(0.5)), [0.5, 1 / math.sqrt(2), 0.5])


@settings(max_examples=200)
@given(st.integers(0, 50), js)
def test_expand_dicke_normalised(n, J):
    assert np.sum(expand_dicke(n, J) ** 2) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("n", [3, 10, 25])
def test_expand_dicke_binomial_oracle(n):
    J = 0.37
    k = np.arange(n + 1)
    expected = np.sqrt(comb(n, k)) * J ** (n - k) * (1 - J * J) ** (k / 2)
    assert np.allclose(expand_dicke(n, J), expected, rtol=1e-12)


def test_dicke1_channel_output():
    J = 0.8
    rho = apply_mismatch(dicke(LAD, 1), J).rho
    expected = np.zeros((9, 9))
    expected[0, 0] = 1 - J * J
    expected[1, 1] = J * J
    assert np.allclose(rho, expected, atol=1e-15)


def test_limits():
    rng = np.random.default_rng(0)
    state = random_state(rng)
    full = apply_mismatch(state, 1.0)
    assert full.purity() == pytest.approx(1.0)
    assert np.allclose(full.rho, np.outer(state.c, state.c.conj()))
    empty = apply_mismatch(state, 0.0)
    assert np.allclose(empty.rho, np.diag(np.eye(9)[0]))


def test_loop_matches_kraus_sum():
    rng = np.random.default_rng(1)
    state = random_state(rng)
    J = 0.55
    kraus = loss_kraus(J, LAD.cutoff)
    rho_in = np.outer(state.c, state.c.conj())
    explicit = sum(E @ rho_in @ E.T for E in kraus)
    assert np.allclose(apply_mismatch(state, J).rho, explicit, atol=1e-15)
    completeness = sum(E.T @ E for E in kraus)
    assert np.allclose(completeness, np.eye(LAD.dim), atol=1e-14)


@settings(max_examples=60)
@given(st.integers(0, 2**31), js, js)
def test_channel_laws(seed, J1, J2):
    state = random_state(np.random.default_rng(seed))
    out = apply_mismatch(state, J1)
    assert np.trace(out.rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(out.rho).min() >= -1e-10
    twice = apply_mismatch(out, J2)
    once = apply_mismatch(state, J1 * J2)
    assert np.abs(twice.rho - once.rho).max() < 1e-10


def test_mean_excitation_scales_with_J_squared():
    state = heralded_cat(LAD, 5)
    J = 0.7
    out = apply_mismatch(state, J)
    n_out = np.dot(np.arange(LAD.dim), out.populations)
    assert n_out == pytest.approx(J * J * state.mean_excitation())


def test_density_matrix_validation_and_round_trip():
    lad = SpinLadder(1e4, 1)
    with pytest.raises(ValueError):
        DensityMatrix(lad, np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError):
        DensityMatrix(lad, np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        DensityMatrix(lad, np.diag([1.5, -0.5]))
    rho = apply_mismatch(random_state(np.random.default_rng(3)), 0.4)
    back = DensityMatrix.from_json(rho.to_json())
    assert np.array_equal(back.rho, rho.rho)


def test_bad_overlap_rejected():
    with pytest.raises(ValueError):
        apply_mismatch(dicke(LAD, 1), 1.2)


def test_mismatched_variance_examples():
    assert mismatched_variance(123.0, 1.0, 1000.0) == 123.0
    assert mismatched_variance(1.0, math.sqrt(0.99), 1000.0) == pytest.approx(5.99)
    assert mismatched_variance(1.0, math.sqrt(0.99), 1000.0, attenuate_input=False) == pytest.approx(6.0)
    for J in (0.0, 0.3, 0.9):
        assert mismatched_variance(500.0, J, 1000.0) == pytest.approx(500.0)


def test_variance_map_agrees_with_channel():
    # the channel maps Var(x) -> J^2 Var(x) + (1-J^2)/2 for zero-mean states
    from effspin.ladder import variance_Sbeta

    state = heralded_cat(LAD, 4)
    J = 0.6
    rho = apply_mismatch(state, J).rho
    dim = LAD.dim
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    x = (a + a.T) / math.sqrt(2)
    var_out = np.trace(rho @ x @ x).real * LAD.s_eff
    var_in = variance_Sbeta(state, 0.0)
    assert var_out == pytest.approx(mismatched_variance(var_in, J, LAD.s_eff), rel=1e-12)
