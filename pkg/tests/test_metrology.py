import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from effspin.metrology import (
    fig3_dataset,
    gain,
    gain_bound,
    heisenberg_breakdown,
    input_variance_from_db,
    to_db,
)
from effspin.mismatch import mismatched_variance


def test_bound_formula():
    assert gain_bound(1.0, 2000.0) == pytest.approx(2000.0)
    assert gain_bound(0.0, 2000.0) == pytest.approx(1 / (0.5 + 1 / 2000))
    assert gain_bound(0.9, 100.0) == pytest.approx(1 / ((1 - 0.81) / 2 + 0.01))


def test_gain_endpoints():
    S = 2000.0
    for db in (5.0, 10.0, 15.0):
        var_in = input_variance_from_db(db, S)
        # perfect overlap: the plain squeezing, measured against S rather than S/2
        assert to_db(gain(var_in, 1.0, S)) == pytest.approx(db + to_db(2.0))
    assert gain(1.0, 0.7, S) == pytest.approx(gain_bound(0.7, S))
    with pytest.raises(ValueError):
        gain(0.5, 1.0, S)


def test_heisenberg_variance_law():
    S = 1000.0
    for one_minus_j2 in (1e-6, 1e-3, 0.01):
        J = math.sqrt(1 - one_minus_j2)
        exact = 1 / S**2 + one_minus_j2 / (2 * S)
        assert mismatched_variance(1.0, J, S, attenuate_input=False) / S**2 == pytest.approx(exact, rel=1e-12)
        assert heisenberg_breakdown(int(2 * S), J).variance_ratio == pytest.approx(exact, rel=1e-12)


def test_breakdown_regimes():
    N = 10**4
    assert heisenberg_breakdown(N, 1.0).regime == "heisenberg"
    assert heisenberg_breakdown(N, 1 - 0.5e-5).regime == "heisenberg"
    assert heisenberg_breakdown(N, 1 - 2e-5).regime == "standard"
    assert heisenberg_breakdown(N, 0.9).threshold == pytest.approx(1e-5)


@given(st.floats(1.0, 1e6), st.floats(-1.0, 1.0), st.floats(1.0, 1e7))
def test_gain_never_exceeds_bound(var_in, J, S):
    assert gain(var_in, J, S) <= gain_bound(J, S) * (1 + 1e-12)


def test_gain_curves_shape_and_order():
    curves = fig3_dataset()
    assert [c.label for c in curves] == ["15dB", "10dB", "5dB", "bound"]
    stacked = np.vstack([c.gain for c in curves])
    # more squeezing is always better and the bound dominates everything
    assert np.all(np.diff(stacked[:3], axis=0) <= 1e-12)
    assert np.all(stacked[3] >= stacked[:3].max(axis=0) - 1e-12)
    for c in curves:
        assert np.all(np.diff(c.gain) >= 0)
    rows = list(curves[0].rows())
    assert rows[-1] == (1.0, pytest.approx(15 + to_db(2.0)), "15dB")


def test_gain_converges_to_css_limit_at_zero_overlap():
    # with no overlap only the added noise S/2 plus the input survive
    S = 2000.0
    var_in = input_variance_from_db(15, S)
    assert gain(var_in, 0.0, S) == pytest.approx(S / (var_in + S / 2))
    assert gain_bound(0.0, 1e9) == pytest.approx(2.0, rel=1e-8)
