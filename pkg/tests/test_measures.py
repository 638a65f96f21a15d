import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import horodecki_m, negativity_pt, random_density, wootters_concurrence
from wclass_bell import measures as ms
from wclass_bell.errors import ConsistencyError, NumericalError
from wclass_bell.states import PAIRS, make_state, reduce

W_VALUES = (8 / 9, 2 / 3, (math.sqrt(5) - 1) / 3, 16 / 27)
BELL = np.zeros((4, 4), dtype=complex)
BELL[1, 1] = BELL[1, 2] = BELL[2, 1] = BELL[2, 2] = 0.5
MIXED = np.eye(4) / 4

simplex = st.tuples(st.floats(0, 1), st.floats(0, 1)).map(
    lambda t: (min(t), max(t) - min(t), 1 - max(t))
)


def _rho12(p):
    return reduce(make_state(np.sqrt(p)), (1, 2))


def test_w_values_mpmath():
    # frozen values against 30-digit evaluation of the closed forms
    mpmath.mp.dps = 30
    third = mpmath.mpf(1) / 3
    m = max((third - 2 * third) ** 2 + 4 * third**2, 8 * third**2)
    n = mpmath.sqrt(third**2 + 4 * third**2) - third
    assert float(m) == pytest.approx(0.888889, abs=5e-7)
    assert float(n) == pytest.approx(0.412023, abs=5e-7)
    assert np.allclose(W_VALUES, [float(m), 2 / 3, float(n), 16 / 27], atol=1e-15)


def test_correlation_matrix():
    t = ms.correlation_matrix(_rho12([1 / 3] * 3))
    assert np.allclose(np.diag(t), [2 / 3, 2 / 3, -1 / 3])
    assert np.allclose(ms.correlation_matrix(MIXED), 0)
    assert np.allclose(ms.correlation_matrix(BELL), np.diag([1, 1, -1]))
    bad = MIXED.astype(complex).copy()
    bad[0, 3] = 0.1j  # anti-Hermitian perturbation leaves imaginary residue
    with pytest.raises(NumericalError):
        ms.correlation_matrix(bad)


def test_matrix_path_examples():
    assert ms.nonlocality_matrix_path(BELL) == pytest.approx(2)
    assert ms.nonlocality_matrix_path(MIXED) == pytest.approx(0, abs=1e-15)
    assert ms.nonlocality_matrix_path(_rho12([0.1, 0.2, 0.7])) == pytest.approx(1.2, abs=1e-12)
    assert ms.concurrence_matrix_path(BELL) == pytest.approx(1, abs=1e-12)
    assert ms.concurrence_matrix_path(MIXED) == pytest.approx(0, abs=1e-12)
    assert ms.concurrence_matrix_path(_rho12([0.1, 0.2, 0.7])) == pytest.approx(0.748331, abs=1e-6)
    assert ms.negativity_matrix_path(BELL) == pytest.approx(1, abs=1e-12)
    assert ms.negativity_matrix_path(MIXED) == 0
    assert ms.negativity_matrix_path(_rho12([0.1, 0.2, 0.7])) == pytest.approx(0.654983, abs=1e-6)
    assert ms.linear_entropy_matrix_path(BELL) == pytest.approx(0, abs=1e-15)
    assert ms.linear_entropy_matrix_path(MIXED) == pytest.approx(1)
    assert ms.linear_entropy_matrix_path(_rho12([1 / 3] * 3)) == pytest.approx(16 / 27, abs=1e-12)


def test_concurrence_rejects_non_positive_matrix():
    bad = np.diag([1.2, 0.0, 0.0, -0.2]).astype(complex)
    with pytest.raises(NumericalError):
        ms.concurrence_matrix_path(bad)


def test_closed_form_examples():
    w = (1 / 3, 1 / 3, 1 / 3)
    for pair in PAIRS:
        assert ms.nonlocality_closed(w, pair) == pytest.approx(8 / 9)
        assert ms.concurrence_closed(w, pair) == pytest.approx(2 / 3)
        assert ms.negativity_closed(w, pair) == pytest.approx(0.412023, abs=1e-6)
        assert ms.linear_entropy_closed(w, pair) == pytest.approx(16 / 27)
        assert ms.concurrence_closed((1, 0, 0), pair) == 0
    p = (0.1, 0.2, 0.7)
    assert [ms.nonlocality_closed(p, pr) for pr in PAIRS] == pytest.approx([1.2, 0.64, 0.24])
    assert ms.linear_entropy_closed(p, (1, 2)) == pytest.approx(0.24)
    assert ms.nonlocality_closed((1, 0, 0), (1, 2)) == 1
    bell = (0, 0.5, 0.5)
    assert ms.concurrence_closed(bell, (1, 2)) == 1
    assert ms.negativity_closed(bell, (1, 2)) == 1
    assert ms.negativity_closed((1, 0, 0), (1, 2)) == 0
    assert ms.linear_entropy_closed(bell, (1, 2)) == 0


def test_all_pairs():
    w = ms.all_pairs(make_state([3**-0.5] * 3), verify=True)
    for pm in w:
        assert pm.as_tuple() == pytest.approx(W_VALUES)
        assert not pm.violates
    m = [pm.m for pm in ms.all_pairs(make_state(np.sqrt([0.1, 0.2, 0.7])), verify=True)]
    assert m == pytest.approx([1.2, 0.64, 0.24])
    basis = ms.all_pairs(make_state((1, 0, 0)), verify=True)
    assert [pm.as_tuple() for pm in basis] == [(1, 0, 0, 0)] * 3


def test_all_pairs_detects_disagreement(monkeypatch):
    monkeypatch.setattr(ms, "closed_form_measures", lambda p: {
        k: np.full(3, 0.5) for k in "mcne"})
    with pytest.raises(ConsistencyError):
        ms.all_pairs(make_state([3**-0.5] * 3), verify=True)


@settings(max_examples=80, deadline=None)
@given(simplex, st.tuples(*[st.floats(0, 2 * math.pi)] * 3))
def test_closed_form_equals_matrix_path(p, phases):
    amps = np.sqrt(np.clip(p, 0, 1)) * np.exp(1j * np.array(phases))
    state = make_state(amps, renormalize=True)
    probs = np.abs(np.asarray(state.amps)) ** 2
    for pair in PAIRS:
        rho = reduce(state, pair)
        assert ms.nonlocality_closed(probs, pair) == pytest.approx(ms.nonlocality_matrix_path(rho), abs=1e-9)
        assert ms.concurrence_closed(probs, pair) == pytest.approx(ms.concurrence_matrix_path(rho), abs=1e-9)
        assert ms.negativity_closed(probs, pair) == pytest.approx(ms.negativity_matrix_path(rho), abs=1e-9)
        assert ms.linear_entropy_closed(probs, pair) == pytest.approx(ms.linear_entropy_matrix_path(rho), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matrix_path_against_numpy_oracles(seed):
    rho = random_density(np.random.default_rng(seed), 4)
    assert ms.nonlocality_matrix_path(rho) == pytest.approx(horodecki_m(rho), abs=1e-9)
    assert ms.concurrence_matrix_path(rho) == pytest.approx(wootters_concurrence(rho), abs=1e-7)
    assert ms.negativity_matrix_path(rho) == pytest.approx(negativity_pt(rho), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(simplex)
def test_measure_properties(p):
    meas = ms.closed_form_measures(np.array(p))
    assert np.all(meas["n"] <= meas["c"] + 1e-12)
    assert np.all((meas["m"] >= 0) & (meas["m"] <= 2 + 1e-12))
    assert np.sum(meas["m"] > 1 + 1e-12) <= 1
    assert meas["m"].sum() >= 2 - 1e-9


@settings(max_examples=40, deadline=None)
@given(simplex)
def test_ckw_relation(p):
    state = make_state(np.sqrt(np.clip(p, 0, 1)), renormalize=True)
    assert ms.ckw_residual(state) < 1e-12


def test_closed_forms_broadcast():
    p = np.array([[0.1, 0.2, 0.7], [1 / 3, 1 / 3, 1 / 3]])
    meas = ms.closed_form_measures(p)
    assert meas["m"].shape == (2, 3)
    assert meas["m"][0] == pytest.approx([1.2, 0.64, 0.24])
