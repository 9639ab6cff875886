import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ifbselect import CorrMeasure, DegenerateCorrelationWarning, corr_matrix, kcc, pcc, qcc, tcc
from ifbselect.corr import trim_mask

from .oracles import kendall_loop, pearson_loop, quadrant_loop, trimmed_loop

ESTIMATORS = {
    "pearson": pcc,
    "kendall": kcc,
    "quadrant": qcc,
    "trimmed": lambda x, y: tcc(x, y, 0.03),
}

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def pairs(draw, min_size=3, max_size=60, ties=False):
    n = draw(st.integers(min_size, max_size))
    elem = st.integers(-5, 5).map(float) if ties else finite
    x = draw(arrays(np.float64, n, elements=elem))
    y = draw(arrays(np.float64, n, elements=elem))
    return x, y


def nonconstant(v):
    return np.ptp(v) > 1e-6 * max(1.0, np.abs(v).max())


# -- worked examples -----------------------------------------------------------


def test_pearson_examples():
    x = np.array([1.0, 2.0, 5.0, 3.0])
    assert pcc(x, x) == 1.0
    assert pcc(x, -x) == -1.0
    # 3.5 / sqrt(5 * 4.75)
    assert pcc([1, 2, 3, 4], [2, 4, 5, 4]) == pytest.approx(0.7181848464596079, abs=1e-15)


def test_kendall_examples():
    assert kcc([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0
    assert kcc([1, 2, 3], [3, 2, 1]) == -1.0
    assert kcc([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(2 / 3, abs=1e-15)


def test_kendall_ties_count_zero():
    # pairs: (0,1) tie in x, (0,2) +, (1,2) +  -> 2 * 2 / 6
    assert kcc([1, 1, 2], [1, 2, 3]) == pytest.approx(2 / 3)


def test_quadrant_examples():
    assert qcc([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]) == pytest.approx(-0.8)
    x = np.array([3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.0])
    assert qcc(x, x) == pytest.approx(6 / 7)


def test_quadrant_independent_signs_near_zero():
    n = 400
    inside = 0
    for seed in range(200):
        r = np.random.default_rng(seed)
        # symmetric continuous samples on [-1, 1]; discrete +-1 would put the median on a data value
        inside += abs(qcc(r.uniform(-1, 1, n), r.uniform(-1, 1, n))) <= 4 / np.sqrt(n)
    assert inside / 200 >= 0.95


def test_trimmed_with_zero_fraction_is_pearson(rng):
    for _ in range(50):
        x, y = rng.normal(size=(2, 97))
        assert abs(tcc(x, y, 0.0) - pcc(x, y)) <= 1e-12


def test_trimmed_hand_example():
    x, y = np.array([1.0, 2, 3, 100]), np.array([1.0, 2, 3, -100])
    # z = (1, 4, 9, -10000), k = 1; strict bounds z(1) = -10000 and z(4) = 9 drop both ends
    np.testing.assert_array_equal(trim_mask(x * y, 0.25), [True, True, False, False])
    assert tcc(x, y, 0.25) == pytest.approx(1.0, abs=1e-15)
    assert tcc(x, y, 0.25) == pytest.approx(pearson_loop([1, 2, 0, 0], [1, 2, 0, 0]))


def test_trimmed_delete_mode():
    x = np.array([1.0, 2, 3, 4, 5, 6, 7, 100])
    y = np.array([1.0, 2, 3, 4, 5, 6, 7, -100])
    # k = 1 removes the smallest product (-10000) and the largest (49)
    assert tcc(x, y, 0.125, mode="delete") == pytest.approx(pcc(x[:6], y[:6]))
    with pytest.raises(ValueError):
        tcc(x, y, 0.1, mode="winsor")


def test_trim_mask_ties_with_boundary_are_dropped():
    z = np.array([0.0, 0.0, 1.0, 2.0, 3.0, 3.0])
    np.testing.assert_array_equal(trim_mask(z, 1 / 6), [False, False, True, True, False, False])


def test_robust_estimators_resist_one_outlier():
    r = np.random.default_rng(2024)
    xy = r.multivariate_normal([0, 0], [[1, 0.8], [0.8, 1]], size=500)
    xy[0] = (100.0, -100.0)
    x, y = xy.T
    assert abs(pcc(x, y) - 0.8) > 0.2
    assert abs(tcc(x, y, 0.03) - 0.8) < 0.1


@pytest.mark.parametrize("name", list(ESTIMATORS))
def test_constant_input_warns_and_returns_zero(name):
    f = ESTIMATORS[name]
    with pytest.warns(DegenerateCorrelationWarning) if name in ("pearson", "trimmed") else warnings.catch_warnings():
        assert f(np.ones(10), np.arange(10.0)) == 0.0


@pytest.mark.parametrize("bad", [([1.0], [1.0]), ([1, 2, 3], [1, 2]), ([1, np.nan, 3], [1, 2, 3])])
def test_input_validation(bad):
    with pytest.raises(ValueError):
        pcc(*bad)


def test_fraction_validation():
    with pytest.raises(ValueError):
        tcc([1, 2, 3], [1, 2, 3], 0.5)
    with pytest.raises(ValueError):
        CorrMeasure("trimmed", trim_c=-0.1)
    with pytest.raises(ValueError):
        CorrMeasure("spearman")


def test_measure_object():
    m = CorrMeasure("trimmed", 0.05, "delete")
    x, y = np.random.default_rng(0).normal(size=(2, 40))
    assert m(x, y) == tcc(x, y, 0.05, "delete")
    assert m.tag == "trimmed(c=0.05,delete)"
    assert CorrMeasure("kendall").tag == "kendall"


# -- oracles ----------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(pairs(min_size=2, max_size=40, ties=True))
def test_kendall_matches_double_loop(xy):
    x, y = xy
    assert kcc(x, y) == kendall_loop(x.tolist(), y.tolist())


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_pearson_quadrant_trimmed_match_loops(xy):
    x, y = xy
    assert qcc(x, y) == pytest.approx(quadrant_loop(x, y), abs=1e-12)
    assume(nonconstant(x) and nonconstant(y))
    assert pcc(x, y) == pytest.approx(pearson_loop(x.tolist(), y.tolist()), abs=1e-9)
    z = x * y
    keep = trim_mask(z, 0.1)
    assume(nonconstant(x * keep) and nonconstant(y * keep))
    assert tcc(x, y, 0.1) == pytest.approx(trimmed_loop(x.tolist(), y.tolist(), 0.1), abs=1e-9)


# -- properties ---------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(pairs(), st.sampled_from(list(ESTIMATORS)))
def test_range_and_symmetry(xy, name):
    x, y = xy
    f = ESTIMATORS[name]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCorrelationWarning)
        r = f(x, y)
        assert -1.0 <= r <= 1.0
        assert r == pytest.approx(f(y, x), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(pairs(ties=True), st.floats(0.1, 10), st.floats(-50, 50))
def test_rank_estimators_invariant_to_increasing_maps(xy, a, b):
    x, y = xy
    gx = a * x**3 + b  # strictly increasing
    assert kcc(gx, y) == kcc(x, y)
    assert qcc(gx, y) == qcc(x, y)


@settings(max_examples=150, deadline=None)
@given(pairs(), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-50, 50))
def test_scale_invariance(xy, a, b, shift):
    x, y = xy
    assume(nonconstant(x) and nonconstant(y))
    assert pcc(a * x + shift, b * y) == pytest.approx(pcc(x, y), abs=1e-9)
    keep = trim_mask(x * y, 0.05)
    assume(nonconstant(x * keep) and nonconstant(y * keep))
    assert tcc(a * x, b * y, 0.05) == pytest.approx(tcc(x, y, 0.05), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(pairs(ties=True))
def test_sign_flip_antisymmetry(xy):
    x, y = xy
    assert kcc(-x, y) == -kcc(x, y)
    assert qcc(-x, y) == -qcc(x, y)


# -- matrix forms ------------------------------------------------------------


@pytest.mark.parametrize("kind", ["pearson", "kendall", "quadrant"])
def test_matrix_matches_scalar(kind, rng):
    rows = rng.gamma(2.0, size=(7, 53))
    rows[3] = np.round(rows[3])  # ties
    g = corr_matrix(rows, kind)
    f = ESTIMATORS[kind]
    for i in range(7):
        for j in range(i + 1, 7):
            assert g[i, j] == pytest.approx(f(rows[i], rows[j]), abs=1e-12)
    np.testing.assert_array_equal(g, g.T)
    np.testing.assert_array_equal(np.diag(g), 1.0)


@pytest.mark.parametrize("mode", ["zero", "delete"])
def test_trimmed_matrix_matches_scalar(mode, rng):
    rows = rng.gamma(2.0, size=(6, 80))
    m = CorrMeasure("trimmed", 0.05, mode)
    g = corr_matrix(rows, m)
    for i in range(6):
        for j in range(i + 1, 6):
            assert g[i, j] == pytest.approx(m(rows[i], rows[j]), abs=1e-12)


def test_trimmed_full_evaluation_equals_mirrored(rng):
    rows = rng.gamma(2.0, size=(9, 64))
    np.testing.assert_allclose(corr_matrix(rows, "trimmed", full=True), corr_matrix(rows, "trimmed"), atol=1e-12)


def test_kendall_matrix_exact_on_integer_ties(rng):
    rows = rng.integers(0, 4, size=(5, 120)).astype(float)
    g = corr_matrix(rows, "kendall")
    for i in range(5):
        for j in range(i + 1, 5):
            assert g[i, j] == kendall_loop(rows[i].tolist(), rows[j].tolist())


def test_matrix_constant_row_is_zeroed(rng):
    rows = rng.normal(size=(4, 30))
    rows[2] = 5.0
    for kind in ("pearson", "kendall", "quadrant", "trimmed"):
        g = corr_matrix(rows, kind)
        assert np.all(g[2] == 0) and np.all(g[:, 2] == 0)
        assert g[0, 0] == 1.0


def test_matrix_rejects_bad_shape():
    with pytest.raises(ValueError):
        corr_matrix(np.ones(5), "pearson")
    with pytest.raises(ValueError):
        corr_matrix(np.ones((3, 1)), "pearson")
