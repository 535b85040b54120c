import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nodearrays.basis import CHEBYSHEV, GradedMonomialBasis, dim_pn
from nodearrays.vandermonde import (DegenerateStageError, LogAbsDet, NodeArrayStage,
                                    WeightFunction, flip_values, flip_values_ratio,
                                    log_abs_vdm, tdiam_estimate, vdm_matrix,
                                    weighted_log_abs_vdm)


def _roots(m):
    return np.exp(2j * np.pi * np.arange(m) / m).reshape(-1, 1)


def _diff_product(x):
    # |prod_{i<j} (x_j - x_i)|, the univariate Vandermonde oracle
    return math.prod(abs(b - a) for a, b in itertools.combinations(x, 2))


def test_vdm_matrix_examples():
    np.testing.assert_array_equal(
        vdm_matrix(GradedMonomialBasis(1, 1), [[1], [-1]]), [[1, 1], [1, -1]])
    assert np.linalg.det(vdm_matrix(GradedMonomialBasis(1, 2), [[0], [1], [2]])) == pytest.approx(2)
    V = vdm_matrix(GradedMonomialBasis(2, 1), [[0, 0], [1, 0], [0, 1]])
    assert np.linalg.det(V) == pytest.approx(1)


def test_vdm_matrix_rectangular_prefix():
    V = vdm_matrix(GradedMonomialBasis(2, 2), [[0.5, 0.2], [1, 3]])
    np.testing.assert_allclose(V, [[1, 1], [0.5, 1]])


def test_log_abs_vdm_examples():
    b = GradedMonomialBasis(1, 1)
    assert log_abs_vdm(b, [[1], [-1]]).log_modulus == pytest.approx(math.log(2), abs=1e-15)
    rep = log_abs_vdm(b, [[1], [1]])
    assert rep.degenerate and rep.log_modulus == -math.inf


def test_roots_of_unity_identity():
    m = 8
    oracle = math.log(_diff_product(_roots(m).ravel()))
    assert oracle == pytest.approx(m / 2 * math.log(m), rel=1e-13)
    ld = log_abs_vdm(GradedMonomialBasis(1, m - 1), _roots(m))
    assert ld.log_modulus == pytest.approx(m / 2 * math.log(m), rel=1e-12)


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=9, unique=True))
def test_log_abs_vdm_matches_difference_product(xs):
    xs = np.array(xs)
    gaps = np.diff(np.sort(xs))
    if gaps.min() < 1e-3:
        return
    n = len(xs) - 1
    oracle = math.log(_diff_product(xs))
    for fam in ("monomial", CHEBYSHEV):
        ld = log_abs_vdm(GradedMonomialBasis(1, n, fam), xs.reshape(-1, 1))
        assert ld.log_modulus == pytest.approx(oracle, abs=1e-8)


def test_logabsdet_flag_consistency():
    with pytest.raises(ValueError):
        LogAbsDet(-math.inf, False)
    with pytest.raises(ValueError):
        LogAbsDet(0.0, True)


@given(st.integers(0, 2 ** 32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(dim_pn(2, 3), 2)) + 1j * rng.normal(size=(dim_pn(2, 3), 2))
    b = GradedMonomialBasis(2, 3)
    a = log_abs_vdm(b, pts).log_modulus
    c = log_abs_vdm(b, pts[rng.permutation(len(pts))]).log_modulus
    assert c == pytest.approx(a, abs=1e-10)


def test_weighted_examples():
    b = GradedMonomialBasis(1, 1)
    pts = [[0.0], [1.0]]
    one = WeightFunction(lambda z: 1.0)
    assert weighted_log_abs_vdm(b, pts, one, 1).log_modulus == log_abs_vdm(b, pts).log_modulus
    gauss = WeightFunction(lambda z: math.exp(-abs(z) ** 2))
    assert weighted_log_abs_vdm(b, pts, gauss, 1).log_modulus == pytest.approx(-1.0, abs=1e-15)
    zero_at_origin = WeightFunction(lambda z: abs(z))
    assert weighted_log_abs_vdm(b, pts, zero_at_origin, 1).degenerate


def test_weighted_constant_weight(rng):
    b = GradedMonomialBasis(2, 2)
    pts = rng.normal(size=(6, 2))
    c, n = 0.37, 2
    w = WeightFunction(lambda z: c)
    expected = log_abs_vdm(b, pts).log_modulus + n * 6 * math.log(c)
    assert weighted_log_abs_vdm(b, pts, w, n).log_modulus == pytest.approx(expected, abs=1e-12)


def test_stage_construction_and_validation():
    with pytest.raises(ValueError):
        NodeArrayStage([[0.0], [1.0]], 2)
    with pytest.raises(DegenerateStageError):
        NodeArrayStage([[0.0], [0.0]], 1)
    st_ = NodeArrayStage([[0.0], [0.0]], 1, validate=False)
    assert st_.log_det.degenerate
    assert tdiam_estimate(st_) == 0.0


def test_stage_does_not_freeze_caller_array():
    pts = np.array([[-1.0], [1.0]])
    NodeArrayStage(pts, 1)
    pts[0, 0] = -0.5


def test_flip_values_examples():
    stage = NodeArrayStage([[-1.0], [0.0], [1.0]], 2)
    np.testing.assert_allclose(flip_values(stage, 0.5), [-1 / 8, 3 / 4, 3 / 8], atol=1e-14)
    for j in range(3):
        np.testing.assert_allclose(flip_values(stage, stage.points[j]), np.eye(3)[j], atol=1e-10)


def test_flips_sum_to_one(rng):
    pts = rng.uniform(-1, 1, size=(10, 2))
    stage = NodeArrayStage(pts, 3)
    z = rng.uniform(-2, 2, size=(50, 2))
    np.testing.assert_allclose(stage.flips(z).sum(axis=0), 1, atol=1e-10)


@pytest.mark.parametrize("d, n", [(1, 4), (1, 10), (2, 3), (2, 6), (2, 10)])
def test_polynomial_reproduction(d, n, rng):
    N = dim_pn(d, n)
    # Chebyshev-like spread keeps the random stage well conditioned
    if d == 1:
        pts = np.cos(np.pi * (np.arange(N) + 0.5) / N).reshape(-1, 1)
    else:
        from nodearrays.points import padua_points
        pts = padua_points(n).points
    stage = NodeArrayStage(pts, n)
    basis = GradedMonomialBasis(d, n)
    coef = rng.normal(size=N)
    z = rng.uniform(-1, 1, size=(100, d))
    p_nodes = coef @ basis.evaluate(stage.points)
    p_z = coef @ basis.evaluate(z)
    np.testing.assert_allclose(p_nodes @ stage.flips(z), p_z, atol=1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 2), st.integers(1, 3))
def test_linear_solve_matches_determinant_ratio(seed, d, n):
    rng = np.random.default_rng(seed)
    N = dim_pn(d, n)
    if N > 10:
        return
    pts = rng.uniform(-1, 1, size=(N, d))
    try:
        stage = NodeArrayStage(pts, n)
    except DegenerateStageError:
        return
    if stage.log_det.condition_estimate > 1e6:
        return
    z = rng.uniform(-1, 1, size=d)
    np.testing.assert_allclose(flip_values(stage, z), flip_values_ratio(stage, z), atol=1e-8)


def test_tdiam_estimate_examples():
    assert tdiam_estimate(NodeArrayStage([[-1.0], [1.0]], 1)) == pytest.approx(2.0, rel=1e-15)
    for n in (1, 3, 7, 15):
        m = n + 1
        stage = NodeArrayStage(_roots(m), n)
        assert tdiam_estimate(stage) == pytest.approx(m ** (1 / (m - 1)), rel=1e-12)


def test_subset_reorders_points():
    stage = NodeArrayStage([[-1.0], [0.0], [1.0]], 2)
    sub = stage.subset([2, 0, 1])
    np.testing.assert_array_equal(sub.points.ravel(), [1, -1, 0])
    assert sub.log_det.log_modulus == pytest.approx(stage.log_det.log_modulus)
