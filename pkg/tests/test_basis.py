import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nodearrays.basis import (CHEBYSHEV, GradedMonomialBasis, as_points, auto_basis,
                              basis_vector, dim_pn, graded_indices, ln_sum,
                              mesh_sup_norms, scaled_basis_vector)


@pytest.mark.parametrize("d, n, expected", [(2, 2, 6), (1, 5, 6), (3, 2, 10)])
def test_dim_pn_examples(d, n, expected):
    assert dim_pn(d, n) == expected


@pytest.mark.parametrize("d, n", [(0, 1), (-1, 2), (2, -1)])
def test_dim_pn_rejects_bad_arguments(d, n):
    with pytest.raises(ValueError):
        dim_pn(d, n)


@pytest.mark.parametrize("d, n, expected", [(2, 1, 2), (1, 3, 6), (2, 2, 8)])
def test_ln_sum_examples(d, n, expected):
    assert ln_sum(d, n) == expected


def test_ln_sum_matches_degree_sum():
    for d in range(1, 5):
        for n in range(0, 31):
            if dim_pn(d, n) > 6000:
                continue
            assert ln_sum(d, n) == sum(sum(a) for a in graded_indices(d, n))


@given(st.integers(1, 4), st.integers(0, 8))
def test_enumeration_is_graded_bijection(d, n):
    idx = graded_indices(d, n)
    assert len(idx) == dim_pn(d, n) == len(set(idx))
    expected = {a for a in itertools.product(range(n + 1), repeat=d) if sum(a) <= n}
    assert set(idx) == expected
    degs = [sum(a) for a in idx]
    assert degs == sorted(degs)
    # lexicographic order inside each degree block (descending tuples)
    for k in range(n + 1):
        block = [a for a in idx if sum(a) == k]
        assert block == sorted(block, reverse=True)


def test_basis_vector_examples():
    np.testing.assert_array_equal(basis_vector(GradedMonomialBasis(2, 1), (0, 0)), [1, 0, 0])
    np.testing.assert_array_equal(basis_vector(GradedMonomialBasis(1, 2), 2), [1, 2, 4])
    # 1, x, y, x^2, xy, y^2 at (1, i)
    v = basis_vector(GradedMonomialBasis(2, 2), (1, 1j))
    np.testing.assert_allclose(v, [1, 1, 1j, 1, 1j, -1], atol=0)


def test_basis_vector_dimension_mismatch():
    with pytest.raises(ValueError):
        basis_vector(GradedMonomialBasis(2, 1), (1, 2, 3))


def test_zero_multiindex_entry_is_one():
    b = GradedMonomialBasis(3, 4)
    z = np.array([[0.3 + 2j, -7.0, 1e3]])
    assert b.evaluate(z)[0, 0] == 1


@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2))
def test_zeroed_coordinate_annihilates_exactly_its_monomials(d, n, c):
    c = c % d
    b = GradedMonomialBasis(d, n)
    z = np.full((1, d), 0.7 - 0.2j)
    z[0, c] = 0
    v = b.evaluate(z)[:, 0]
    for a, val in zip(b.indices, v):
        assert (val == 0) == (a[c] > 0)


def test_chebyshev_family_values():
    b = GradedMonomialBasis(1, 4, CHEBYSHEV)
    x = np.linspace(-1, 1, 9)
    E = b.evaluate(x.reshape(-1, 1))
    for k in range(5):
        np.testing.assert_allclose(E[k], np.cos(k * np.arccos(x)), atol=1e-14)
    # T_k has leading coefficient 2^(k-1)
    assert b.monomial_log_shift() == pytest.approx(sum((k - 1) * math.log(2) for k in range(1, 5)))


def test_auto_basis_picks_chebyshev_for_real_coordinates():
    assert auto_basis(np.array([[0.1, 0.5j]]), 2).family == (CHEBYSHEV, "monomial")


def test_scaled_basis_vector_examples():
    b = GradedMonomialBasis(1, 1)
    np.testing.assert_array_equal(scaled_basis_vector(b, 2, [1, 1]), basis_vector(b, 2))
    np.testing.assert_array_equal(scaled_basis_vector(b, 2, [1, 2]), [1, 1])
    with pytest.raises(ValueError):
        scaled_basis_vector(b, 2, [1, 0])
    with pytest.raises(ValueError):
        scaled_basis_vector(b, 2, [1, -3])


def test_scaled_determinant_is_product_of_scales(rng):
    b = GradedMonomialBasis(2, 1)
    for _ in range(20):
        pts = rng.normal(size=(3, 2))
        scales = rng.uniform(0.1, 5, size=3)
        V = np.column_stack([basis_vector(b, p) for p in pts])
        S = np.column_stack([scaled_basis_vector(b, p, scales) for p in pts])
        assert np.linalg.det(V) / np.prod(scales) == pytest.approx(np.linalg.det(S), rel=1e-10)


def test_mesh_sup_norms():
    b = GradedMonomialBasis(1, 2)
    np.testing.assert_allclose(mesh_sup_norms(b, np.array([[-2.0], [1.0]])), [1, 2, 4])


def test_as_points_shapes():
    assert as_points(3.0).shape == (1, 1)
    assert as_points([1, 2, 3], d=1).shape == (3, 1)
    assert as_points([[1, 2]]).shape == (1, 2)
    with pytest.raises(ValueError):
        as_points([[1, 2]], d=3)
