import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import zeta

from nodearrays.diagnostics import (DiscreteMeasure, EquilibriumReference, bos_vdm_limit,
                                    empirical_measure, growth_report, l_functional,
                                    lebesgue_constant, lebesgue_function, moment_distance,
                                    tdiam_ball_closed_form, tdiam_simplex_closed_form,
                                    triangular_g_polynomials, vk_estimator)
from nodearrays.basis import GradedMonomialBasis
from nodearrays.meshes import interval_mesh, square_mesh
from nodearrays.points import (RadialDistribution, approx_fekete_greedy, discrete_leja,
                               fekete_bruteforce, padua_points)
from nodearrays.vandermonde import NodeArrayStage

CHEB_L = -4 / 3 * math.log(2) + 2 / math.pi ** 2 * zeta(3)
EQ_L = -26 / 9 - 4 * math.log(2) + 4 * math.sqrt(2) * math.log(math.sqrt(2) + 1)


def _roots_stage(n):
    return NodeArrayStage(np.exp(2j * np.pi * np.arange(n + 1) / (n + 1)).reshape(-1, 1), n)


# -- Lebesgue constants ------------------------------------------------------------

def test_lebesgue_three_nodes():
    stage = NodeArrayStage([[-1.0], [0.0], [1.0]], 2)
    grid = np.linspace(-1, 1, 2001).reshape(-1, 1)
    assert lebesgue_constant(stage, grid) == pytest.approx(1.25, abs=1e-12)
    # oracle: 1 + |x| - x^2
    x = grid.ravel()
    np.testing.assert_allclose(lebesgue_function(stage, grid), 1 + np.abs(x) - x ** 2, atol=1e-13)


def test_lebesgue_two_nodes_is_one():
    stage = NodeArrayStage([[-1.0], [1.0]], 1)
    assert lebesgue_constant(stage, interval_mesh(1, 40)) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("n", [1, 3, 7])
def test_lebesgue_square_grid_path_matches_generic(n):
    stage = padua_points(n)
    mesh = square_mesh(n, 6)
    generic = lebesgue_function(stage, mesh.points).max()
    assert lebesgue_constant(stage, mesh) == pytest.approx(generic, rel=1e-12)


def test_lebesgue_at_least_one_and_relabel_invariant(rng):
    stage = approx_fekete_greedy(interval_mesh(7, 4), 7)
    mesh = interval_mesh(7, 40)
    lam = lebesgue_constant(stage, mesh)
    assert lam >= 1
    perm = rng.permutation(stage.size)
    assert lebesgue_constant(stage.subset(perm), mesh) == pytest.approx(lam, rel=1e-12)


def test_fekete_lebesgue_bounded_by_N():
    mesh = interval_mesh(4, 3)
    stage = fekete_bruteforce(mesh, 4)
    assert lebesgue_constant(stage, mesh) <= stage.size


def test_growth_report():
    stages = [NodeArrayStage([[-1.0], [1.0]], 1)]
    rep = growth_report(stages, interval_mesh(1, 40))
    assert rep.root_scale == (pytest.approx(1.0),)
    pad = [padua_points(n) for n in (2, 4, 8)]
    rep = growth_report(pad, lambda n: square_mesh(n, 10))
    assert rep.degrees == (2, 4, 8)
    assert all(v >= 1 for v in rep.lebesgue_constants)
    assert all(v <= 4 for v in rep.loglog_scale)
    assert len(list(rep.rows())) == 12


# -- measures -----------------------------------------------------------------------

def test_empirical_measure():
    mu = empirical_measure(NodeArrayStage([[-1.0], [1.0]], 1))
    np.testing.assert_array_equal(mu.weights, [0.5, 0.5])
    mu = empirical_measure(_roots_stage(6))
    assert mu.mass == pytest.approx(1)
    assert moment_distance(mu, EquilibriumReference.circle(), 6) < 1e-12


def test_discrete_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure([[0.0]], [-1.0])
    with pytest.raises(ValueError):
        DiscreteMeasure([[0.0], [1.0]], [0.5, 0.2], mass=1.0)
    mu = DiscreteMeasure([[0.0], [1.0]], [1.0, 3.0])
    assert mu.normalized().mass == pytest.approx(1)


def test_reference_moments():
    arc = EquilibriumReference.interval()
    assert arc.moment((0,)) == pytest.approx(1, abs=1e-13)
    assert arc.moment((1,)) == 0
    assert arc.moment((2,)) == pytest.approx(0.5, abs=1e-13)
    assert arc.moment((4,)) == pytest.approx(3 / 8, abs=1e-13)
    disk = EquilibriumReference.real_disk()
    assert disk.moment((0, 0)) == pytest.approx(1, abs=1e-12)
    # E[r^2] = E[x^2] + E[y^2]; oracle by plain 1-D quadrature
    num = integrate.quad(lambda r: r ** 3 / math.sqrt(1 - r * r), 0, 1)[0]
    den = integrate.quad(lambda r: r / math.sqrt(1 - r * r), 0, 1)[0]
    assert num / den == pytest.approx(2 / 3, abs=1e-9)
    assert disk.moment((2, 0)) + disk.moment((0, 2)) == pytest.approx(2 / 3, abs=1e-12)
    with pytest.raises(ValueError):
        EquilibriumReference.for_compact("simplex_Sd")


def test_gauss_chebyshev_sample_matches_arcsine():
    m = 20
    x = np.cos(np.pi * (2 * np.arange(m) + 1) / (2 * m))
    mu = DiscreteMeasure(x.reshape(-1, 1), np.full(m, 1 / m))
    assert moment_distance(mu, EquilibriumReference.interval(), 8) < 1e-13


# -- L(G) and closed forms -----------------------------------------------------------

def test_l_functional_lemma_values():
    assert l_functional(RadialDistribution.chebyshev()) == pytest.approx(-0.6806085842, abs=1e-6)
    assert l_functional(RadialDistribution.chebyshev()) == pytest.approx(CHEB_L, abs=1e-9)
    assert l_functional(RadialDistribution.equilibrium()) == pytest.approx(-0.675675691, abs=1e-6)
    assert l_functional(RadialDistribution.equilibrium()) == pytest.approx(EQ_L, abs=1e-9)


def test_l_functional_linear_oracle():
    # int x^2 log x = -1/9; 2 int x int_x^1 log(y-x) = 2 int x((1-x)log(1-x)-(1-x)) = -11/18
    first = integrate.quad(lambda x: x * x * math.log(x), 0, 1)[0]
    second = 2 * integrate.quad(lambda x: x * ((1 - x) * math.log(1 - x) - (1 - x))
                                if x < 1 else 0.0, 0, 1)[0]
    assert first + second == pytest.approx(-13 / 18, abs=1e-12)
    assert l_functional(RadialDistribution.linear()) == pytest.approx(-13 / 18, abs=1e-9)


@given(st.floats(0.3, 3.0))
def test_l_functional_negative_on_power_family(p):
    G = RadialDistribution(lambda x, p=p: np.asarray(x, dtype=float) ** p)
    assert l_functional(G, tol=1e-7) < 0


def test_l_functional_rejects_flat_G():
    flat = RadialDistribution(lambda x: np.minimum(1.0, 2 * np.asarray(x, dtype=float)))
    with pytest.raises(ValueError):
        l_functional(flat)


def test_bos_vdm_limit():
    assert bos_vdm_limit(RadialDistribution.equilibrium()) == pytest.approx(
        math.exp(0.75 * EQ_L) / math.sqrt(2), rel=1e-10)
    assert bos_vdm_limit(RadialDistribution.equilibrium()) == pytest.approx(0.42597, abs=5e-5)
    # L = -2/3 would give the disk's transfinite diameter
    assert math.exp(0.75 * (-2 / 3)) / math.sqrt(2) == pytest.approx(1 / math.sqrt(2 * math.e))
    assert bos_vdm_limit(RadialDistribution.equilibrium()) > bos_vdm_limit(
        RadialDistribution.chebyshev())


def test_tdiam_closed_forms():
    assert tdiam_ball_closed_form(1) == pytest.approx(0.5, abs=1e-15)
    assert tdiam_ball_closed_form(2) == pytest.approx(1 / math.sqrt(2 * math.e), abs=1e-15)
    assert tdiam_simplex_closed_form(2) == pytest.approx(1 / (2 * math.e), abs=1e-15)
    for d in range(1, 8):
        assert tdiam_simplex_closed_form(d) == pytest.approx(tdiam_ball_closed_form(d) ** 2)
    with pytest.raises(ValueError):
        tdiam_ball_closed_form(0)


# -- triangular polynomials and V_K estimators ---------------------------------------------

def test_triangular_g_examples():
    pts = np.array([[0.3], [1.0], [-1.0], [0.5]])
    g1 = triangular_g_polynomials(pts, 1)
    z = np.linspace(-2, 2, 7).reshape(-1, 1)
    np.testing.assert_allclose(g1(z), z.ravel() - 0.3, atol=1e-14)
    g2 = triangular_g_polynomials([[1.0], [-1.0]], 2)
    np.testing.assert_allclose(g2(z), z.ravel() ** 2 - 1, atol=1e-13)


def test_triangular_g_vanishes_and_is_monic_remainder(rng):
    pts = rng.uniform(-1, 1, size=(12, 2))
    for s in range(1, 10):
        g = triangular_g_polynomials(pts, s)
        np.testing.assert_allclose(g(pts[:s]), 0, atol=1e-9)
        # G = z^alpha - L(z^alpha): interpolate z^alpha at the s points by a linear solve
        b = GradedMonomialBasis(2, g.basis.degree)
        E = b.evaluate(pts[:s], count=s)
        mono = np.prod(pts[:s] ** np.array(g.alpha), axis=1)
        c = np.linalg.solve(E.T, mono)
        z = rng.uniform(-1, 1, size=(20, 2))
        expected = np.prod(z ** np.array(g.alpha), axis=1) - c @ b.evaluate(z, count=s)
        np.testing.assert_allclose(g(z), expected, atol=1e-9)


def test_vk_lebesgue_estimator_disk():
    est = vk_estimator([_roots_stage(n) for n in (8, 16, 32, 64)], 2.0)
    vals = [v for _, v in est]
    assert abs(vals[-1] - math.log(2)) < abs(vals[0] - math.log(2))
    assert vals[-1] == pytest.approx(math.log(2), abs=0.02)
    inside = vk_estimator([_roots_stage(n) for n in (16, 64)], 0.3)
    assert abs(inside[-1][1]) < 0.02


def test_vk_triangular_estimator_interval():
    mesh = interval_mesh(40, 8)
    seq = discrete_leja(mesh, 40)
    est = vk_estimator(seq, 2.0, mesh=mesh, s_values=[10, 20, 40])
    target = math.log(2 + math.sqrt(3))
    assert abs(est[-1][1] - target) < abs(est[0][1] - target)
    assert est[-1][1] == pytest.approx(target, rel=0.05)


def test_vk_estimator_needs_mesh_for_sequences():
    with pytest.raises(ValueError):
        vk_estimator(np.array([[0.0], [1.0]]), 2.0)

