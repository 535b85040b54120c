"""Diagnostics for node arrays.

Lebesgue functions and constants, growth reports, empirical measures and
moment distances to equilibrium references, the L(G) functional of Bos
arrays with its predicted Vandermonde limit, closed-form transfinite
diameters, and estimators of the extremal function V_K.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.linalg import lu_factor, lu_solve

from .basis import GradedMonomialBasis, _power_table, as_points, auto_basis, graded_indices
from .meshes import Mesh, lobatto_nodes
from .points import LejaSequence, RadialDistribution
from .vandermonde import DegenerateStageError, NodeArrayStage, vdm_matrix

CHUNK = 8192


# -- Lebesgue functions --------------------------------------------------------

def _mesh_points(mesh) -> np.ndarray:
    return mesh.points if isinstance(mesh, Mesh) else as_points(mesh)


def lebesgue_function(stage: NodeArrayStage, z) -> np.ndarray:
    """sum_j |l_j(z)| at each point of z (evaluated in chunks)."""
    pts = as_points(z, stage.dim)
    out = np.empty(pts.shape[0])
    for c in range(0, pts.shape[0], CHUNK):
        out[c:c + CHUNK] = np.abs(stage.flips(pts[c:c + CHUNK])).sum(axis=0)
    return out


def _square_grid_lebesgue(stage: NodeArrayStage, axis: np.ndarray) -> np.ndarray:
    """Lebesgue function on the tensor grid axis x axis (x fastest).

    Each FLIP is Px^T A_j Py with A_j its coefficient matrix, which costs
    N m^2 (n+1) flops instead of the N^2 m^2 of a full solve.
    """
    basis = stage.basis
    N, n = stage.size, basis.degree
    coef = stage.solve(np.eye(N))
    exps = basis.exponents
    A = np.zeros((N, n + 1, n + 1))
    A[:, exps[:, 0], exps[:, 1]] = coef
    px = _power_table(axis, n, basis.family[0])
    py = _power_table(axis, n, basis.family[1])
    left = np.einsum("ap,jab->jpb", px, A)
    out = np.zeros((axis.size, axis.size))
    step = max(1, CHUNK * 64 // (axis.size ** 2))
    for c in range(0, N, step):
        out += np.abs(left[c:c + step] @ py).sum(axis=0)
    # out[p, q] is at (x_p, y_q); the mesh stores x fastest
    return out.T.ravel()


def _is_square_grid(stage: NodeArrayStage, mesh) -> bool:
    return (isinstance(mesh, Mesh) and mesh.params.get("kind") == "square"
            and stage.dim == 2 and not np.any(stage.points.imag))


def lebesgue_constant(stage: NodeArrayStage, eval_mesh) -> float:
    """Max over the evaluation mesh of the Lebesgue function."""
    if stage.log_det.degenerate:
        raise DegenerateStageError("Lebesgue constant of a degenerate stage")
    if _is_square_grid(stage, eval_mesh):
        p = eval_mesh.params
        axis = lobatto_nodes(max(p["density"] * p["n"], 1) + 1)
        return float(_square_grid_lebesgue(stage, axis).max())
    return float(lebesgue_function(stage, _mesh_points(eval_mesh)).max())


@dataclass(frozen=True)
class GrowthReport:
    """Lebesgue constants with the three growth normalizations.

    ``root_scale`` is Lambda_n^(1/n), ``poly_scale`` log Lambda_n / log n and
    ``loglog_scale`` Lambda_n / log(n+2)^2; undefined entries are nan.
    """

    degrees: tuple
    lebesgue_constants: tuple
    root_scale: tuple
    poly_scale: tuple
    loglog_scale: tuple

    def rows(self):
        """(n, metric, value) rows for CSV output."""
        for i, n in enumerate(self.degrees):
            yield n, "lebesgue", self.lebesgue_constants[i]
            yield n, "lebesgue_rootscale", self.root_scale[i]
            yield n, "lebesgue_polyscale", self.poly_scale[i]
            yield n, "lebesgue_loglogscale", self.loglog_scale[i]


def growth_report(stages: Sequence[NodeArrayStage], eval_meshes) -> GrowthReport:
    """Lebesgue constants of a family of stages.

    ``eval_meshes`` is one mesh for all stages, a sequence (one per stage),
    or a callable mapping the degree to a mesh.
    """
    degrees, lams = [], []
    for i, st in enumerate(stages):
        if callable(eval_meshes):
            mesh = eval_meshes(st.degree)
        elif isinstance(eval_meshes, (list, tuple)):
            mesh = eval_meshes[i]
        else:
            mesh = eval_meshes
        degrees.append(st.degree)
        lams.append(lebesgue_constant(st, mesh))
    root = [lam ** (1 / n) if n >= 1 else math.nan for n, lam in zip(degrees, lams)]
    poly = [math.log(lam) / math.log(n) if n >= 2 else math.nan for n, lam in zip(degrees, lams)]
    loglog = [lam / math.log(n + 2) ** 2 for n, lam in zip(degrees, lams)]
    return GrowthReport(tuple(degrees), tuple(lams), tuple(root), tuple(poly), tuple(loglog))


# -- measures and moments --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite measure sum_i weights[i] delta_{support[i]}."""

    support: np.ndarray
    weights: np.ndarray
    mass: float = None

    def __post_init__(self):
        pts = as_points(self.support).copy()
        w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (pts.shape[0],):
            raise ValueError("need one weight per support point")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        total = float(w.sum())
        if self.mass is None:
            object.__setattr__(self, "mass", total)
        elif abs(total - self.mass) > 1e-12 * max(1.0, abs(self.mass)):
            raise ValueError(f"weights sum to {total}, not the stated mass {self.mass}")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def __len__(self):
        return self.support.shape[0]

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, np.asarray(values)))

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.support, self.weights * factor)

    def normalized(self) -> "DiscreteMeasure":
        return self.scaled(1.0 / self.mass)


def empirical_measure(stage: NodeArrayStage) -> DiscreteMeasure:
    """Uniform probability measure on the stage's points."""
    N = stage.size
    return DiscreteMeasure(stage.points, np.full(N, 1.0 / N))


@dataclass(frozen=True, eq=False)
class EquilibriumReference:
    """Equilibrium measure of a compact, known through its moments.

    ``moment_oracle(alpha)`` returns the integral of z^alpha.
    """

    compact_id: str
    moment_oracle: Callable
    dim: int = 1

    def moment(self, alpha) -> complex:
        return self.moment_oracle(tuple(int(a) for a in alpha))

    @classmethod
    def interval(cls) -> "EquilibriumReference":
        """Arcsine measure dx / (pi sqrt(1 - x^2)) on [-1, 1]."""
        return cls("interval", _arcsine_moment, 1)

    @classmethod
    def circle(cls) -> "EquilibriumReference":
        """Normalized arc length on |z| = 1 (also the equilibrium measure of the disk)."""
        return cls("circle", lambda a: 1.0 if a[0] == 0 else 0.0, 1)

    @classmethod
    def real_disk(cls) -> "EquilibriumReference":
        """Equilibrium measure of B_2: r dr dtheta / (2 pi sqrt(1 - r^2))."""
        return cls("real_disk_B2", _real_disk_moment, 2)

    @classmethod
    def for_compact(cls, compact_id: str) -> "EquilibriumReference":
        table = {"interval": cls.interval, "circle": cls.circle,
                 "disk_boundary": cls.circle, "real_disk_B2": cls.real_disk}
        if compact_id not in table:
            raise ValueError(f"no equilibrium reference for {compact_id!r}")
        return table[compact_id]()


def _quad(f, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200, **kw)
    return val


def _arcsine_moment(alpha) -> float:
    (k,) = alpha
    if k % 2:
        return 0.0
    # (1 - x^2)^(-1/2) goes into the algebraic weight
    return _quad(lambda x: x ** k, -1, 1, weight="alg", wvar=(-0.5, -0.5)) / math.pi


def _real_disk_moment(alpha) -> float:
    a, b = alpha
    if a % 2 or b % 2:
        return 0.0
    p = a + b
    # radial: int_0^1 r^(p+1) / sqrt(1 - r^2) dr, with (1-r)^(-1/2) as weight
    radial = _quad(lambda r: r ** (p + 1) / math.sqrt(1 + r), 0, 1,
                   weight="alg", wvar=(0, -0.5))
    # angular mean of cos^a sin^b for even a, b
    angular = _double_factorial(a - 1) * _double_factorial(b - 1) / _double_factorial(p)
    return radial * angular


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def moment_distance(mu: DiscreteMeasure, ref: EquilibriumReference,
                    max_total_degree: int) -> float:
    """max over |alpha| <= D of |int z^alpha dmu - reference moment|."""
    if mu.dim != ref.dim:
        raise ValueError(f"measure of dimension {mu.dim} vs reference of dimension {ref.dim}")
    basis = GradedMonomialBasis(mu.dim, max_total_degree)
    E = basis.evaluate(mu.support)
    moments = E @ mu.weights
    worst = 0.0
    for i, alpha in enumerate(basis.indices):
        worst = max(worst, abs(moments[i] - ref.moment(alpha)))
    return float(worst)


# -- L(G) and Bos arrays ----------------------------------------------------------

class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _log_divided_difference(G, dG, x, y):
    h = y - x
    if dG is not None and h < 1e-7 * max(1.0, abs(x)):
        return math.log(float(dG(x + h / 2)))
    return math.log((float(G(y)) - float(G(x))) / h)


def l_functional(G: RadialDistribution, tol: float = 1e-9) -> float:
    """L(G) = int_0^1 x^2 log G(x) dx + 2 int_0^1 int_x^1 x log(G(y) - G(x)) dy dx.

    The diagonal singularity is removed by writing
    log(G(y) - G(x)) = log(y - x) + log((G(y) - G(x))/(y - x)); the first part
    integrates in closed form, the divided-difference part is smooth and
    goes to nested adaptive quadrature.

    Raises
    ------
    ValueError
        If G is not strictly increasing on a probe grid.
    QuadratureError
        If any adaptive rule reports non-convergence.
    """
    if not isinstance(G, RadialDistribution):
        G = RadialDistribution(G)
    probe = np.asarray(G(np.linspace(0, 1, 1001)), dtype=float)
    if np.any(np.diff(probe) <= 0):
        raise ValueError("L(G) needs a strictly increasing G")
    g, dg = G.G, G.dG
    inner_tol = tol / 10

    def quad(f, a, b):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(f, a, b, epsabs=inner_tol, epsrel=1e-12, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(str(exc)) from exc
        return val

    def first(x):
        return x * x * math.log(float(g(x))) if x > 0 else 0.0

    def inner(x):
        if x >= 1:
            return 0.0
        smooth = quad(lambda y: _log_divided_difference(g, dg, x, y), x, 1)
        u = 1 - x
        return x * (smooth + u * math.log(u) - u)

    return quad(first, 0, 1) + 2 * quad(inner, 0, 1)


def bos_vdm_limit(G: RadialDistribution, tol: float = 1e-9) -> float:
    """Predicted limit of |VDM|^(1/l_n) for Bos arrays: exp((3/4) L(G)) / sqrt(2)."""
    return math.exp(0.75 * l_functional(G, tol)) / math.sqrt(2)


# -- closed-form transfinite diameters --------------------------------------------

def tdiam_ball_closed_form(d: int) -> float:
    """Transfinite diameter of the real unit ball B_d."""
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    h = sum(1.0 / j for j in range(1, d + 1))
    alt = sum((-1) ** j / j for j in range(1, d + 1))
    expo = -0.25 * (2 * d + 1) / d * h + 0.5
    if d % 2 == 0:
        expo += 0.5 * math.log(2) + alt / (4 * d)
    else:
        expo += (d - 1) / (2 * d) * math.log(2) - alt / (4 * d)
    return 0.5 * math.exp(expo)


def tdiam_simplex_closed_form(d: int) -> float:
    """Transfinite diameter of the standard simplex S_d, the square of the ball value."""
    return tdiam_ball_closed_form(d) ** 2


# -- V_K estimators ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TriangularPolynomial:
    """G_{alpha(s)}(z) = z^alpha(s) - (interpolant of z^alpha(s) at the first s points).

    Index s is 0-based in the graded order: alpha(0) = 0, and with s points
    the polynomial is monic in the (s+1)-th monomial and vanishes at them.
    """

    points: np.ndarray
    s: int
    alpha: tuple
    basis: GradedMonomialBasis
    _lu: tuple

    @property
    def degree(self) -> int:
        return sum(self.alpha)

    def __call__(self, z) -> np.ndarray:
        pts = as_points(z, self.basis.dim)
        lead = np.prod(pts ** np.array(self.alpha), axis=1)
        if self.s == 0:
            return lead
        E = self.basis.evaluate(pts, count=self.s)
        coef = self._coef
        return lead - coef @ E

    @property
    def _coef(self):
        samples = np.prod(self.points ** np.array(self.alpha), axis=1)
        lu, piv = self._lu
        return lu_solve((lu, piv), samples, trans=1)


def triangular_g_polynomials(points, s: int,
                             basis: Optional[GradedMonomialBasis] = None) -> TriangularPolynomial:
    """The triangular polynomial built from the first s points of an ordered sequence.

    Raises
    ------
    DegenerateStageError
        If the first s points are not unisolvent for the first s basis elements.
    """
    pts = as_points(points.points if isinstance(points, LejaSequence) else points)
    d = pts.shape[1]
    if s < 0 or s > pts.shape[0]:
        raise ValueError(f"s = {s} outside 0..{pts.shape[0]}")
    n = 0
    while len(graded_indices(d, n)) <= s:
        n += 1
    if basis is None:
        basis = auto_basis(pts, n)
    else:
        basis = basis.with_degree(n)
    alpha = graded_indices(d, n)[s]
    head = pts[:s].copy()
    lu = (None, None)
    if s:
        V = vdm_matrix(basis, head)
        lu = lu_factor(V.astype(complex) if np.iscomplexobj(V) else V, check_finite=False)
        piv = np.abs(np.diag(lu[0]))
        if piv.min() < 1e-13 * np.abs(V).max():
            raise DegenerateStageError(f"first {s} points are not unisolvent")
    return TriangularPolynomial(head, s, alpha, basis, lu)


def vk_lebesgue_estimator(stages: Sequence[NodeArrayStage], z) -> list:
    """(n, (1/n) log Lambda_n(z)) for each stage of degree n >= 1."""
    out = []
    for st in stages:
        if st.degree < 1:
            continue
        lam = float(lebesgue_function(st, as_points(z, st.dim))[0])
        out.append((st.degree, math.log(lam) / st.degree))
    return out


def vk_triangular_estimator(points, z, mesh, s_values: Sequence[int]) -> list:
    """(s, (1/|alpha(s)|) log(|G_s(z)| / max_mesh |G_s|)) for each s with |alpha(s)| >= 1."""
    out = []
    mpts = _mesh_points(mesh)
    for s in s_values:
        g = triangular_g_polynomials(points, s)
        if g.degree < 1:
            continue
        num = abs(g(z)[0])
        den = np.abs(g(mpts)).max()
        out.append((s, math.log(num / den) / g.degree))
    return out


def vk_estimator(source, z, mesh=None, s_values=None) -> list:
    """Raw V_K(z) estimates: Lebesgue-function based for a list of stages,
    triangular-polynomial based for an ordered sequence (needs ``mesh``)."""
    if isinstance(source, (list, tuple)) and source and isinstance(source[0], NodeArrayStage):
        return vk_lebesgue_estimator(source, z)
    if mesh is None:
        raise ValueError("the triangular estimator needs a mesh for the norms")
    pts = source.points if isinstance(source, LejaSequence) else as_points(source)
    if s_values is None:
        s_values = range(1, pts.shape[0] + 1)
    return vk_triangular_estimator(pts, z, mesh, s_values)
