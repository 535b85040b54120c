"""Gram matrices, orthonormal polynomials and Bergman functions.

Also builds the Bernstein-Markov measure
nu = c * sum_{k=3}^{k_max} mu_k / (k log^2 k), with mu_k uniform on degree-k
(approximate) Fekete points, together with the L^2-to-sup envelope that the
construction guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_triangular

from .basis import GradedMonomialBasis, as_points, auto_basis, dim_pn
from .diagnostics import DiscreteMeasure, EquilibriumReference, moment_distance
from .meshes import Mesh
from .points import approx_fekete_greedy

PIVOT_RTOL = 1e-12


class GramDegeneracyError(ValueError):
    """Cholesky of a Gram matrix met a non-positive pivot."""

    def __init__(self, index: int, pivot: float, threshold: float):
        self.index = index
        self.pivot = pivot
        super().__init__(f"Gram matrix is numerically singular at pivot {index} "
                         f"(value {pivot:.3e} <= {threshold:.3e})")


def gram_matrix(basis: GradedMonomialBasis, mu: DiscreteMeasure) -> np.ndarray:
    """G[i, j] = sum_k w_k e_i(x_k) conj(e_j(x_k))."""
    E = basis.evaluate(mu.support)
    return (E * mu.weights) @ E.conj().T


def _cholesky(G: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, reporting the first failing pivot."""
    N = G.shape[0]
    L = np.zeros_like(G)
    threshold = PIVOT_RTOL * max(np.trace(G).real / N, np.finfo(float).tiny)
    for k in range(N):
        pivot = (G[k, k] - np.vdot(L[k, :k], L[k, :k])).real
        if not pivot > threshold:
            raise GramDegeneracyError(k, float(pivot), threshold)
        L[k, k] = math.sqrt(pivot)
        if k + 1 < N:
            L[k + 1:, k] = (G[k + 1:, k] - L[k + 1:, :k] @ L[k, :k].conj()) / L[k, k]
    return L


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """q = L^{-1} e, orthonormal in L^2(measure), with G = L L^H.

    ``transform`` is the lower-triangular L^{-1}; row j holds the
    coefficients of q_j in the graded basis, with positive leading entry.
    """

    basis: GradedMonomialBasis
    cholesky: np.ndarray
    measure: Optional[DiscreteMeasure] = None

    @property
    def degree_n(self) -> int:
        return self.basis.degree

    @property
    def size(self) -> int:
        return self.basis.size

    @property
    def transform(self) -> np.ndarray:
        return solve_triangular(self.cholesky, np.eye(self.size), lower=True)

    def evaluate(self, z) -> np.ndarray:
        """q_j(z), shape (N, P)."""
        E = self.basis.evaluate(as_points(z, self.basis.dim))
        return solve_triangular(self.cholesky, E, lower=True, check_finite=False)


def orthonormalize(gram: np.ndarray, basis: Optional[GradedMonomialBasis] = None,
                   measure: Optional[DiscreteMeasure] = None) -> OrthonormalBasis:
    """Orthonormal basis from a Gram matrix by Cholesky.

    Raises
    ------
    GramDegeneracyError
        If a pivot falls below 1e-12 times the mean diagonal entry; the
        error carries the pivot index.
    """
    G = np.asarray(gram)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("Gram matrix must be square")
    if basis is None:
        if measure is None:
            raise ValueError("need a basis or a measure to interpret the Gram matrix")
        basis = auto_basis(measure.support, _degree_for(measure.dim, G.shape[0]))
    if basis.size != G.shape[0]:
        raise ValueError(f"Gram of size {G.shape[0]} for a basis of {basis.size}")
    return OrthonormalBasis(basis, _cholesky(G), measure)


def _degree_for(d: int, N: int) -> int:
    n = 0
    while dim_pn(d, n) < N:
        n += 1
    if dim_pn(d, n) != N:
        raise ValueError(f"{N} is not dim P_n in {d} variables")
    return n


def orthonormal_basis(mu: DiscreteMeasure, n: int,
                      basis: Optional[GradedMonomialBasis] = None) -> OrthonormalBasis:
    """Gram matrix and Cholesky in one step."""
    if basis is None:
        basis = auto_basis(mu.support, n)
    return orthonormalize(gram_matrix(basis, mu), basis, mu)


def bergman_function(onb: OrthonormalBasis, z) -> np.ndarray:
    """B_n(z) = sum_j |q_j(z)|^2 at each point."""
    Q = onb.evaluate(z)
    return np.einsum("ij,ij->j", Q.conj(), Q).real


def bm_constant(onb: OrthonormalBasis, eval_mesh, chunk: int = 8192) -> float:
    """max over the mesh of sqrt(B_n): the best M_n in ||p||_mesh <= M_n ||p||_L2."""
    pts = eval_mesh.points if isinstance(eval_mesh, Mesh) else as_points(eval_mesh)
    best = 0.0
    for c in range(0, pts.shape[0], chunk):
        best = max(best, float(bergman_function(onb, pts[c:c + chunk]).max()))
    return math.sqrt(best)


def bergman_weakstar_probe(onb: OrthonormalBasis, nu: DiscreteMeasure,
                           ref: EquilibriumReference, max_deg: int) -> float:
    """Moment distance of (1/N) B_n dnu to the equilibrium reference."""
    dens = bergman_function(onb, nu.support) / onb.size
    return moment_distance(DiscreteMeasure(nu.support, nu.weights * dens), ref, max_deg)


# -- reference measures ----------------------------------------------------------

def roots_of_unity_measure(m: int) -> DiscreteMeasure:
    """Uniform probability on the m-th roots of unity."""
    z = np.exp(2j * np.pi * np.arange(m) / m)
    return DiscreteMeasure(z.reshape(-1, 1), np.full(m, 1.0 / m))


def arcsine_measure(m: int) -> DiscreteMeasure:
    """Gauss-Chebyshev rule with m nodes: exact for the arcsine measure up to degree 2m-1."""
    x = np.cos(np.pi * (2 * np.arange(m) + 1) / (2 * m))
    return DiscreteMeasure(x.reshape(-1, 1), np.full(m, 1.0 / m))


# -- constructive Bernstein-Markov measure ------------------------------------------

@dataclass(frozen=True, eq=False)
class BMConstruction:
    """Truncated Bernstein-Markov measure with its certificate data.

    Attributes
    ----------
    measure : DiscreteMeasure
        nu normalized to mass one.
    c : float
        Normalizing constant 1 / sum_{k=3}^{k_max} 1/(k log^2 k).
    tail_bound : float
        1/log(k_max), a bound for the dropped part of the infinite series.
    sizes : dict
        m_k = number of degree-k Fekete surrogate points.
    flip_norms : dict
        a_k = max over the evaluation mesh of |l_j^(k)|; exactly 1 for true
        Fekete points, slightly more for the greedy surrogates.
    """

    measure: DiscreteMeasure
    c: float
    k_max: int
    tail_bound: float
    sizes: dict
    flip_norms: dict = field(default_factory=dict)

    def envelope(self, n: int) -> float:
        """min over k >= max(n, 3) of k m_k (log k)^2 a_k / c."""
        ks = [k for k in self.sizes if k >= max(n, 3)]
        if not ks:
            raise ValueError(f"degree {n} exceeds k_max = {self.k_max}")
        return min(k * self.sizes[k] * math.log(k) ** 2 * self.flip_norms.get(k, 1.0) / self.c
                   for k in ks)


def _merge(points: np.ndarray, weights: np.ndarray):
    """Combine weights of coincident support points (to 1e-14)."""
    key = np.round(np.concatenate([points.real, points.imag], axis=1) / 1e-14).astype(np.int64)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    merged = np.zeros(first.size)
    np.add.at(merged, inverse.ravel(), weights)
    order = np.argsort(first)
    return points[first[order]], merged[order]


def bm_measure_construct(mesh_for_degree: Callable[[int], Mesh], k_max: int,
                         eval_mesh=None) -> BMConstruction:
    """Build nu from approximate Fekete points of degrees 3..k_max.

    Parameters
    ----------
    mesh_for_degree : callable
        k -> candidate mesh for the degree-k Fekete surrogate.
    eval_mesh : Mesh, optional
        Mesh on which the surrogate FLIP norms a_k are measured; when
        omitted a_k is taken as 1 (the exact Fekete value).
    """
    if k_max < 3:
        raise ValueError("k_max must be >= 3")
    pts, wts, sizes, norms = [], [], {}, {}
    for k in range(3, k_max + 1):
        stage = approx_fekete_greedy(mesh_for_degree(k), k)
        m = stage.size
        sizes[k] = m
        pts.append(stage.points)
        wts.append(np.full(m, 1.0 / (m * k * math.log(k) ** 2)))
        if eval_mesh is not None:
            epts = eval_mesh.points if isinstance(eval_mesh, Mesh) else as_points(eval_mesh)
            norms[k] = float(np.abs(stage.flips(epts)).max())
    raw = np.concatenate(wts)
    c = 1.0 / raw.sum()
    support, weights = _merge(np.concatenate(pts), raw * c)
    nu = DiscreteMeasure(support, weights / weights.sum())
    return BMConstruction(nu, c, k_max, 1.0 / math.log(k_max), sizes, norms)
