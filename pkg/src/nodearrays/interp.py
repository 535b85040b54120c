"""Lagrange interpolation on a node array and interpolation-error probes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

from .basis import MONOMIAL, GradedMonomialBasis, as_points
from .meshes import Mesh
from .vandermonde import NodeArrayStage


@dataclass(frozen=True, eq=False)
class Interpolant:
    """L_n f as coefficients in the stage's graded basis."""

    stage: NodeArrayStage
    coefficients: np.ndarray

    @property
    def basis(self) -> GradedMonomialBasis:
        return self.stage.basis

    def __call__(self, z) -> np.ndarray:
        return self.coefficients @ self.basis.evaluate(as_points(z, self.stage.dim))

    def monomial_coefficients(self) -> np.ndarray:
        """Coefficients with respect to the graded monomials z^alpha."""
        basis = self.basis
        if basis.is_monomial:
            return self.coefficients.copy()
        index = {a: i for i, a in enumerate(basis.indices)}
        out = np.zeros(basis.size, dtype=self.coefficients.dtype)
        # expand each product of univariate Chebyshev factors
        for i, alpha in enumerate(basis.indices):
            factors = []
            for k, f in zip(alpha, basis.family):
                e = np.zeros(k + 1)
                e[k] = 1.0
                factors.append(e if f == MONOMIAL else C.cheb2poly(e))
            grids = np.meshgrid(*[np.arange(len(v)) for v in factors], indexing="ij")
            vals = np.ones(grids[0].shape)
            for v, g in zip(factors, grids):
                vals = vals * v[g]
            for pos in zip(*[g.ravel() for g in grids]):
                c = vals[pos]
                if c:
                    out[index[tuple(int(p) for p in pos)]] += self.coefficients[i] * c
        return out


def lagrange_interpolate(stage: NodeArrayStage, samples) -> Interpolant:
    """Interpolant of ``samples`` (values at the stage's points, in order).

    Solves V^T c = f with the stage's stored LU factorization.
    """
    f = np.asarray(samples)
    if f.shape != (stage.size,):
        raise ValueError(f"need {stage.size} samples, got shape {f.shape}")
    return Interpolant(stage, stage.solve(f, transposed=True))


def _evaluate(f: Callable, pts: np.ndarray) -> np.ndarray:
    """f on an array of points of shape (P, d); real arrays for real points."""
    arg = pts.real if not np.any(pts.imag) else pts
    return np.asarray(f(arg)).reshape(pts.shape[0])


def sample(stage: NodeArrayStage, f: Callable) -> np.ndarray:
    return _evaluate(f, stage.points)


def interpolate(stage: NodeArrayStage, f: Callable) -> Interpolant:
    """L_n f for a function oracle taking points of shape (P, d)."""
    return lagrange_interpolate(stage, sample(stage, f))


def _points_of(mesh) -> np.ndarray:
    return mesh.points if isinstance(mesh, Mesh) else as_points(mesh)


def sup_error(interp: Interpolant, f: Callable, eval_mesh) -> float:
    """max over the mesh of |f - L_n f|."""
    pts = _points_of(eval_mesh)
    return float(np.abs(_evaluate(f, pts) - interp(pts)).max())


def least_squares_error(basis: GradedMonomialBasis, f: Callable, eval_mesh) -> float:
    """Sup-error of the discrete least-squares fit from P_n on the mesh.

    An upper-bound proxy for the best approximation error d_n(f, K); it is
    not the minimax value.
    """
    pts = _points_of(eval_mesh)
    E = basis.evaluate(pts).T
    fv = _evaluate(f, pts)
    coef, *_ = np.linalg.lstsq(E, fv, rcond=None)
    return float(np.abs(E @ coef - fv).max())


def holo_convergence_probe(stages: Sequence[NodeArrayStage], f: Callable, eval_mesh) -> list:
    """(n, error, error^(1/n)) for each stage; ``eval_mesh`` may be a callable of n."""
    out = []
    for st in stages:
        mesh = eval_mesh(st.degree) if callable(eval_mesh) else eval_mesh
        err = sup_error(interpolate(st, f), f, mesh)
        rate = err ** (1.0 / st.degree) if st.degree >= 1 else math.nan
        out.append((st.degree, err, rate))
    return out
