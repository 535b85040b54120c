"""Generalized Vandermonde matrices, log-determinants and FLIPs."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import get_lapack_funcs

from .basis import GradedMonomialBasis, as_points, auto_basis, dim_pn, ln_sum

PIVOT_RTOL = 1e-13
PROVENANCES = ("fekete", "leja", "padua", "bos", "intertwined", "custom")


class DegenerateStageError(ValueError):
    """Raised when a node set is not (numerically) unisolvent."""


@dataclass(frozen=True)
class LogAbsDet:
    """log|det| of a Vandermonde matrix, in the monomial normalization.

    ``degenerate`` is set exactly when ``log_modulus`` is -inf.
    """

    log_modulus: float
    degenerate: bool
    condition_estimate: float = math.inf

    def __post_init__(self):
        if self.degenerate != (self.log_modulus == -math.inf):
            raise ValueError("degenerate flag must match log_modulus == -inf")


def _degenerate():
    return LogAbsDet(-math.inf, True, math.inf)


def _factor(matrix: np.ndarray):
    """Row-pivoted LU; returns (lu, piv, log|det|, degenerate, rcond-based condition)."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if a.shape[0] == 0:
        return None, None, 0.0, False, 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = sla.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = np.abs(a).max()
    if not np.all(np.isfinite(pivots)) or scale == 0 or pivots.min() < PIVOT_RTOL * scale:
        return lu, piv, -math.inf, True, math.inf
    logdet = float(np.log(pivots).sum())
    gecon, = get_lapack_funcs(("gecon",), (lu,))
    anorm = np.abs(a).sum(axis=0).max()
    rcond, _ = gecon(lu, anorm, norm="1")
    cond = math.inf if rcond == 0 else 1.0 / rcond
    return lu, piv, logdet, False, cond


def vdm_matrix(basis: GradedMonomialBasis, points) -> np.ndarray:
    """Matrix [e_i(zeta_j)] using the first m basis elements for m points."""
    pts = as_points(points, basis.dim)
    m = pts.shape[0]
    if m > basis.size:
        raise ValueError(f"{m} points exceed the {basis.size} basis elements")
    return basis.evaluate(pts, count=m)


def log_abs_vdm(basis: GradedMonomialBasis, points) -> LogAbsDet:
    """Overflow-safe log|VDM(points)| for the first m basis elements.

    The factorization runs in ``basis``'s own family; the result is shifted
    back to the monomial normalization by the triangular change of basis.
    """
    pts = as_points(points, basis.dim)
    _, _, logdet, degenerate, cond = _factor(vdm_matrix(basis, pts))
    if degenerate:
        return _degenerate()
    return LogAbsDet(logdet - basis.monomial_log_shift(pts.shape[0]), False, cond)


@dataclass(frozen=True)
class WeightFunction:
    """Non-negative weight w on a compact; ``Q = -log w``."""

    evaluator: Callable
    admissible_flag: bool = True

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points)
        vals = np.asarray([self.evaluator(p if p.size > 1 else p[0]) for p in pts], dtype=float)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError("weight must be finite and non-negative")
        return vals


def weighted_log_abs_vdm(basis, points, w: WeightFunction, n: int) -> LogAbsDet:
    """log|VDM| + n * sum log w(zeta_j); degenerate if any weight vanishes."""
    base = log_abs_vdm(basis, points)
    if base.degenerate:
        return base
    wv = w(points)
    if np.any(wv <= 0):
        return _degenerate()
    return LogAbsDet(base.log_modulus + n * float(np.log(wv).sum()), False,
                     base.condition_estimate)


class NodeArrayStage:
    """A degree-n unisolvent node set A_n of N = dim P_n points.

    Parameters
    ----------
    points : array_like, shape (N, d)
    degree : int
    basis : GradedMonomialBasis, optional
        Evaluation family; defaults to Chebyshev on real coordinates and
        monomials on complex ones.
    provenance : str
        One of ``fekete``, ``leja``, ``padua``, ``bos``, ``intertwined``, ``custom``.
    meta : dict, optional
        Free-form generator details (method, mesh size, ...).
    log_det : LogAbsDet, optional
        A log-determinant known in closed form. When given, the LU
        factorization is deferred until FLIPs are requested.
    validate : bool
        Raise DegenerateStageError for a degenerate set (default True).
    """

    def __init__(self, points, degree: int, basis: Optional[GradedMonomialBasis] = None,
                 provenance: str = "custom", meta: Optional[dict] = None,
                 log_det: Optional[LogAbsDet] = None, validate: bool = True):
        pts = as_points(points).copy()
        d = pts.shape[1]
        if pts.shape[0] != dim_pn(d, degree):
            raise ValueError(
                f"degree {degree} in {d} variables needs {dim_pn(d, degree)} points, "
                f"got {pts.shape[0]}")
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        if basis is None:
            basis = auto_basis(pts, degree)
        elif basis.dim != d or basis.degree != degree:
            raise ValueError("basis does not match the stage dimension/degree")
        self.points = pts
        self.points.setflags(write=False)
        self.degree = int(degree)
        self.basis = basis
        self.provenance = provenance
        self.meta = dict(meta or {})
        self._lu = None
        self._log_det = log_det
        if log_det is None:
            self._factorize()
        if validate and self.log_det.degenerate:
            raise DegenerateStageError(
                f"{provenance} stage of degree {degree} is not unisolvent")

    def _factorize(self):
        lu, piv, logdet, degenerate, cond = _factor(vdm_matrix(self.basis, self.points))
        self._lu = (lu, piv, degenerate)
        if self._log_det is None:
            if degenerate:
                self._log_det = _degenerate()
            else:
                self._log_det = LogAbsDet(logdet - self.basis.monomial_log_shift(), False, cond)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def log_det(self) -> LogAbsDet:
        return self._log_det

    @property
    def factorization(self):
        if self._lu is None:
            self._factorize()
        lu, piv, degenerate = self._lu
        if degenerate:
            raise DegenerateStageError("stage is numerically degenerate")
        return lu, piv

    def solve(self, rhs: np.ndarray, transposed: bool = False) -> np.ndarray:
        """Solve V x = rhs (or V^T x = rhs) with the stored factorization."""
        lu, piv = self.factorization
        rhs = np.asarray(rhs)
        if np.iscomplexobj(rhs) and not np.iscomplexobj(lu):
            return (sla.lu_solve((lu, piv), rhs.real, trans=int(transposed), check_finite=False)
                    + 1j * sla.lu_solve((lu, piv), rhs.imag, trans=int(transposed),
                                        check_finite=False))
        return sla.lu_solve((lu, piv), rhs, trans=int(transposed), check_finite=False)

    def flips(self, z) -> np.ndarray:
        """FLIP values, shape (N, P): column p holds l_1..l_N at z[p]."""
        return self.solve(self.basis.evaluate(as_points(z, self.dim)))

    def subset(self, order) -> "NodeArrayStage":
        return NodeArrayStage(self.points[list(order)], self.degree, self.basis,
                              self.provenance, self.meta)

    def __repr__(self):
        return (f"NodeArrayStage(provenance={self.provenance!r}, d={self.dim}, "
                f"n={self.degree}, N={self.size})")


def flip_values(stage: NodeArrayStage, z) -> np.ndarray:
    """(l_1(z), ..., l_N(z)) at a single point, via the transposed Vandermonde solve."""
    pt = as_points(z, stage.dim)
    if pt.shape[0] != 1:
        raise ValueError("flip_values takes a single point; use stage.flips for batches")
    return stage.flips(pt)[:, 0]


def flip_values_ratio(stage: NodeArrayStage, z) -> np.ndarray:
    """FLIPs as determinant ratios VDM(..., z, ...)/VDM(...). Test oracle only."""
    pt = as_points(z, stage.dim)[0]
    V = vdm_matrix(stage.basis, stage.points).astype(complex)
    sign0, log0 = np.linalg.slogdet(V)
    ez = stage.basis.evaluate(pt.reshape(1, -1))[:, 0]
    out = np.empty(stage.size, dtype=complex)
    for j in range(stage.size):
        Vj = V.copy()
        Vj[:, j] = ez
        sj, lj = np.linalg.slogdet(Vj)
        out[j] = 0.0 if sj == 0 else (sj / sign0) * math.exp(lj - log0)
    return out


def tdiam_estimate(stage: NodeArrayStage) -> float:
    """exp(log|VDM| * (d+1)/(d n N)); zero for a degenerate stage."""
    if stage.degree < 1:
        raise ValueError("transfinite diameter estimate needs degree >= 1")
    ld = stage.log_det
    if ld.degenerate:
        return 0.0
    return math.exp(ld.log_modulus / ln_sum(stage.dim, stage.degree))

