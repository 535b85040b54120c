"""Graded polynomial bases of P_n in d variables.

Multi-indices are plain tuples of non-negative ints. The ordering is graded
(total degree non-decreasing) and, inside a degree block, lexicographically
descending, so for d = 2 the degree-2 block reads x^2, xy, y^2.

Each coordinate can be evaluated in the monomial family (z^k) or the
Chebyshev family (T_k). Both are triangular in the graded order, with
leading coefficients 1 and 2^(k-1) respectively, so determinants in one
family convert exactly to the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

MONOMIAL = "monomial"
CHEBYSHEV = "chebyshev"
FAMILIES = (MONOMIAL, CHEBYSHEV)


def dim_pn(d: int, n: int) -> int:
    """Dimension N(n) = binom(n + d, d) of polynomials of degree <= n in d variables."""
    _check_dn(d, n)
    return math.comb(n + d, d)


def ln_sum(d: int, n: int) -> int:
    """Sum of the degrees of the graded basis of P_n, i.e. d*n*N/(d+1)."""
    _check_dn(d, n)
    total = d * n * dim_pn(d, n)
    # d*n*N is always divisible by d+1
    return total // (d + 1)


def _check_dn(d, n):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")


def _compositions(total: int, d: int):
    """Exponent tuples of length d summing to ``total``, lexicographically descending."""
    if d == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def graded_indices(d: int, n: int) -> tuple:
    """All multi-indices with |alpha| <= n in graded, lex-descending order."""
    _check_dn(d, n)
    return tuple(a for k in range(n + 1) for a in _compositions(k, d))


def _power_table(values: np.ndarray, n: int, family: str) -> np.ndarray:
    """Table ``out[k] = P_k(values)`` for k = 0..n, built by recurrence."""
    out = np.empty((n + 1,) + values.shape, dtype=np.result_type(values, float))
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = values
    if family == MONOMIAL:
        for k in range(2, n + 1):
            out[k] = out[k - 1] * values
    else:
        two_z = 2 * values
        for k in range(2, n + 1):
            out[k] = two_z * out[k - 1] - out[k - 2]
    return out


def _leading_log(k: int, family: str) -> float:
    if family == MONOMIAL or k == 0:
        return 0.0
    return (k - 1) * math.log(2.0)


def as_points(points, d: int | None = None) -> np.ndarray:
    """Coerce input into a complex array of shape (P, d).

    A 1-D input is read as P points in one variable unless ``d`` says
    it is a single point in d variables.
    """
    arr = np.asarray(points, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if d is not None and d > 1:
            if arr.shape[0] != d:
                raise ValueError(f"point has {arr.shape[0]} coordinates, expected {d}")
            arr = arr.reshape(1, d)
        else:
            arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ValueError("points must be a 2-D array of shape (P, d)")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"points have dimension {arr.shape[1]}, expected {d}")
    return arr


@dataclass(frozen=True)
class GradedMonomialBasis:
    """Ordered basis of P_n in ``dim`` variables.

    Parameters
    ----------
    dim : int
        Number of variables d.
    degree : int
        Total degree n.
    family : str or tuple of str
        Per-coordinate univariate family, ``"monomial"`` or ``"chebyshev"``.
        A single string applies to every coordinate.
    """

    dim: int
    degree: int
    family: Union[str, tuple] = MONOMIAL
    indices: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_dn(self.dim, self.degree)
        fam = self.family
        if isinstance(fam, str):
            fam = (fam,) * self.dim
        fam = tuple(fam)
        if len(fam) != self.dim or any(f not in FAMILIES for f in fam):
            raise ValueError(f"bad basis family {self.family!r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "indices", graded_indices(self.dim, self.degree))

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self):
        return self.size

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.indices, dtype=int).reshape(self.size, self.dim)

    @property
    def degrees(self) -> np.ndarray:
        return self.exponents.sum(axis=1)

    @property
    def is_monomial(self) -> bool:
        return all(f == MONOMIAL for f in self.family)

    def with_family(self, family) -> "GradedMonomialBasis":
        return GradedMonomialBasis(self.dim, self.degree, family)

    def with_degree(self, degree: int) -> "GradedMonomialBasis":
        return GradedMonomialBasis(self.dim, degree, self.family)

    def evaluate(self, points, count: int | None = None) -> np.ndarray:
        """Matrix ``E[i, j] = e_i(points[j])`` for the first ``count`` elements.

        The result is real when every coordinate of every point is real.
        """
        pts = as_points(points, self.dim)
        m = self.size if count is None else count
        if m > self.size:
            raise ValueError(f"basis has only {self.size} elements, asked for {m}")
        exps = self.exponents[:m]
        if not np.any(pts.imag):
            pts = pts.real
        out = np.ones((m, pts.shape[0]), dtype=pts.dtype)
        for c in range(self.dim):
            table = _power_table(pts[:, c], self.degree, self.family[c])
            out *= table[exps[:, c]]
        return out

    def leading_log_coefficients(self, count: int | None = None) -> np.ndarray:
        """log of the coefficient of z^alpha(i) in the i-th basis element."""
        m = self.size if count is None else count
        return np.array([
            sum(_leading_log(k, f) for k, f in zip(alpha, self.family))
            for alpha in self.indices[:m]
        ])

    def monomial_log_shift(self, count: int | None = None) -> float:
        """log|det C| for the triangular change of basis E_family = C E_monomial."""
        return float(self.leading_log_coefficients(count).sum())


def auto_basis(points, n: int) -> GradedMonomialBasis:
    """Basis suited to a point set: Chebyshev on real coordinates, monomial otherwise."""
    pts = as_points(points)
    fam = tuple(
        CHEBYSHEV if np.all(np.abs(pts[:, c].imag) <= 1e-14) else MONOMIAL
        for c in range(pts.shape[1])
    )
    return GradedMonomialBasis(pts.shape[1], n, fam)


def basis_vector(basis: GradedMonomialBasis, z: Sequence) -> np.ndarray:
    """Values (e_1(z), ..., e_N(z)) at a single point."""
    pt = as_points(z, basis.dim)
    if pt.shape[0] != 1:
        raise ValueError("basis_vector takes a single point")
    return basis.evaluate(pt)[:, 0]


def scaled_basis_vector(basis: GradedMonomialBasis, z, mesh_sup_norms) -> np.ndarray:
    """Basis vector divided entrywise by positive per-element scales."""
    scales = np.asarray(mesh_sup_norms, dtype=float)
    if scales.shape != (basis.size,):
        raise ValueError(f"need {basis.size} scales, got shape {scales.shape}")
    if np.any(~(scales > 0)):
        raise ValueError("scales must be strictly positive")
    return basis_vector(basis, z) / scales


def mesh_sup_norms(basis: GradedMonomialBasis, points) -> np.ndarray:
    """Max modulus of each basis element over a point set (zeros replaced by 1)."""
    norms = np.abs(basis.evaluate(points)).max(axis=1)
    norms[norms == 0] = 1.0
    return norms

