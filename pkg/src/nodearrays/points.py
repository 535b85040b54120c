"""Node-array generators.

Exact and approximate Fekete points, discrete and closed-form Leja
sequences, Padua points, intertwined product arrays and Bos arrays on the
real disk.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .basis import (CHEBYSHEV, GradedMonomialBasis, as_points, auto_basis, dim_pn,
                    graded_indices, mesh_sup_norms)
from .meshes import Mesh
from .vandermonde import (DegenerateStageError, LogAbsDet, NodeArrayStage,
                          WeightFunction)

BRUTEFORCE_BUDGET = 10**6
TIE_RTOL = 1e-12
RESIDUAL_RTOL = 1e-13
_BATCH = 4096


def _first_max(scores: np.ndarray) -> int:
    """Index of the maximum, resolving near-ties to the smallest index."""
    top = scores.max()
    return int(np.flatnonzero(scores >= top * (1 - TIE_RTOL))[0])


def _mesh_basis(mesh: Mesh, n: int, basis: Optional[GradedMonomialBasis]):
    if basis is None:
        return auto_basis(mesh.points, n)
    if basis.dim != mesh.dim or basis.degree != n:
        raise ValueError("basis does not match mesh dimension / degree")
    return basis


# -- Fekete ------------------------------------------------------------------

def fekete_bruteforce(mesh: Mesh, n: int, basis: Optional[GradedMonomialBasis] = None,
                      budget: int = BRUTEFORCE_BUDGET) -> NodeArrayStage:
    """Exact discrete Fekete points: the N-subset of the mesh maximizing |VDM|.

    Subsets are scanned in lexicographic order and replaced only on a strict
    (relative 1e-12) improvement, so ties go to the smallest index tuple.

    Raises
    ------
    ValueError
        If binom(M, N) exceeds ``budget``.
    """
    basis = _mesh_basis(mesh, n, basis)
    N, M = basis.size, mesh.size
    if M < N:
        raise ValueError(f"mesh of {M} points cannot support degree {n} (N = {N})")
    total = math.comb(M, N)
    if total > budget:
        raise ValueError(f"binom({M}, {N}) = {total} subsets exceed the budget {budget}")
    V = basis.evaluate(mesh.points)
    best, best_idx = -math.inf, None
    combos = itertools.combinations(range(M), N)
    while True:
        chunk = list(itertools.islice(combos, _BATCH))
        if not chunk:
            break
        idx = np.array(chunk)
        blocks = np.moveaxis(V[:, idx], 1, 0)
        _, logs = np.linalg.slogdet(blocks)
        for k in range(len(chunk)):
            if logs[k] > -math.inf and (best_idx is None
                                        or logs[k] > best + TIE_RTOL * max(1.0, abs(best))):
                best, best_idx = logs[k], chunk[k]
    if best_idx is None:
        raise DegenerateStageError("no unisolvent subset in the mesh")
    return NodeArrayStage(mesh.points[list(best_idx)], n, basis, "fekete",
                          {"method": "bruteforce", "mesh_indices": list(best_idx),
                           "mesh_size": M})


def _greedy_columns(V: np.ndarray, count: int) -> list:
    """Volume-greedy column selection by modified Gram-Schmidt residuals."""
    R = np.array(V, dtype=np.result_type(V, float), copy=True)
    norms = np.einsum("ij,ij->j", R.conj(), R).real
    scale = norms.max()
    chosen = []
    for _ in range(count):
        if chosen:
            norms[chosen] = -1.0
        j = _first_max(norms)
        if norms[j] <= (RESIDUAL_RTOL ** 2) * scale:
            raise DegenerateStageError(
                f"mesh residuals vanish after {len(chosen)} of {count} points")
        chosen.append(j)
        q = R[:, j] / math.sqrt(norms[j])
        # two passes keep the residuals orthogonal to working precision
        for _ in range(2):
            R -= np.outer(q, q.conj() @ R)
        norms = np.einsum("ij,ij->j", R.conj(), R).real
    return chosen


def approx_fekete_greedy(mesh: Mesh, n: int,
                         basis: Optional[GradedMonomialBasis] = None) -> NodeArrayStage:
    """Approximate Fekete points by greedy volume maximization on the mesh.

    The basis matrix rows are scaled by their mesh sup-norms. Step one takes
    the column of largest 2-norm; each later step takes the column with the
    largest residual after projection onto the chosen columns.
    """
    basis = _mesh_basis(mesh, n, basis)
    if mesh.size < basis.size:
        raise ValueError(f"mesh of {mesh.size} points cannot support degree {n}")
    V = basis.evaluate(mesh.points)
    V = V / mesh_sup_norms(basis, mesh.points)[:, None]
    idx = _greedy_columns(V, basis.size)
    return NodeArrayStage(mesh.points[idx], n, basis, "fekete",
                          {"method": "approx-fekete", "mesh_indices": idx,
                           "mesh_size": mesh.size})


# -- Leja --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LejaSequence:
    """Ordered Leja-type sequence.

    Attributes
    ----------
    points : ndarray, shape (m, d), complex
    origin_mesh : Mesh or None
    exact_structure : bool
        True for closed-form sequences that need no mesh.
    mesh_indices : tuple
        Positions in ``origin_mesh`` (empty for closed forms).
    """

    points: np.ndarray
    origin_mesh: Optional[Mesh] = None
    exact_structure: bool = False
    mesh_indices: tuple = ()
    basis: Optional[GradedMonomialBasis] = field(default=None, repr=False)

    def __post_init__(self):
        pts = as_points(self.points).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def prefix(self, m: int) -> "LejaSequence":
        if not 1 <= m <= len(self):
            raise ValueError(f"prefix length {m} outside 1..{len(self)}")
        return LejaSequence(self.points[:m], self.origin_mesh, self.exact_structure,
                            self.mesh_indices[:m], self.basis)

    def stage(self, n: int, basis: Optional[GradedMonomialBasis] = None) -> NodeArrayStage:
        """The first dim P_n points as a degree-n stage."""
        N = dim_pn(self.dim, n)
        if N > len(self):
            raise ValueError(f"sequence of length {len(self)} is too short for degree {n}")
        if basis is None and self.basis is not None:
            basis = self.basis.with_degree(n)
        return NodeArrayStage(self.points[:N], n, basis, "leja",
                              {"exact_structure": self.exact_structure})


def discrete_leja(mesh: Mesh, n: int, basis: Optional[GradedMonomialBasis] = None,
                  start: Optional[int] = None,
                  weight: Optional[WeightFunction] = None) -> LejaSequence:
    """Discrete Leja sequence of length N = dim P_n extracted from a mesh.

    Row-pivoted Gaussian elimination on the transposed basis matrix: the
    pivot of column m is the mesh point maximizing |VDM(x_1, ..., x_m, x)|.

    Parameters
    ----------
    start : int, optional
        Mesh index forced as the first point. By default the first point is
        the smallest index (every point ties since e_1 = 1).
    weight : WeightFunction, optional
        Weighted variant; step m + 1 maximizes w(x)^|alpha(m+1)| times the
        incremental Vandermonde modulus.
    """
    basis = _mesh_basis(mesh, n, basis)
    N, M = basis.size, mesh.size
    if M < N:
        raise ValueError(f"mesh of {M} points cannot support degree {n}")
    A = basis.evaluate(mesh.points).T.copy()
    rows = np.arange(M)
    if weight is not None:
        wv = weight(mesh.points)
        degs = basis.degrees
    scale = np.abs(A).max()
    for k in range(N):
        col = np.abs(A[k:, k])
        if weight is not None:
            col = col * wv[rows[k:]] ** degs[k]
        if k == 0 and start is not None:
            if not 0 <= start < M:
                raise ValueError(f"start index {start} outside the mesh")
            p = int(np.flatnonzero(rows == start)[0])
        else:
            if col.max() <= RESIDUAL_RTOL * scale:
                raise DegenerateStageError(
                    f"mesh residuals vanish after {k} of {N} points")
            p = k + _first_max(col)
        if p != k:
            A[[k, p]] = A[[p, k]]
            rows[[k, p]] = rows[[p, k]]
        piv = A[k, k]
        if k + 1 < M:
            factors = A[k + 1:, k] / piv
            A[k + 1:, k + 1:] -= np.outer(factors, A[k, k + 1:])
            A[k + 1:, k] = 0
    idx = tuple(int(i) for i in rows[:N])
    return LejaSequence(mesh.points[list(idx)], mesh, False, idx, basis)


def _radical_inverse2(k: int) -> float:
    x, f = 0.0, 0.5
    while k:
        if k & 1:
            x += f
        k >>= 1
        f /= 2
    return x


def _unit_root(phi: float) -> complex:
    """exp(2 pi i phi), exact at multiples of a quarter turn."""
    q = 4 * phi
    if q == int(q):
        return (1, 1j, -1, -1j)[int(q) % 4]
    return complex(math.cos(2 * math.pi * phi), math.sin(2 * math.pi * phi))


def leja_disk_exact(count: int) -> LejaSequence:
    """Canonical Leja sequence of the unit disk starting at 1.

    e_k = exp(2 pi i phi(k)) with phi the base-2 radical inverse, so each
    prefix of length 2^m is the set of 2^m-th roots of unity.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    z = [_unit_root(_radical_inverse2(k)) for k in range(count)]
    return LejaSequence(np.array(z, dtype=complex).reshape(-1, 1), None, True)


def r_leja(count: int) -> LejaSequence:
    """Real projection of the disk Leja sequence with repeated values removed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    k = 0
    while len(out) < count:
        x = _unit_root(_radical_inverse2(k)).real
        if all(abs(x - y) > 1e-14 for y in out):
            out.append(x)
        k += 1
    return LejaSequence(np.array(out, dtype=complex).reshape(-1, 1), None, True)


# -- Padua ---------------------------------------------------------------------

def _padua_pairs(n: int):
    return [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]


def padua_points(n: int) -> NodeArrayStage:
    """Padua points gamma_n(i pi/(n+1) + j pi/n), i + j <= n.

    gamma_n(t) = (cos nt, cos (n+1)t); the coordinates are evaluated in the
    reduced forms (-1)^j cos(n i pi/(n+1)) and (-1)^i cos((n+1) j pi/n).
    """
    if n < 1:
        raise ValueError("Padua points need n >= 1")
    pts = []
    for i, j in _padua_pairs(n):
        x = (-1) ** j * _cos_rational(n * i, n + 1)
        y = (-1) ** i * _cos_rational((n + 1) * j, n)
        pts.append((x, y))
    return NodeArrayStage(np.array(pts), n, GradedMonomialBasis(2, n, CHEBYSHEV),
                          "padua", {"method": "lissajous"})


def _cos_rational(p: int, q: int) -> float:
    """cos(p pi / q) with exact zeros and signs at the special angles."""
    p %= 2 * q
    if p == 0:
        return 1.0
    if 2 * p == 2 * q:
        return -1.0
    if 2 * p == q or 2 * p == 3 * q:
        return 0.0
    return math.cos(math.pi * p / q)


def _cheb_hat(x: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal Chebyshev table: T^_0 = 1, T^_k = sqrt(2) T_k."""
    T = np.empty((n + 1,) + x.shape)
    T[0] = 1.0
    if n > 0:
        T[1] = x
    for k in range(2, n + 1):
        T[k] = 2 * x * T[k - 1] - T[k - 2]
    T[1:] *= math.sqrt(2)
    return T


def _padua_kernel(n, a, Z):
    A1, A2 = _cheb_hat(np.array([a[0]]), n)[:, 0], _cheb_hat(np.array([a[1]]), n)[:, 0]
    Z1, Z2 = _cheb_hat(Z[:, 0], n), _cheb_hat(Z[:, 1], n)
    K = np.zeros(Z.shape[0])
    for i in range(n + 1):
        K += A1[i] * Z1[i] * (A2[: n + 1 - i] @ Z2[: n + 1 - i])
    # T_n(y) T_n(y_a) with the plain (unit leading) normalization
    corr = (Z2[n] / math.sqrt(2)) * (A2[n] / math.sqrt(2)) if n > 0 else 1.0
    return K - corr


def padua_flip_kernel(n: int, a, z):
    """FLIP of the Padua point ``a`` evaluated at ``z`` via the reproducing kernel.

    l_a(z) = w_a (K_n(a; z) - T_n(z_2) T_n(a_2)) with K_n the reproducing
    kernel of the product arcsine measure and w_a fixed by l_a(a) = 1.
    Accepts a single point (returns float) or an array of shape (P, 2).
    """
    a = np.asarray(a, dtype=float).ravel()
    pts = padua_points(n).points.real
    if a.shape != (2,) or not np.any(np.all(np.abs(pts - a) < 1e-12, axis=1)):
        raise ValueError(f"{tuple(a)} is not a Padua point of degree {n}")
    Z = np.asarray(z, dtype=float)
    single = Z.ndim == 1
    Z = Z.reshape(-1, 2)
    w = 1.0 / _padua_kernel(n, a, a.reshape(1, 2))[0]
    vals = w * _padua_kernel(n, a, Z)
    return float(vals[0]) if single else vals


# -- intertwining --------------------------------------------------------------

def intertwine(tuples: Sequence, n: int,
               basis: Optional[GradedMonomialBasis] = None) -> NodeArrayStage:
    """Intertwined array {(a_{i_1,1}, ..., a_{i_d,d}) : i_1 + ... + i_d <= n}.

    Points come in the graded order of the index tuples, so input order
    matters: permuting a sequence changes the array.
    """
    seqs = []
    for c, t in enumerate(tuples):
        v = as_points(t.points if isinstance(t, LejaSequence) else t)
        if v.shape[1] != 1:
            raise ValueError("each intertwined sequence must be univariate")
        v = v[:, 0]
        if v.shape[0] < n + 1:
            raise ValueError(f"sequence {c} has {v.shape[0]} entries, need {n + 1}")
        head = v[: n + 1]
        gaps = np.abs(head[:, None] - head[None, :]) + np.eye(n + 1)
        if np.any(gaps <= 1e-14):
            raise ValueError(f"sequence {c} has duplicate entries")
        seqs.append(head)
    d = len(seqs)
    if d < 1:
        raise ValueError("need at least one sequence")
    pts = np.array([[seqs[c][i] for c, i in enumerate(idx)]
                    for idx in graded_indices(d, n)], dtype=complex)
    return NodeArrayStage(pts, n, basis, "intertwined", {"method": "intertwine"})


# -- Bos arrays ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialDistribution:
    """Asymptotic radius law G: [0, 1] -> [0, 1], increasing with G(1) = 1.

    ``dG`` (the derivative) is optional; it sharpens the near-diagonal
    quadrature in the L(G) functional.
    """

    G: Callable
    dG: Optional[Callable] = None
    name: str = "custom"
    smooth: bool = True

    def __post_init__(self):
        x = np.linspace(0.0, 1.0, 1001)
        g = np.asarray(self.G(x), dtype=float)
        if np.any(np.diff(g) < -1e-15):
            raise ValueError(f"radial distribution {self.name!r} is not monotone")
        if abs(float(self.G(1.0)) - 1.0) > 1e-12:
            raise ValueError(f"radial distribution {self.name!r} must satisfy G(1) = 1")
        if g[0] < 0:
            raise ValueError("G must be non-negative")

    def __call__(self, x):
        return self.G(x)

    @classmethod
    def chebyshev(cls) -> "RadialDistribution":
        """G(x) = (1 - cos pi x)/2."""
        return cls(lambda x: np.sin(np.pi * np.asarray(x) / 2) ** 2,
                   lambda x: np.pi / 2 * np.sin(np.pi * np.asarray(x)), "chebyshev")

    @classmethod
    def equilibrium(cls) -> "RadialDistribution":
        """G(x) = 1 - (x^2 - 1)^2, the radius law of the disk's equilibrium measure."""
        return cls(lambda x: 1 - (np.asarray(x) ** 2 - 1) ** 2,
                   lambda x: 4 * np.asarray(x) * (1 - np.asarray(x) ** 2), "equilibrium")

    @classmethod
    def linear(cls) -> "RadialDistribution":
        return cls(lambda x: np.asarray(x, dtype=float) * 1.0,
                   lambda x: np.ones_like(np.asarray(x, dtype=float)), "linear")

    @classmethod
    def quadratic(cls) -> "RadialDistribution":
        return cls(lambda x: np.asarray(x, dtype=float) ** 2,
                   lambda x: 2 * np.asarray(x, dtype=float), "quadratic")

    @classmethod
    def named(cls, name: str) -> "RadialDistribution":
        table = {"chebyshev": cls.chebyshev, "equilibrium": cls.equilibrium,
                 "linear": cls.linear, "quadratic": cls.quadratic}
        if name not in table:
            raise ValueError(f"unknown radial distribution {name!r}")
        return table[name]()


def bos_radii(s: int, G: RadialDistribution) -> np.ndarray:
    """R_j = sqrt(G((j+1)/(s+1))), j = 0..s; the outer ring is the unit circle."""
    R = np.sqrt(np.asarray(G((np.arange(s + 1) + 1) / (s + 1)), dtype=float))
    R[-1] = 1.0
    if np.any(np.diff(R) <= 0) or R[0] <= 0:
        raise ValueError("Bos radii must be positive and strictly increasing")
    return R


def bos_log_abs_vdm(radii) -> float:
    """Closed-form log|VDM| (monomial basis) of the Bos array with the given radii.

    Ring j has 4j+1 equispaced points. A Fourier transform on each ring makes
    the Vandermonde matrix block triangular by angular frequency m; the block
    of frequency m couples rings j >= ceil(|m|/2) through powers R_j^|m| and
    R_j^2 and factors into a Vandermonde determinant in the R_j^2.
    """
    R = np.asarray(radii, dtype=float)
    s = R.size - 1
    n = 2 * s
    logR = np.log(R)
    R2 = R ** 2
    total = sum(0.5 * (4 * j + 1) * math.log(4 * j + 1) for j in range(s + 1))
    # pair_sum[i] = sum over i <= a < b <= s of log(R_b^2 - R_a^2)
    pair_sum = np.zeros(s + 2)
    for i in range(s, -1, -1):
        pair_sum[i] = pair_sum[i + 1] + np.log(R2[i + 1:] - R2[i]).sum()
    tail = np.concatenate([np.cumsum(logR[::-1])[::-1], [0.0]])
    for m in range(-n, n + 1):
        i = (abs(m) + 1) // 2
        if m:
            total += abs(m) * tail[i]
        total += pair_sum[i]
    # monomials from the complex exponentials: (x +- iy)/2 normalization
    total -= sum(k * (k + 1) / 2 for k in range(n + 1)) * math.log(2)
    return float(total)


def bos_array(n: int, G: RadialDistribution, closed_form: bool = True) -> NodeArrayStage:
    """Bos array of degree n = 2s on the real disk B_2.

    s+1 rings of radii R_j = sqrt(G((j+1)/(s+1))), ring j carrying 4j+1
    equispaced points at phase 0, inner ring first. With ``closed_form`` the
    log-determinant comes from :func:`bos_log_abs_vdm` and no LU is done
    until FLIPs are requested.
    """
    if n < 2 or n % 2:
        raise ValueError(f"Bos arrays need an even degree n >= 2, got {n}")
    s = n // 2
    R = bos_radii(s, G)
    xs, ys = [], []
    for j in range(s + 1):
        m = 4 * j + 1
        th = 2 * np.pi * np.arange(m) / m
        xs.append(R[j] * np.cos(th))
        ys.append(R[j] * np.sin(th))
    pts = np.stack([np.concatenate(xs), np.concatenate(ys)], axis=1)
    meta = {"method": "bos", "G": G.name, "radii": R.tolist()}
    log_det = LogAbsDet(bos_log_abs_vdm(R), False, math.nan) if closed_form else None
    return NodeArrayStage(pts, n, GradedMonomialBasis(2, n, CHEBYSHEV), "bos", meta,
                          log_det=log_det)
