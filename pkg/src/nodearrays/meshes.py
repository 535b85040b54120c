"""Weakly admissible meshes on the reference compacts.

Every mesh carries a norming constant C_n with ||p||_K <= C_n ||p||_mesh for
p of degree <= n. For Chebyshev-Lobatto grids and equispaced circle samples
the constants are the classical Ehlich-Zeller type secant bounds; the real
disk combines both along diameters. The simplex constant is a Markov-type
bound, infinite when the lattice is too coarse to certify anything.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import as_points, dim_pn

COMPACT_IDS = ("interval", "circle", "disk_boundary", "square", "real_disk_B2",
               "real_ball_Bd", "simplex_Sd", "product")
REFERENCE_FACTOR = 10


@dataclass(frozen=True, eq=False)
class Mesh:
    """Finite candidate set on a compact.

    Attributes
    ----------
    points : ndarray, shape (M, d), complex
    compact_id : str
    degree_n : int
        Degree the mesh is meant to norm.
    norming_constant : float
        C_n in ||p||_K <= C_n max_mesh |p|; ``inf`` when not certified.
    params : dict
        Generator name and arguments, used to rebuild denser references.
    """

    points: np.ndarray
    compact_id: str
    degree_n: int
    norming_constant: float
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = as_points(self.points).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.compact_id not in COMPACT_IDS:
            raise ValueError(f"unknown compact {self.compact_id!r}")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.size

    def supports_degree(self, n: int) -> bool:
        return self.size >= dim_pn(self.dim, n)


def _sec(x: float) -> float:
    """1/cos(x) on [0, pi/2), inf beyond."""
    if x >= math.pi / 2:
        return math.inf
    return 1.0 / math.cos(x)


def lobatto_nodes(count: int) -> np.ndarray:
    """``count`` Chebyshev-Lobatto points in ascending order (exactly symmetric)."""
    if count < 1:
        raise ValueError("need at least one node")
    if count == 1:
        return np.zeros(1)
    m = count - 1
    k = np.arange(count)
    return np.sin(np.pi * (2 * k - m) / (2 * m))


def _lobatto_constant(n: int, intervals: int) -> float:
    return 1.0 if n == 0 else _sec(math.pi * n / (2 * intervals))


def _check_density(density, minimum):
    if int(density) != density or density < minimum:
        raise ValueError(f"density must be an integer >= {minimum}, got {density!r}")


def interval_mesh(n: int, density: int = 4) -> Mesh:
    """Chebyshev-Lobatto grid of density*n + 1 points on [-1, 1]."""
    _check_density(density, 2)
    m = max(density * n, 1)
    x = lobatto_nodes(m + 1)
    return Mesh(x.reshape(-1, 1), "interval", n, _lobatto_constant(n, m),
                {"kind": "interval", "n": n, "density": density})


def disk_boundary_mesh(n: int, density: int = 4) -> Mesh:
    """density*n + 1 equispaced points on |z| = 1, starting at z = 1.

    By the maximum principle this norms holomorphic polynomials on the
    closed disk.
    """
    _check_density(density, 2)
    m = density * n + 1
    k = np.arange(m)
    z = np.exp(2j * np.pi * k / m)
    # exact values at the quarter turns
    for q, val in enumerate((1, 1j, -1, -1j)):
        if (q * m) % 4 == 0:
            z[q * m // 4] = val
    c = 1.0 if n == 0 else _sec(math.pi * n / m)
    return Mesh(z.reshape(-1, 1), "disk_boundary", n, c,
                {"kind": "disk_boundary", "n": n, "density": density})


def real_disk_mesh(n: int, radial_density: int = 4, angular_density: int = 4) -> Mesh:
    """Polar grid on the real unit disk B_2.

    Radii sin(pi k / (2K)), k = 1..K with K = radial_density*n (clustered at
    r = 1), times A equispaced angles from 0, A = angular_density*n + 1 rounded
    up to even so every diameter is sampled at a full Lobatto grid. The
    origin is included once.
    """
    _check_density(radial_density, 1)
    _check_density(angular_density, 2)
    K = max(radial_density * n, 1)
    A = angular_density * n + 1
    A += A % 2
    r = np.sin(np.pi * np.arange(1, K + 1) / (2 * K))
    theta = 2 * np.pi * np.arange(A) / A
    c, s = np.cos(theta), np.sin(theta)
    # exact axis values
    for q in range(4):
        if (q * A) % 4 == 0:
            c[q * A // 4], s[q * A // 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)][q]
    x = np.concatenate([[0.0], (r[:, None] * c).ravel()])
    y = np.concatenate([[0.0], (r[:, None] * s).ravel()])
    const = 1.0 if n == 0 else _sec(math.pi * n / A) * _lobatto_constant(n, 2 * K)
    return Mesh(np.stack([x, y], axis=1), "real_disk_B2", n, const,
                {"kind": "real_disk", "n": n, "radial_density": radial_density,
                 "angular_density": angular_density})


def square_mesh(n: int, density: int = 4) -> Mesh:
    """Tensor Chebyshev-Lobatto grid on [-1, 1]^2, x varying fastest."""
    _check_density(density, 2)
    m = max(density * n, 1)
    x = lobatto_nodes(m + 1)
    X, Y = np.meshgrid(x, x)
    c = _lobatto_constant(n, m) ** 2
    return Mesh(np.stack([X.ravel(), Y.ravel()], axis=1), "square", n, c,
                {"kind": "square", "n": n, "density": density})


def simplex_mesh(n: int, density: int = 1, d: int = 2) -> Mesh:
    """Barycentric lattice {k/m : k >= 0, |k| <= m} on the standard simplex S_d, m = density*n.

    The norming constant 1/(1 - rho*4n^2/w) combines the covering radius rho
    of the lattice with Wilhelmsen's Markov inequality on a convex body of
    width w; it is infinite when that bound is vacuous.
    """
    _check_density(density, 1)
    if d < 1:
        raise ValueError("dimension must be positive")
    m = max(density * n, 1)
    pts = [tuple(k / m for k in idx)
           for idx in itertools.product(range(m + 1), repeat=d) if sum(idx) <= m]
    # covering radius of the cube lattice, width of S_d
    rho = math.sqrt(d) / (2 * m)
    width = 1.0 / math.sqrt(d) if d > 1 else 1.0
    slack = 1.0 - rho * 4 * n * n / width
    c = 1.0 if n == 0 else (1.0 / slack if slack > 0 else math.inf)
    return Mesh(np.array(pts, dtype=float).reshape(-1, d), "simplex_Sd", n, c,
                {"kind": "simplex", "n": n, "density": density, "d": d})


def product_mesh(*meshes: Mesh) -> Mesh:
    """Cartesian product; the last factor varies fastest and C_n multiplies."""
    if len(meshes) < 1:
        raise ValueError("need at least one mesh")
    degrees = {m.degree_n for m in meshes}
    if len(degrees) != 1:
        raise ValueError(f"component meshes norm different degrees {sorted(degrees)}")
    grids = np.meshgrid(*[np.arange(m.size) for m in meshes], indexing="ij")
    cols = [m.points[g.ravel()] for m, g in zip(meshes, grids)]
    const = math.prod(m.norming_constant for m in meshes)
    return Mesh(np.concatenate(cols, axis=1), "product", meshes[0].degree_n, const,
                {"kind": "product", "factors": [dict(m.params) for m in meshes]})


_BUILDERS = {
    "interval": (interval_mesh, ("density",)),
    "disk_boundary": (disk_boundary_mesh, ("density",)),
    "real_disk": (real_disk_mesh, ("radial_density", "angular_density")),
    "square": (square_mesh, ("density",)),
    "simplex": (simplex_mesh, ("density",)),
}


def _rebuild(params: dict, factor: int) -> Mesh:
    kind = params.get("kind")
    if kind == "product":
        return product_mesh(*[_rebuild(p, factor) for p in params["factors"]])
    if kind not in _BUILDERS:
        raise ValueError("mesh has no generator record; cannot refine it")
    builder, dens = _BUILDERS[kind]
    kwargs = {k: params[k] * factor for k in dens}
    if kind == "simplex":
        kwargs["d"] = params["d"]
    return builder(params["n"], **kwargs)


def reference_mesh(mesh: Mesh, factor: int = REFERENCE_FACTOR) -> Mesh:
    """The same generator at ``factor`` times the density; the sup-norm surrogate."""
    return _rebuild(mesh.params, factor)


def mesh_for(compact_id: str, n: int, density: int = 4) -> Mesh:
    """Default mesh of a compact at degree n."""
    if compact_id == "interval":
        return interval_mesh(n, density)
    if compact_id in ("circle", "disk_boundary"):
        return disk_boundary_mesh(n, density)
    if compact_id == "square":
        return square_mesh(n, density)
    if compact_id == "real_disk_B2":
        return real_disk_mesh(n, density, density)
    if compact_id == "simplex_Sd":
        return simplex_mesh(n, density)
    raise ValueError(f"no default mesh for compact {compact_id!r}")
