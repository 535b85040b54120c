"""Kergin interpolation through the Hermite-Genocchi formula.

For nodes A = (a_0, ..., a_n) in C^d the interpolant is

    K[A]f(x) = sum_k  int_{S_k} D^k f(t_0 a_0 + ... + t_k a_k)(x - a_0, ..., x - a_{k-1}) dt

with S_k = {t_1, ..., t_k >= 0, t_1 + ... + t_k <= 1}, t_0 = 1 - sum t_i and
plain Lebesgue measure dt_1...dt_k (total mass 1/k!). Repeated nodes give
Hermite interpolation.

Writing D^k f as partial derivatives, K[A]f(x) = sum_J I_J prod_r (x - a_{r-1})_{j_r}
where J runs over index tuples and I_J is the simplex integral of the
partial derivative d^J f along the affine image of S_k. For polynomial f
the integrand is a polynomial in t and I_J uses the Dirichlet moments
int_{S_k} t^b dt = b! / (k + |b|)!; otherwise a conical Gauss-Jacobi rule
is used and compared against a rule four points finer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import roots_jacobi

from .basis import dim_pn, graded_indices

CHECK_TOL = 1e-8


# -- sparse polynomials ----------------------------------------------------------

class Polynomial:
    """Sparse polynomial in ``nvars`` variables: {exponent tuple: coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[dict] = None):
        self.nvars = int(nvars)
        self.terms = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for {self.nvars} variables")
            if c != 0:
                self.terms[e] = self.terms.get(e, 0) + c

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "Polynomial":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def from_graded(cls, d: int, coefficients) -> "Polynomial":
        """From coefficients in the graded monomial order."""
        coef = np.asarray(coefficients)
        n = 0
        while dim_pn(d, n) < coef.size:
            n += 1
        if dim_pn(d, n) != coef.size:
            raise ValueError(f"{coef.size} coefficients do not fill a P_n in {d} variables")
        return cls(d, dict(zip(graded_indices(d, n), coef.tolist())))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def _binary(self, other, sign):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + sign * c
        return Polynomial(self.nvars, out)

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __call__(self, points) -> np.ndarray:
        x = np.asarray(points)
        x = x.reshape(-1, self.nvars) if self.nvars else np.zeros((max(x.size, 1), 0))
        out = np.zeros(x.shape[0], dtype=np.result_type(x, *self.terms.values(), float))
        for e, c in self.terms.items():
            term = np.full(x.shape[0], c, dtype=out.dtype)
            for j, p in enumerate(e):
                if p:
                    term = term * x[:, j] ** p
            out += term
        return out

    def partial(self, beta) -> "Polynomial":
        """d^beta / dx^beta."""
        out = {}
        for e, c in self.terms.items():
            if all(a >= b for a, b in zip(e, beta)):
                f = 1
                for a, b in zip(e, beta):
                    f *= math.perm(a, b)
                out[tuple(a - b for a, b in zip(e, beta))] = c * f
        return Polynomial(self.nvars, out)

    def compose_affine(self, origin, directions) -> "Polynomial":
        """p(origin + directions @ t) as a polynomial in t (len(t) = directions.shape[1])."""
        origin = np.asarray(origin)
        W = np.asarray(directions).reshape(self.nvars, -1)
        k = W.shape[1]
        lin = [Polynomial(k, {(0,) * k: origin[j].item(),
                              **{tuple(int(i == r) for i in range(k)): W[j, r].item()
                                 for r in range(k)}})
               for j in range(self.nvars)]
        powers = [[Polynomial.constant(k, 1.0)] for _ in range(self.nvars)]
        out = Polynomial(k)
        for e, c in self.terms.items():
            term = Polynomial.constant(k, c)
            for j, p in enumerate(e):
                while len(powers[j]) <= p:
                    powers[j].append(powers[j][-1] * lin[j])
                if p:
                    term = term * powers[j][p]
            out = out + term
        return out

    def integrate_simplex(self):
        """Integral over {t >= 0, sum t <= 1} by the Dirichlet moment formula."""
        k = self.nvars
        total = 0
        for e, c in self.terms.items():
            total += c * math.prod(math.factorial(b) for b in e) / math.factorial(k + sum(e))
        return total

    def graded_coefficients(self, n: int) -> np.ndarray:
        """Coefficient vector in the graded monomial order of P_n."""
        if self.degree > n:
            raise ValueError(f"polynomial of degree {self.degree} is not in P_{n}")
        idx = graded_indices(self.nvars, n)
        return np.array([self.terms.get(a, 0) for a in idx])

    def __repr__(self):
        return f"Polynomial(nvars={self.nvars}, degree={self.degree}, terms={len(self.terms)})"


# -- jet oracles -------------------------------------------------------------------

class JetOracle:
    """Function with partial derivatives of every order up to ``order``."""

    dim: int
    order: float = math.inf

    def partial(self, beta, y) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, y) -> np.ndarray:
        return self.partial((0,) * self.dim, y)

    def directional(self, y, directions) -> np.ndarray:
        """D^k f(y)(v_1, ..., v_k) for k = len(directions), at each row of y."""
        y = np.asarray(y).reshape(-1, self.dim)
        dirs = [np.asarray(v).ravel() for v in directions]
        if len(dirs) > self.order:
            raise ValueError(f"jet of order {self.order} cannot supply D^{len(dirs)}")
        out = 0
        for J in itertools.product(range(self.dim), repeat=len(dirs)):
            weight = math.prod(v[j] for v, j in zip(dirs, J))
            if weight != 0:
                out = out + weight * self.partial(_exponent(J, self.dim), y)
        return out * np.ones(y.shape[0])


def _exponent(J, d) -> tuple:
    e = [0] * d
    for j in J:
        e[j] += 1
    return tuple(e)


class PolynomialJet(JetOracle):
    """Exact jets of a polynomial."""

    def __init__(self, poly: Polynomial):
        self.poly = poly
        self.dim = poly.nvars
        self._cache = {}

    def derivative(self, beta) -> Polynomial:
        beta = tuple(beta)
        if beta not in self._cache:
            self._cache[beta] = self.poly.partial(beta)
        return self._cache[beta]

    def partial(self, beta, y):
        return self.derivative(beta)(np.asarray(y).reshape(-1, self.dim))


class RidgeJet(JetOracle):
    """f(x) = h(<lam, x>) with ``hder(k, s)`` the k-th derivative of h."""

    def __init__(self, lam, hder: Callable, order: float = math.inf, name: str = "ridge"):
        self.lam = np.asarray(lam).ravel()
        self.dim = self.lam.size
        self.hder = hder
        self.order = order
        self.name = name

    def partial(self, beta, y):
        k = sum(beta)
        if k > self.order:
            raise ValueError(f"ridge jet of order {self.order} cannot supply order {k}")
        s = np.asarray(y).reshape(-1, self.dim) @ self.lam
        return self.hder(k, s) * math.prod(self.lam[j] ** b for j, b in enumerate(beta))

    @classmethod
    def exp(cls, lam, scale: float = 1.0) -> "RidgeJet":
        return cls(lam, lambda k, s: scale ** k * np.exp(scale * s), name="exp")

    @classmethod
    def sin(cls, lam) -> "RidgeJet":
        return cls(lam, lambda k, s: np.sin(s + k * np.pi / 2), name="sin")

    @classmethod
    def power(cls, lam, p: int) -> "RidgeJet":
        def hder(k, s):
            return math.perm(p, k) * s ** (p - k) if k <= p else 0 * s
        return cls(lam, hder, name=f"power{p}")

    @classmethod
    def cauchy(cls, lam, c: complex) -> "RidgeJet":
        """h(s) = 1/(c - s)."""
        return cls(lam, lambda k, s: math.factorial(k) / (c - s) ** (k + 1), name="cauchy")


# -- simplex quadrature ------------------------------------------------------------

def simplex_rule(k: int, q: int):
    """Conical product Gauss-Jacobi rule on S_k, exact for degree <= 2q - 1.

    Returns (nodes of shape (q^k, k), weights summing to 1/k!).
    """
    if k == 0:
        return np.zeros((1, 0)), np.ones(1)
    us, ws = [], []
    for i in range(1, k + 1):
        x, w = roots_jacobi(q, k - i, 0)
        us.append((1 + x) / 2)
        ws.append(w / 2 ** (k - i + 1))
    grids = np.meshgrid(*us, indexing="ij")
    wgrid = np.meshgrid(*ws, indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    T = np.empty_like(U)
    rest = np.ones(U.shape[0])
    for i in range(k):
        T[:, i] = rest * U[:, i]
        rest = rest * (1 - U[:, i])
    return T, W


# -- the operator -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KerginInterpolant:
    """K[A]f as an explicit polynomial, with the quadrature error estimate (0 if exact)."""

    nodes: np.ndarray
    polynomial: Polynomial
    exact: bool
    quadrature_error: float = 0.0

    @property
    def degree_n(self) -> int:
        return self.nodes.shape[0] - 1

    def __call__(self, x) -> np.ndarray:
        return self.polynomial(np.asarray(x).reshape(-1, self.nodes.shape[1]))

    def jet(self) -> PolynomialJet:
        return PolynomialJet(self.polynomial)


def _as_nodes(A) -> np.ndarray:
    a = np.asarray(A)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1:
        raise ValueError("nodes must have shape (n+1, d) with n >= 0")
    return a


def _simplex_integrals(A, f: JetOracle, k: int, q: Optional[int]):
    """I_beta for |beta| = k, keyed by exponent; exact for polynomial jets."""
    d = A.shape[1]
    origin, W = A[0], (A[1:k + 1] - A[0]).T
    betas = {_exponent(J, d) for J in itertools.combinations_with_replacement(range(d), k)}
    if isinstance(f, PolynomialJet):
        return {b: f.derivative(b).compose_affine(origin, W).integrate_simplex()
                for b in betas}, 0.0
    out, err = {}, 0.0
    T1, W1 = simplex_rule(k, q)
    T2, W2 = simplex_rule(k, q + 4)
    Y1, Y2 = origin + T1 @ W.T, origin + T2 @ W.T
    for b in betas:
        v1 = W1 @ f.partial(b, Y1)
        v2 = W2 @ f.partial(b, Y2)
        out[b] = v2
        err = max(err, abs(v2 - v1))
    return out, err


def kergin_polynomial(A, f: JetOracle, q: Optional[int] = None) -> KerginInterpolant:
    """Build K[A]f as a polynomial in x.

    Parameters
    ----------
    A : array_like, shape (n+1, d)
        Nodes; repetitions mean Hermite data.
    f : JetOracle
        Must supply derivatives up to order n.
    q : int, optional
        Points per direction of the simplex rule for non-polynomial jets
        (default n + 6); the result uses q + 4 and reports the difference.
    """
    A = _as_nodes(A)
    n, d = A.shape[0] - 1, A.shape[1]
    if f.dim != d:
        raise ValueError(f"jet in {f.dim} variables for nodes in {d}")
    if n > f.order:
        raise ValueError(f"jet of order {f.order} is insufficient for {n + 1} nodes")
    q = n + 6 if q is None else q
    result = Polynomial.constant(d, complex(f(A[0:1])[0]) if np.iscomplexobj(A) else f(A[0:1])[0])
    err = 0.0
    for k in range(1, n + 1):
        integrals, e = _simplex_integrals(A, f, k, q)
        err = max(err, e)
        # linear factors x_j - a_{r-1, j}
        factors = [[Polynomial(d, {(0,) * d: -A[r, j].item(),
                                   tuple(int(i == j) for i in range(d)): 1.0})
                    for j in range(d)] for r in range(k)]
        for J in itertools.product(range(d), repeat=k):
            c = integrals[_exponent(J, d)]
            if c == 0:
                continue
            term = Polynomial.constant(d, c)
            for r, j in enumerate(J):
                term = term * factors[r][j]
            result = result + term
    return KerginInterpolant(A.copy(), result, isinstance(f, PolynomialJet), err)


def kergin_eval(A, f: JetOracle, x) -> np.ndarray:
    """K[A]f at the rows of x."""
    return kergin_polynomial(A, f)(x)


# -- univariate oracle -----------------------------------------------------------------

def newton_hermite(nodes, hder: Callable, t, tol: float = 1e-12) -> np.ndarray:
    """Univariate Lagrange-Hermite interpolant at t via confluent divided differences.

    Nodes closer than ``tol`` count as repeated; ``hder(k, s)`` gives h^(k).
    """
    z = np.sort_complex(np.asarray(nodes, dtype=complex).ravel()) \
        if np.iscomplexobj(nodes) else np.sort(np.asarray(nodes, dtype=float).ravel())
    for i in range(1, z.size):
        if abs(z[i] - z[i - 1]) < tol:
            z[i] = z[i - 1]
    m = z.size
    table = np.array([hder(0, np.array([zi]))[0] for zi in z], dtype=complex)
    coef = [table[0]]
    for j in range(1, m):
        new = np.empty(m - j, dtype=complex)
        for i in range(m - j):
            if z[i + j] == z[i]:
                new[i] = hder(j, np.array([z[i]]))[0] / math.factorial(j)
            else:
                new[i] = (table[i + 1] - table[i]) / (z[i + j] - z[i])
        table = new
        coef.append(table[0])
    t = np.asarray(t, dtype=complex).ravel()
    out = np.full(t.shape, coef[-1], dtype=complex)
    for j in range(m - 2, -1, -1):
        out = out * (t - z[j]) + coef[j]
    return out


# -- check suite --------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    max_error: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_error": float(self.max_error),
                "tolerance": self.tolerance, **self.details}


def _multiplicities(A, tol=1e-12):
    groups = []
    for a in A:
        for g in groups:
            if np.max(np.abs(g[0] - a)) < tol:
                g[1] += 1
                break
        else:
            groups.append([a, 1])
    return groups


def kergin_interpolation_check(A, f: JetOracle, tol: float = CHECK_TOL,
                               interpolant: Optional[KerginInterpolant] = None) -> CheckReport:
    """Value matching at every node and jet matching to order (multiplicity - 1)."""
    A = _as_nodes(A)
    K = interpolant or kergin_polynomial(A, f)
    jet = K.jet()
    d = A.shape[1]
    worst = 0.0
    for a, mult in _multiplicities(A):
        for k in range(mult):
            for beta in {_exponent(J, d) for J in
                         itertools.combinations_with_replacement(range(d), k)}:
                err = abs(jet.partial(beta, a)[0] - f.partial(beta, a)[0])
                scale = max(1.0, abs(f.partial(beta, a)[0]))
                worst = max(worst, err / scale)
    return CheckReport("interpolation", worst, tol,
                       {"multiplicities": [m for _, m in _multiplicities(A)]})


def ridge_identity_check(A, lam, hder: Callable, x, tol: float = CHECK_TOL) -> CheckReport:
    """K[A](h(<lam, .>))(x) against the univariate Lagrange-Hermite interpolant of h
    at the projected nodes, evaluated at <lam, x>."""
    A = _as_nodes(A)
    lam = np.asarray(lam).ravel()
    X = np.asarray(x).reshape(-1, A.shape[1])
    K = kergin_polynomial(A, RidgeJet(lam, hder))
    lhs = K(X)
    rhs = newton_hermite(A @ lam, hder, X @ lam)
    scale = max(1.0, float(np.abs(rhs).max()))
    err = float(np.abs(lhs - rhs).max()) / scale
    return CheckReport("ridge", err, tol, {"quadrature_error": K.quadrature_error})


def kergin_algebra_checks(A, B, f: JetOracle, seed: int = 0, samples: int = 20,
                          tol: float = 1e-9) -> list:
    """Permutation invariance of K[A]f and the projection identity K[B] K[A] = K[B].

    ``B`` is a sub-tuple of ``A`` (given as points).
    """
    A, B = _as_nodes(A), _as_nodes(B)
    rng = np.random.default_rng(seed)
    d = A.shape[1]
    center, spread = A.real.mean(axis=0), max(1.0, float(np.abs(A).max()))
    X = center + spread * rng.uniform(-1, 1, (samples, d))
    KA = kergin_polynomial(A, f)
    ref = KA(X)
    scale = max(1.0, float(np.abs(ref).max()))
    perm = rng.permutation(A.shape[0])
    perm_err = float(np.abs(kergin_polynomial(A[perm], f)(X) - ref).max()) / scale
    KB = kergin_polynomial(B, f)(X)
    KBA = kergin_polynomial(B, KA.jet())(X)
    proj_err = float(np.abs(KBA - KB).max()) / max(1.0, float(np.abs(KB).max()))
    return [CheckReport("permutation", perm_err, tol, {"permutation": perm.tolist()}),
            CheckReport("projection", proj_err, tol, {"sub_tuple_size": B.shape[0]})]


def random_polynomial(d: int, degree: int, rng: np.random.Generator) -> Polynomial:
    coef = rng.standard_normal(dim_pn(d, degree))
    return Polynomial.from_graded(d, coef)


def run_suite(name: str, instances: int = 100, seed: int = 0, max_dim: int = 3,
              max_degree: int = 5, tol: float = CHECK_TOL) -> dict:
    """Randomized check suite: ``polynomial``, ``hermite``, ``ridge`` or ``algebra``.

    Returns a JSON-ready report with per-check maxima and an overall flag.
    """
    if name not in ("polynomial", "hermite", "ridge", "algebra"):
        raise ValueError(f"unknown Kergin suite {name!r}")
    rng = np.random.default_rng(seed)
    worst: Dict[str, float] = {}
    failures = []
    for it in range(instances):
        d = int(rng.integers(1, max_dim + 1))
        n = int(rng.integers(0, max_degree + 1))
        A = rng.uniform(-1, 1, (n + 1, d))
        reports = []
        if name == "polynomial":
            p = random_polynomial(d, n, rng)
            K = kergin_polynomial(A, PolynomialJet(p))
            X = rng.uniform(-1, 1, (20, d))
            err = float(np.abs(K(X) - p(X)).max()) / max(1.0, float(np.abs(p(X)).max()))
            reports.append(CheckReport("reproduction", err, tol))
            reports.append(kergin_interpolation_check(
                A, PolynomialJet(random_polynomial(d, n + 2, rng)), tol))
        elif name == "hermite":
            if n >= 1:
                reps = int(rng.integers(2, n + 2))
                A[1:reps] = A[0]
            f = PolynomialJet(random_polynomial(d, n + 2, rng))
            reports.append(kergin_interpolation_check(A, f, tol))
        elif name == "ridge":
            lam = rng.standard_normal(d)
            if n >= 2 and d >= 2:
                # two nodes with the same projection exercise the Hermite side
                v = rng.standard_normal(d)
                v -= (v @ lam) / (lam @ lam) * lam
                A[1] = A[0] + v / np.linalg.norm(v) * 0.5
            X = rng.uniform(-1, 1, (5, d))
            reports.append(ridge_identity_check(A, lam, RidgeJet.exp(lam, 0.7).hder, X, tol))
        else:
            f = PolynomialJet(random_polynomial(d, n + 2, rng))
            m = int(rng.integers(1, n + 2))
            B = A[np.sort(rng.choice(n + 1, m, replace=False))]
            reports.extend(kergin_algebra_checks(A, B, f, seed=it, tol=tol))
        for r in reports:
            worst[r.name] = max(worst.get(r.name, 0.0), r.max_error)
            if not r.passed:
                failures.append({"instance": it, "d": d, "n": n, **r.as_dict()})
    return {"suite": name, "instances": instances, "seed": seed, "tolerance": tol,
            "max_errors": worst, "failures": failures, "passed": not failures}
