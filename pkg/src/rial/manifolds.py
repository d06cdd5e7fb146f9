"""Embedded-submanifold kernels: Stiefel, generalized Stiefel, and products.

Points and tangent vectors are plain float64 ndarrays in the ambient matrix
space; a product manifold stacks its factors' rows into one matrix so that
every downstream routine works on a single dense array.

Tolerances: freshly produced points (retraction, random_point) satisfy the
constraint to 1e-10; accepted inputs may drift to 1e-8 over long runs.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import ConditioningError, DimensionError, RankDeficiencyError

FRESH_TOL = 1e-10
ACCEPT_TOL = 1e-8


def _sym(a):
    return 0.5 * (a + a.T)


def _qr_fixed(a):
    """Reduced QR with the R diagonal forced positive (deterministic Q)."""
    q, r = np.linalg.qr(a)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


class Manifold:
    """Common interface for the embedded manifolds used by the solver."""

    ambient_shape = None

    def _check_shape(self, x, what="operand"):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.ambient_shape:
            raise DimensionError(
                f"{what} has shape {x.shape}, expected {self.ambient_shape} on {self!r}"
            )
        return x

    def check_feasibility(self, x):
        raise NotImplementedError

    def tangent_project(self, x, v):
        raise NotImplementedError

    def riemannian_gradient(self, x, egrad):
        """Metric-adjusted projection of a Euclidean gradient."""
        raise NotImplementedError

    def retract(self, x, v):
        raise NotImplementedError

    def inner(self, x, u, v):
        """Riemannian inner product of two tangent vectors at x."""
        raise NotImplementedError

    def norm(self, x, v):
        return float(np.sqrt(max(self.inner(x, v, v), 0.0)))

    def random_point(self, rng):
        raise NotImplementedError

    def random_tangent(self, x, rng):
        rng = np.random.default_rng(rng)
        return self.tangent_project(x, rng.standard_normal(self.ambient_shape))


class Stiefel(Manifold):
    """Stiefel manifold of d x r matrices with orthonormal columns.

    The metric is the Euclidean (Frobenius) one inherited from the ambient
    space; the tangent projection is v - X sym(X^T v). Retraction is the
    sign-fixed QR factor of X + v by default, or the polar factor when
    constructed with retraction="polar".
    """

    def __init__(self, d, r, retraction="qr"):
        if r > d or r < 1:
            raise DimensionError(f"need 1 <= r <= d, got d={d}, r={r}")
        if retraction not in ("qr", "polar"):
            raise DimensionError(f"unknown retraction {retraction!r}")
        self.d = int(d)
        self.r = int(r)
        self.retraction = retraction
        self.ambient_shape = (self.d, self.r)

    def __repr__(self):
        return f"Stiefel({self.d}, {self.r})"

    def check_feasibility(self, x):
        x = self._check_shape(x, "point")
        gram = x.T @ x
        return float(np.linalg.norm(gram - np.eye(self.r)))

    def tangent_project(self, x, v):
        v = self._check_shape(v, "vector")
        return v - x @ _sym(x.T @ v)

    def riemannian_gradient(self, x, egrad):
        return self.tangent_project(x, egrad)

    def retract(self, x, v):
        y = x + v
        if self.retraction == "qr":
            return _qr_fixed(y)
        u, _, vt = np.linalg.svd(y, full_matrices=False)
        return u @ vt

    def inner(self, x, u, v):
        return float(np.vdot(u, v))

    def random_point(self, rng):
        rng = np.random.default_rng(rng)
        return _qr_fixed(rng.standard_normal(self.ambient_shape))


class GeneralizedStiefel(Manifold):
    """Matrices X with X^T G X = I for a fixed symmetric positive definite G.

    The tangent metric is <u, v>_G = tr(u^T G v), which gives the closed-form
    projection v - X sym(X^T G v) and gradient proj(G^{-1} egrad). G is
    Cholesky-factored once at construction; every gradient conversion reuses
    the factor.
    """

    def __init__(self, gram, r):
        gram = np.asarray(gram, dtype=np.float64)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise DimensionError(f"gram matrix must be square, got {gram.shape}")
        p = gram.shape[0]
        if r > p or r < 1:
            raise DimensionError(f"need 1 <= r <= p, got p={p}, r={r}")
        self.gram = _sym(gram)
        self.p = p
        self.r = int(r)
        self.ambient_shape = (p, self.r)
        try:
            self._cho = cho_factor(self.gram, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(
                "gram matrix is not positive definite to working precision"
            ) from exc

    def __repr__(self):
        return f"GeneralizedStiefel(p={self.p}, r={self.r})"

    def check_feasibility(self, x):
        x = self._check_shape(x, "point")
        gram = x.T @ (self.gram @ x)
        return float(np.linalg.norm(gram - np.eye(self.r)))

    def tangent_project(self, x, v):
        v = self._check_shape(v, "vector")
        return v - x @ _sym(x.T @ (self.gram @ v))

    def riemannian_gradient(self, x, egrad):
        return self.tangent_project(x, cho_solve(self._cho, egrad, check_finite=False))

    def retract(self, x, v):
        y = x + v
        c = y.T @ (self.gram @ y)
        try:
            ell = np.linalg.cholesky(_sym(c))
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError(
                "retraction target is rank deficient under the gram metric"
            ) from exc
        # y @ inv(ell).T without forming the inverse
        return solve_triangular(ell, y.T, lower=True, check_finite=False).T

    def inner(self, x, u, v):
        return float(np.vdot(u, self.gram @ v))

    def random_point(self, rng):
        rng = np.random.default_rng(rng)
        y = rng.standard_normal(self.ambient_shape)
        return self.retract(y, np.zeros_like(y))


class ProductManifold(Manifold):
    """Product of Stiefel-type factors sharing a column count.

    A point stacks the factor points' rows into one (sum_i d_i) x r matrix;
    all operations apply factorwise on the row blocks. check_feasibility
    returns the max over factors.
    """

    def __init__(self, factors):
        factors = list(factors)
        if not factors:
            raise DimensionError("product manifold needs at least one factor")
        cols = {m.ambient_shape[1] for m in factors}
        if len(cols) != 1:
            raise DimensionError(
                f"factors must share the column count, got {sorted(cols)}"
            )
        self.factors = factors
        self.r = cols.pop()
        rows = [m.ambient_shape[0] for m in factors]
        self._offsets = np.concatenate([[0], np.cumsum(rows)])
        self.ambient_shape = (int(self._offsets[-1]), self.r)

    def __repr__(self):
        return f"ProductManifold({self.factors!r})"

    def split(self, x):
        """Views of the factor blocks of a stacked point or vector."""
        return [
            x[self._offsets[i] : self._offsets[i + 1]]
            for i in range(len(self.factors))
        ]

    def _map_blocks(self, op, *arrays):
        out = np.empty(arrays[0].shape)
        for i, m in enumerate(self.factors):
            lo, hi = self._offsets[i], self._offsets[i + 1]
            out[lo:hi] = op(m, *(a[lo:hi] for a in arrays))
        return out

    def check_feasibility(self, x):
        x = self._check_shape(x, "point")
        return max(
            m.check_feasibility(b) for m, b in zip(self.factors, self.split(x))
        )

    def tangent_project(self, x, v):
        v = self._check_shape(v, "vector")
        return self._map_blocks(lambda m, xb, vb: m.tangent_project(xb, vb), x, v)

    def riemannian_gradient(self, x, egrad):
        egrad = self._check_shape(egrad, "gradient")
        return self._map_blocks(
            lambda m, xb, gb: m.riemannian_gradient(xb, gb), x, egrad
        )

    def retract(self, x, v):
        return self._map_blocks(lambda m, xb, vb: m.retract(xb, vb), x, v)

    def inner(self, x, u, v):
        return sum(
            m.inner(xb, ub, vb)
            for m, xb, ub, vb in zip(
                self.factors, self.split(x), self.split(u), self.split(v)
            )
        )

    def random_point(self, rng):
        rng = np.random.default_rng(rng)
        return np.vstack([m.random_point(rng) for m in self.factors])
