"""Benchmark problem builders and data generators.

Sparse PCA on the Stiefel manifold, sparse CCA on a product of generalized
Stiefel manifolds, and a synthetic quadratic-map instance that exercises the
nonlinear-mapping code path. Generators are deterministic per seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, DimensionError
from .manifolds import GeneralizedStiefel, ProductManifold, Stiefel
from .nonsmooth import L1Norm
from .problem import CompositeProblem, Mapping, identity_mapping

MIN_COV_EIG = 1e-8


@dataclass
class PcaInstance:
    """Sparse PCA data: maximize the explained variance of r components of
    the d x N sample matrix, l1-penalized with weight mu."""

    data: np.ndarray
    mu: float
    r: int

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        d, n = self.data.shape
        if not 1 <= self.r <= d:
            raise DimensionError(f"need 1 <= r <= d, got r={self.r}, d={d}")
        if n < 1:
            raise DimensionError("data needs at least one column")
        if self.mu < 0:
            raise DimensionError(f"mu must be >= 0, got {self.mu}")


@dataclass
class CcaInstance:
    """Sparse CCA data: two views with d samples each, p and q variables.

    Covariances are the sample ones scaled by 1/d; a relative ridge keeps the
    per-view covariances positive definite.
    """

    a: np.ndarray
    b: np.ndarray
    mu1: float
    mu2: float
    r: int
    ridge_scale: float = 1e-6
    cov_aa: np.ndarray = field(init=False)
    cov_bb: np.ndarray = field(init=False)
    cov_ab: np.ndarray = field(init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        d, p = self.a.shape
        d2, q = self.b.shape
        if d != d2:
            raise DimensionError(f"views need equal sample counts, got {d} and {d2}")
        if not 1 <= self.r <= min(p, q):
            raise DimensionError(f"need 1 <= r <= min(p, q), got r={self.r}")
        self.cov_aa = self.a.T @ self.a / d
        self.cov_bb = self.b.T @ self.b / d
        self.cov_ab = self.a.T @ self.b / d
        self.cov_aa += (self.ridge_scale * np.trace(self.cov_aa) / p) * np.eye(p)
        self.cov_bb += (self.ridge_scale * np.trace(self.cov_bb) / q) * np.eye(q)
        for name, cov in (("aa", self.cov_aa), ("bb", self.cov_bb)):
            smallest = float(np.linalg.eigvalsh(cov)[0])
            if smallest <= MIN_COV_EIG:
                raise ConditioningError(
                    f"covariance {name} not positive definite after ridging "
                    f"(smallest eigenvalue {smallest:.2e})"
                )


def generate_pca_data(d, n_samples, seed):
    """d x N standard-Gaussian matrix with centered, unit-norm columns."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, n_samples))
    a -= a.mean(axis=0)
    a /= np.linalg.norm(a, axis=0)
    return a


def generate_cca_data(d, p, q, seed, snr=1.0, latent_rank=5):
    """Two Gaussian views sharing a planted low-rank latent signal.

    Each view is snr * Z W + noise with Z a d x latent_rank Gaussian factor
    and W an orthonormal mixing; snr=0 gives independent views. At snr=1 the
    population top canonical correlation is snr^2/(1+snr^2) = 0.5. Keep
    latent_rank above the number of extracted components, otherwise the
    trailing canonical directions are pure noise and the optimum degenerates.
    """
    rng = np.random.default_rng(seed)
    latent = rng.standard_normal((d, latent_rank))
    mix_a = np.linalg.qr(rng.standard_normal((p, latent_rank)))[0].T
    mix_b = np.linalg.qr(rng.standard_normal((q, latent_rank)))[0].T
    a = snr * latent @ mix_a + rng.standard_normal((d, p))
    b = snr * latent @ mix_b + rng.standard_normal((d, q))
    return a, b


def build_sparse_pca(inst):
    """Composite problem -<AA^T, XX^T> + mu ||X||_1 on Stiefel(d, r)."""
    a = inst.data
    d = a.shape[0]

    def f(x):
        return -float(np.vdot(a.T @ x, a.T @ x))

    def grad_f(x):
        return -2.0 * (a @ (a.T @ x))

    return CompositeProblem(
        f=f,
        grad_f=grad_f,
        mapping=identity_mapping(),
        h=L1Norm(inst.mu, shape=(d, inst.r)),
        manifold=Stiefel(d, inst.r),
        codomain_shape=(d, inst.r),
        name=f"sparse-pca(d={d}, r={inst.r}, mu={inst.mu})",
    )


def build_sparse_cca(inst):
    """Composite problem -tr(U^T C_ab V) + mu1||U||_1 + mu2||V||_1 on the
    product of the two covariance-weighted Stiefel manifolds.

    Points stack U on top of V into one (p+q) x r matrix; the nonsmooth term
    acts on the identity mapping of that stacked block.
    """
    p = inst.a.shape[1]
    q = inst.b.shape[1]
    r = inst.r
    cov_ab = inst.cov_ab

    def f(x):
        return -float(np.vdot(x[:p], cov_ab @ x[p:]))

    def grad_f(x):
        return -np.vstack((cov_ab @ x[p:], cov_ab.T @ x[:p]))

    manifold = ProductManifold(
        [GeneralizedStiefel(inst.cov_aa, r), GeneralizedStiefel(inst.cov_bb, r)]
    )
    if inst.mu1 == inst.mu2:
        h = L1Norm(inst.mu1, shape=(p + q, r))
    else:
        h = L1Norm(
            np.vstack(
                (np.full((p, r), inst.mu1), np.full((q, r), inst.mu2))
            )
        )
    return CompositeProblem(
        f=f,
        grad_f=grad_f,
        mapping=identity_mapping(),
        h=h,
        manifold=manifold,
        codomain_shape=(p + q, r),
        name=f"sparse-cca(p={p}, q={q}, r={r}, mu=({inst.mu1}, {inst.mu2}))",
    )


def build_nonlinear_test(p, r, seed, mu=0.1, d_scale=1.0):
    """Synthetic instance with the quadratic mapping A(X) = X^T D X.

    f is linear, D is a random positive semidefinite matrix scaled by
    d_scale (zero gives the degenerate smooth-linear problem), and the l1
    term acts on the r x r image. Exercises the nonlinear-mapping path the
    matrix benchmarks never touch.
    """
    if r > p:
        raise DimensionError(f"need r <= p, got p={p}, r={r}")
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((p, r))
    m = rng.standard_normal((p, p))
    dmat = d_scale * (m.T @ m) / p

    def a_value(x):
        return x.T @ (dmat @ x)

    def a_adjoint(x, zmat):
        return dmat @ x @ (zmat + zmat.T)

    return CompositeProblem(
        f=lambda x: float(np.vdot(c, x)),
        grad_f=lambda x: c,
        mapping=Mapping(a_value, a_adjoint, linear=False),
        h=L1Norm(mu, shape=(r, r)),
        manifold=Stiefel(p, r),
        codomain_shape=(r, r),
        name=f"nonlinear-quadratic(p={p}, r={r}, mu={mu})",
    )


def sparsity(x, tol=1e-5):
    """Percentage of entries with |x_ij| < tol."""
    x = np.asarray(x)
    return 100.0 * float(np.count_nonzero(np.abs(x) < tol)) / x.size
