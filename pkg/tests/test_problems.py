"""Benchmark builders and data generators."""

import numpy as np
import pytest
from scipy.linalg import eigh, svd

from rial import (
    ConditioningError,
    DimensionError,
    OuterConfig,
    rial_solve,
    sparsity,
)
from rial.problems import (
    CcaInstance,
    PcaInstance,
    build_nonlinear_test,
    build_sparse_cca,
    build_sparse_pca,
    generate_cca_data,
    generate_pca_data,
)


def fd_gradient(fun, x, delta=1e-6):
    g = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xp[idx] += delta
        xm = x.copy()
        xm[idx] -= delta
        g[idx] = (fun(xp) - fun(xm)) / (2 * delta)
    return g


def top_canonical_correlation(inst):
    """Dense oracle: largest singular value of the whitened cross-covariance."""
    wa, va = eigh(inst.cov_aa)
    wb, vb = eigh(inst.cov_bb)
    inv_sqrt_a = va @ (va / np.sqrt(wa)).T
    inv_sqrt_b = vb @ (vb / np.sqrt(wb)).T
    return float(svd(inv_sqrt_a @ inst.cov_ab @ inv_sqrt_b, compute_uv=False)[0])


class TestPcaData:
    def test_columns_centered_and_normalized(self):
        a = generate_pca_data(50, 20, 3)
        np.testing.assert_allclose(np.linalg.norm(a, axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(a.mean(axis=0), 0.0, atol=1e-12)

    def test_deterministic(self):
        np.testing.assert_array_equal(
            generate_pca_data(30, 10, 5), generate_pca_data(30, 10, 5)
        )

    def test_rank_equals_sample_count(self):
        a = generate_pca_data(500, 50, 0)
        singular_values = np.linalg.svd(a, compute_uv=False)
        assert np.sum(singular_values**2 > 1e-8) == 50


class TestCcaData:
    def test_deterministic(self):
        a1, b1 = generate_cca_data(100, 8, 6, 9)
        a2, b2 = generate_cca_data(100, 8, 6, 9)
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(b1, b2)

    def test_independent_views_have_weak_correlation(self):
        a, b = generate_cca_data(1000, 50, 50, 1, snr=0.0)
        inst = CcaInstance(a, b, mu1=0.0, mu2=0.0, r=1)
        assert top_canonical_correlation(inst) <= 0.5

    def test_planted_signal_has_strong_correlation(self):
        a, b = generate_cca_data(1000, 50, 50, 2, snr=1.0)
        inst = CcaInstance(a, b, mu1=0.0, mu2=0.0, r=1)
        assert top_canonical_correlation(inst) >= 0.5


class TestSparsePca:
    def test_rejects_bad_dimensions(self):
        with pytest.raises(DimensionError):
            PcaInstance(np.ones((4, 3)), 0.5, 5)

    def test_gradient_matches_finite_differences(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(10, 7, 0), 0.5, 2))
        x = prob.manifold.random_point(1)
        g = prob.f_grad(x)
        fd = fd_gradient(prob.f_value, x)
        assert np.linalg.norm(fd - g) <= 1e-6 * max(1.0, np.linalg.norm(g))

    def test_mu_zero_recovers_top_eigenvalues(self):
        data = generate_pca_data(30, 20, 4)
        prob = build_sparse_pca(PcaInstance(data, 0.0, 2))
        _, records, status = rial_solve(prob, OuterConfig(seed=4))
        assert status == "converged"
        eigenvalues = np.linalg.eigvalsh(data @ data.T)
        best = float(eigenvalues[-2:].sum())
        assert -records[-1].phi == pytest.approx(best, rel=1e-4)

    def test_large_mu_drives_sparsity(self):
        data = generate_pca_data(30, 20, 8)
        lam_max = float(np.linalg.eigvalsh(data @ data.T)[-1])
        prob = build_sparse_pca(PcaInstance(data, lam_max, 2))
        state, _, _ = rial_solve(prob, OuterConfig(seed=8))
        assert sparsity(state.x) >= 50.0


class TestSparseCca:
    def make(self, seed=0, mu=0.1, r=2, p=6, q=5, d=60):
        a, b = generate_cca_data(d, p, q, seed)
        return build_sparse_cca(CcaInstance(a, b, mu1=mu, mu2=mu, r=r))

    def test_gradient_matches_finite_differences(self):
        prob = self.make()
        x = prob.manifold.random_point(2)
        g = prob.f_grad(x)
        fd = fd_gradient(prob.f_value, x)
        assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))

    def test_factor_feasibility_at_solution(self):
        prob = self.make(seed=3)
        state, _, status = rial_solve(prob, OuterConfig(seed=3))
        assert status == "converged"
        assert prob.manifold.check_feasibility(state.x) <= 1e-8

    def test_distinct_weights_build_blockwise_term(self):
        a, b = generate_cca_data(40, 4, 3, 5)
        prob = build_sparse_cca(CcaInstance(a, b, mu1=0.2, mu2=0.7, r=2))
        w = np.ones((7, 2))
        # h(w) = 0.2 * (4*2) + 0.7 * (3*2)
        assert prob.h.value(w) == pytest.approx(0.2 * 8 + 0.7 * 6)

    def test_conditioning_error_without_ridge(self):
        rng = np.random.default_rng(6)
        col = rng.standard_normal((30, 1))
        a = np.hstack([col, col, rng.standard_normal((30, 2))])  # rank deficient
        b = rng.standard_normal((30, 3))
        with pytest.raises(ConditioningError):
            CcaInstance(a, b, mu1=0.1, mu2=0.1, r=1, ridge_scale=0.0)


class TestNonlinear:
    def test_adjoint_matches_directional_derivative(self):
        prob = build_nonlinear_test(8, 3, 0)
        rng = np.random.default_rng(1)
        x = prob.manifold.random_point(rng)
        v = rng.standard_normal(x.shape)
        zmat = rng.standard_normal(prob.codomain_shape)
        t = 1e-6
        lhs = float(np.vdot(prob.mapping.value(x + t * v)
                            - prob.mapping.value(x), zmat)) / t
        rhs = float(np.vdot(v, prob.mapping.adjoint(x, zmat)))
        assert lhs == pytest.approx(rhs, rel=1e-4)

    def test_zero_map_scale_degenerates(self):
        prob = build_nonlinear_test(6, 2, 1, d_scale=0.0)
        x = prob.manifold.random_point(0)
        np.testing.assert_array_equal(prob.mapping.value(x), np.zeros((2, 2)))
        _, records, _ = rial_solve(prob, OuterConfig(seed=1, max_outer=5))
        # with A == 0 the constraint residual is the prox output of z/sigma,
        # which stays 0 from z_1 = 0
        assert all(rec.r_feas == 0.0 for rec in records)

    def test_solver_reaches_moderate_stationarity(self):
        prob = build_nonlinear_test(20, 3, 2)
        _, records, status = rial_solve(prob, OuterConfig(seed=2, eps=1e-4))
        assert status == "converged"
        assert records[-1].r_grad <= 1e-4
        assert records[-1].r_feas <= 1e-4
        assert len(records) <= 100


class TestSparsity:
    def test_frozen_values(self):
        assert sparsity(np.zeros((3, 3))) == 100.0
        assert sparsity(np.ones((3, 3))) == 0.0
        x = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 3.0]])
        assert sparsity(x) == pytest.approx(50.0)

    def test_tolerance_boundary(self):
        x = np.array([[1e-6, 1e-4]])
        assert sparsity(x, tol=1e-5) == pytest.approx(50.0)
