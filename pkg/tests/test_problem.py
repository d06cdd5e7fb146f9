"""Composite problem: objective, AL envelope, gradients, residuals, counting."""

import numpy as np
import pytest

from rial import (
    CompositeProblem,
    FeasibilityError,
    L1Norm,
    ParameterError,
    Stiefel,
    ZeroTerm,
    identity_mapping,
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
    """Central finite differences of a scalar function of a matrix."""
    g = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xp[idx] += delta
        xm = x.copy()
        xm[idx] -= delta
        g[idx] = (fun(xp) - fun(xm)) / (2 * delta)
    return g


def toy_1x1(mu=1.0, f=None, grad_f=None):
    """f(x) + |x| with the identity mapping on the two-point manifold {-1, 1}."""
    return CompositeProblem(
        f=f or (lambda x: 0.0),
        grad_f=grad_f or (lambda x: np.zeros((1, 1))),
        mapping=identity_mapping(),
        h=L1Norm(mu, shape=(1, 1)),
        manifold=Stiefel(1, 1),
        codomain_shape=(1, 1),
    )


class TestPhi:
    def test_zero_problem(self):
        prob = CompositeProblem(
            f=lambda x: 0.0,
            grad_f=lambda x: np.zeros((3, 2)),
            mapping=identity_mapping(),
            h=ZeroTerm(),
            manifold=Stiefel(3, 2),
            codomain_shape=(3, 2),
        )
        x = prob.manifold.random_point(0)
        assert prob.phi_value(x) == 0.0

    def test_1x1_toy(self):
        prob = toy_1x1(f=lambda x: x.item() ** 2, grad_f=lambda x: 2 * x)
        assert prob.phi_value(np.array([[1.0]])) == pytest.approx(2.0)

    def test_pca_mu_zero_matches_quadratic_form(self):
        data = generate_pca_data(10, 6, 0)
        prob = build_sparse_pca(PcaInstance(data, 0.0, 2))
        x = prob.manifold.random_point(1)
        expected = -float(np.vdot(data @ data.T, x @ x.T))
        assert prob.phi_value(x) == pytest.approx(expected, rel=1e-12)

    def test_infeasible_point_rejected(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(6, 4, 0), 0.5, 2))
        with pytest.raises(FeasibilityError):
            prob.phi_value(np.ones((6, 2)))


class TestALValue:
    def test_zero_term_reduces_to_f(self):
        prob = CompositeProblem(
            f=lambda x: float(np.sum(x**2)),
            grad_f=lambda x: 2 * x,
            mapping=identity_mapping(),
            h=ZeroTerm(),
            manifold=Stiefel(4, 2),
            codomain_shape=(4, 2),
        )
        x = prob.manifold.random_point(2)
        z = np.random.default_rng(3).standard_normal((4, 2))
        assert prob.al_value(2.0, z, x) == pytest.approx(float(np.sum(x**2)))

    def test_1x1_huber_value(self):
        prob = toy_1x1()
        x = np.array([[0.2]])
        z = np.zeros((1, 1))
        assert prob.al_value(1.0, z, x) == pytest.approx(0.02)

    def test_rejects_nonpositive_sigma(self):
        prob = toy_1x1()
        with pytest.raises(ParameterError):
            prob.al_value(0.0, np.zeros((1, 1)), np.array([[1.0]]))

    def test_sandwich_inequalities(self):
        # Phi - 3 L_h^2 / (2 sigma) <= L <= Phi + L_h^2 / sigma for ||z|| <= L_h
        rng = np.random.default_rng(4)
        prob = build_sparse_pca(PcaInstance(generate_pca_data(12, 8, 5), 0.6, 2))
        l_h = prob.h.lipschitz_bound()
        for _ in range(20):
            x = prob.manifold.random_point(rng)
            z = rng.standard_normal(prob.codomain_shape)
            z *= rng.uniform(0, 1) * l_h / np.linalg.norm(z)
            sigma = rng.uniform(0.5, 50.0)
            val = prob.al_value(sigma, z, x)
            phi = prob.phi_value(x)
            assert phi - 1.5 * l_h**2 / sigma - 1e-9 <= val
            assert val <= phi + l_h**2 / sigma + 1e-9

    def test_debug_mode_runs_assertions(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(8, 5, 6), 0.4, 2))
        prob.debug = True
        x = prob.manifold.random_point(7)
        prob.al_value(2.0, np.zeros(prob.codomain_shape), x)  # must not raise


class TestALGradient:
    def test_1x1_huber_gradient(self):
        prob = toy_1x1()
        x = np.array([[0.2]])
        z = np.zeros((1, 1))
        assert prob.al_euclidean_gradient(1.0, z, x).item() == pytest.approx(0.2)

    def test_zero_term_gives_f_gradient_when_mapping_vanishes(self):
        prob = CompositeProblem(
            f=lambda x: float(np.sum(x)),
            grad_f=lambda x: np.ones_like(x),
            mapping=identity_mapping(),
            h=ZeroTerm(),
            manifold=Stiefel(3, 1),
            codomain_shape=(3, 1),
        )
        x = prob.manifold.random_point(0)
        g = prob.al_euclidean_gradient(5.0, np.zeros((3, 1)), x)
        np.testing.assert_allclose(g, np.ones((3, 1)))

    @pytest.mark.parametrize(
        "make",
        [
            lambda: build_sparse_pca(PcaInstance(generate_pca_data(9, 6, 0), 0.5, 2)),
            lambda: build_sparse_cca(
                CcaInstance(*generate_cca_data(30, 5, 4, 1), mu1=0.2, mu2=0.3, r=2)
            ),
            lambda: build_nonlinear_test(7, 2, 2),
        ],
        ids=["pca", "cca", "nonlinear"],
    )
    def test_matches_finite_differences(self, make):
        prob = make()
        rng = np.random.default_rng(8)
        for sigma in (1.0, 10.0):
            x = prob.manifold.random_point(rng)
            z = 0.2 * rng.standard_normal(prob.codomain_shape)
            g = prob.al_euclidean_gradient(sigma, z, x)
            fd = fd_gradient(lambda xx: prob.al_value(sigma, z, xx), x)
            assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))

    def test_riemannian_gradient_is_projection(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(8, 5, 3), 0.5, 2))
        x = prob.manifold.random_point(4)
        z = np.zeros(prob.codomain_shape)
        g = prob.al_euclidean_gradient(3.0, z, x)
        rg = prob.al_riemannian_gradient(3.0, z, x)
        np.testing.assert_allclose(rg, prob.manifold.tangent_project(x, g), atol=1e-14)

    def test_multiplier_estimate_bounded(self):
        rng = np.random.default_rng(9)
        prob = build_sparse_pca(PcaInstance(generate_pca_data(10, 6, 4), 0.7, 3))
        prob.debug = True  # turns on the internal bound assertion
        l_h = prob.h.lipschitz_bound()
        for _ in range(10):
            x = prob.manifold.random_point(rng)
            z = rng.standard_normal(prob.codomain_shape)
            z *= 0.9 * l_h / np.linalg.norm(z)
            prob.al_euclidean_gradient(rng.uniform(0.5, 20), z, x)


class TestResiduals:
    def test_smooth_reduction_at_optimum(self):
        # f(x) = -x[0,0] on the circle has its minimum at e_1: both residuals 0
        prob = CompositeProblem(
            f=lambda x: -x[0, 0],
            grad_f=lambda x: np.array([[-1.0], [0.0]]),
            mapping=identity_mapping(),
            h=ZeroTerm(),
            manifold=Stiefel(2, 1),
            codomain_shape=(2, 1),
        )
        x = np.array([[1.0], [0.0]])
        y = x.copy()
        z = np.zeros((2, 1))
        r_grad, r_feas = prob.stationarity_residuals(x, y, z)
        assert r_grad == pytest.approx(0.0, abs=1e-14)
        assert r_feas == 0.0

    def test_projected_gradient_formula(self):
        prob = toy_1x1()
        m = Stiefel(2, 1)
        prob2 = CompositeProblem(
            f=lambda x: 0.0,
            grad_f=lambda x: np.array([[3.0], [4.0]]),
            mapping=identity_mapping(),
            h=ZeroTerm(),
            manifold=m,
            codomain_shape=(2, 1),
        )
        x = np.array([[1.0], [0.0]])
        r_grad, _ = prob2.stationarity_residuals(x, x, np.zeros((2, 1)))
        assert r_grad == pytest.approx(4.0)


class TestOracleCounting:
    def test_value_plus_gradient_costs_one_call_each(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(8, 5, 1), 0.5, 2))
        x = prob.manifold.random_point(2)
        z = np.zeros(prob.codomain_shape)
        before = prob.counter.snapshot()
        prob.al_value(2.0, z, x)
        prob.al_euclidean_gradient(2.0, z, x)
        after = prob.counter.snapshot()
        delta = {k: after[k] - before[k] for k in after}
        assert delta == {"f": 1, "grad_f": 1, "a": 1, "adjoint": 1, "prox": 1}

    def test_counters_never_decrease(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(8, 5, 1), 0.5, 2))
        rng = np.random.default_rng(3)
        last = prob.counter.total()
        for _ in range(5):
            x = prob.manifold.random_point(rng)
            prob.al_value(3.0, np.zeros(prob.codomain_shape), x)
            now = prob.counter.total()
            assert now >= last
            last = now

    def test_new_point_invalidates_cache(self):
        prob = build_sparse_pca(PcaInstance(generate_pca_data(8, 5, 1), 0.5, 2))
        z = np.zeros(prob.codomain_shape)
        x1 = prob.manifold.random_point(4)
        x2 = prob.manifold.random_point(5)
        prob.al_value(2.0, z, x1)
        prob.al_value(2.0, z, x2)
        assert prob.counter.f == 2
        assert prob.counter.a == 2
        assert prob.counter.prox == 2


class TestMappingLinearity:
    def test_identity_flag_and_additivity(self):
        rng = np.random.default_rng(6)
        mapping = identity_mapping()
        assert mapping.linear
        x1 = rng.standard_normal((4, 2))
        x2 = rng.standard_normal((4, 2))
        np.testing.assert_allclose(
            mapping.value(x1 + x2), mapping.value(x1) + mapping.value(x2), atol=1e-8
        )

    def test_quadratic_map_is_marked_nonlinear(self):
        prob = build_nonlinear_test(6, 2, 0)
        assert not prob.mapping.linear
