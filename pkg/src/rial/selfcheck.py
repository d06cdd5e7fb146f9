"""Quick invariant suite behind ``rial check``.

Spot-checks the manifold kernels, the nonsmooth oracle identities, and the
envelope gradients on small built-in instances. Returns the number of failed
checks; each check prints one PASS/FAIL line.
"""

import numpy as np

from . import nonsmooth
from .inner import bb_stepsize
from .manifolds import GeneralizedStiefel, Stiefel
from .nonsmooth import L1Norm
from .outer import predict_outer_iterations
from .problems import (
    CcaInstance,
    PcaInstance,
    build_nonlinear_test,
    build_sparse_cca,
    build_sparse_pca,
    generate_cca_data,
    generate_pca_data,
)


def _fd_gradient(fun, x, delta=1e-6):
    g = np.empty_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        xp = x.copy()
        xp[idx] += delta
        xm = x.copy()
        xm[idx] -= delta
        g[idx] = (fun(xp) - fun(xm)) / (2 * delta)
    return g


def _manifold_checks(out):
    rng = np.random.default_rng(0)
    gram = rng.standard_normal((6, 6))
    gram = gram @ gram.T + 6 * np.eye(6)
    manifolds = [Stiefel(7, 3), GeneralizedStiefel(gram, 2)]
    worst_proj = worst_retr = worst_slope = 0.0
    for m in manifolds:
        for _ in range(20):
            x = m.random_point(rng)
            v = m.random_tangent(x, rng)
            w = rng.standard_normal(m.ambient_shape)
            p = m.tangent_project(x, w)
            worst_proj = max(
                worst_proj, float(np.linalg.norm(m.tangent_project(x, p) - p))
            )
            worst_retr = max(worst_retr, m.check_feasibility(m.retract(x, v)))
            t = 1e-6
            slope = np.linalg.norm(m.retract(x, t * v) - x) / t
            worst_slope = max(
                worst_slope, abs(slope - np.linalg.norm(v)) / np.linalg.norm(v)
            )
    out("projection idempotence", worst_proj <= 1e-10)
    out("retraction feasibility", worst_retr <= 1e-10)
    out("retraction first-order slope", worst_slope <= 1e-4)


def _nonsmooth_checks(out):
    rng = np.random.default_rng(1)
    h = L1Norm(1.0, shape=(1, 1))
    worst = 0.0
    for _ in range(20):
        w = rng.uniform(-3, 3)
        lam = rng.uniform(0.1, 2.0)
        grid = np.linspace(-3, 3, 60001)
        objective = np.abs(grid) + (grid - w) ** 2 / (2 * lam)
        brute = grid[np.argmin(objective)]
        p = nonsmooth.prox(h, lam, np.array([[w]])).item()
        worst = max(worst, abs(p - brute))
    out("prox vs grid search", worst <= 1e-3)
    w = rng.standard_normal((4, 3))
    val = nonsmooth.moreau_value(h, 0.7, w)
    p = nonsmooth.prox(h, 0.7, w)
    compositional = float(np.abs(p).sum() + np.vdot(w - p, w - p) / 1.4)
    out("moreau value identity", abs(val - compositional) <= 1e-12)
    g = nonsmooth.moreau_gradient(h, 0.7, w)
    out("moreau gradient identity", float(np.linalg.norm(g - (w - p) / 0.7)) <= 1e-12)


def _gradient_checks(out):
    problems = [
        build_sparse_pca(PcaInstance(generate_pca_data(12, 8, 2), 0.4, 2)),
        build_sparse_cca(
            CcaInstance(*generate_cca_data(40, 6, 5, 3), mu1=0.1, mu2=0.1, r=2)
        ),
        build_nonlinear_test(8, 2, 4),
    ]
    worst = 0.0
    rng = np.random.default_rng(5)
    for prob in problems:
        x = prob.manifold.random_point(rng)
        z = 0.3 * rng.standard_normal(prob.codomain_shape)
        sigma = 2.0
        g = prob.al_euclidean_gradient(sigma, z, x)
        fd = _fd_gradient(lambda xx: prob.al_value(sigma, z, xx), x)
        worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
    out("envelope gradient vs finite differences", worst <= 1e-5)


def _misc_checks(out):
    out(
        "alternating bb stepsizes",
        bb_stepsize(np.array([2.0, 0.0]), np.array([1.0, 0.0]), 2) == 2.0
        and bb_stepsize(np.array([2.0, 0.0]), np.array([1.0, 0.0]), 3) == 2.0,
    )
    out(
        "outer-iteration predictor",
        predict_outer_iterations(1.0, 1.5, 1.5, 1.5, 1e-5) == 31,
    )


def run_selfcheck(printer=print):
    """Run all checks; returns the number of failures."""
    failures = 0

    def out(label, ok):
        nonlocal failures
        printer(f"{'PASS' if ok else 'FAIL'}  {label}")
        if not ok:
            failures += 1

    _manifold_checks(out)
    _nonsmooth_checks(out)
    _gradient_checks(out)
    _misc_checks(out)
    return failures
