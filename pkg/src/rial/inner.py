"""Riemannian gradient descent for the augmented-Lagrangian subproblem.

Minimizes L(x; sigma, z) over the manifold until the Riemannian gradient norm
drops to the inner tolerance. Two stepsize modes: Barzilai-Borwein trial
steps safeguarded by a (non)monotone backtracking line search, and the fixed
theoretical stepsize 1/L(x) built from user-supplied smoothness constants.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import LineSearchStallError, ParameterError, UnsupportedError
from .problem import SmoothnessConstants

MAX_HALVINGS = 60


@dataclass
class InnerConfig:
    """Knobs for the inner solver.

    nonmonotone_window = 1 gives the plain monotone Armijo test; larger
    windows compare against the max of that many recent values.
    """

    stepsize_mode: str = "bb-backtracking"
    max_inner_iters: int = 5000
    armijo_c1: float = 1e-4
    shrink: float = 0.5
    zeta_min: float = 1e-10
    zeta_max: float = 1e10
    nonmonotone_window: int = 1
    constants: SmoothnessConstants | None = None

    def __post_init__(self):
        if self.stepsize_mode not in ("bb-backtracking", "theoretical"):
            raise ParameterError(f"unknown stepsize mode {self.stepsize_mode!r}")
        if not 0 < self.shrink < 1:
            raise ParameterError(f"shrink must be in (0, 1), got {self.shrink}")
        if not 0 < self.armijo_c1 < 1:
            raise ParameterError(f"armijo_c1 must be in (0, 1), got {self.armijo_c1}")
        if not self.zeta_min < self.zeta_max:
            raise ParameterError("need zeta_min < zeta_max")
        if self.max_inner_iters < 1:
            raise ParameterError("max_inner_iters must be >= 1")
        if self.nonmonotone_window < 1:
            raise ParameterError("nonmonotone_window must be >= 1")


@dataclass
class InnerResult:
    """Outcome of one subproblem solve.

    iterations counts retraction steps taken; value_trace holds the envelope
    value at the start point and after each step, grad_norm_trace the matching
    gradient norms, step_sizes the accepted stepsize per step.
    """

    point: np.ndarray
    grad_norm: float
    iterations: int
    value_trace: list = field(default_factory=list)
    grad_norm_trace: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    converged: bool = False


def bb_stepsize(s, g_diff, t, zeta_min=1e-10, zeta_max=1e10):
    """Alternating Barzilai-Borwein stepsize from the last step's differences.

    Even t uses <s,s>/<s,g_diff>, odd t uses <s,g_diff>/<g_diff,g_diff>,
    clamped into [zeta_min, zeta_max]. A non-positive curvature estimate
    <s,g_diff> (including the all-zero case) falls back to 1.
    """
    sy = float(np.vdot(s, g_diff))
    if sy <= 0.0:
        return 1.0
    if t % 2 == 0:
        zeta = float(np.vdot(s, s)) / sy
    else:
        zeta = sy / float(np.vdot(g_diff, g_diff))
    return min(max(zeta, zeta_min), zeta_max)


def theoretical_stepsize(constants, sigma, grad_f_norm):
    """1 / L(x) with L(x) = ell * alpha1^2 + 2(||grad f(x)|| + rho_a l_h) alpha2,

    ell = l_f + l_h l_a1 + sigma rho_a l_a0.
    """
    if constants is None:
        raise UnsupportedError("theoretical stepsize needs SmoothnessConstants")
    c = constants
    ell = c.l_f + c.l_h * c.l_a1 + sigma * c.rho_a * c.l_a0
    denom = ell * c.alpha1 ** 2 + 2.0 * (grad_f_norm + c.rho_a * c.l_h) * c.alpha2
    if not denom > 0:
        raise ParameterError(f"stepsize denominator must be positive, got {denom}")
    return 1.0 / denom


def rgd_solve(problem, sigma, z, x0, eps_k, cfg):
    """Run RGD on L(.; sigma, z) from x0 until ||grad|| <= eps_k or the cap.

    The gradient test precedes the first step, so an already-converged warm
    start returns after one gradient evaluation and zero retractions. Hitting
    the iteration cap yields converged=False, not an exception; a line search
    that cannot find decrease within 60 halvings raises LineSearchStallError
    carrying the partial result.
    """
    if not eps_k > 0:
        raise ParameterError(f"inner tolerance must be positive, got {eps_k}")
    manifold = problem.manifold
    theoretical = cfg.stepsize_mode == "theoretical"
    if theoretical and cfg.constants is None:
        raise UnsupportedError("theoretical mode requires cfg.constants")

    x = x0
    g = problem.al_riemannian_gradient(sigma, z, x)
    gnorm = manifold.norm(x, g)
    if gnorm <= eps_k:
        return InnerResult(x, gnorm, 0, [], [gnorm], [], True)

    value = problem.al_value(sigma, z, x)
    values = [value]
    gnorms = [gnorm]
    steps = []
    window = deque([value], maxlen=cfg.nonmonotone_window)
    s_prev = None
    gd_prev = None

    for t in range(1, cfg.max_inner_iters + 1):
        if theoretical:
            grad_f_norm = float(np.linalg.norm(problem.f_grad(x)))
            zeta = theoretical_stepsize(cfg.constants, sigma, grad_f_norm)
            x_new = manifold.retract(x, -zeta * g)
            value_new = problem.al_value(sigma, z, x_new)
        else:
            if s_prev is None:
                zeta = min(max(1.0 / gnorm, cfg.zeta_min), cfg.zeta_max)
            else:
                zeta = bb_stepsize(s_prev, gd_prev, t, cfg.zeta_min, cfg.zeta_max)
            ref = max(window)
            gsq = gnorm * gnorm
            # below this resolution a decrease of the envelope value cannot
            # be verified in float64; accept non-increasing steps there
            fp_tol = 100.0 * np.finfo(np.float64).eps * max(1.0, abs(ref))
            accepted = False
            for _ in range(MAX_HALVINGS + 1):
                x_new = manifold.retract(x, -zeta * g)
                value_new = problem.al_value(sigma, z, x_new)
                need = cfg.armijo_c1 * zeta * gsq
                if value_new <= ref - need or (
                    need <= fp_tol and value_new <= ref + fp_tol
                ):
                    accepted = True
                    break
                zeta *= cfg.shrink
            if not accepted:
                raise LineSearchStallError(
                    f"no sufficient decrease after {MAX_HALVINGS} halvings "
                    f"(grad norm {gnorm:.3e}, target {eps_k:.3e})",
                    result=InnerResult(x, gnorm, t - 1, values, gnorms, steps, False),
                )

        g_new = problem.al_riemannian_gradient(sigma, z, x_new)
        s_prev = x_new - x
        gd_prev = g_new - manifold.tangent_project(x_new, g)
        x, g = x_new, g_new
        gnorm = manifold.norm(x, g)
        value = value_new
        values.append(value)
        gnorms.append(gnorm)
        steps.append(zeta)
        window.append(value)
        if gnorm <= eps_k:
            return InnerResult(x, gnorm, t, values, gnorms, steps, True)

    return InnerResult(x, gnorm, cfg.max_inner_iters, values, gnorms, steps, False)
