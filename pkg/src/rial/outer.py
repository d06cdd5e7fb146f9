"""Outer augmented-Lagrangian driver.

Per outer iteration: warm-started inner RGD solve to tolerance eps_k, the
prox update of the auxiliary variable, a dual step (classical full stepsize
or the damped baseline), and the geometric schedule sigma -> b*sigma,
eps -> eps/b. Terminates when both stationarity residuals reach the target.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import FeasibilityError, LineSearchStallError, ParameterError
from .inner import InnerConfig, rgd_solve
from .manifolds import ACCEPT_TOL


@dataclass
class OuterConfig:
    """Targets, schedule, and dual mode for one solve."""

    eps: float = 1e-5
    eps1: float = 1.5
    sigma1: float = 1.5
    b: float = 1.5
    max_outer: int = 100
    dual_mode: str = "classical"
    beta0: float = 1.0
    inner: InnerConfig = field(default_factory=InnerConfig)
    seed: int = 0

    def __post_init__(self):
        if self.dual_mode not in ("classical", "damped"):
            raise ParameterError(f"unknown dual mode {self.dual_mode!r}")
        if not self.b > 1:
            raise ParameterError(f"schedule factor b must exceed 1, got {self.b}")
        for name in ("eps", "eps1", "sigma1", "beta0"):
            v = getattr(self, name)
            if not v > 0:
                raise ParameterError(f"{name} must be positive, got {v}")
        if self.max_outer < 1:
            raise ParameterError("max_outer must be >= 1")


@dataclass
class ALState:
    """State after the last completed outer iteration."""

    k: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    sigma: float
    eps_k: float


@dataclass
class IterationRecord:
    """Per-outer-iteration metrics; oracle counts are cumulative in-solve."""

    k: int
    phi: float
    r_grad: float
    r_feas: float
    inner_iterations: int
    inner_converged: bool
    inner_stalled: bool
    sigma: float
    eps_k: float
    oracle_counts: dict
    wall_time: float


def schedule_update(sigma, eps_k, b):
    """(sigma, eps) -> (b*sigma, eps/b); the product sigma*eps is invariant."""
    if not b > 1:
        raise ParameterError(f"schedule factor b must exceed 1, got {b}")
    return b * sigma, eps_k / b


def dual_update(mode, z, sigma, residual, k, beta0=1.0, initial_residual_norm=None):
    """Next multiplier from the constraint residual A(x) - y.

    classical: z + sigma * residual (the full ascent step). damped: the
    baseline z + beta0 * min(r1 * log(2)^2 / (||residual|| (k+1)^2 log(k+2)),
    1) * residual with r1 the residual norm at the initial point; a zero
    residual makes the factor irrelevant, so it is taken as 1.
    """
    if mode == "classical":
        return z + sigma * residual
    if mode != "damped":
        raise ParameterError(f"unknown dual mode {mode!r}")
    if initial_residual_norm is None:
        raise ParameterError("damped dual update needs initial_residual_norm")
    res_norm = float(np.linalg.norm(residual))
    if res_norm == 0.0:
        factor = 1.0
    else:
        factor = min(
            initial_residual_norm
            * math.log(2.0) ** 2
            / (res_norm * (k + 1) ** 2 * math.log(k + 2)),
            1.0,
        )
    return z + beta0 * factor * residual


def predict_outer_iterations(l_h, sigma1, eps1, b, eps):
    """Outer-iteration count 1 + ceil(log_b(max{2 l_h / sigma1, eps1} / eps)).

    After that many iterations the schedule alone guarantees both residual
    bounds are below eps; returns 1 when eps already dominates.
    """
    for name, v in (("sigma1", sigma1), ("eps1", eps1), ("eps", eps)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")
    if not l_h >= 0:
        raise ParameterError(f"l_h must be >= 0, got {l_h}")
    if not b > 1:
        raise ParameterError(f"schedule factor b must exceed 1, got {b}")
    ratio = max(2.0 * l_h / sigma1, eps1) / eps
    if ratio <= 1.0:
        return 1
    return 1 + math.ceil(math.log(ratio) / math.log(b))


def rial_solve(problem, cfg, x0=None, record_sink=None):
    """Drive the outer loop; returns (ALState, records, status).

    status is "converged" when both residuals reached cfg.eps, else
    "max-outer-reached". The inner solve warm-starts from the previous
    iterate; an inner stall or cap hit is flagged in the record and the outer
    updates proceed from the best iterate.
    """
    manifold = problem.manifold
    if x0 is None:
        x = manifold.random_point(np.random.default_rng(cfg.seed))
    else:
        x = x0
        res = manifold.check_feasibility(x)
        if res > ACCEPT_TOL:
            raise FeasibilityError(
                f"initial point violates the manifold constraint by {res:.2e}"
            )

    sigma, eps_k = cfg.sigma1, cfg.eps1
    z = np.zeros(problem.codomain_shape)
    y = np.zeros(problem.codomain_shape)
    initial_residual_norm = None
    if cfg.dual_mode == "damped":
        initial_residual_norm = float(np.linalg.norm(problem.a_value(x) - y))

    start_counts = problem.counter.snapshot()
    t0 = time.process_time()
    records = []
    status = "max-outer-reached"

    for k in range(1, cfg.max_outer + 1):
        try:
            inner = rgd_solve(problem, sigma, z, x, eps_k, cfg.inner)
            stalled = False
        except LineSearchStallError as exc:
            inner = exc.result
            stalled = True
        x_next = inner.point

        a_val = problem.a_value(x_next)
        y_next = problem.prox_map(1.0 / sigma, a_val + z / sigma)
        residual = a_val - y_next
        # multiplier certificate in dh(y_next); equals the classical update
        z_cert = z + sigma * residual
        z_next = (
            z_cert
            if cfg.dual_mode == "classical"
            else dual_update(
                "damped", z, sigma, residual, k, cfg.beta0, initial_residual_norm
            )
        )

        r_grad, r_feas = problem.stationarity_residuals(x_next, y_next, z_cert)
        counts = problem.counter.snapshot()
        record = IterationRecord(
            k=k,
            phi=problem.phi_value(x_next),
            r_grad=r_grad,
            r_feas=r_feas,
            inner_iterations=inner.iterations,
            inner_converged=inner.converged,
            inner_stalled=stalled,
            sigma=sigma,
            eps_k=eps_k,
            oracle_counts={key: counts[key] - start_counts[key] for key in counts},
            wall_time=time.process_time() - t0,
        )
        records.append(record)
        if record_sink is not None:
            record_sink(record)

        x, y, z = x_next, y_next, z_next
        if max(r_grad, r_feas) <= cfg.eps:
            status = "converged"
            break
        if k < cfg.max_outer:
            sigma, eps_k = schedule_update(sigma, eps_k, cfg.b)

    state = ALState(k=records[-1].k, x=x, y=y, z=z,
                    sigma=records[-1].sigma, eps_k=records[-1].eps_k)
    return state, records, status
