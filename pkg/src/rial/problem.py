"""Composite problem container: min over M of f(x) + h(A(x)).

Supplies the objective, the augmented-Lagrangian envelope

    L(x; sigma, z) = f(x) + M_{h/sigma}(A(x) + z/sigma),

its Euclidean and Riemannian gradients, stationarity residuals, and
first-order oracle accounting. A(x) and the prox at (x, sigma, z) are cached
per point so that a value plus a gradient at the same arguments costs one
oracle call each.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

from . import nonsmooth
from .errors import FeasibilityError, ParameterError
from .manifolds import ACCEPT_TOL


@dataclass(frozen=True)
class SmoothnessConstants:
    """User-supplied constants for the theoretical stepsize.

    l_f: descent constant of f; l_h: Lipschitz constant of h; l_a0 / l_a1:
    Lipschitz constants of the mapping and its Jacobian; rho_a: Jacobian norm
    bound; alpha1 / alpha2: first- and second-order retraction bounds.
    """

    l_f: float
    l_h: float
    l_a0: float
    l_a1: float
    rho_a: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for fld in fields(self):
            v = getattr(self, fld.name)
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError(f"{fld.name} must be finite and >= 0, got {v}")


class OracleCounter:
    """Monotone counts of first-order oracle calls."""

    __slots__ = ("f", "grad_f", "a", "adjoint", "prox")

    def __init__(self):
        self.f = 0
        self.grad_f = 0
        self.a = 0
        self.adjoint = 0
        self.prox = 0

    def snapshot(self):
        return {
            "f": self.f,
            "grad_f": self.grad_f,
            "a": self.a,
            "adjoint": self.adjoint,
            "prox": self.prox,
        }

    def total(self):
        return self.f + self.grad_f + self.a + self.adjoint + self.prox


class Mapping:
    """Smooth map A between matrix spaces, with adjoint-Jacobian action.

    ``value(x)`` evaluates A(x); ``adjoint(x, zmat)`` applies the adjoint of
    the Jacobian at x to zmat. ``linear`` marks maps with A(x+x') =
    A(x)+A(x').
    """

    def __init__(self, value, adjoint, linear=False):
        self._value = value
        self._adjoint = adjoint
        self.linear = bool(linear)

    def value(self, x):
        return self._value(x)

    def adjoint(self, x, zmat):
        return self._adjoint(x, zmat)


def identity_mapping():
    """The identity map; its adjoint action is the identity too."""
    return Mapping(lambda x: x, lambda x, zmat: zmat, linear=True)


class _PointMemo:
    __slots__ = ("x", "f", "grad_f", "a")

    def __init__(self):
        self.x = None
        self.f = None
        self.grad_f = None
        self.a = None


class _EnvelopeMemo:
    __slots__ = ("x", "sigma", "z", "moreau", "multiplier")

    def __init__(self):
        self.x = None
        self.sigma = None
        self.z = None
        self.moreau = None
        self.multiplier = None


class CompositeProblem:
    """Bundle of f (value + gradient), mapping A, nonsmooth h, and manifold.

    ``debug=True`` turns on the proof-inequality assertions (multiplier bound
    and envelope sandwich); they need the Lipschitz bound of h and extra
    norms, so release runs leave them off.
    """

    def __init__(self, f, grad_f, mapping, h, manifold, codomain_shape,
                 debug=False, name=""):
        self._f = f
        self._grad_f = grad_f
        self.mapping = mapping
        self.h = h
        self.manifold = manifold
        self.codomain_shape = tuple(codomain_shape)
        self.debug = bool(debug)
        self.name = name
        self.counter = OracleCounter()
        self._pt = _PointMemo()
        self._env = _EnvelopeMemo()

    # -- raw oracles (memoized per point) --------------------------------

    def _memo(self, x):
        if self._pt.x is not x:
            self._pt = _PointMemo()
            self._pt.x = x
        return self._pt

    def f_value(self, x):
        memo = self._memo(x)
        if memo.f is None:
            self.counter.f += 1
            memo.f = float(self._f(x))
        return memo.f

    def f_grad(self, x):
        memo = self._memo(x)
        if memo.grad_f is None:
            self.counter.grad_f += 1
            memo.grad_f = self._grad_f(x)
        return memo.grad_f

    def a_value(self, x):
        memo = self._memo(x)
        if memo.a is None:
            self.counter.a += 1
            memo.a = self.mapping.value(x)
        return memo.a

    def a_adjoint(self, x, zmat):
        self.counter.adjoint += 1
        return self.mapping.adjoint(x, zmat)

    def prox_map(self, lam, w):
        self.counter.prox += 1
        return nonsmooth.prox(self.h, lam, w)

    # -- objective and envelope ------------------------------------------

    def phi_value(self, x):
        """f(x) + h(A(x)); x must satisfy the manifold constraint to 1e-8."""
        res = self.manifold.check_feasibility(x)
        if res > ACCEPT_TOL:
            raise FeasibilityError(
                f"point violates the manifold constraint by {res:.2e}"
            )
        return self.f_value(x) + self.h.value(self.a_value(x))

    def _envelope(self, sigma, z, x):
        """Cached Moreau value and multiplier estimate at (x, sigma, z)."""
        env = self._env
        if not (env.x is x and env.z is z and env.sigma == sigma):
            w = self.a_value(x) + z / sigma
            self.counter.prox += 1
            value, multiplier = nonsmooth.moreau(self.h, 1.0 / sigma, w)
            env = _EnvelopeMemo()
            env.x, env.sigma, env.z = x, sigma, z
            env.moreau, env.multiplier = value, multiplier
            self._env = env
            if self.debug:
                self._debug_checks(sigma, z, x, value, multiplier)
        return env

    def al_value(self, sigma, z, x):
        """Augmented-Lagrangian envelope f(x) + M_{h/sigma}(A(x) + z/sigma)."""
        if not sigma > 0:
            raise ParameterError(f"penalty parameter must be positive, got {sigma}")
        env = self._envelope(sigma, z, x)
        return self.f_value(x) + env.moreau

    def al_euclidean_gradient(self, sigma, z, x):
        """grad of al_value in the ambient space: grad f + adj(A)[multiplier]."""
        if not sigma > 0:
            raise ParameterError(f"penalty parameter must be positive, got {sigma}")
        env = self._envelope(sigma, z, x)
        return self.f_grad(x) + self.a_adjoint(x, env.multiplier)

    def al_riemannian_gradient(self, sigma, z, x):
        return self.manifold.riemannian_gradient(
            x, self.al_euclidean_gradient(sigma, z, x)
        )

    def stationarity_residuals(self, x, y, z):
        """(r_grad, r_feas) of the KKT test; z in dh(y) is the caller's duty.

        r_grad is the manifold norm of the projected gradient of
        f + <z, A(.)>; r_feas is ||A(x) - y||.
        """
        g = self.f_grad(x) + self.a_adjoint(x, z)
        r_grad = self.manifold.norm(x, self.manifold.riemannian_gradient(x, g))
        r_feas = float(np.linalg.norm(self.a_value(x) - y))
        return r_grad, r_feas

    # -- debug-mode proof inequalities -----------------------------------

    def _debug_checks(self, sigma, z, x, moreau_value, multiplier):
        l_h = self.h.lipschitz_bound()
        scale = max(1.0, l_h)
        bnorm = float(np.linalg.norm(multiplier))
        if bnorm > l_h + 1e-10 * scale:
            raise AssertionError(
                f"multiplier estimate norm {bnorm} exceeds the h bound {l_h}"
            )
        if float(np.linalg.norm(z)) <= l_h + 1e-10 * scale:
            phi = self.f_value(x) + self.h.value(self.a_value(x))
            val = self.f_value(x) + moreau_value
            tol = 1e-9 * max(1.0, abs(phi), l_h * l_h / sigma)
            lo = phi - 1.5 * l_h * l_h / sigma - tol
            hi = phi + l_h * l_h / sigma + tol
            if not (lo <= val <= hi):
                raise AssertionError(
                    f"envelope value {val} outside sandwich [{lo}, {hi}]"
                )
