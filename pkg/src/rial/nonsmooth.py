"""Convex nonsmooth terms: value, prox, Moreau envelope, Lipschitz bound.

A term is any object with ``value(w)``, ``prox(lam, w)`` and
``lipschitz_bound()``. The built-ins are the weighted elementwise l1 norm and
the zero term; user-supplied terms must be convex and Lipschitz (contract
obligations, spot-checked by the property tests).
"""

import numpy as np

from . import kernels
from .errors import ParameterError, UnsupportedError


def _check_lam(lam):
    if not lam > 0:
        raise ParameterError(f"prox parameter must be positive, got {lam}")


class L1Norm:
    """h(w) = sum_ij weight_ij |w_ij| with scalar or elementwise weight.

    prox is the soft threshold; the Moreau envelope and its gradient come from
    a fused kernel (value and gradient in one pass).
    """

    kind = "l1"

    def __init__(self, weight, shape=None):
        if np.ndim(weight) == 0:
            if weight < 0:
                raise ParameterError(f"l1 weight must be >= 0, got {weight}")
            self.weight = float(weight)
        else:
            self.weight = np.asarray(weight, dtype=np.float64)
            if (self.weight < 0).any():
                raise ParameterError("l1 weight entries must be >= 0")
            if shape is None:
                shape = self.weight.shape
        self.shape = shape

    def value(self, w):
        return kernels.l1_value(w, self.weight)

    def prox(self, lam, w):
        return kernels.soft_threshold(w, lam * self.weight)

    def moreau(self, lam, w):
        return kernels.l1_envelope(w, self.weight, lam)

    def lipschitz_bound(self):
        if np.ndim(self.weight) > 0:
            return float(np.linalg.norm(self.weight))
        if self.shape is None:
            raise UnsupportedError(
                "scalar-weight L1Norm needs an argument shape for its Lipschitz bound"
            )
        return self.weight * float(np.sqrt(np.prod(self.shape)))


class ZeroTerm:
    """h identically zero: prox is the identity, envelope and bound vanish."""

    kind = "zero"

    def __init__(self, shape=None):
        self.shape = shape

    def value(self, w):
        return 0.0

    def prox(self, lam, w):
        return np.array(w, dtype=np.float64, copy=True)

    def moreau(self, lam, w):
        return 0.0, np.zeros_like(np.asarray(w, dtype=np.float64))

    def lipschitz_bound(self):
        return 0.0


def prox(h, lam, w):
    """Unique minimizer of h(u) + ||u - w||^2 / (2 lam)."""
    _check_lam(lam)
    return h.prox(lam, w)


def moreau(h, lam, w):
    """Moreau envelope value and gradient at w, as a (value, grad) pair.

    Terms exposing a fused ``moreau`` get it called directly; otherwise the
    pair is assembled from prox: value = h(p) + ||p - w||^2/(2 lam) and
    grad = (w - p)/lam with p = prox(h, lam, w).
    """
    _check_lam(lam)
    fused = getattr(h, "moreau", None)
    if fused is not None:
        return fused(lam, w)
    w = np.asarray(w, dtype=np.float64)
    p = h.prox(lam, w)
    d = w - p
    return h.value(p) + float(np.vdot(d, d)) / (2.0 * lam), d / lam


def moreau_value(h, lam, w):
    """min_u h(u) + ||u - w||^2 / (2 lam)."""
    return moreau(h, lam, w)[0]


def moreau_gradient(h, lam, w):
    """(w - prox(h, lam, w)) / lam; its norm never exceeds lipschitz_bound(h)."""
    return moreau(h, lam, w)[1]


def lipschitz_bound(h):
    """A valid Lipschitz constant of h in the Frobenius norm."""
    return h.lipschitz_bound()
