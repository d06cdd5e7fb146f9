"""Pure-numpy implementations of the weighted-l1 inner-loop kernels.

Same call signatures as the compiled module ``rial._kernels``; all inputs are
flat C-contiguous float64 arrays.
"""

import numpy as np


def l1_prox(w, tau):
    """Soft-threshold with scalar threshold tau >= 0."""
    return np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)


def l1_prox_w(w, tau):
    """Soft-threshold with elementwise threshold array."""
    return np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)


def l1_value(w, mu):
    """mu * sum |w|."""
    return mu * float(np.abs(w).sum())


def l1_value_w(w, mu):
    """sum mu_i |w_i|."""
    return float((mu * np.abs(w)).sum())


def l1_moreau(w, mu, lam):
    """Moreau envelope of mu*|.|_1 at w with parameter lam.

    Returns (value, gradient). Per entry the envelope is the Huber function
    w^2/(2 lam) for |w| <= lam*mu and mu*|w| - lam*mu^2/2 beyond; the
    gradient is clip(w/lam, -mu, mu).
    """
    aw = np.abs(w)
    tau = lam * mu
    small = aw <= tau
    value = float(
        np.where(small, 0.5 * w * w / lam, mu * aw - 0.5 * lam * mu * mu).sum()
    )
    grad = np.clip(w / lam, -mu, mu)
    return value, grad


def l1_moreau_w(w, mu, lam):
    """Elementwise-weight version of :func:`l1_moreau`."""
    aw = np.abs(w)
    tau = lam * mu
    small = aw <= tau
    value = float(
        np.where(small, 0.5 * w * w / lam, mu * aw - 0.5 * lam * mu * mu).sum()
    )
    grad = np.clip(w / lam, -mu, mu)
    return value, grad
