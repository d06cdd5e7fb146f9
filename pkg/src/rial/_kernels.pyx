# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled weighted-l1 kernels for the solver's inner loop.

One fused pass per call; the pure-numpy fallback in ``_kernels_np`` mirrors
every signature.
"""

import numpy as np

from libc.math cimport fabs


def l1_prox(const double[::1] w, double tau):
    """Soft-threshold with scalar threshold tau >= 0."""
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double wi, m
    for i in range(n):
        wi = w[i]
        m = fabs(wi) - tau
        if m <= 0.0:
            out[i] = 0.0
        else:
            out[i] = m if wi > 0.0 else -m
    return out_arr


def l1_prox_w(const double[::1] w, const double[::1] tau):
    """Soft-threshold with elementwise threshold array."""
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double wi, m
    for i in range(n):
        wi = w[i]
        m = fabs(wi) - tau[i]
        if m <= 0.0:
            out[i] = 0.0
        else:
            out[i] = m if wi > 0.0 else -m
    return out_arr


def l1_value(const double[::1] w, double mu):
    """mu * sum |w|."""
    cdef Py_ssize_t n = w.shape[0]
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += fabs(w[i])
    return mu * acc


def l1_value_w(const double[::1] w, const double[::1] mu):
    """sum mu_i |w_i|."""
    cdef Py_ssize_t n = w.shape[0]
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += mu[i] * fabs(w[i])
    return acc


def l1_moreau(const double[::1] w, double mu, double lam):
    """Moreau envelope of mu*|.|_1 at w: returns (value, gradient).

    Huber form per entry: w^2/(2 lam) inside the threshold band lam*mu,
    mu*|w| - lam*mu^2/2 outside; gradient clip(w/lam, -mu, mu).
    """
    cdef Py_ssize_t n = w.shape[0]
    grad_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double tau = lam * mu
    cdef double half_quad = 0.5 * lam * mu * mu
    cdef double val = 0.0
    cdef Py_ssize_t i
    cdef double wi, aw
    for i in range(n):
        wi = w[i]
        aw = fabs(wi)
        if aw <= tau:
            val += 0.5 * wi * wi / lam
            grad[i] = wi / lam
        else:
            val += mu * aw - half_quad
            grad[i] = mu if wi > 0.0 else -mu
    return val, grad_arr


def l1_moreau_w(const double[::1] w, const double[::1] mu, double lam):
    """Elementwise-weight version of :func:`l1_moreau`."""
    cdef Py_ssize_t n = w.shape[0]
    grad_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double val = 0.0
    cdef Py_ssize_t i
    cdef double wi, aw, mi, tau
    for i in range(n):
        wi = w[i]
        mi = mu[i]
        aw = fabs(wi)
        tau = lam * mi
        if aw <= tau:
            val += 0.5 * wi * wi / lam
            grad[i] = wi / lam
        else:
            val += mi * aw - 0.5 * lam * mi * mi
            grad[i] = mi if wi > 0.0 else -mi
    return val, grad_arr
