"""Backend selection and array-shape plumbing for the l1 hot kernels.

At import time the compiled extension ``rial._kernels`` is preferred; when it
is missing (no compiler at install time) the pure-numpy twin is used instead.
Set ``RIAL_KERNELS=numpy`` to force the fallback or ``RIAL_KERNELS=compiled``
to insist on the extension.
"""

import os

import numpy as np

from . import _kernels_np
from .errors import UnsupportedError

_requested = os.environ.get("RIAL_KERNELS", "").strip().lower()

if _requested in ("numpy", "python"):
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested in ("compiled", "cython"):
            raise UnsupportedError(
                "RIAL_KERNELS=compiled but the rial._kernels extension is not built"
            ) from None
        _impl = _kernels_np
        BACKEND = "numpy"


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'numpy'."""
    return BACKEND


def _flat(a):
    return np.ascontiguousarray(a, dtype=np.float64).ravel()


def soft_threshold(w, tau):
    """Elementwise sign(w) * max(|w| - tau, 0); tau scalar or array like w."""
    w = np.asarray(w, dtype=np.float64)
    if np.ndim(tau) == 0:
        out = _impl.l1_prox(_flat(w), float(tau))
    else:
        tau = np.asarray(tau, dtype=np.float64)
        if tau.shape != w.shape:
            tau = np.broadcast_to(tau, w.shape)
        out = _impl.l1_prox_w(_flat(w), _flat(tau))
    return out.reshape(w.shape)


def l1_value(w, weight):
    """Weighted l1 norm sum_ij weight_ij |w_ij|; weight scalar or array."""
    w = np.asarray(w, dtype=np.float64)
    if np.ndim(weight) == 0:
        return _impl.l1_value(_flat(w), float(weight))
    weight = np.broadcast_to(np.asarray(weight, dtype=np.float64), w.shape)
    return _impl.l1_value_w(_flat(w), _flat(weight))


def l1_envelope(w, weight, lam):
    """Moreau envelope of the weighted l1 norm: returns (value, gradient).

    The gradient equals (w - soft_threshold(w, lam*weight)) / lam and is
    computed in the same pass as the value.
    """
    w = np.asarray(w, dtype=np.float64)
    if np.ndim(weight) == 0:
        value, grad = _impl.l1_moreau(_flat(w), float(weight), float(lam))
    else:
        weight = np.broadcast_to(np.asarray(weight, dtype=np.float64), w.shape)
        value, grad = _impl.l1_moreau_w(_flat(w), _flat(weight), float(lam))
    return value, grad.reshape(w.shape)
