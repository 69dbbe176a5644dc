"""Backend selection for the allocation kernel.

The compiled extension is used when it was built; otherwise the pure-Python
kernel is used. :func:`use_backend` switches explicitly (tests, benchmarks).
"""
import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

OK = _pykernels.OK
INFEASIBLE = _pykernels.INFEASIBLE
NOT_CONVERGED = _pykernels.NOT_CONVERGED
EXPONENTIAL = _pykernels.EXPONENTIAL
QUADRATIC = _pykernels.QUADRATIC

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

BACKEND = "cython" if _ckernels is not None else "python"
_active = _BACKENDS[BACKEND]


def available_backends():
    return sorted(_BACKENDS)


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previously active name."""
    global BACKEND, _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    previous = BACKEND
    BACKEND = name
    _active = _BACKENDS[name]
    return previous


def bisect_lambda(kinds, a, A, prices, budget, lam_lo, lam_hi, tol, max_iter):
    """Run the active kernel; returns ``(status, lam, lo, hi, iterations, demands)``."""
    kinds = np.ascontiguousarray(kinds, dtype=np.int_)
    a = np.ascontiguousarray(a, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    prices = np.ascontiguousarray(prices, dtype=np.float64)
    out = np.zeros(len(kinds), dtype=np.float64)
    status, lam, lo, hi, it = _active.bisect_lambda(
        kinds, a, A, prices, float(budget), float(lam_lo), float(lam_hi), float(tol), int(max_iter), out
    )
    return status, lam, lo, hi, it, out
