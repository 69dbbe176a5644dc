# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled allocation kernel. Same algorithm as ``_pykernels.py``."""
from libc.math cimport exp, log, fabs, NAN

cdef int EXPONENTIAL = 0
cdef int OK = 0
cdef int INFEASIBLE = 1
cdef int NOT_CONVERGED = 2
cdef double LAM_FLOOR = 1e-300
cdef int NEWTON_STEPS = 30


cdef inline double _demand(int kind, double a, double A, double price, double lam) nogil:
    cdef double x = lam * price / A
    if kind == EXPONENTIAL:
        if x >= a:
            return 0.0
        return log(a / x) / a
    if x >= 2.0 * a:
        return 0.0
    return (1.0 - x / (2.0 * a)) / a


cdef double _excess(const long[:] kinds, const double[:] a, const double[:] A,
                    const double[:] prices, double budget, double lam) nogil:
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(kinds.shape[0]):
        total += prices[i] * _demand(<int>kinds[i], a[i], A[i], prices[i], lam)
    return total - budget


cdef double _slope(const long[:] kinds, const double[:] a, const double[:] A,
                   const double[:] prices, double lam) nogil:
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(kinds.shape[0]):
        if _demand(<int>kinds[i], a[i], A[i], prices[i], lam) > 0.0:
            if kinds[i] == EXPONENTIAL:
                total -= prices[i] / (a[i] * lam)
            else:
                total -= prices[i] * prices[i] / (2.0 * A[i] * a[i] * a[i])
    return total


def bisect_lambda(const long[:] kinds, const double[:] a, const double[:] A,
                  const double[:] prices, double budget, double lam_lo, double lam_hi,
                  double tol, int max_iter, double[:] out):
    """Find the multiplier that spends ``budget`` exactly; fill ``out`` with demands.

    Returns ``(status, lam, lo, hi, iterations)``.
    """
    cdef double lo = lam_lo, hi = lam_hi, g_lo, g_hi, mid, lam, g, dg, nxt
    cdef int it = 0, grow = 0, k
    cdef Py_ssize_t i

    with nogil:
        g_lo = _excess(kinds, a, A, prices, budget, lo)
        while g_lo <= 0.0 and lo > LAM_FLOOR:
            lo *= 1e-12
            g_lo = _excess(kinds, a, A, prices, budget, lo)
    if g_lo <= 0.0:
        return INFEASIBLE, NAN, lo, hi, 0
    with nogil:
        g_hi = _excess(kinds, a, A, prices, budget, hi)
        while g_hi > 0.0 and grow < 200:
            lo = hi
            hi *= 2.0
            g_hi = _excess(kinds, a, A, prices, budget, hi)
            grow += 1
    if g_hi > 0.0:
        return INFEASIBLE, NAN, lo, hi, 0

    with nogil:
        while hi - lo > tol * hi:
            if it >= max_iter:
                break
            mid = exp(0.5 * (log(lo) + log(hi)))
            if mid <= lo or mid >= hi:
                mid = 0.5 * (lo + hi)
            if _excess(kinds, a, A, prices, budget, mid) > 0.0:
                lo = mid
            else:
                hi = mid
            it += 1
    if hi - lo > tol * hi:
        return NOT_CONVERGED, NAN, lo, hi, it

    with nogil:
        lam = 0.5 * (lo + hi)
        for k in range(NEWTON_STEPS):
            g = _excess(kinds, a, A, prices, budget, lam)
            if g == 0.0:
                break
            dg = _slope(kinds, a, A, prices, lam)
            if dg >= 0.0:
                break
            nxt = lam - g / dg
            if nxt < lo or nxt > hi:
                break
            if fabs(nxt - lam) <= 1e-16 * lam:
                lam = nxt
                break
            lam = nxt
        for i in range(kinds.shape[0]):
            out[i] = _demand(<int>kinds[i], a[i], A[i], prices[i], lam)
    return OK, lam, lo, hi, it
