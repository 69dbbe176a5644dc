"""Pure-Python allocation kernel. Mirrors ``_ckernels.pyx`` line for line."""
import math

EXPONENTIAL = 0
QUADRATIC = 1

OK = 0
INFEASIBLE = 1
NOT_CONVERGED = 2

_LAM_FLOOR = 1e-300
_NEWTON_STEPS = 30


def _demand(kind, a, A, price, lam):
    x = lam * price / A
    if kind == EXPONENTIAL:
        if x >= a:
            return 0.0
        return math.log(a / x) / a
    if x >= 2.0 * a:
        return 0.0
    return (1.0 - x / (2.0 * a)) / a


def _excess(kinds, a, A, prices, budget, lam):
    total = 0.0
    for i in range(len(kinds)):
        total += prices[i] * _demand(kinds[i], a[i], A[i], prices[i], lam)
    return total - budget


def _slope(kinds, a, A, prices, lam):
    total = 0.0
    for i in range(len(kinds)):
        if _demand(kinds[i], a[i], A[i], prices[i], lam) > 0.0:
            if kinds[i] == EXPONENTIAL:
                total -= prices[i] / (a[i] * lam)
            else:
                total -= prices[i] * prices[i] / (2.0 * A[i] * a[i] * a[i])
    return total


def bisect_lambda(kinds, a, A, prices, budget, lam_lo, lam_hi, tol, max_iter, out):
    """Find the multiplier that spends ``budget`` exactly; fill ``out`` with demands.

    Returns ``(status, lam, lo, hi, iterations)``.
    """
    kinds = [int(k) for k in kinds]
    a = [float(x) for x in a]
    A = [float(x) for x in A]
    prices = [float(x) for x in prices]
    lo = lam_lo
    hi = lam_hi
    g_lo = _excess(kinds, a, A, prices, budget, lo)
    while g_lo <= 0.0 and lo > _LAM_FLOOR:
        lo *= 1e-12
        g_lo = _excess(kinds, a, A, prices, budget, lo)
    if g_lo <= 0.0:
        return INFEASIBLE, math.nan, lo, hi, 0
    g_hi = _excess(kinds, a, A, prices, budget, hi)
    grow = 0
    while g_hi > 0.0 and grow < 200:
        lo = hi
        hi *= 2.0
        g_hi = _excess(kinds, a, A, prices, budget, hi)
        grow += 1
    if g_hi > 0.0:
        return INFEASIBLE, math.nan, lo, hi, 0

    it = 0
    while hi - lo > tol * hi:
        if it >= max_iter:
            return NOT_CONVERGED, math.nan, lo, hi, it
        mid = math.exp(0.5 * (math.log(lo) + math.log(hi)))
        if mid <= lo or mid >= hi:
            mid = 0.5 * (lo + hi)
        if _excess(kinds, a, A, prices, budget, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        it += 1

    lam = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        g = _excess(kinds, a, A, prices, budget, lam)
        if g == 0.0:
            break
        dg = _slope(kinds, a, A, prices, lam)
        if dg >= 0.0:
            break
        step = g / dg
        nxt = lam - step
        if nxt < lo or nxt > hi:
            break
        if abs(nxt - lam) <= 1e-16 * lam:
            lam = nxt
            break
        lam = nxt

    for i in range(len(kinds)):
        out[i] = _demand(kinds[i], a[i], A[i], prices[i], lam)
    return OK, lam, lo, hi, it
