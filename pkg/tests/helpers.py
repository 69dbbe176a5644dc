"""Random instance generators and finite-difference oracles shared by the tests."""
import numpy as np

from riskdemand.multi_period import MultiPeriodProfile, solve_allocation_numeric

FAMILIES = ("exponential", "quadratic")


def random_profile(rng, family=None, T=None, a_range=(0.2, 2.5), budget_factor=None):
    """Random calibrated profile; quadratic periods get ``a * d0`` in (0.1, 0.9)."""
    T = T or int(rng.integers(2, 5))
    family = family or FAMILIES[int(rng.integers(0, 2))]
    a = rng.uniform(*a_range, size=T)
    if family == "exponential":
        d0 = rng.uniform(0.3, 3.0, size=T)
    else:
        d0 = rng.uniform(0.1, 0.9, size=T) / a
    pi0 = rng.uniform(100.0, 1500.0, size=T)
    profile = MultiPeriodProfile.build(family, a, d0, pi0)
    if budget_factor is not None:
        profile = profile.with_budget(profile.default_budget * budget_factor)
    return profile


def fd_elasticities(profile, rel_step=1e-6):
    """Central finite differences of the numeric solver: (price matrix, income vector)."""
    pi0 = profile.initial_prices
    B = profile.budget_value
    base = solve_allocation_numeric(profile).demands
    T = len(profile)
    E = np.empty((T, T))
    for k in range(T):
        h = rel_step * pi0[k]
        up = pi0.copy()
        dn = pi0.copy()
        up[k] += h
        dn[k] -= h
        dD = solve_allocation_numeric(profile, up).demands - solve_allocation_numeric(profile, dn).demands
        E[:, k] = pi0[k] * dD / (2 * h) / base
    h = rel_step * B
    dD = (solve_allocation_numeric(profile, budget=B + h).demands
          - solve_allocation_numeric(profile, budget=B - h).demands)
    EB = B * dD / (2 * h) / base
    return E, EB


def rel_err(x, ref, floor=0.0):
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return np.max(np.abs(x - ref) / np.maximum(np.abs(ref), floor))
