"""Budget-constrained allocation across periods and the elasticity matrix.

The customer maximizes ``sum_I A_I U_I(D_I) - sum_I pi_I D_I`` subject to
``sum_I pi_I D_I = B``. First-order conditions give
``A_I U_I'(D_I) = lam * pi_I`` on every period with positive demand; a
period whose marginal value at zero demand is below ``lam * pi_I`` sits at
``D_I = 0``.

Elasticities come from differentiating that system at the initial point.
With ``s_I = 1 / (A_I U_I''(D_I))`` and ``Q = sum_J pi_J**2 s_J``::

    dlam/dpi_K = -(D_K + lam pi_K s_K) / Q
    dD_I/dpi_K = s_I (lam [I == K] + pi_I dlam/dpi_K)
    dD_I/dB    = s_I pi_I / Q

which reduce to the familiar exponential closed forms, e.g.
``E_IB = B / (a_I D_I sum_J pi_J / a_J)``. Demand is homogeneous of degree
zero in (prices, budget), so every row satisfies ``sum_K E_IK = -E_IB``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import CornerSolutionError, ConvergenceError, InfeasibleBudgetError, InputError, NumericalError
from .single_period import CLASS_BAND, OwnPriceClass, SinglePeriodModel, classify_own_price
from .utility import Family, eval_utility, marginal_utility, second_derivative

#: lower end of the initial multiplier bracket
LAMBDA_FLOOR = 1e-12
#: relative tolerance on the multiplier
LAMBDA_TOL = 1e-12
MAX_ITER = 200
#: tolerance for the price/income identity residuals
IDENTITY_RESIDUAL_TOL = 1e-9


class CrossPriceClass(str, enum.Enum):
    SUBSTITUTE = "substitute"
    INDEPENDENT = "independent"
    COMPLEMENTARY = "complementary"


class IncomeClass(str, enum.Enum):
    INFERIOR = "inferior"
    NORMAL = "normal"
    LUXURY = "luxury"


def classify_cross(e: float, band: float = CLASS_BAND) -> CrossPriceClass:
    if e > band:
        return CrossPriceClass.SUBSTITUTE
    if e < -band:
        return CrossPriceClass.COMPLEMENTARY
    return CrossPriceClass.INDEPENDENT


def classify_income(e: float, band: float = CLASS_BAND) -> IncomeClass:
    if e < -band:
        return IncomeClass.INFERIOR
    if e > 1.0 + band:
        return IncomeClass.LUXURY
    return IncomeClass.NORMAL


@dataclass(frozen=True)
class MultiPeriodProfile:
    """Per-period calibrated models sharing one budget.

    ``budget=None`` means the initial spend ``sum pi0_J d0_J``, the only
    budget at which the anchor point is itself the optimum.
    """

    periods: tuple
    budget: Optional[float] = None
    labels: Optional[tuple] = None

    def __post_init__(self):
        periods = tuple(self.periods)
        if len(periods) < 2:
            raise InputError(f"a multi-period profile needs at least 2 periods, got {len(periods)}")
        for i, p in enumerate(periods):
            if not isinstance(p, SinglePeriodModel):
                raise InputError(f"period {i} is not a SinglePeriodModel")
        object.__setattr__(self, "periods", periods)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"p{i}" for i in range(len(periods))))
        else:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(periods):
                raise InputError(f"{len(labels)} labels for {len(periods)} periods")
            object.__setattr__(self, "labels", labels)
        if self.budget is not None:
            budget = float(self.budget)
            if not (budget > 0 and math.isfinite(budget)):
                raise InputError(f"budget must be finite and > 0, got {self.budget!r}")
            ceiling = satiation_spend(self, self.initial_prices)
            if budget >= ceiling:
                raise InfeasibleBudgetError(
                    f"budget {budget:.6g} is not below the satiation spend {ceiling:.6g}"
                )
            object.__setattr__(self, "budget", budget)

    @classmethod
    def build(cls, kinds, a, d0, pi0, budget=None, labels=None) -> "MultiPeriodProfile":
        n = len(a)
        if isinstance(kinds, (str, Family)):
            kinds = [kinds] * n
        periods = [SinglePeriodModel.build(k, ai, di, pi) for k, ai, di, pi in zip(kinds, a, d0, pi0)]
        return cls(tuple(periods), budget, labels)

    def __len__(self):
        return len(self.periods)

    @property
    def kinds(self) -> tuple:
        return tuple(p.model.kind for p in self.periods)

    @property
    def kind_codes(self) -> np.ndarray:
        return np.array(
            [kernels.EXPONENTIAL if k is Family.EXPONENTIAL else kernels.QUADRATIC for k in self.kinds],
            dtype=np.int_,
        )

    @property
    def a(self) -> np.ndarray:
        return np.array([p.model.a for p in self.periods])

    @property
    def A(self) -> np.ndarray:
        return np.array([p.cal.A for p in self.periods])

    @property
    def d0(self) -> np.ndarray:
        return np.array([p.cal.d0 for p in self.periods])

    @property
    def initial_prices(self) -> np.ndarray:
        return np.array([p.cal.pi0 for p in self.periods])

    @property
    def default_budget(self) -> float:
        return float(math.fsum(p.cal.pi0 * p.cal.d0 for p in self.periods))

    @property
    def budget_value(self) -> float:
        return self.default_budget if self.budget is None else self.budget

    def with_budget(self, budget) -> "MultiPeriodProfile":
        return MultiPeriodProfile(self.periods, budget, self.labels)


@dataclass(frozen=True)
class Allocation:
    demands: np.ndarray
    lam: float
    binding: bool = True
    iterations: int = 0
    method: str = "numeric"

    def spend(self, prices) -> float:
        return float(math.fsum(np.asarray(prices, dtype=float) * self.demands))


def satiation_spend(profile: MultiPeriodProfile, prices) -> float:
    """Largest spend the profile can absorb (``inf`` if any period is exponential)."""
    prices = np.asarray(prices, dtype=float)
    if any(k is Family.EXPONENTIAL for k in profile.kinds):
        return math.inf
    return float(math.fsum(prices / profile.a))


def _resolve(profile: MultiPeriodProfile, prices, budget):
    if prices is None:
        prices = profile.initial_prices
    prices = np.asarray(prices, dtype=float)
    if prices.shape != (len(profile),):
        raise InputError(f"expected {len(profile)} prices, got shape {prices.shape}")
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
        raise InputError(f"prices must be finite and > 0, got {prices.tolist()}")
    budget = profile.budget_value if budget is None else float(budget)
    if not (budget > 0 and math.isfinite(budget)):
        raise InfeasibleBudgetError(f"budget must be finite and > 0, got {budget!r}")
    ceiling = satiation_spend(profile, prices)
    if budget >= ceiling:
        raise InfeasibleBudgetError(f"budget {budget:.6g} is not below the satiation spend {ceiling:.6g}")
    return prices, budget


def solve_allocation_numeric(
    profile: MultiPeriodProfile,
    prices=None,
    budget: Optional[float] = None,
    tol: float = LAMBDA_TOL,
    max_iter: int = MAX_ITER,
) -> Allocation:
    """Allocation by bisection on the multiplier; handles corner solutions."""
    prices, budget = _resolve(profile, prices, budget)
    a, A = profile.a, profile.A
    kinds = profile.kind_codes
    top = np.where(kinds == kernels.EXPONENTIAL, a, 2.0 * a)  # U'(0)
    lam_hi = float(np.max(A * top / prices))
    status, lam, lo, hi, it, demands = kernels.bisect_lambda(
        kinds, a, A, prices, budget, LAMBDA_FLOOR, lam_hi, tol, max_iter
    )
    if status == kernels.INFEASIBLE:
        raise InfeasibleBudgetError(f"no multiplier in [{lo:.3g}, {hi:.3g}] spends budget {budget:.6g}")
    if status == kernels.NOT_CONVERGED:
        raise ConvergenceError(
            f"bisection stopped after {it} iterations with bracket [{lo!r}, {hi!r}]",
            bracket=(lo, hi),
            iterations=it,
        )
    return Allocation(demands, float(lam), True, it, "numeric")


def solve_allocation_closed(profile: MultiPeriodProfile, prices=None, budget: Optional[float] = None) -> Allocation:
    """Interior allocation from the explicit formulas (single-family profiles only).

    Raises :class:`CornerSolutionError` when the result leaves the interior;
    the numeric solver handles those cases.
    """
    prices, budget = _resolve(profile, prices, budget)
    kinds = set(profile.kinds)
    if len(kinds) != 1:
        raise InputError("closed-form allocation needs a single utility family; use the numeric solver")
    a, A = profile.a, profile.A
    if Family.EXPONENTIAL in kinds:
        # D_I = (B - sum_J pi_J c_IJ) / sum_J pi_J a_I / a_J,
        # c_IJ = ln(pi_I A_J a_J / (pi_J A_I a_I)) / a_J
        value = A * a / prices
        demands = np.empty(len(a))
        for i in range(len(a)):
            c = np.log(value / value[i]) / a
            demands[i] = (budget - math.fsum(prices * c)) / math.fsum(prices * a[i] / a)
        inv = prices / a
        log_lam = (math.fsum(inv * np.log(value)) - budget) / math.fsum(inv)
        lam = math.exp(log_lam)
        bad = demands <= 0
    else:
        lam = (math.fsum(prices / a) - budget) / math.fsum(prices**2 / (2.0 * A * a**2))
        demands = (1.0 - lam * prices / (2.0 * A * a)) / a
        bad = (demands <= 0) | (demands > 1.0 / a)
    if np.any(bad):
        raise CornerSolutionError(
            f"closed form leaves the interior in period(s) {np.flatnonzero(bad).tolist()}; use the numeric solver",
            demands=demands,
        )
    return Allocation(demands, float(lam), True, 0, "closed")


def _initial_point(profile: MultiPeriodProfile):
    """Demands and multiplier at initial prices and the profile budget."""
    if profile.budget is None:
        return profile.d0, 1.0
    alloc = solve_allocation_numeric(profile)
    return alloc.demands, alloc.lam


def _sensitivities(profile: MultiPeriodProfile):
    prices = profile.initial_prices
    demands, lam = _initial_point(profile)
    if np.any(demands <= 0):
        raise CornerSolutionError(
            "elasticities are only defined at an interior point; some period has zero demand", demands=demands
        )
    A = profile.A
    s = np.array([1.0 / (A[i] * second_derivative(p.model, demands[i])) for i, p in enumerate(profile.periods)])
    Q = math.fsum(prices**2 * s)
    dlam_dpi = -(demands + lam * prices * s) / Q
    return prices, demands, lam, s, Q, dlam_dpi


def price_elasticity_matrix(profile: MultiPeriodProfile) -> np.ndarray:
    """``E[I, K] = (pi_K / D_I) dD_I/dpi_K`` at the initial point."""
    prices, demands, lam, s, Q, dlam_dpi = _sensitivities(profile)
    jac = (s * prices)[:, None] * dlam_dpi[None, :] + np.diag(s * lam)
    return jac * prices[None, :] / demands[:, None]


def own_price_elasticity_mp(profile: MultiPeriodProfile, i: int) -> float:
    _check_index(profile, i)
    return float(price_elasticity_matrix(profile)[i, i])


def cross_price_elasticity_mp(profile: MultiPeriodProfile, i: int, k: int) -> float:
    _check_index(profile, i)
    _check_index(profile, k)
    if i == k:
        raise InputError("cross-price elasticity needs distinct periods; use own_price_elasticity_mp")
    return float(price_elasticity_matrix(profile)[i, k])


def income_elasticities(profile: MultiPeriodProfile) -> np.ndarray:
    prices, demands, lam, s, Q, _ = _sensitivities(profile)
    return profile.budget_value * s * prices / (Q * demands)


def income_elasticity(profile: MultiPeriodProfile, i: int) -> float:
    _check_index(profile, i)
    return float(income_elasticities(profile)[i])


def _check_index(profile, i):
    if not (0 <= i < len(profile)):
        raise InputError(f"period index {i} out of range for {len(profile)} periods")


@dataclass
class ElasticityReport:
    labels: list
    own_cross: np.ndarray
    income: np.ndarray
    residuals: np.ndarray
    own_classes: list = field(default_factory=list)
    cross_classes: list = field(default_factory=list)
    income_classes: list = field(default_factory=list)
    name: str = ""

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))

    def to_dict(self) -> dict:
        return {
            "kind": "elasticity",
            "name": self.name,
            "labels": list(self.labels),
            "own_cross": [[float(x) for x in row] for row in self.own_cross],
            "income": [float(x) for x in self.income],
            "residuals": [float(x) for x in self.residuals],
            "own_classes": [c.value for c in self.own_classes],
            "cross_classes": [[c.value if c is not None else None for c in row] for row in self.cross_classes],
            "income_classes": [c.value for c in self.income_classes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ElasticityReport":
        return cls(
            labels=list(d["labels"]),
            own_cross=np.array(d["own_cross"], dtype=float),
            income=np.array(d["income"], dtype=float),
            residuals=np.array(d["residuals"], dtype=float),
            own_classes=[OwnPriceClass(c) for c in d["own_classes"]],
            cross_classes=[[CrossPriceClass(c) if c is not None else None for c in row] for row in d["cross_classes"]],
            income_classes=[IncomeClass(c) for c in d["income_classes"]],
            name=d.get("name", ""),
        )

    def __eq__(self, other):
        if not isinstance(other, ElasticityReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def elasticity_report(profile: MultiPeriodProfile, name: str = "") -> ElasticityReport:
    E = price_elasticity_matrix(profile)
    EB = income_elasticities(profile)
    residuals = np.array([math.fsum(row) for row in E]) + EB
    if np.max(np.abs(residuals)) > IDENTITY_RESIDUAL_TOL * max(1.0, float(np.max(np.abs(EB)))):
        raise NumericalError(f"price/income identity violated: residuals {residuals.tolist()}")
    T = len(profile)
    cross = [[None if i == k else classify_cross(E[i, k]) for k in range(T)] for i in range(T)]
    return ElasticityReport(
        labels=list(profile.labels),
        own_cross=E,
        income=EB,
        residuals=residuals,
        own_classes=[classify_own_price(E[i, i]) for i in range(T)],
        cross_classes=cross,
        income_classes=[classify_income(e) for e in EB],
        name=name,
    )


def welfare_total(profile: MultiPeriodProfile, demands, prices=None) -> float:
    prices = profile.initial_prices if prices is None else np.asarray(prices, dtype=float)
    return utility_total(profile, demands) - float(math.fsum(prices * np.asarray(demands)))


def utility_total(profile: MultiPeriodProfile, demands) -> float:
    return float(math.fsum(p.cal.A * eval_utility(p.model, d) for p, d in zip(profile.periods, demands)))


def kkt_residuals(profile: MultiPeriodProfile, alloc: Allocation, prices=None) -> np.ndarray:
    """Stationarity residual ``A U'(D) / (lam pi) - 1`` for active periods, slack for the rest.

    A period at zero demand must satisfy ``A U'(0) <= lam pi``; its entry is
    ``max(0, A U'(0) / (lam pi) - 1)``.
    """
    prices = profile.initial_prices if prices is None else np.asarray(prices, dtype=float)
    out = np.empty(len(profile))
    for i, p in enumerate(profile.periods):
        ratio = p.cal.A * marginal_utility(p.model, alloc.demands[i]) / (alloc.lam * prices[i])
        out[i] = ratio - 1.0 if alloc.demands[i] > 0 else max(0.0, ratio - 1.0)
    return out
