"""Sector portfolios on a daily load curve under a time-of-use tariff.

Sector coefficients are given per unit (``d0 = 1``). A sector's physical
baseline demand in a period is ``share * sum(curve over the period's hours)``
and its coefficient is rescaled to ``a_pu / D0``, which keeps ``a * d0``
and therefore every elasticity unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .multi_period import MultiPeriodProfile, solve_allocation_numeric
from .single_period import SinglePeriodModel
from .utility import Family, PeriodCalibration, UtilityModel, calibrate, eval_utility

HOURS = 24
SHARE_TOL = 1e-9
#: deltas below this fraction of the baseline value are below solver resolution
DELTA_SNAP = 1e-9


@dataclass(frozen=True)
class TariffPeriod:
    label: str
    start: int
    end: int
    price: float

    @property
    def hours(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class Tariff:
    periods: tuple

    def __post_init__(self):
        periods = tuple(self.periods)
        if not periods:
            raise InputError("tariff has no periods")
        seen = {}
        labels = set()
        for p in periods:
            if p.label in labels:
                raise InputError(f"duplicate tariff period label {p.label!r}")
            labels.add(p.label)
            if not (0 <= p.start < p.end <= HOURS):
                raise InputError(f"tariff period {p.label!r}: hours must satisfy 0 <= start < end <= 24")
            if not (p.price > 0 and math.isfinite(p.price)):
                raise InputError(f"tariff period {p.label!r}: price must be > 0")
            for h in p.hours:
                if h in seen:
                    raise InputError(f"tariff periods {seen[h]!r} and {p.label!r} overlap at hour {h}")
                seen[h] = p.label
        object.__setattr__(self, "periods", periods)

    @property
    def labels(self) -> tuple:
        return tuple(p.label for p in self.periods)

    @property
    def prices(self) -> np.ndarray:
        return np.array([p.price for p in self.periods])

    @property
    def covered_hours(self) -> set:
        return {h for p in self.periods for h in p.hours}

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown period {label!r} (tariff has {', '.join(self.labels)})") from None


@dataclass(frozen=True)
class LoadCurve:
    """Hourly demand for one day, MW."""

    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != HOURS:
            raise InputError(f"load curve needs exactly {HOURS} hourly values, got {len(values)}")
        for h, v in enumerate(values):
            if not (v >= 0 and math.isfinite(v)):
                raise InputError(f"load curve hour {h}: demand must be finite and >= 0, got {v!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, mw: float) -> "LoadCurve":
        return cls((mw,) * HOURS)

    def scaled(self, k: float) -> "LoadCurve":
        return LoadCurve(tuple(v * k for v in self.values))

    def energy(self, hours) -> float:
        return math.fsum(self.values[h] for h in hours)


@dataclass(frozen=True)
class SectorProfile:
    """A customer sector: demand share and per-unit risk-aversion coefficients per period.

    ``budget`` is an explicit per-unit budget (currency at ``d0 = 1``);
    ``None`` means the initial spend ``sum pi0``. On a physical baseline it
    scales the sector's initial spend by ``budget / sum pi0``.
    """

    name: str
    share: float
    coefficients: tuple
    family: Family = Family.EXPONENTIAL
    budget: Optional[float] = None

    def budget_ratio(self, tariff: "Tariff") -> float:
        if self.budget is None:
            return 1.0
        return self.budget / math.fsum(tariff.prices)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "family", Family.parse(self.family))
        if not (0.0 <= self.share <= 1.0):
            raise InputError(f"sector {self.name!r}: share must be in [0, 1], got {self.share!r}")


@dataclass(frozen=True)
class Scenario:
    price: tuple
    income: float = 1.0

    def __post_init__(self):
        price = tuple(float(m) for m in self.price)
        object.__setattr__(self, "price", price)
        object.__setattr__(self, "income", float(self.income))
        for m in price + (self.income,):
            if not (m > 0 and math.isfinite(m)):
                raise InputError(f"scenario multipliers must be finite and > 0, got {m!r}")

    @classmethod
    def uniform(cls, n: int, price: float = 1.0, income: float = 1.0) -> "Scenario":
        return cls((price,) * n, income)

    @classmethod
    def identity(cls, n: int) -> "Scenario":
        return cls.uniform(n)


@dataclass(frozen=True)
class SectorBaseline:
    sector: SectorProfile
    profile: MultiPeriodProfile


@dataclass(frozen=True)
class BaselineState:
    tariff: Tariff
    curve: LoadCurve
    sectors: tuple

    @property
    def labels(self) -> tuple:
        return self.tariff.labels

    def sector(self, name: str) -> SectorBaseline:
        for s in self.sectors:
            if s.sector.name == name:
                return s
        raise InputError(f"unknown sector {name!r}")


def check_shares(portfolio: Sequence[SectorProfile], tol: float = SHARE_TOL) -> None:
    total = math.fsum(s.share for s in portfolio)
    if abs(total - 1.0) > tol:
        raise InputError(f"sector shares must sum to 1, got {total!r}")


def build_baseline(
    portfolio: Sequence[SectorProfile],
    curve: LoadCurve,
    tariff: Tariff,
    ignore_uncovered: bool = False,
) -> BaselineState:
    """Calibrate every sector at its physical baseline demand.

    Hours with load that no tariff period covers are an error unless
    ``ignore_uncovered`` is set, in which case that load is left out.
    """
    if not portfolio:
        raise InputError("portfolio has no sectors")
    check_shares(portfolio)
    uncovered = [h for h in range(HOURS) if h not in tariff.covered_hours and curve.values[h] > 0]
    if uncovered and not ignore_uncovered:
        raise InputError(f"hours {uncovered} carry load but no tariff period covers them")
    energy = np.array([curve.energy(p.hours) for p in tariff.periods])
    sectors = []
    for s in portfolio:
        if len(s.coefficients) != len(tariff.periods):
            raise InputError(
                f"sector {s.name!r} has {len(s.coefficients)} coefficients for {len(tariff.periods)} tariff periods"
            )
        periods = []
        for j, p in enumerate(tariff.periods):
            d0 = s.share * energy[j]
            if not d0 > 0:
                raise InputError(f"sector {s.name!r} has zero baseline demand in period {p.label!r}")
            model = UtilityModel(s.family, s.coefficients[j] / d0)
            try:
                cal = PeriodCalibration(d0, p.price, calibrate(model.checked(), d0, p.price))
            except InputError as exc:
                raise type(exc)(f"sector {s.name!r}, period {p.label!r}: {exc}") from None
            periods.append(SinglePeriodModel(model, cal))
        budget = None
        if s.budget is not None:
            budget = s.budget_ratio(tariff) * math.fsum(p.cal.pi0 * p.cal.d0 for p in periods)
        sectors.append(SectorBaseline(s, MultiPeriodProfile(tuple(periods), budget, tariff.labels)))
    return BaselineState(tariff, curve, tuple(sectors))


@dataclass
class SectorResult:
    name: str
    demand: np.ndarray
    utility: np.ndarray
    spend: np.ndarray
    budget: float
    error: Optional[str] = None

    @property
    def welfare(self) -> np.ndarray:
        return self.utility - self.spend

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ScenarioReport:
    """Daily totals per sector and period, in the curve's energy unit and tariff currency."""

    labels: list
    scenario: Scenario
    sectors: list
    baseline: Optional["ScenarioReport"] = None

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.sectors)

    @property
    def errors(self) -> list:
        return [(s.name, s.error) for s in self.sectors if not s.ok]

    def _total(self, attr) -> float:
        return math.fsum(float(x) for s in self.sectors if s.ok for x in getattr(s, attr))

    @property
    def demand(self) -> float:
        return self._total("demand")

    @property
    def utility(self) -> float:
        return self._total("utility")

    @property
    def spend(self) -> float:
        return self._total("spend")

    @property
    def budget(self) -> float:
        """Budget spent; equal to the available budget since the constraint binds."""
        return self.spend

    @property
    def welfare(self) -> float:
        return self.utility - self.spend

    def period_totals(self, attr: str) -> np.ndarray:
        rows = [getattr(s, attr) for s in self.sectors if s.ok]
        if not rows:
            return np.zeros(len(self.labels))
        return np.array([math.fsum(col) for col in zip(*rows)])

    def totals(self) -> dict:
        return {"demand": self.demand, "utility": self.utility, "budget": self.spend, "welfare": self.welfare}

    def to_dict(self) -> dict:
        return {
            "kind": "scenario",
            "labels": list(self.labels),
            "scenario": {"price": list(self.scenario.price), "income": self.scenario.income},
            "sectors": [
                {
                    "name": s.name,
                    "demand": [float(x) for x in s.demand],
                    "utility": [float(x) for x in s.utility],
                    "spend": [float(x) for x in s.spend],
                    "budget": float(s.budget),
                    "error": s.error,
                }
                for s in self.sectors
            ],
            "totals": self.totals(),
            "baseline": None if self.baseline is None else self.baseline.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioReport":
        return cls(
            labels=list(d["labels"]),
            scenario=Scenario(tuple(d["scenario"]["price"]), d["scenario"]["income"]),
            sectors=[
                SectorResult(
                    s["name"],
                    np.array(s["demand"], dtype=float),
                    np.array(s["utility"], dtype=float),
                    np.array(s["spend"], dtype=float),
                    float(s["budget"]),
                    s.get("error"),
                )
                for s in d["sectors"]
            ],
            baseline=None if d.get("baseline") is None else cls.from_dict(d["baseline"]),
        )

    def __eq__(self, other):
        if not isinstance(other, ScenarioReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _solve_sector(sb: SectorBaseline, scenario: Scenario) -> SectorResult:
    profile = sb.profile
    prices = profile.initial_prices * np.asarray(scenario.price)
    budget = profile.budget_value * scenario.income
    T = len(profile)
    try:
        alloc = solve_allocation_numeric(profile, prices, budget)
    except NumericalError as exc:
        nan = np.full(T, math.nan)
        return SectorResult(sb.sector.name, nan, nan.copy(), nan.copy(), budget, f"{type(exc).__name__}: {exc}")
    demand = alloc.demands
    utility = np.array([p.cal.A * eval_utility(p.model, d) for p, d in zip(profile.periods, demand)])
    return SectorResult(sb.sector.name, demand, utility, prices * demand, budget)


def apply_scenario(baseline: BaselineState, scenario: Scenario, compare: bool = False) -> ScenarioReport:
    """Re-solve every sector under shocked prices and budgets.

    Sector failures (e.g. an infeasible budget) are recorded on the report
    rather than raised. With ``compare=True`` the identity scenario is
    attached as ``report.baseline``.
    """
    T = len(baseline.labels)
    if len(scenario.price) != T:
        raise InputError(f"scenario has {len(scenario.price)} price multipliers for {T} periods")
    sectors = [_solve_sector(sb, scenario) for sb in baseline.sectors]
    report = ScenarioReport(list(baseline.labels), scenario, sectors)
    if compare:
        report.baseline = baseline_report(baseline)
    return report


def baseline_report(baseline: BaselineState) -> ScenarioReport:
    return apply_scenario(baseline, Scenario.identity(len(baseline.labels)))


def per_period_shock(baseline: BaselineState, period, multiplier: float, compare: bool = False) -> ScenarioReport:
    T = len(baseline.labels)
    index = baseline.tariff.index(period) if isinstance(period, str) else int(period)
    if not (0 <= index < T):
        raise InputError(f"period index {index} out of range for {T} periods")
    price = [1.0] * T
    price[index] = multiplier
    return apply_scenario(baseline, Scenario(tuple(price), 1.0), compare=compare)


def snap_delta(value: float, reference: float, rel: float = DELTA_SNAP) -> float:
    """``value - reference``, reported as 0 when below ``rel * |reference|``."""
    delta = value - reference
    if abs(delta) <= rel * abs(reference):
        return 0.0
    return delta


@dataclass(frozen=True)
class CalibrationRow:
    sector: str
    period: str
    family: str
    elasticity: float
    a: float
    A: float


@dataclass
class CalibrationTable:
    """Per-unit (``d0 = 1``) coefficients for every sector and period."""

    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": "calibration",
            "rows": [
                {"sector": r.sector, "period": r.period, "family": r.family,
                 "elasticity": r.elasticity, "a": r.a, "A": r.A}
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationTable":
        return cls([CalibrationRow(**r) for r in d["rows"]])

    def __eq__(self, other):
        if not isinstance(other, CalibrationTable):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def calibration_table(portfolio: Sequence[SectorProfile], tariff: Tariff) -> CalibrationTable:
    from .single_period import own_price_elasticity

    rows = []
    for s in portfolio:
        for j, p in enumerate(tariff.periods):
            sp = SinglePeriodModel.build(s.family, s.coefficients[j], 1.0, p.price)
            rows.append(
                CalibrationRow(s.name, p.label, s.family.value, own_price_elasticity(sp), sp.model.a, sp.cal.A)
            )
    return CalibrationTable(rows)


def per_unit_profile(sector: SectorProfile, tariff: Tariff) -> MultiPeriodProfile:
    """The sector at ``d0 = 1`` in every period, priced by ``tariff``."""
    profile = MultiPeriodProfile.build(sector.family, sector.coefficients, [1.0] * len(tariff.periods),
                                       tariff.prices, labels=tariff.labels)
    if sector.budget is not None:
        profile = profile.with_budget(sector.budget)
    return profile
