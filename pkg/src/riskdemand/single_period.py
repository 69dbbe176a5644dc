"""Demand, welfare and own-price elasticity for non-shiftable (single-period) load."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, InfiniteRiskAversionError, InputError
from .utility import (
    Family,
    PeriodCalibration,
    UtilityModel,
    ara,
    calibrate,
    eval_utility,
    validate_model,
)

#: half-width of the band treated as an exact class boundary
CLASS_BAND = 1e-9


class OwnPriceClass(str, enum.Enum):
    PERFECTLY_INELASTIC = "perfectly_inelastic"
    INELASTIC = "inelastic"
    UNIT_ELASTIC = "unit_elastic"
    ELASTIC = "elastic"
    PERFECTLY_ELASTIC = "perfectly_elastic"


class Quantity(str, enum.Enum):
    DEMAND = "demand"
    UTILITY = "utility"
    WELFARE = "welfare"


@dataclass(frozen=True)
class SinglePeriodModel:
    model: UtilityModel
    cal: PeriodCalibration

    def __post_init__(self):
        validate_model(self.model, self.cal).raise_for_violations("single-period model")
        if math.isnan(self.cal.A):
            object.__setattr__(self, "cal", PeriodCalibration.fit(self.model, self.cal.d0, self.cal.pi0))

    @classmethod
    def build(cls, kind, a: float, d0: float, pi0: float) -> "SinglePeriodModel":
        model = UtilityModel(kind, a)
        return cls(model, PeriodCalibration(float(d0), float(pi0), calibrate(model.checked(), d0, pi0)))

    @property
    def cutoff_price(self) -> float:
        """Price at and above which demand is zero (``A * U'(0)``)."""
        a, d0, pi0 = self.model.a, self.cal.d0, self.cal.pi0
        if self.model.kind is Family.EXPONENTIAL:
            return pi0 * math.exp(a * d0)
        return pi0 / (1.0 - a * d0)


def _check_price(pi: float) -> float:
    pi = float(pi)
    if not (pi > 0 and math.isfinite(pi)):
        raise DomainError(f"price must be finite and > 0, got {pi!r}")
    return pi


def demand(sp: SinglePeriodModel, pi: float) -> float:
    pi = _check_price(pi)
    a, d0, pi0 = sp.model.a, sp.cal.d0, sp.cal.pi0
    if pi >= sp.cutoff_price:
        return 0.0
    if sp.model.kind is Family.EXPONENTIAL:
        return max(d0 - math.log(pi / pi0) / a, 0.0)
    return max(1.0 / a - (pi / pi0) * (1.0 - a * d0) / a, 0.0)


def welfare(sp: SinglePeriodModel, d: float, pi: float) -> float:
    """Calibrated utility less electricity cost, ``A U(d) - pi d``."""
    pi = _check_price(pi)
    return sp.cal.A * eval_utility(sp.model, d) - pi * d


def welfare_of_price(sp: SinglePeriodModel, pi: float) -> float:
    """Welfare at the welfare-maximizing demand for price ``pi``."""
    pi = _check_price(pi)
    a, A = sp.model.a, sp.cal.A
    if sp.model.kind is Family.EXPONENTIAL:
        if pi >= sp.cutoff_price:
            return 0.0
        return A + (pi / a) * (math.log(pi / (a * A)) - 1.0)
    if pi >= sp.cutoff_price:
        return -A
    return pi * pi / (4.0 * a * a * A) - pi / a


def own_price_elasticity(sp: SinglePeriodModel) -> float:
    """Own-price elasticity at the anchor, ``-1 / (d0 * ARA(d0))``."""
    a, d0 = sp.model.a, sp.cal.d0
    if sp.model.kind is Family.EXPONENTIAL:
        return -1.0 / (a * d0)
    return -(1.0 - a * d0) / (a * d0)


def risk_aversion_from_elasticity(kind, e: float, d0: float = 1.0, magnitude: bool = False) -> float:
    """Invert :func:`own_price_elasticity` for ``a``.

    ``e`` is a signed (negative) own-price elasticity. Pass ``magnitude=True``
    to supply ``|E|`` as tabulated in elasticity surveys; positive values are
    otherwise rejected.
    """
    kind = Family.parse(kind)
    e = float(e)
    d0 = float(d0)
    if not (d0 > 0 and math.isfinite(d0)):
        raise DomainError(f"initial demand must be > 0, got {d0!r}")
    if magnitude:
        if e < 0:
            raise DomainError(f"elasticity magnitude must be >= 0, got {e!r}")
        e = -e
    if e == 0:
        raise InfiniteRiskAversionError("zero elasticity (perfectly inelastic demand) implies infinite risk aversion")
    if not (e < 0 and math.isfinite(e)):
        raise DomainError(f"own-price elasticity must be finite and negative, got {e!r}")
    if kind is Family.EXPONENTIAL:
        return -1.0 / (d0 * e)
    return -1.0 / (d0 * (e - 1.0))


def classify_own_price(e: float, band: float = CLASS_BAND) -> OwnPriceClass:
    e = float(e)
    if math.isnan(e):
        raise InputError("elasticity is nan")
    if e == -math.inf:
        return OwnPriceClass.PERFECTLY_ELASTIC
    if e > band:
        raise InputError(f"own-price elasticity cannot be positive, got {e!r}")
    if abs(e) <= band:
        return OwnPriceClass.PERFECTLY_INELASTIC
    if abs(e + 1.0) <= band:
        return OwnPriceClass.UNIT_ELASTIC
    if e < -1.0:
        return OwnPriceClass.ELASTIC
    return OwnPriceClass.INELASTIC


def sweep(sp: SinglePeriodModel, quantity, grid: Iterable[float]) -> list[tuple[float, float]]:
    """Evaluate ``quantity`` pointwise on a strictly increasing positive grid.

    ``demand`` and ``welfare`` sweeps take prices; ``utility`` sweeps take
    demands and report the calibrated utility ``A U(D)``.
    """
    quantity = Quantity(quantity)
    xs = [float(x) for x in grid]
    _check_grid(xs, allow_zero=quantity is Quantity.UTILITY)
    if quantity is Quantity.DEMAND:
        return [(x, demand(sp, x)) for x in xs]
    if quantity is Quantity.WELFARE:
        return [(x, welfare_of_price(sp, x)) for x in xs]
    return [(x, sp.cal.A * eval_utility(sp.model, x)) for x in xs]


def _check_grid(xs: Sequence[float], allow_zero: bool = False) -> None:
    if not xs:
        raise InputError("sweep grid is empty")
    for x in xs:
        if not math.isfinite(x) or x < 0 or (x == 0 and not allow_zero):
            raise InputError(f"sweep grid values must be positive, got {x!r}")
    for lo, hi in zip(xs, xs[1:]):
        if not hi > lo:
            raise InputError(f"sweep grid must be strictly increasing ({lo!r} then {hi!r})")


def linspace(start: float, stop: float, steps: int) -> list[float]:
    if steps < 2:
        raise InputError(f"steps must be >= 2, got {steps}")
    span = stop - start
    return [start + span * i / (steps - 1) for i in range(steps - 1)] + [float(stop)]


__all__ = [
    "CLASS_BAND",
    "OwnPriceClass",
    "Quantity",
    "SinglePeriodModel",
    "demand",
    "welfare",
    "welfare_of_price",
    "own_price_elasticity",
    "risk_aversion_from_elasticity",
    "classify_own_price",
    "sweep",
    "linspace",
    "ara",
]
