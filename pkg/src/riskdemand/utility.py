"""Utility families, their derivatives, absolute risk aversion and calibration.

Two families are supported:

* exponential ``U(D) = 1 - exp(-a D)`` on ``D >= 0``
* quadratic   ``U(D) = -(1 - a D)**2`` on ``0 <= D <= 1/a``

The quadratic is a relative measure: ``U(0) = -1``, not 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import CalibrationError, DomainError, SingularityError

#: tolerance for identities that hold by construction
IDENTITY_TOL = 1e-12
#: tolerance for finite-difference checks
FD_TOL = 1e-6


class Family(str, enum.Enum):
    EXPONENTIAL = "exponential"
    QUADRATIC = "quadratic"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise DomainError(f"unknown utility family {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class UtilityModel:
    """A utility family with its risk-aversion coefficient ``a``.

    Construction does not validate ``a``; use :func:`validate_model` or
    :meth:`checked` when the value comes from outside.
    """

    kind: Family
    a: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Family.parse(self.kind))
        object.__setattr__(self, "a", float(self.a))

    @classmethod
    def exponential(cls, a: float) -> "UtilityModel":
        return cls(Family.EXPONENTIAL, a)

    @classmethod
    def quadratic(cls, a: float) -> "UtilityModel":
        return cls(Family.QUADRATIC, a)

    def checked(self) -> "UtilityModel":
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"risk-aversion coefficient must be finite and > 0, got {self.a!r}")
        return self

    @property
    def saturation(self) -> float:
        """Upper end of the domain (``inf`` for the exponential family)."""
        if self.kind is Family.QUADRATIC:
            return 1.0 / self.a
        return math.inf

    def scaled(self, unit: float) -> "UtilityModel":
        """Same model with demand measured in units ``unit`` times larger.

        ``a * d`` is preserved, so all elasticities are unchanged.
        """
        return UtilityModel(self.kind, self.a / unit)


@dataclass(frozen=True)
class PeriodCalibration:
    """Anchor point ``(d0, pi0)`` and the calibration coefficient ``A``."""

    d0: float
    pi0: float
    A: float = field(default=math.nan)

    @classmethod
    def fit(cls, model: UtilityModel, d0: float, pi0: float) -> "PeriodCalibration":
        return cls(float(d0), float(pi0), calibrate(model, d0, pi0))


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def raise_for_violations(self, context: str = "") -> None:
        if self.violations:
            prefix = f"{context}: " if context else ""
            raise CalibrationError(prefix + "; ".join(self.violations))


def _check_demand(model: UtilityModel, d: float) -> float:
    d = float(d)
    if not d >= 0:  # also rejects nan
        raise DomainError(f"demand must be >= 0, got {d!r}")
    if model.kind is Family.QUADRATIC and d * model.a > 1.0:
        # tolerate the last ulp so that d = 1/a is accepted
        if d > model.saturation * (1 + 4 * 2.0**-52):
            raise DomainError(
                f"quadratic utility is only defined on [0, 1/a] = [0, {model.saturation:.6g}], got d={d!r}"
            )
    return d


def eval_utility(model: UtilityModel, d: float) -> float:
    d = _check_demand(model, d)
    if model.kind is Family.EXPONENTIAL:
        return -math.expm1(-model.a * d)
    return -((1.0 - model.a * d) ** 2)


def marginal_utility(model: UtilityModel, d: float) -> float:
    d = _check_demand(model, d)
    a = model.a
    if model.kind is Family.EXPONENTIAL:
        return a * math.exp(-a * d)
    return max(2.0 * a * (1.0 - a * d), 0.0)


def second_derivative(model: UtilityModel, d: float) -> float:
    d = _check_demand(model, d)
    a = model.a
    if model.kind is Family.EXPONENTIAL:
        return -a * a * math.exp(-a * d)
    return -2.0 * a * a


def ara(model: UtilityModel, d: float) -> float:
    """Arrow-Pratt absolute risk aversion ``-U''/U'``."""
    d = _check_demand(model, d)
    if model.kind is Family.EXPONENTIAL:
        return model.a
    slack = 1.0 - model.a * d
    if slack <= 0.0:
        raise SingularityError(f"marginal utility vanishes at d = 1/a = {model.saturation:.6g}")
    return model.a / slack


def calibrate(model: UtilityModel, d0: float, pi0: float) -> float:
    """Return ``A`` such that ``A * U'(d0) == pi0``."""
    d0 = float(d0)
    pi0 = float(pi0)
    if not (d0 > 0 and math.isfinite(d0)):
        raise CalibrationError(f"initial demand must be > 0, got {d0!r}")
    if not (pi0 > 0 and math.isfinite(pi0)):
        raise CalibrationError(f"initial price must be > 0, got {pi0!r}")
    model.checked()
    a = model.a
    if model.kind is Family.EXPONENTIAL:
        return pi0 / a * math.exp(a * d0)
    if a * d0 >= 1.0:
        raise CalibrationError(
            f"quadratic calibration infeasible: a*d0 = {a * d0:.6g} >= 1 (marginal utility is zero at d0)"
        )
    return pi0 / (2.0 * a * (1.0 - a * d0))


def validate_model(model: UtilityModel, cal: PeriodCalibration) -> ValidationResult:
    """Itemize every violated precondition; an empty result means valid."""
    problems = []
    if not (model.a > 0 and math.isfinite(model.a)):
        problems.append(f"risk-aversion coefficient a must be > 0 (got {model.a!r})")
    if not (cal.d0 > 0 and math.isfinite(cal.d0)):
        problems.append(f"initial demand d0 must be > 0 (got {cal.d0!r})")
    if not (cal.pi0 > 0 and math.isfinite(cal.pi0)):
        problems.append(f"initial price pi0 must be > 0 (got {cal.pi0!r})")
    if model.kind is Family.QUADRATIC and model.a * cal.d0 >= 1.0:
        problems.append(f"quadratic model requires a*d0 < 1 (got {model.a * cal.d0:.6g})")
    if not problems and not math.isnan(cal.A):
        expected = calibrate(model, cal.d0, cal.pi0)
        if not math.isclose(cal.A, expected, rel_tol=IDENTITY_TOL):
            problems.append(f"calibration coefficient A = {cal.A!r} inconsistent with anchor (expected {expected!r})")
    return ValidationResult(tuple(problems))


def inverse_marginal_utility(model: UtilityModel, x: float) -> float:
    """Demand at which ``U'(D) == x``, clamped to the domain (0 when ``x >= U'(0)``)."""
    a = model.a
    if model.kind is Family.EXPONENTIAL:
        if x >= a:
            return 0.0
        if x <= 0.0:
            return math.inf
        return math.log(a / x) / a
    if x >= 2.0 * a:
        return 0.0
    if x <= 0.0:
        return 1.0 / a
    return (1.0 - x / (2.0 * a)) / a
