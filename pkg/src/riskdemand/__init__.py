"""Electricity demand, welfare and elasticities from utility risk-aversion coefficients."""

__version__ = "0.1.0"

from .errors import (
    CalibrationError,
    ConvergenceError,
    CornerSolutionError,
    DataError,
    DomainError,
    InfeasibleBudgetError,
    InfiniteRiskAversionError,
    InputError,
    NumericalError,
    SingularityError,
)
from .utility import (
    Family,
    PeriodCalibration,
    UtilityModel,
    ara,
    calibrate,
    eval_utility,
    marginal_utility,
    validate_model,
)
from .single_period import (
    OwnPriceClass,
    Quantity,
    SinglePeriodModel,
    classify_own_price,
    demand,
    own_price_elasticity,
    risk_aversion_from_elasticity,
    sweep,
    welfare,
    welfare_of_price,
)
from .multi_period import (
    Allocation,
    CrossPriceClass,
    ElasticityReport,
    IncomeClass,
    MultiPeriodProfile,
    classify_cross,
    classify_income,
    cross_price_elasticity_mp,
    elasticity_report,
    income_elasticity,
    own_price_elasticity_mp,
    solve_allocation_closed,
    solve_allocation_numeric,
)
from .scenario import (
    BaselineState,
    LoadCurve,
    Scenario,
    ScenarioReport,
    SectorProfile,
    Tariff,
    TariffPeriod,
    apply_scenario,
    build_baseline,
    per_period_shock,
)
from .data_io import parse_load_curve, parse_portfolio, parse_tariff, read_report, write_report
