"""Bundled case-study inputs.

``tou_tariff.csv`` is a three-period time-of-use tariff. The two portfolio
files give five sectors, one by elasticities and one by coefficients. ``synthetic_load_curve.csv`` is
a made-up winter-day curve: its period energies (200000 / 335040 / 233259
MWh) reproduce a daily total of 768299 MWh and an initial spend of
468.81e9 (Rial at 1000 kWh per MWh) under the bundled tariff. Hour 23 is
outside every tariff period and carries no load.
"""
from importlib import resources

from .data_io import parse_load_curve, parse_portfolio, parse_tariff

TARIFF = "tou_tariff.csv"
PORTFOLIO_ELASTICITIES = "sector_elasticities.json"
PORTFOLIO_COEFFICIENTS = "sector_coefficients.json"
LOAD_CURVE = "synthetic_load_curve.csv"


def path(name):
    return resources.files(__package__).joinpath("data", name)


def text(name):
    return path(name).read_text(encoding="utf-8")


def tariff():
    return parse_tariff(text(TARIFF), source=TARIFF)


def load_curve():
    return parse_load_curve(text(LOAD_CURVE), source=LOAD_CURVE)


def portfolio(name=PORTFOLIO_ELASTICITIES):
    return parse_portfolio(text(name), tariff=tariff(), source=name)
