"""Parsers for the input files and serializers for reports.

Formats (see ``docs/formats.md``):

* load curve: delimited ``hour,mw`` rows, hours 0-23 each exactly once
* tariff: delimited ``label,start,end,price`` rows
* portfolio: JSON document of sectors with elasticities or coefficients

Reports serialize either as delimited text (6 significant digits) or as
JSON (17 significant digits, exact round trip).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DataError, InputError
from .multi_period import ElasticityReport
from .scenario import (
    HOURS,
    SHARE_TOL,
    CalibrationTable,
    LoadCurve,
    ScenarioReport,
    SectorProfile,
    Tariff,
    TariffPeriod,
    snap_delta,
)
from .single_period import Quantity, risk_aversion_from_elasticity
from .utility import Family, PeriodCalibration, UtilityModel, validate_model

DELIMITED = "delimited"
STRUCTURED = "structured"
FORMATS = (DELIMITED, STRUCTURED)


def _rows(text: str):
    """Yield ``(line_number, cells)`` for non-blank, non-comment lines."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = next(csv.reader([stripped]))
        yield lineno, [c.strip() for c in cells]


def _number(cell: str, what: str, lineno: int, source) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"{what} {cell!r} is not a number", lineno, source) from None
    if not math.isfinite(value):
        raise DataError(f"{what} {cell!r} is not finite", lineno, source)
    return value


def _integer(cell: str, what: str, lineno: int, source) -> int:
    value = _number(cell, what, lineno, source)
    if value != int(value):
        raise DataError(f"{what} {cell!r} is not an integer", lineno, source)
    return int(value)


def parse_load_curve(text: str, source: Optional[str] = None) -> LoadCurve:
    values: dict = {}
    first = True
    for lineno, cells in _rows(text):
        if first and cells and cells[0].lower() == "hour":
            first = False
            continue
        first = False
        if len(cells) != 2:
            raise DataError(f"expected 2 columns 'hour,mw', got {len(cells)}", lineno, source)
        hour = _integer(cells[0], "hour", lineno, source)
        mw = _number(cells[1], "demand", lineno, source)
        if not 0 <= hour < HOURS:
            raise DataError(f"hour {hour} outside 0-23", lineno, source)
        if hour in values:
            raise DataError(f"duplicate hour {hour} (first given on line {values[hour][1]})", lineno, source)
        if mw < 0:
            raise DataError(f"negative demand {mw!r} at hour {hour}", lineno, source)
        values[hour] = (mw, lineno)
    missing = [h for h in range(HOURS) if h not in values]
    if missing:
        raise DataError(f"missing hour(s) {', '.join(map(str, missing))}", None, source)
    return LoadCurve(tuple(values[h][0] for h in range(HOURS)))


def parse_tariff(text: str, source: Optional[str] = None) -> Tariff:
    periods = []
    first = True
    for lineno, cells in _rows(text):
        if first and cells and cells[0].lower() == "label":
            first = False
            continue
        first = False
        if len(cells) != 4:
            raise DataError(f"expected 4 columns 'label,start,end,price', got {len(cells)}", lineno, source)
        label = cells[0]
        if not label:
            raise DataError("empty period label", lineno, source)
        start = _integer(cells[1], "start hour", lineno, source)
        end = _integer(cells[2], "end hour", lineno, source)
        price = _number(cells[3], "price", lineno, source)
        if not (0 <= start < end <= HOURS):
            raise DataError(f"period {label!r}: need 0 <= start < end <= 24, got {start}-{end}", lineno, source)
        if price <= 0:
            raise DataError(f"period {label!r}: price must be > 0, got {price!r}", lineno, source)
        periods.append(TariffPeriod(label, start, end, price))
    if not periods:
        raise DataError("tariff has no periods", None, source)
    try:
        return Tariff(tuple(periods))
    except DataError:
        raise
    except InputError as exc:
        raise DataError(str(exc), None, source) from None


@dataclass
class PortfolioConfig:
    periods: list
    sectors: list = field(default_factory=list)

    @property
    def names(self) -> list:
        return [s.name for s in self.sectors]

    def sector(self, name: str) -> SectorProfile:
        for s in self.sectors:
            if s.name == name:
                return s
        raise InputError(f"unknown sector {name!r} (portfolio has {', '.join(self.names)})")


def _per_period(value, periods, where, source):
    if isinstance(value, dict):
        unknown = [k for k in value if k not in periods]
        if unknown:
            raise DataError(f"{where}: unknown period label(s) {unknown}", None, source)
        missing = [p for p in periods if p not in value]
        if missing:
            raise DataError(f"{where}: missing period(s) {missing}", None, source)
        value = [value[p] for p in periods]
    if not isinstance(value, list) or len(value) != len(periods):
        raise DataError(f"{where}: expected {len(periods)} values (one per period)", None, source)
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DataError(f"{where}: {v!r} is not a number", None, source)
        out.append(float(v))
    return out


def parse_portfolio(text: str, tariff: Optional[Tariff] = None, source: Optional[str] = None) -> PortfolioConfig:
    """Parse a portfolio document; elasticity magnitudes become coefficients at ``d0 = 1``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno, source) from None
    if not isinstance(doc, dict):
        raise DataError("portfolio must be a JSON object", None, source)
    periods = doc.get("periods")
    if periods is None and tariff is not None:
        periods = list(tariff.labels)
    if not isinstance(periods, list) or not periods or not all(isinstance(p, str) for p in periods):
        raise DataError("'periods' must be a non-empty list of labels", None, source)
    if len(set(periods)) != len(periods):
        raise DataError(f"duplicate period labels in {periods}", None, source)
    if tariff is not None:
        unknown = [p for p in periods if p not in tariff.labels]
        if unknown:
            raise DataError(f"period label(s) {unknown} not in tariff {list(tariff.labels)}", None, source)
        if sorted(periods) != sorted(tariff.labels):
            raise DataError(f"portfolio periods {periods} do not match tariff {list(tariff.labels)}", None, source)
    default_family = doc.get("family", Family.EXPONENTIAL.value)
    raw = doc.get("sectors")
    if not isinstance(raw, list) or not raw:
        raise DataError("'sectors' must be a non-empty list", None, source)

    sectors = []
    names = set()
    for n, entry in enumerate(raw):
        where = f"sector #{n + 1}"
        if not isinstance(entry, dict):
            raise DataError(f"{where}: expected an object", None, source)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise DataError(f"{where}: missing 'name'", None, source)
        where = f"sector {name!r}"
        if name in names:
            raise DataError(f"{where}: duplicate sector name", None, source)
        names.add(name)
        share = entry.get("share")
        if isinstance(share, bool) or not isinstance(share, (int, float)) or not 0 <= share <= 1:
            raise DataError(f"{where}: 'share' must be a number in [0, 1]", None, source)
        try:
            family = Family.parse(entry.get("family", default_family))
        except InputError as exc:
            raise DataError(f"{where}: {exc}", None, source) from None
        has_e = "elasticities" in entry
        has_a = "coefficients" in entry
        if has_e == has_a:
            raise DataError(f"{where}: give exactly one of 'elasticities' or 'coefficients'", None, source)
        if has_e:
            mags = _per_period(entry["elasticities"], periods, f"{where} elasticities", source)
            coeffs = []
            for label, e in zip(periods, mags):
                try:
                    coeffs.append(risk_aversion_from_elasticity(family, e, 1.0, magnitude=True))
                except InputError as exc:
                    raise DataError(f"{where}, period {label!r}: {exc}", None, source) from None
        else:
            coeffs = _per_period(entry["coefficients"], periods, f"{where} coefficients", source)
        budget = entry.get("budget")
        if budget is not None and (isinstance(budget, bool) or not isinstance(budget, (int, float)) or budget <= 0):
            raise DataError(f"{where}: 'budget' must be a positive number", None, source)
        if tariff is not None:
            order = [periods.index(label) for label in tariff.labels]
            coeffs = [coeffs[i] for i in order]
            prices = list(tariff.prices)
            labels = list(tariff.labels)
        else:
            prices = [1.0] * len(periods)
            labels = periods
        for label, a, pi0 in zip(labels, coeffs, prices):
            check = validate_model(UtilityModel(family, a), PeriodCalibration(1.0, pi0))
            if not check.ok:
                raise DataError(f"{where}, period {label!r}: {'; '.join(check.violations)}", None, source)
        sectors.append(SectorProfile(name, float(share), tuple(coeffs), family,
                                     None if budget is None else float(budget)))

    total = math.fsum(s.share for s in sectors)
    if abs(total - 1.0) > SHARE_TOL:
        raise DataError(f"sector shares sum to {total!r}, expected 1", None, source)
    return PortfolioConfig(list(tariff.labels) if tariff is not None else periods, sectors)


@dataclass
class SweepSeries:
    quantity: Quantity
    points: list
    sector: str = ""
    period: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": "sweep",
            "sector": self.sector,
            "period": self.period,
            "quantity": Quantity(self.quantity).value,
            "x": [float(x) for x, _ in self.points],
            "y": [float(y) for _, y in self.points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSeries":
        return cls(Quantity(d["quantity"]), list(zip(d["x"], d["y"])), d.get("sector", ""), d.get("period", ""))

    def __eq__(self, other):
        if not isinstance(other, SweepSeries):
            return NotImplemented
        return self.to_dict() == other.to_dict()


# structured output ---------------------------------------------------------

def _json_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (bool, int, float, np.floating, np.integer)):
        return _json_number(obj.item() if isinstance(obj, np.generic) else obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_to_json(v, indent + 1) for v in obj) + "]"
        items = [inner + _to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _nan_from_null(value):
    if isinstance(value, list):
        return [_nan_from_null(v) for v in value]
    return math.nan if value is None else value


def read_report(text: str):
    """Inverse of ``write_report(..., "structured")``."""
    doc = json.loads(text)
    return _from_dict(doc)


def _from_dict(doc):
    kind = doc.get("kind")
    if kind == "scenario":
        doc = dict(doc)
        doc["sectors"] = [
            {**s, **{k: _nan_from_null(s[k]) for k in ("demand", "utility", "spend")}} for s in doc["sectors"]
        ]
        return ScenarioReport.from_dict(doc)
    if kind == "elasticity":
        return ElasticityReport.from_dict(doc)
    if kind == "elasticity_set":
        return [ElasticityReport.from_dict(r) for r in doc["reports"]]
    if kind == "sweep":
        return SweepSeries.from_dict(doc)
    if kind == "calibration":
        return CalibrationTable.from_dict(doc)
    raise DataError(f"unknown report kind {kind!r}")


def _as_dict(report) -> dict:
    if isinstance(report, list):
        return {"kind": "elasticity_set", "reports": [r.to_dict() for r in report]}
    return report.to_dict()


# delimited output -----------------------------------------------------------

def _g6(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = format(x, ".6g")
    return "0" if text == "-0" else text


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _delimited_elasticity(reports) -> list:
    rows = [["sector", "period"] + [f"E[{lab}]" for lab in reports[0].labels]
            + ["income", "residual", "own_class", "income_class"]]
    for r in reports:
        for i, lab in enumerate(r.labels):
            rows.append([r.name, lab] + [_g6(x) for x in r.own_cross[i]]
                        + [_g6(r.income[i]), _g6(r.residuals[i]), r.own_classes[i].value, r.income_classes[i].value])
    return rows


def _delimited_scenario(report: ScenarioReport) -> list:
    quantities = ("demand", "utility", "spend", "welfare")
    base = report.baseline
    header = ["sector", "period", *quantities]
    if base is not None:
        header += [f"baseline_{q}" for q in quantities] + [f"delta_{q}" for q in quantities]
    rows = [header]

    def emit(sector, period, values, ref):
        row = [sector, period] + [_g6(v) for v in values]
        if ref is not None:
            row += [_g6(v) for v in ref] + [_g6(snap_delta(v, r)) for v, r in zip(values, ref)]
        rows.append(row)

    base_by_name = {} if base is None else {s.name: s for s in base.sectors}
    for s in report.sectors:
        b = base_by_name.get(s.name)
        for j, lab in enumerate(report.labels):
            vals = [s.demand[j], s.utility[j], s.spend[j], s.welfare[j]]
            ref = None if b is None else [b.demand[j], b.utility[j], b.spend[j], b.welfare[j]]
            emit(s.name, lab, vals, ref if base is not None else None)
        vals = [math.fsum(s.demand), math.fsum(s.utility), math.fsum(s.spend), math.fsum(s.welfare)]
        ref = None if b is None else [math.fsum(b.demand), math.fsum(b.utility), math.fsum(b.spend), math.fsum(b.welfare)]
        emit(s.name, "all", vals, ref if base is not None else None)
    for j, lab in enumerate(report.labels):
        vals = [report.period_totals(q)[j] for q in ("demand", "utility", "spend", "welfare")]
        ref = None if base is None else [base.period_totals(q)[j] for q in ("demand", "utility", "spend", "welfare")]
        emit("total", lab, vals, ref)
    vals = [report.demand, report.utility, report.spend, report.welfare]
    ref = None if base is None else [base.demand, base.utility, base.spend, base.welfare]
    emit("total", "all", vals, ref)
    return rows


def _delimited_calibration(table: CalibrationTable) -> list:
    rows = [["sector", "period", "family", "elasticity", "a", "A"]]
    for r in table.rows:
        rows.append([r.sector, r.period, r.family, _g6(r.elasticity), _g6(r.a), _g6(r.A)])
    return rows


def _delimited_sweep(series: SweepSeries) -> list:
    xname = "demand" if Quantity(series.quantity) is Quantity.UTILITY else "price"
    yname = Quantity(series.quantity).value
    return [[xname, yname]] + [[_g6(x), _g6(y)] for x, y in series.points]


def write_report(report, fmt: str = DELIMITED) -> str:
    """Serialize a scenario/elasticity/calibration report or a sweep series."""
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")
    if fmt == STRUCTURED:
        return _to_json(_as_dict(report)) + "\n"
    if isinstance(report, ElasticityReport):
        return _csv(_delimited_elasticity([report]))
    if isinstance(report, list):
        return _csv(_delimited_elasticity(report))
    if isinstance(report, ScenarioReport):
        return _csv(_delimited_scenario(report))
    if isinstance(report, CalibrationTable):
        return _csv(_delimited_calibration(report))
    if isinstance(report, SweepSeries):
        return _csv(_delimited_sweep(report))
    raise TypeError(f"cannot write {type(report).__name__}")


def read_text(path) -> str:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return fh.read()
