"""Report objects and JSON / CSV / text emission for the command line."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .exactnum import BiTruncatedSeries, IntPolynomial, Polynomial, RatPolynomial, TruncatedSeries

__all__ = ["SeriesReport", "fmt_float", "to_plain", "emit_json", "emit_csv", "series_from_json"]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def to_plain(obj: Any, timing: bool = True) -> Any:
    """JSON-ready copy: polynomials and series as decimal-string arrays, fractions as "p/q"."""
    if isinstance(obj, (Polynomial, TruncatedSeries, BiTruncatedSeries)):
        return obj.to_json()
    if hasattr(obj, "to_json") and callable(obj.to_json):
        return to_plain(obj.to_json(), timing)
    if isinstance(obj, dict):
        return {str(k): to_plain(v, timing) for k, v in obj.items() if timing or k != "seconds"}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, timing) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    return str(obj)


def emit_json(obj: Any, timing: bool = True) -> str:
    return json.dumps(to_plain(obj, timing), indent=2, ensure_ascii=False) + "\n"


def emit_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(x) if isinstance(x, float) else
                    json.dumps(to_plain(x)) if isinstance(x, (list, Polynomial)) else x for x in row])
    return buf.getvalue()


def _poly_from_json(data, var: str, inner_var: str | None):
    if not isinstance(data, list):
        return Fraction(data)
    cls = IntPolynomial
    flat = []
    stack = [data]
    while stack:
        for item in stack.pop():
            (stack.append(item) if isinstance(item, list) else flat.append(Fraction(item)))
    if any(f.denominator != 1 for f in flat):
        cls = RatPolynomial
    return cls.from_json(data, var, inner_var)


def _scalar_or_poly(data, vars_: Sequence[str]):
    if not isinstance(data, list):
        f = Fraction(data)
        return int(f) if f.denominator == 1 else f
    nested = any(isinstance(c, list) for c in data)
    if nested:
        return _poly_from_json(data, vars_[0], vars_[1] if len(vars_) > 1 else "a")
    return _poly_from_json(data, vars_[-1], None)


def series_from_json(data: list, order: int, mainvar: str, coeff_vars: Sequence[str] = ("a",)):
    """Rebuild a series from its JSON form; ``mainvar`` "s,t" means a two-variable table."""
    if "," in mainvar:
        v1, v2 = mainvar.split(",")
        rows = [[_scalar_or_poly(c, coeff_vars) for c in r] for r in data]
        return BiTruncatedSeries(rows, (order, order), (v1, v2))
    return TruncatedSeries([_scalar_or_poly(c, coeff_vars) for c in data], order, mainvar)


@dataclass
class SeriesReport:
    name: str
    mainvar: str
    order: int
    coefficients: list
    route: str
    oracle_check: str = "not run"
    coeff_vars: tuple = ("a",)
    seconds: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_series(cls, name: str, series, route: str, **kw) -> "SeriesReport":
        if isinstance(series, BiTruncatedSeries):
            mainvar, order = ",".join(series.vars), series.orders[0]
        else:
            mainvar, order = series.mainvar, series.order
        return cls(name, mainvar, order, series.to_json(), route, **kw)

    def series(self):
        return series_from_json(self.coefficients, self.order, self.mainvar, self.coeff_vars)

    def to_json(self, timing: bool = True) -> dict:
        d = {
            "name": self.name,
            "mainvar": self.mainvar,
            "order": self.order,
            "coefficient_vars": list(self.coeff_vars),
            "coefficients": self.coefficients,
            "provenance": {"route": self.route, "oracle_check": self.oracle_check},
        }
        if self.extra:
            d["extra"] = to_plain(self.extra)
        if timing and self.seconds is not None:
            d["seconds"] = self.seconds
        return d

    @classmethod
    def from_json(cls, data: dict | str) -> "SeriesReport":
        if isinstance(data, str):
            data = json.loads(data)
        prov = data.get("provenance", {})
        return cls(data["name"], data["mainvar"], data["order"], data["coefficients"],
                   prov.get("route", ""), prov.get("oracle_check", "not run"),
                   tuple(data.get("coefficient_vars", ["a"])), data.get("seconds"), data.get("extra", {}))

    def text(self) -> str:
        lines = [f"{self.name} ({self.route}; oracle: {self.oracle_check})"]
        s = self.series()
        if isinstance(s, BiTruncatedSeries):
            for i, row in enumerate(s.coeffs):
                for j, c in enumerate(row):
                    if c:
                        lines.append(f"[{s.vars[0]}^{i} {s.vars[1]}^{j}] {c}")
        else:
            for n, c in enumerate(s.coeffs):
                lines.append(f"[{s.mainvar}^{n}] {c}")
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        s = self.series()
        if isinstance(s, BiTruncatedSeries):
            rows = [(i, j, s[i, j]) for i in range(s.orders[0] + 1) for j in range(s.orders[1] + 1)]
            return emit_csv([s.vars[0], s.vars[1], "coefficient"], rows)
        return emit_csv(["n", "coefficient"], [(n, c) for n, c in enumerate(s.coeffs)])
