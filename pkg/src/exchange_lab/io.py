"""Serialization of time series and reports (CSV / JSON, LF line endings)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .cumulant import TimeSeries

CSV_COLUMNS = ("t", "delta_e", "v_e", "chi_re", "chi_im")


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(fmt(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": float(fmt(obj.real)), "im": float(fmt(obj.imag))}
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def timeseries_csv(series: TimeSeries) -> str:
    chi = series.chi if series.chi is not None else np.full(len(series), np.nan + 0j)
    lines = [",".join(CSV_COLUMNS)]
    for t, de, ve, c in zip(series.t, series.delta_e, series.v_e, chi):
        lines.append(",".join(fmt(v) for v in (t, de, ve, c.real, c.imag)))
    return "\n".join(lines) + "\n"


def timeseries_json(series: TimeSeries) -> str:
    chi = series.chi if series.chi is not None else []
    doc = {
        "model": series.model_name,
        "case_a": series.case_a,
        "case_b": series.case_b,
        "reference_eta": series.reference_eta,
        "metadata": series.metadata,
        "columns": {
            "t": series.t,
            "delta_e": series.delta_e,
            "v_e": series.v_e,
            "chi_re": np.real(chi),
            "chi_im": np.imag(chi),
        },
    }
    return dumps_json(doc)


def read_timeseries_csv(path: str | Path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True, ndmin=1)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
