"""JSON run configurations: schema, parsing and model construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .cumulant import CumulantConfig
from .errors import ConfigError
from .hilbert import Levels, make_space
from .models import (
    ElectronPhononParams,
    InitialState,
    ModelSpec,
    TwoLevelLevel,
    TwoLevelParams,
    build_electron_phonon_q0,
    build_generic,
    build_impurity_bec,
    build_two_level_env,
    initial_state,
)

MODEL_NAMES = ("generic", "impurity-bec-q0", "two-level-env", "electron-phonon-q0")

_NUMBER = {"type": "number"}
_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {"re": _NUMBER, "im": _NUMBER},
            "required": ["re"],
            "additionalProperties": False,
        },
    ]
}
_REAL_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUMBER}}
_MATRIX = {
    "oneOf": [
        _REAL_MATRIX,
        {
            "type": "object",
            "properties": {"re": _REAL_MATRIX, "im": _REAL_MATRIX},
            "required": ["re"],
            "additionalProperties": False,
        },
    ]
}
_BASIS_INDEX = {
    "type": "object",
    "properties": {"basis_index": {"type": "integer", "minimum": 0}},
    "required": ["basis_index"],
    "additionalProperties": False,
}


def _obj(properties: dict, required=(), **extra) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
        **extra,
    }


PARAM_SCHEMAS: dict[str, dict] = {
    "generic": _obj({"h_s": _MATRIX, "h_e": _MATRIX, "h_se": _MATRIX}, ["h_s", "h_e", "h_se"]),
    "impurity-bec-q0": _obj(
        {
            "eps": {"type": "array", "minItems": 1, "items": _NUMBER},
            "e": {"type": "array", "minItems": 1, "items": _NUMBER},
            "v_b": _NUMBER,
            "volume": {"type": "number", "exclusiveMinimum": 0},
            "n_max": {"type": "integer", "minimum": 1},
            "q": _NUMBER,
            "coupling": {"enum": ["density", "exchange"]},
        },
        ["eps", "e"],
    ),
    "two-level-env": _obj(
        {
            "e1": _NUMBER,
            "e2": _NUMBER,
            "c_damp": _NUMBER,
            "levels": {
                "type": "array",
                "minItems": 1,
                "items": _obj(
                    {"eps": _NUMBER, "r12": _NUMBER, "i12": _NUMBER, "v11": _NUMBER, "v22": _NUMBER},
                    ["eps", "r12", "i12"],
                ),
            },
        },
        ["e1", "e2", "levels"],
    ),
    "electron-phonon-q0": _obj(
        {
            "nu": {"type": "integer", "minimum": 1},
            "eps": {"type": "array", "minItems": 1, "items": _NUMBER},
            "omega0": {"type": "number", "exclusiveMinimum": 0},
            "v0": _NUMBER,
            "n_max": {"type": "integer", "minimum": 2},
            "k": {"type": "integer", "minimum": 0},
        },
        ["nu", "eps", "omega0", "v0"],
    ),
}

RUN_SCHEMA = _obj(
    {
        "model": {"enum": list(MODEL_NAMES)},
        "params": {"type": "object"},
        "state": _obj(
            {
                "c": {"oneOf": [{"type": "array", "minItems": 1, "items": _COMPLEX}, _BASIS_INDEX]},
                "d": {"oneOf": [{"type": "array", "minItems": 1, "items": _NUMBER}, _BASIS_INDEX]},
            },
            ["c", "d"],
        ),
        "grid": _obj(
            {
                "t_max": {"type": "number", "exclusiveMinimum": 0},
                "steps": {"type": "integer", "minimum": 1},
            },
            ["t_max", "steps"],
        ),
        "numerics": _obj(
            {
                "eta_step": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "dt_step": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "method": {"enum": ["analytic", "finite_difference", "both"]},
                "reference_eta": _NUMBER,
                "tolerances": _obj(
                    {
                        "path_rtol": {"type": "number", "exclusiveMinimum": 0},
                        "classify": {"type": "number", "minimum": 0},
                    }
                ),
            }
        ),
        "output": _obj(
            {"path": {"type": "string", "minLength": 1}, "format": {"enum": ["csv", "json"]}}
        ),
    },
    ["model", "params", "state", "grid"],
)


@dataclass
class RunConfig:
    model: str
    params: dict[str, Any]
    state: dict[str, Any]
    t_max: float
    steps: int
    cumulant: CumulantConfig = field(default_factory=CumulantConfig)
    reference_eta: float = 0.0
    classify_tol: float = 1e-10
    output_path: str | None = None
    output_format: str = "csv"

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)


def _validate(instance: Any, schema: dict, where: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        loc = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {loc}: {err.message}")


def parse_config(doc: Any) -> RunConfig:
    """Validate a decoded JSON document; nothing is computed on failure."""
    _validate(doc, RUN_SCHEMA, "config")
    _validate(doc["params"], PARAM_SCHEMAS[doc["model"]], f"params[{doc['model']}]")
    numerics = doc.get("numerics", {})
    tols = numerics.get("tolerances", {})
    output = doc.get("output", {})
    try:
        cum = CumulantConfig(
            eta_step=numerics.get("eta_step"),
            dt_step=numerics.get("dt_step"),
            method=numerics.get("method", "both"),
            path_rtol=tols.get("path_rtol", 1e-6),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        model=doc["model"],
        params=doc["params"],
        state=doc["state"],
        t_max=float(doc["grid"]["t_max"]),
        steps=int(doc["grid"]["steps"]),
        cumulant=cum,
        reference_eta=float(numerics.get("reference_eta", 0.0)),
        classify_tol=float(tols.get("classify", 1e-10)),
        output_path=output.get("path"),
        output_format=output.get("format", "csv"),
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a config file. ``OSError`` for I/O, ``ConfigError`` otherwise."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(doc)


def _complex(v) -> complex:
    return complex(v["re"], v.get("im", 0.0)) if isinstance(v, dict) else complex(v)


def _matrix(m) -> np.ndarray:
    if isinstance(m, dict):
        re = np.asarray(m["re"], dtype=float)
        im = np.asarray(m.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ConfigError("re and im parts of a matrix differ in shape")
        out = re + 1j * im
    else:
        out = np.asarray(m, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ConfigError(f"matrix must be square, got shape {out.shape}")
    return out


def _vector(spec, n: int, kind) -> np.ndarray:
    if isinstance(spec, dict):
        i = spec["basis_index"]
        if i >= n:
            raise ConfigError(f"basis_index {i} out of range for dimension {n}")
        v = np.zeros(n, dtype=kind)
        v[i] = 1
        return v
    if kind is complex:
        return np.array([_complex(x) for x in spec])
    return np.asarray(spec, dtype=float)


def build_run(cfg: RunConfig) -> tuple[ModelSpec, InitialState]:
    """Construct the model and initial state; ``ConfigError`` on invalid content."""
    p = cfg.params
    try:
        if cfg.model == "generic":
            h_s, h_e, h_se = _matrix(p["h_s"]), _matrix(p["h_e"]), _matrix(p["h_se"])
            space = make_space([Levels(h_s.shape[0]), Levels(h_e.shape[0])])
            model = build_generic(space, h_s, h_e, h_se)
        elif cfg.model == "impurity-bec-q0":
            model = build_impurity_bec(
                p["eps"], p["e"], v_b=p.get("v_b", 0.0), volume=p.get("volume", 1.0),
                n_max=p.get("n_max", 8), q=p.get("q", 0.0), coupling=p.get("coupling", "density"),
            )
        elif cfg.model == "two-level-env":
            c = _vector(cfg.state["c"], len(p["levels"]), complex)
            d = _vector(cfg.state["d"], 2, float)
            levels = [
                TwoLevelLevel(lv["eps"], cj, lv["r12"], lv["i12"], lv.get("v11", 0.0), lv.get("v22", 0.0))
                for lv, cj in zip(p["levels"], c)
            ]
            model = build_two_level_env(
                TwoLevelParams(tuple(levels), p["e1"], p["e2"], d[0], d[1], p.get("c_damp", 0.0))
            )
            if p.get("c_damp", 0.0) != 0.0:
                raise ConfigError("c_damp != 0 has no finite-dimensional realization; "
                                  "use the analytic evaluator instead of simulate")
        else:
            model = build_electron_phonon_q0(
                ElectronPhononParams(
                    nu=p["nu"], eps=tuple(p["eps"]), omega0=p["omega0"], v0=p["v0"],
                    n_max=p.get("n_max", 8), k=p.get("k", 0),
                )
            )
        c = _vector(cfg.state["c"], model.dim_s, complex)
        d = _vector(cfg.state["d"], model.dim_e, float)
        state = initial_state(model, c, d)
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{cfg.model}: {exc}") from exc
    return model, state
