"""``exchange-lab`` command line.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or arguments,
3 dual-path disagreement during a sweep, 4 failed verification check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import MODEL_NAMES, build_run, load_config
from .cumulant import sweep
from .errors import ConfigError, PathDisagreementError
from .io import dumps_json, fmt, timeseries_csv, timeseries_json, write_text
from .verify import SUITES, SX, SZ, corrupted_case, run_suite
from .zassenhaus import SUPPORTED_ORDERS, VARIANTS, fitted_slopes, truncation_errors, zassenhaus_terms

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_PATHS, EXIT_VERIFY = 0, 1, 2, 3, 4

MODEL_DESCRIPTIONS = {
    "generic": "user-supplied H_S, H_E, H_SE matrices on a system (x) environment split",
    "impurity-bec-q0": "fermionic impurity modes coupled to truncated boson modes, zero momentum transfer",
    "two-level-env": "system levels coupled block-diagonally to a two-level environment",
    "electron-phonon-q0": "fermion modes coupled to one truncated phonon mode",
}


def _scenario(name: str) -> tuple[np.ndarray, np.ndarray]:
    if name == "pauli":
        return SX, SZ
    if name == "commuting":
        return np.diag([1.0, 2.0, -0.5]).astype(complex), np.diag([0.3, -1.0, 2.0]).astype(complex)
    if name == "heisenberg":
        p = np.zeros((3, 3), complex)
        q = np.zeros((3, 3), complex)
        p[0, 1] = 1.0
        q[1, 2] = 0.7
        # strictly upper triangular: [P, Q] is central, so every order is exact
        return p, q
    rng = np.random.default_rng(11)
    a = rng.normal(size=(2, 3, 3)) + 1j * rng.normal(size=(2, 3, 3))
    return (a[0] + a[0].conj().T) / 2, (a[1] + a[1].conj().T) / 2


SCENARIOS = ("pauli", "commuting", "heisenberg", "random")


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
        model, state = build_run(cfg)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        series = sweep(model, state, cfg.t_grid, cfg.cumulant, reference_eta=cfg.reference_eta)
    except PathDisagreementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PATHS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = timeseries_csv(series) if cfg.output_format == "csv" else timeseries_json(series)
    try:
        _emit(text, args.out or cfg.output_path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args) -> int:
    extra = [corrupted_case()] if args.negative_control else []
    report = run_suite(args.suite, extra)
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark} {c.name} [{c.model}] measured={c.measured:.3e} bound={c.bound:.3e}", file=sys.stderr)
    text = dumps_json(report.as_dict())
    try:
        _emit(text, args.json)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if report.passed else EXIT_VERIFY


def zassenhaus_table(order: int, variant: str) -> str:
    lines = [f"exp(X+Y) = exp(X) exp(Y) prod_n exp(-c_n/n!), n = 2..{order} ({variant})"]
    for n, words in zassenhaus_terms(order, variant).terms:
        lines.append(f"c{n} = " + " + ".join(str(w) for w in words))
    return "\n".join(lines) + "\n"


def zassenhaus_csv(scenario: str, variant: str, times) -> str:
    p, q = _scenario(scenario)
    errors = truncation_errors(p, q, times, SUPPORTED_ORDERS, variant)
    slopes = fitted_slopes(times, errors)
    head = ["t"] + [f"error_order{k}" for k in SUPPORTED_ORDERS] + [f"slope_order{k}" for k in SUPPORTED_ORDERS]
    rows = [",".join(head)]
    for t, err in zip(times, errors):
        rows.append(",".join(fmt(v) for v in (t, *err, *slopes)))
    return "\n".join(rows) + "\n"


def cmd_zassenhaus(args) -> int:
    # the table goes to stdout unless stdout carries the CSV
    (sys.stdout if args.out else sys.stderr).write(zassenhaus_table(args.order, args.variant))
    times = np.logspace(np.log10(args.t_min), np.log10(args.t_max), args.points)
    try:
        _emit(zassenhaus_csv(args.scenario, args.variant, times), args.out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_models(args) -> int:
    for name in MODEL_NAMES:
        print(f"{name}\t{MODEL_DESCRIPTIONS[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exchange-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sweep dE, V_E and chi over a time grid")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", help="output path (default: config output.path, else stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a verification suite and emit a JSON report")
    p.add_argument("--suite", default="all", choices=SUITES)
    p.add_argument("--json", help="report path (default: stdout)")
    p.add_argument("--negative-control", action="store_true",
                   help="add a model with a non-Hermitian coupling; the suite must then fail")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zassenhaus", help="term table and error-scaling CSV")
    p.add_argument("--order", type=int, required=True, choices=SUPPORTED_ORDERS)
    p.add_argument("--scenario", default="pauli", choices=SCENARIOS)
    p.add_argument("--variant", default="standard", choices=VARIANTS)
    p.add_argument("--t-min", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zassenhaus)

    p = sub.add_parser("models", help="model catalogue")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_models)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
