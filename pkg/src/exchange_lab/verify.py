"""Machine-checkable verification suites behind ``exchange-lab verify``."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from . import cumulant as cm
from .electron_phonon import ElectronPhononParams, alpha_zeta_psi, electron_phonon_exchange, zeta_series
from .hilbert import Levels, make_space, max_abs
from .models import (
    ModelSpec,
    InitialState,
    TwoLevelLevel,
    TwoLevelParams,
    build_electron_phonon_q0,
    build_generic,
    build_impurity_bec,
    build_two_level_env,
    classify_commutation,
    initial_state,
    random_amplitudes,
    random_hermitian,
    random_weights,
)
from .propagator import evolution, unitarity_defect
from .two_level import two_level_delta_e, two_level_speed
from .zassenhaus import (
    bch_closed_form,
    electron_phonon_factorization,
    fitted_slopes,
    truncation_errors,
    zassenhaus_apply,
)

SUITES = ("all", "case-a", "case-b", "zassenhaus", "analytic", "numerics")

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


@dataclass
class Check:
    name: str
    model: str
    measured: float
    bound: float
    passed: bool


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, model: str, measured: float, bound: float, passed: bool | None = None):
        measured = float(measured)
        ok = measured <= bound if passed is None else passed
        self.checks.append(Check(name, model, measured, float(bound), bool(ok)))

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True)
class SuiteCase:
    label: str
    model: ModelSpec
    state: InitialState


def two_level_example(c_damp: float = 0.0, seed: int = 7) -> TwoLevelParams:
    rng = np.random.default_rng(seed)
    c = random_amplitudes(3, rng)
    levels = tuple(
        TwoLevelLevel(eps, cj, *rng.normal(size=4))
        for eps, cj in zip((0.3, -0.5, 1.1), c)
    )
    return TwoLevelParams(levels, e1=1.3, e2=-0.4, d11=0.8, d22=0.2, c_damp=c_damp)


def electron_phonon_example(n_max: int = 12) -> ElectronPhononParams:
    return ElectronPhononParams(nu=2, eps=(0.5, 1.2), omega0=1.0, v0=0.5, n_max=n_max)


def suite_models(seed: int = 2024) -> list[SuiteCase]:
    """Desk-scale models covering case (a), case (b) and the generic case."""
    rng = np.random.default_rng(seed)
    cases = []

    def add(label, model):
        state = initial_state(
            model, random_amplitudes(model.dim_s, rng), random_weights(model.dim_e, rng)
        )
        cases.append(SuiteCase(label, model, state))

    add("impurity-bec-1mode", build_impurity_bec([0.7], [1.1], v_b=0.3, n_max=4))
    add("impurity-bec-2mode-density", build_impurity_bec([0.7, 1.3], [1.1, 0.4], v_b=0.2, n_max=3))
    add("impurity-bec-2mode-exchange",
        build_impurity_bec([0.7, 1.3], [1.1, 0.4], n_max=3, coupling="exchange"))

    sp = make_space([Levels(2), Levels(2)])
    h_e = np.diag(rng.normal(size=2)).astype(complex)
    h_se = np.kron(random_hermitian(2, rng), np.diag(rng.normal(size=2)))
    add("diagonal-coupling-2x2", build_generic(sp, random_hermitian(2, rng), h_e, h_se))
    add("sz-sx-2x2", build_generic(sp, 0.8 * SZ, 0.5 * SZ, 0.3 * np.kron(SZ, SX)))

    sp23 = make_space([Levels(2), Levels(3)])
    add("random-2x3", build_generic(
        sp23, random_hermitian(2, rng), random_hermitian(3, rng), random_hermitian(6, rng, 0.5)))

    tl = two_level_example()
    tl_model = build_two_level_env(tl)
    cases.append(SuiteCase("two-level-env", tl_model, initial_state(tl_model, tl.amplitudes, tl.weights)))
    ep_model = build_electron_phonon_q0(electron_phonon_example(8))
    add("electron-phonon-q0", ep_model)
    return cases


def corrupted_case() -> SuiteCase:
    """Negative control: a model whose coupling is not Hermitian."""
    sp = make_space([Levels(2), Levels(2)])
    good = build_generic(sp, 0.8 * SZ, 0.5 * SZ, 0.3 * np.kron(SZ, SX))
    bad_se = good.h_se.copy()
    bad_se[0, 1] += 0.25j
    bad = replace(good, h_se=bad_se, name="corrupted")
    state = initial_state(bad, [1.0, 0.0], [0.5, 0.5])
    return SuiteCase("corrupted-non-hermitian", bad, state)


def _grid(model: ModelSpec, n: int = 50, span: float = 20.0) -> np.ndarray:
    return np.linspace(0.0, span / model.total_scale, n)


def _case_a(report: VerificationReport, cases: Iterable[SuiteCase]) -> None:
    for case in cases:
        cls = classify_commutation(case.model)
        if not cls.case_a:
            continue
        ev = cm._Evaluator(case.model, case.state)
        grid = _grid(case.model)
        scale = case.model.energy_scale
        de = max(abs(ev.delta_e_oracle(t)) for t in grid)
        ve = max(abs(2 * ev.speed_trace(t).real) for t in grid)
        report.add("case_a.delta_e_zero", case.label, de, 1e-10 * scale)
        report.add("case_a.v_e_zero", case.label, ve, 1e-10 * scale)
        chi = max(abs(ev.chi(eta, t) - 1) for eta in (0.3, 1.7) for t in grid[::10])
        report.add("case_a.chi_unity", case.label, chi, 1e-10)


def _case_b(report: VerificationReport, cases: Iterable[SuiteCase]) -> None:
    for case in cases:
        if not classify_commutation(case.model).case_b or max_abs(case.model.h_se) == 0:
            continue
        m, s = case.model, case.state
        grid = _grid(m, 20)
        scale = m.energy_scale * m.total_scale
        split = [cm.case_b_speed_split(m, s, t) for t in grid]
        v = [cm.exchange_speed(m, s, t) for t in grid]
        report.add("case_b.v2_plus_cc", case.label, max(abs(x.v2_plus_cc) for x in split), 1e-9 * scale)
        report.add("case_b.v_equals_2v1", case.label,
                   max(abs(2 * x.v1 - vi) for x, vi in zip(split, v)), 1e-8 * scale)
        report.add("case_b.eq18_matches_generic", case.label,
                   max(abs(cm.case_b_delta_e(m, s, t) - cm.energy_exchange_oracle(m, s, t)) for t in grid),
                   1e-9 * m.energy_scale)
        report.add("case_b.delta_e_initial", case.label, abs(cm.case_b_delta_e(m, s, 0.0)),
                   1e-12 * m.energy_scale)


def _zassenhaus(report: VerificationReport) -> None:
    x, y = -0.7j * np.diag([1.0, 2.0, -0.5]), -0.4j * np.diag([0.3, -1.0, 2.0])
    from .propagator import expm

    report.add("zassenhaus.commuting_order2", "diag-3", max_abs(zassenhaus_apply(x, y, 2) - expm(x + y)), 1e-10)
    hx = np.zeros((3, 3), complex)
    hx[0, 1] = 0.8
    hy = np.zeros((3, 3), complex)
    hy[1, 2] = -1.3
    report.add("zassenhaus.bch_central", "heisenberg-3",
               max_abs(bch_closed_form(hx, hy) - expm(hx + hy)), 1e-10)
    times = np.logspace(-3, -1, 9)
    slopes = fitted_slopes(times, truncation_errors(SX, SZ, times))
    for k, slope in zip((2, 3, 4), slopes):
        report.add(f"zassenhaus.pauli_slope_order{k}", "pauli", abs(slope - (k + 1)), 0.2)
    model = build_electron_phonon_q0(electron_phonon_example(8))
    err = max(max_abs(electron_phonon_factorization(model, t) - evolution(model.spectrum, t))
              for t in (0.0, 0.4, 3.0, 11.0))
    report.add("zassenhaus.electron_phonon_factorization", model.name, err, 1e-10)


def _analytic(report: VerificationReport) -> None:
    p = two_level_example()
    model = build_two_level_env(p)
    state = initial_state(model, p.amplitudes, p.weights)
    grid = np.linspace(0, 10, 50)
    de = max(abs(two_level_delta_e(p, t) - cm.energy_exchange_oracle(model, state, t)) for t in grid)
    ve = max(abs(two_level_speed(p, t) - cm.exchange_speed_commutator(model, state, t)) for t in grid)
    report.add("analytic.two_level_delta_e", model.name, de, 1e-8)
    report.add("analytic.two_level_speed", model.name, ve, 1e-6)
    sign = np.sign(p.delta12 * (p.d22 - p.d11))
    bad = sum(1 for t in grid if two_level_delta_e(p, t) * sign < -1e-15)
    report.add("analytic.two_level_fixed_sign", model.name, bad, 0)
    damped = two_level_example(c_damp=-0.3)
    bound = abs(damped.delta12 * (damped.d22 - damped.d11))
    worst = max(abs(two_level_delta_e(damped, t)) * np.exp(0.3 * t**2) for t in grid)
    report.add("analytic.two_level_damped_envelope", model.name, worst, bound * (1 + 1e-12))

    ep = electron_phonon_example()
    ts = np.linspace(0, 50, 1000)
    psi = max(alpha_zeta_psi(ep, t)[2] for t in ts)
    report.add("analytic.psi_nonpositive", "electron-phonon-q0", psi, 0.0)
    g, w0 = ep.coupling, ep.omega0
    t = 1e-3 / g
    direct = w0 * (1 - np.cos(g * t)) / g
    report.add("analytic.zeta_series", "electron-phonon-q0",
               abs(zeta_series(w0, g, t) - direct) / abs(direct), 1e-9)
    period = 2 * np.pi / w0
    grid = np.linspace(0, 20 * period, 400)
    a = electron_phonon_exchange(ep, None, grid, cm.CumulantConfig(method="analytic")).delta_e
    b = electron_phonon_exchange(replace(ep, n_max=2 * ep.n_max), None, grid,
                                 cm.CumulantConfig(method="analytic")).delta_e
    peak = np.max(np.abs(a))
    report.add("analytic.electron_phonon_truncation", "electron-phonon-q0",
               abs(np.max(np.abs(b)) - peak) / peak, 0.01)
    late = np.max(np.abs(a[3 * len(a) // 4:]))
    report.add("analytic.electron_phonon_recurrence", "electron-phonon-q0", late / peak, np.inf,
               passed=late >= 0.5 * peak)


def _numerics(report: VerificationReport, cases: Iterable[SuiteCase]) -> None:
    for case in cases:
        m, s = case.model, case.state
        herm = max(max_abs(h - h.conj().T) for h in (m.h_s, m.h_e, m.h_se))
        report.add("numerics.model_hermitian", case.label, herm, 1e-12 * max(1.0, max_abs(m.h)))
        if herm > 1e-10:
            continue
        grid = _grid(m, 10)
        ev = cm._Evaluator(m, s)
        report.add("numerics.unitarity", case.label, max(unitarity_defect(ev.u(t)) for t in grid), 1e-10)
        report.add("numerics.chi_normalization", case.label,
                   max(abs(ev.chi(0.0, t) - 1) for t in grid), 1e-12)
        spec0 = np.linalg.eigvalsh(s.rho0)
        drift = max(
            max_abs(np.linalg.eigvalsh(ev.u(t) @ s.rho0 @ ev.u(t).conj().T) - spec0) for t in grid
        )
        report.add("numerics.spectrum_preserved", case.label, drift, 1e-9)
        worst = 0.0
        for t in grid:
            oracle = ev.delta_e_oracle(t)
            analytic = 2 * ev.delta_e_trace(t).real
            worst = max(worst, abs(analytic - oracle) / max(1.0, abs(oracle)))
        report.add("numerics.oracle_equivalence", case.label, worst, 1e-8)
        report.add("numerics.initial_condition", case.label, abs(ev.delta_e_oracle(0.0)),
                   1e-12 * m.energy_scale)


def run_suite(suite: str, extra_cases: Iterable[SuiteCase] = ()) -> VerificationReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    cases = suite_models() + list(extra_cases)
    hermitian = [c for c in cases if max(max_abs(h - h.conj().T) for h in (c.model.h_s, c.model.h_e, c.model.h_se)) <= 1e-10]
    report = VerificationReport(suite)
    runners: dict[str, Callable[[], None]] = {
        "case-a": lambda: _case_a(report, hermitian),
        "case-b": lambda: _case_b(report, hermitian),
        "zassenhaus": lambda: _zassenhaus(report),
        "analytic": lambda: _analytic(report),
        "numerics": lambda: _numerics(report, cases),
    }
    for name, run in runners.items():
        if suite in ("all", name):
            run()
    return report
