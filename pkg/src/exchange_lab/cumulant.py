"""Counting-field characteristic function, energy exchange and its speed.

``chi(eta, t) = Tr[U_{eta/2}(t) rho(0) U^+_{-eta/2}(t)]`` with the counting
field attached to the environment Hamiltonian,
``U_eta = exp(i eta H_E) U exp(-i eta H_E)``. The first derivative in
``i eta`` at ``eta = 0`` is the energy gained by the environment, ``dE(t)``;
its time derivative is the exchange speed ``V_E(t)``.

Every production value can be computed along two independent routes (a trace
formula and finite differences) that must agree; see :class:`CumulantConfig`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np

from .errors import NotCaseBError, PathDisagreementError
from .hilbert import commutator, max_abs
from .models import InitialState, ModelSpec, classify_commutation
from .propagator import evolution

IMAG_RESIDUE_TOL = 1e-10
THREADS_ENV = "EXCHANGE_LAB_THREADS"


@dataclass(frozen=True)
class CumulantConfig:
    """Numerics for the two evaluation paths.

    ``eta_step`` and ``dt_step`` default to ``1e-4 / ||H_E||`` and
    ``1e-3 / ||H||``. Finite differences are central and Richardson
    extrapolated. With ``method="both"`` the analytic value is returned once
    the finite-difference value agrees within ``path_rtol`` (relative to the
    larger of the value and the model's natural scale).
    """

    eta_step: float | None = None
    dt_step: float | None = None
    method: str = "both"
    path_rtol: float = 1e-6

    def __post_init__(self):
        if self.method not in ("analytic", "finite_difference", "both"):
            raise ValueError(f"unknown method {self.method!r}")
        for name in ("eta_step", "dt_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if not self.path_rtol > 0:
            raise ValueError("path_rtol must be positive")

    def resolved_eta(self, model: ModelSpec) -> float:
        return self.eta_step if self.eta_step is not None else 1e-4 / model.energy_scale

    def resolved_dt(self, model: ModelSpec) -> float:
        return self.dt_step if self.dt_step is not None else 1e-3 / model.total_scale


DEFAULT_CONFIG = CumulantConfig()


@dataclass
class TimeSeries:
    t: np.ndarray
    delta_e: np.ndarray
    v_e: np.ndarray
    chi: np.ndarray | None = None
    reference_eta: float = 0.0
    model_name: str = ""
    case_a: bool = False
    case_b: bool = False
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)


class _Evaluator:
    """Caches the pieces shared by every time point of one model/state pair."""

    def __init__(self, model: ModelSpec, state: InitialState):
        self.model = model
        self.state = state
        self.rho0 = state.rho0
        self.h_e = model.h_e
        self.e0 = float(np.real(np.trace(self.h_e @ self.rho0)))
        # H_E is diagonal in the product of the local eigenbases
        _, vs = model.system_basis
        e_env, ve = model.env_basis
        self.basis = np.kron(vs, ve)
        self.h_e_diag = np.tile(e_env, model.dim_s)

    def u(self, t: float) -> np.ndarray:
        return evolution(self.model.spectrum, t)

    def env_phase(self, eta: float) -> np.ndarray:
        b = self.basis
        return (b * np.exp(1j * eta * self.h_e_diag)) @ b.conj().T

    def chi(self, eta: float, t: float) -> complex:
        u = self.u(t)
        if eta == 0:
            return complex(np.trace(u @ self.rho0 @ u.conj().T))
        half = self.env_phase(eta / 2)
        u_plus = half @ u @ half.conj().T              # U_{eta/2}
        u_minus = half.conj().T @ u @ half             # U_{-eta/2}
        return complex(np.trace(u_plus @ self.rho0 @ u_minus.conj().T))

    def delta_e_oracle(self, t: float) -> float:
        u = self.u(t)
        rho = u @ self.rho0 @ u.conj().T
        return float(np.real(np.trace(self.h_e @ rho))) - self.e0

    def delta_e_trace(self, t: float) -> complex:
        """``1/2 Tr{[H_E, U] rho0 U^+}`` before adding its conjugate."""
        u = self.u(t)
        return 0.5 * complex(np.trace(commutator(self.h_e, u) @ self.rho0 @ u.conj().T))

    def delta_e_fd(self, t: float, h: float) -> complex:
        def d(step):
            return (self.chi(step, t) - self.chi(-step, t)) / (2j * step)

        return (4 * d(h / 2) - d(h)) / 3

    def speed_trace(self, t: float) -> complex:
        """Product-rule derivative of the trace form, ``dU/dt = -iHU``."""
        u = self.u(t)
        h = self.model.h
        du = -1j * h @ u
        udag = u.conj().T
        dudag = 1j * udag @ h
        term = (
            np.trace(commutator(self.h_e, du) @ self.rho0 @ udag)
            + np.trace(commutator(self.h_e, u) @ self.rho0 @ dudag)
        )
        return 0.5 * complex(term)

    def speed_fd(self, t: float, dt: float) -> float:
        def d(step):
            return (self.delta_e_oracle(t + step) - self.delta_e_oracle(t - step)) / (2 * step)

        return (4 * d(dt / 2) - d(dt)) / 3


def _real_part(value: complex, scale: float, what: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_TOL * scale:
        raise PathDisagreementError(
            f"{what}: imaginary residue {value.imag:.3e} exceeds {IMAG_RESIDUE_TOL:g} x scale"
        )
    return value.real


def _agree(a: float, b: float, scale: float, rtol: float, what: str) -> None:
    if abs(a - b) > rtol * max(abs(a), abs(b), scale):
        raise PathDisagreementError(
            f"{what}: analytic {a!r} vs finite-difference {b!r} (rtol {rtol:g})"
        )


def _delta_e(ev: _Evaluator, t: float, cfg: CumulantConfig) -> float:
    scale = ev.model.energy_scale
    analytic = fd = None
    if cfg.method in ("analytic", "both"):
        z = ev.delta_e_trace(t)
        # 1/2 Tr{...} + h.c. is twice the real part; the imaginary part must vanish
        analytic = 2 * _real_part(z, scale, "energy exchange")
    if cfg.method in ("finite_difference", "both"):
        fd = _real_part(ev.delta_e_fd(t, cfg.resolved_eta(ev.model)), scale, "energy exchange (fd)")
    if analytic is not None and fd is not None:
        _agree(analytic, fd, scale, cfg.path_rtol, f"energy exchange at t={t!r}")
    return analytic if analytic is not None else fd


def _speed(ev: _Evaluator, t: float, cfg: CumulantConfig) -> float:
    scale = ev.model.energy_scale * ev.model.total_scale
    analytic = fd = None
    if cfg.method in ("analytic", "both"):
        analytic = 2 * _real_part(ev.speed_trace(t), scale, "exchange speed")
    if cfg.method in ("finite_difference", "both"):
        fd = ev.speed_fd(t, cfg.resolved_dt(ev.model))
    if analytic is not None and fd is not None:
        _agree(analytic, fd, scale, cfg.path_rtol, f"exchange speed at t={t!r}")
    return analytic if analytic is not None else fd


def characteristic_function(model: ModelSpec, state: InitialState, eta: float, t: float) -> complex:
    return _Evaluator(model, state).chi(eta, t)


def energy_exchange(
    model: ModelSpec, state: InitialState, t: float, cfg: CumulantConfig = DEFAULT_CONFIG
) -> float:
    """Energy gained by the environment between 0 and ``t``."""
    return _delta_e(_Evaluator(model, state), t, cfg)


def energy_exchange_oracle(model: ModelSpec, state: InitialState, t: float) -> float:
    """``<H_E>_t - <H_E>_0`` without any counting-field machinery."""
    return _Evaluator(model, state).delta_e_oracle(t)


def exchange_speed(
    model: ModelSpec, state: InitialState, t: float, cfg: CumulantConfig = DEFAULT_CONFIG
) -> float:
    """``d dE/dt``; positive while energy flows from the system into the environment."""
    return _speed(_Evaluator(model, state), t, cfg)


def exchange_speed_commutator(model: ModelSpec, state: InitialState, t: float) -> float:
    """``-i Tr([H_E, H_SE] rho(t))``, the closed operator form of the speed."""
    u = evolution(model.spectrum, t)
    rho = u @ state.rho0 @ u.conj().T
    return float(np.real(-1j * np.trace(commutator(model.h_e, model.h_se) @ rho)))


def _speed_one_sided(model: ModelSpec, state: InitialState, t: float) -> float:
    # Differentiates only the left propagator of the trace form; this
    # recovers half the true derivative for the product initial states used here.
    u = evolution(model.spectrum, t)
    du = -1j * model.h @ u
    z = 0.5 * np.trace(commutator(model.h_e, du) @ state.rho0 @ u.conj().T)
    return float(2 * z.real)


# -- expanded basis sums ------------------------------------------------------


def _product_basis(model: ModelSpec) -> np.ndarray:
    _, vs = model.system_basis
    _, ve = model.env_basis
    return np.kron(vs, ve)


def _in_basis(b: np.ndarray, a: np.ndarray, ds: int, de: int) -> np.ndarray:
    return (b.conj().T @ a @ b).reshape(ds, de, ds, de)


def delta_e_basis_sum(model: ModelSpec, state: InitialState, t: float) -> float:
    """Energy exchange as the explicit sum over ``|j g>``, ``|i1 g1>``, ``|i2 g1>``."""
    ds, de = model.dim_s, model.dim_e
    b = _product_basis(model)
    u = evolution(model.spectrum, t)
    comm = _in_basis(b, commutator(model.h_e, u), ds, de)
    udag = _in_basis(b, u.conj().T, ds, de)
    c, d = state.system_amplitudes, state.env_weights
    z = 0.5 * np.einsum("a,b,g,jkag,bgjk->", c, c.conj(), d, comm, udag)
    return float(2 * z.real)


def speed_basis_sum(model: ModelSpec, state: InitialState, t: float) -> float:
    """Exchange speed as the explicit three-term basis sum.

    Terms: ``<[H_E,H_SE]> U ... U^+``, ``<H> [H_E,U] ... U^+`` and
    ``- <H U> ... [H_E, U^+]``, each contracted with ``c_i1 c*_i2 d_a1``.
    """
    ds, de = model.dim_s, model.dim_e
    b = _product_basis(model)
    u = evolution(model.spectrum, t)
    udag = u.conj().T
    h = model.h
    ev = lambda a: _in_basis(b, a, ds, de)  # noqa: E731
    c, d = state.system_amplitudes, state.env_weights
    comm_e_se = ev(commutator(model.h_e, model.h_se))
    u_b = ev(u)
    udag_b = ev(udag)
    h_b = ev(h)
    comm_u = ev(commutator(model.h_e, u))
    hu = ev(h @ u)
    comm_udag = ev(commutator(model.h_e, udag))
    w = np.einsum("a,b,g->abg", c, c.conj(), d)
    t1 = np.einsum("abg,jkmn,mnag,bgjk->", w, comm_e_se, u_b, udag_b)
    t2 = np.einsum("abg,jkmn,mnag,bgjk->", w, h_b, comm_u, udag_b)
    t3 = np.einsum("abg,jkag,bgjk->", w, hu, comm_udag)
    z = -0.5j * (t1 + t2 - t3)
    return float(2 * z.real)


# -- case (b) -------------------------------------------------------------------


class CaseBSpeedSplit(NamedTuple):
    v1: float
    v2_plus_cc: float


@dataclass(frozen=True)
class _CaseBBlocks:
    weights_s: np.ndarray    # |c_j|^2
    eps: np.ndarray          # system energies
    energies: np.ndarray     # environment energies E_g
    d: np.ndarray
    u: np.ndarray            # (ds, de, de) diagonal-in-S blocks of U
    v: np.ndarray            # (ds, de, de) blocks of H_SE


def _case_b_blocks(model: ModelSpec, state: InitialState, t: float, tol: float = 1e-10) -> _CaseBBlocks:
    if not classify_commutation(model).case_b:
        raise NotCaseBError(f"model {model.name!r} does not satisfy [H_S, H_SE] = 0")
    ds, de = model.dim_s, model.dim_e
    b = _product_basis(model)
    u4 = _in_basis(b, evolution(model.spectrum, t), ds, de)
    v4 = _in_basis(b, model.h_se, ds, de)
    idx = np.arange(ds)
    off = u4.copy()
    off[idx, :, idx, :] = 0
    if max_abs(off) > tol:
        raise NotCaseBError(
            "propagator is not block diagonal in the H_S eigenbasis "
            "(degenerate system levels mixed by H_SE)"
        )
    eps, _ = model.system_basis
    energies, _ = model.env_basis
    return _CaseBBlocks(
        weights_s=np.abs(state.system_amplitudes) ** 2,
        eps=np.asarray(eps, dtype=float),
        energies=np.asarray(energies, dtype=float),
        d=state.env_weights,
        u=u4[idx, :, idx, :],
        v=v4[idx, :, idx, :],
    )


def case_b_delta_e(model: ModelSpec, state: InitialState, t: float) -> float:
    """``sum_j |c_j|^2 sum_{g,g1} (E_g - E_g1) |<j g|U|j g1>|^2 d_g1``."""
    blk = _case_b_blocks(model, state, t)
    gap = blk.energies[:, None] - blk.energies[None, :]
    per_j = np.einsum("gh,jgh,h->j", gap, np.abs(blk.u) ** 2, blk.d)
    return float(blk.weights_s @ per_j)


def _case_b_terms(blk: _CaseBBlocks) -> tuple[complex, complex, complex]:
    gap = blk.energies[:, None] - blk.energies[None, :]
    u, v, d = blk.u, blk.v, blk.d
    vu = np.einsum("jgm,jmh->jgh", v, u)
    x1 = -1j * np.einsum("j,gh,jgh,h,jgh->", blk.weights_s, gap, vu, d, u.conj())
    level = blk.eps[:, None] + blk.energies[None, :]          # eps_j + E_g
    x2 = -1j * np.einsum("j,jg,gh,jgh,h->", blk.weights_s, level, gap, np.abs(u) ** 2, d)
    omega = np.einsum("jam,m,jbm->jab", u, d, u.conj())       # U D U^+ per block
    printed = -1j * np.einsum("j,gh,jgh,jhg->", blk.weights_s, gap, v, omega)
    return complex(x1), complex(x2), complex(printed)


def case_b_speed_split(model: ModelSpec, state: InitialState, t: float) -> CaseBSpeedSplit:
    """Split the case (b) speed into the coupling term and the level term.

    ``v1`` is the real part of the contribution where the time derivative
    of ``<j g|U|j g1>`` brings down ``H_SE``; ``v2_plus_cc`` is the level
    term (``eps_j + E_g``) plus its conjugate, which vanishes identically.
    Together ``V_E = 2 v1 + v2_plus_cc``.
    """
    x1, x2, _ = _case_b_terms(_case_b_blocks(model, state, t))
    return CaseBSpeedSplit(x1.real, 2 * x2.real)


def case_b_v1_imag(model: ModelSpec, state: InitialState, t: float) -> float:
    x1, _, _ = _case_b_terms(_case_b_blocks(model, state, t))
    return x1.imag


def case_b_speed_printed_v1(model: ModelSpec, state: InitialState, t: float) -> float:
    """``-i sum_j |c_j|^2 sum (E_g - E_g1) <j g|H_SE|j g1> <j g1|U D U^+|j g>``.

    This index placement equals the full speed ``V_E``, not half of it.
    """
    _, _, printed = _case_b_terms(_case_b_blocks(model, state, t))
    return printed.real


# -- sweeps ---------------------------------------------------------------------


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError("thread count must be >= 0")
    return workers or (os.cpu_count() or 1)


def validate_grid(t_grid: Sequence[float]) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("empty time grid")
    if t[0] != 0.0:
        raise ValueError("time grid must start at t = 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if not np.all(np.isfinite(t)):
        raise ValueError("non-finite time grid")
    return t


def sweep(
    model: ModelSpec,
    state: InitialState,
    t_grid: Sequence[float],
    cfg: CumulantConfig = DEFAULT_CONFIG,
    *,
    reference_eta: float = 0.0,
    workers: int | None = None,
) -> TimeSeries:
    """Evaluate ``dE``, ``V_E`` and ``chi(reference_eta)`` on a grid.

    One spectral decomposition of ``H`` is shared by all points. Each point is
    computed independently, so the result does not depend on thread count or
    evaluation order.
    """
    t = validate_grid(t_grid)
    ev = _Evaluator(model, state)

    def point(ti: float) -> tuple[float, float, complex]:
        return _delta_e(ev, ti, cfg), _speed(ev, ti, cfg), ev.chi(reference_eta, ti)

    n_workers = min(resolve_workers(workers), len(t))
    if n_workers > 1:
        _ = model.spectrum  # build the shared decomposition before fanning out
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(point, t))
    else:
        rows = [point(ti) for ti in t]

    cls = classify_commutation(model)
    return TimeSeries(
        t=t,
        delta_e=np.array([r[0] for r in rows]),
        v_e=np.array([r[1] for r in rows]),
        chi=np.array([r[2] for r in rows]),
        reference_eta=reference_eta,
        model_name=model.name,
        case_a=cls.case_a,
        case_b=cls.case_b,
        metadata={
            "method": cfg.method,
            "eta_step": cfg.resolved_eta(model),
            "dt_step": cfg.resolved_dt(model),
            "sign_convention": "delta_e > 0: environment gained energy; "
                               "v_e > 0: energy flowing from system to environment",
        },
    )
