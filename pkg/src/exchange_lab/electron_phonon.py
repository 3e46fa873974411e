"""Zero-mode electron-phonon model: closed-form functions and matrix elements.

Two routes to ``E(t) = <k n0| exp(-iHt) |k n0p>``:

* ``path="numeric"``: the element of the exact propagator of the truncated
  model, with unit-normalized Fock states (ground truth);
* ``path="printed"``: ``N^-1 exp(-i eps_k t) exp(-i w0 n0 t) F(t)`` built from
  ``alpha``, ``zeta`` and ``Psi``, with the denominator read as
  ``(n2!)^2 (n4!)^2`` and the free index ``n3`` summed up to ``n_max``.

The two routes are compared, not assumed equal: :func:`compare_matrix_element_paths`
reports every mismatch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cumulant import DEFAULT_CONFIG, CumulantConfig, TimeSeries, case_b_delta_e, sweep
from .errors import TruncationError
from .models import (
    ElectronPhononParams,
    InitialState,
    ModelSpec,
    basis_state,
    build_electron_phonon_q0,
)
from .propagator import evolution

__all__ = [
    "ElectronPhononParams",
    "MatrixElementMismatch",
    "PrintedMatrixElement",
    "alpha_zeta_psi",
    "build_electron_phonon_q0",
    "compare_matrix_element_paths",
    "electron_phonon_exchange",
    "electron_phonon_matrix_element",
    "printed_matrix_element",
    "zeta_series",
]

ZETA_SERIES_THRESHOLD = 1e-4


def zeta_series(omega0: float, g: float, t: float) -> float:
    """``w0 (1 - cos(g t)) / g`` expanded to third order in ``x = g t``."""
    x = g * t
    return omega0 * t * (x / 2 - x**3 / 24)


def alpha_zeta_psi(params: ElectronPhononParams, t: float) -> tuple[float, float, float]:
    w0 = params.omega0
    g = params.coupling
    alpha = g * math.sin(w0 * t) / w0
    if abs(g * t) < ZETA_SERIES_THRESHOLD:
        zeta = zeta_series(w0, g, t)
    else:
        zeta = w0 * (1 - math.cos(g * t)) / g
    psi = -0.5 * (alpha**2 + zeta**2)
    return alpha, zeta, psi


def _single_electron_index(params: ElectronPhononParams) -> int:
    # occupation basis with mode 0 as the most significant bit
    return 1 << (params.nu - 1 - params.k)


def _numeric_element(params: ElectronPhononParams, t: float) -> complex:
    model = build_electron_phonon_q0(params)
    u = evolution(model.spectrum, t)
    s = _single_electron_index(params)
    dim_e = params.n_max + 1
    return complex(u[s * dim_e + params.n0, s * dim_e + params.n0p])


def electron_phonon_matrix_element(
    params: ElectronPhononParams,
    t: float,
    path: str = "numeric",
    *,
    check_convergence: bool = False,
    tol: float = 1e-8,
) -> complex:
    """``<k n0| exp(-iHt) |k n0p>`` along the requested route.

    With ``check_convergence`` the numeric element is recomputed at twice
    the truncation and :class:`TruncationError` is raised if they differ by
    more than ``tol``.
    """
    if path == "printed":
        return printed_matrix_element(params, t).value
    if path != "numeric":
        raise ValueError(f"unknown path {path!r}")
    value = _numeric_element(params, t)
    if check_convergence:
        bigger = replace(params, n_max=2 * params.n_max)
        ref = _numeric_element(bigger, t)
        if abs(ref - value) > tol:
            raise TruncationError(
                f"n_max={params.n_max} not converged at t={t}: |dE| = {abs(ref - value):.3e}"
            )
    return value


@dataclass(frozen=True)
class PrintedMatrixElement:
    value: complex
    f_value: complex
    normalization: float
    converged: bool
    last_shell: float


def _f_shell(n0: int, n0p: int, n3: int, alpha: float, zeta: float) -> complex:
    total = 0j
    for n2 in range(min(n0, n3) + 1):
        for n4 in range(min(n3, n0p) + 1):
            phase = (-1j) ** (n0 + n3) * (-1) ** (n0p + n2 - n4)
            num = (
                math.factorial(n0) * math.factorial(n0p)
                * math.factorial(n2) ** 2 * math.factorial(n3) ** 2
            )
            den = (
                math.factorial(n2) ** 2 * math.factorial(n4) ** 2
                * math.factorial(n0 - n2) * math.factorial(n3 - n4)
                * math.factorial(n3 - n2) * math.factorial(n0p - n4)
            )
            total += phase * num / den * alpha ** (n0 + n3 - 2 * n2) * zeta ** (n0p + n3 - 2 * n4)
    return total


def printed_matrix_element(params: ElectronPhononParams, t: float, tol: float = 1e-10) -> PrintedMatrixElement:
    alpha, zeta, psi = alpha_zeta_psi(params, t)
    n0, n0p = params.n0, params.n0p
    shells = [_f_shell(n0, n0p, n3, alpha, zeta) for n3 in range(params.n_max + 1)]
    f = sum(shells) * math.exp(psi)
    norm = 2 * math.pi * math.sqrt(math.factorial(n0) * math.factorial(n0p))
    eps_k = params.eps[params.k]
    value = np.exp(-1j * eps_k * t) * np.exp(-1j * params.omega0 * n0 * t) * f / norm
    last = abs(shells[-1]) * math.exp(psi)
    return PrintedMatrixElement(complex(value), complex(f), norm, last <= tol * max(1.0, abs(f)), last)


@dataclass(frozen=True)
class MatrixElementMismatch:
    n0: int
    n0p: int
    t: float
    numeric: complex
    printed: complex

    @property
    def abs_diff(self) -> float:
        return abs(self.numeric - self.printed)


def compare_matrix_element_paths(
    params: ElectronPhononParams, times, quanta=None, tol: float = 1e-6
) -> list[MatrixElementMismatch]:
    """Every ``(n0, n0p, t)`` where the two routes differ by more than ``tol``."""
    if quanta is None:
        quanta = [(params.n0, params.n0p)]
    out = []
    for n0, n0p in quanta:
        p = replace(params, n0=n0, n0p=n0p)
        for t in times:
            num = _numeric_element(p, t)
            prn = printed_matrix_element(p, t).value
            if abs(num - prn) > tol:
                out.append(MatrixElementMismatch(n0, n0p, float(t), num, prn))
    return out


def electron_phonon_exchange(
    params: ElectronPhononParams,
    state: InitialState | None,
    t_grid,
    cfg: CumulantConfig = DEFAULT_CONFIG,
    *,
    model: ModelSpec | None = None,
) -> TimeSeries:
    """Energy exchange and speed for the zero-mode model.

    ``state=None`` starts from one electron in mode ``k`` and the phonon
    number state ``n0``.
    """
    model = model or build_electron_phonon_q0(params)
    if state is None:
        state = basis_state(model, _single_electron_index(params), params.n0)
    series = sweep(model, state, t_grid, cfg)
    series.metadata["case_b_delta_e"] = [case_b_delta_e(model, state, t) for t in series.t]
    return series
