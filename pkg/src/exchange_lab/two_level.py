"""Closed forms for a system coupled block-diagonally to a two-level environment.

For every system level ``j`` the environment evolves under the 2x2 block
``H_E + V_j``. The coefficients below are the matrix elements of the
interaction-picture block propagator

    W_j(t) = exp(+i H_E t) exp(-i (H_E + V_j) t),

which reduces to ``exp(-i V_j t)`` whenever ``V_j`` commutes with ``H_E``.
With them

    dE(t)  = e^{c t^2} D12 sum_j |c_j|^2 (d22 - d11) (a12^2 + b12^2)
    V_E(t) = 2 e^{c t^2} D12 sum_j |c_j|^2 [I12 Re O21 + R12 Im O21]

where ``D12 = E1 - E2``, ``O21 = <2|Omega_j(t)|1>`` is the off-diagonal
element of the evolved environment state of block ``j`` and ``c`` is the
phenomenological damping constant (exact numerics need ``c = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .models import TwoLevelLevel, TwoLevelParams, build_two_level_env  # noqa: F401

__all__ = [
    "AppendixACoefficients",
    "TwoLevelLevel",
    "TwoLevelParams",
    "appendix_a_coefficients",
    "block_propagator",
    "build_two_level_env",
    "omega_21",
    "two_level_delta_e",
    "two_level_speed",
]


@dataclass(frozen=True)
class AppendixACoefficients:
    """Real/imaginary parts of the block propagator elements.

    ``a11 + i b11 = W11``, ``a22 + i b22 = (W^+)22``,
    ``a12 + i b12 = (W^+)12`` and ``a21 - i b21 = W21``. ``b11`` and ``b22``
    vanish only in the commuting limit; they are needed for exactness.
    """

    a11: float
    a22: float
    a12: float
    a21: float
    b12: float
    b21: float
    b11: float = 0.0
    b22: float = 0.0

    @property
    def transition_probability(self) -> float:
        return self.a12**2 + self.b12**2

    def first_column(self) -> np.ndarray:
        """``(W11, W21)``, reconstructed from the coefficients."""
        return np.array([complex(self.a11, self.b11), complex(self.a21, -self.b21)])


def _level(params: TwoLevelParams, j: int) -> TwoLevelLevel:
    if not 0 <= j < len(params.levels):
        raise IndexError(f"level index {j} out of range for {len(params.levels)} levels")
    return params.levels[j]


def block_propagator(params: TwoLevelParams, j: int, t: float) -> np.ndarray:
    lv = _level(params, j)
    h_e = np.diag([params.e1, params.e2]).astype(complex)
    phase = np.diag(np.exp(1j * np.array([params.e1, params.e2]) * t))
    return phase @ scipy.linalg.expm(-1j * t * (h_e + lv.block))


def appendix_a_coefficients(params: TwoLevelParams, j: int, t: float) -> AppendixACoefficients:
    w = block_propagator(params, j, t)
    wd = w.conj().T
    return AppendixACoefficients(
        a11=w[0, 0].real,
        a22=wd[1, 1].real,
        a12=wd[0, 1].real,
        a21=w[1, 0].real,
        b12=wd[0, 1].imag,
        b21=-w[1, 0].imag,
        b11=w[0, 0].imag,
        b22=wd[1, 1].imag,
    )


def omega_21(params: TwoLevelParams, coeffs: AppendixACoefficients, t: float) -> complex:
    """``<2|Omega_j(t)|1>`` from the coefficients.

    ``Omega_j = U_j diag(d11, d22) U_j^+``. Unitarity of ``W`` ties the d22
    contribution to the d11 one, leaving
    ``e^{i D12 t} (a21 - i b21)(a11 - i b11)(d11 - d22)``.
    """
    rot = np.exp(1j * params.delta12 * t)
    w21 = complex(coeffs.a21, -coeffs.b21)
    w11c = complex(coeffs.a11, -coeffs.b11)
    return complex(rot * w21 * w11c * (params.d11 - params.d22))


def two_level_delta_e(params: TwoLevelParams, t: float) -> float:
    total = 0.0
    for j, lv in enumerate(params.levels):
        k = appendix_a_coefficients(params, j, t)
        total += abs(lv.c) ** 2 * (params.d22 - params.d11) * k.transition_probability
    return float(np.exp(params.c_damp * t**2) * params.delta12 * total)


def two_level_speed(params: TwoLevelParams, t: float) -> float:
    total = 0.0
    for j, lv in enumerate(params.levels):
        o21 = omega_21(params, appendix_a_coefficients(params, j, t), t)
        total += abs(lv.c) ** 2 * (lv.i12 * o21.real + lv.r12 * o21.imag)
    return float(2 * np.exp(params.c_damp * t**2) * params.delta12 * total)
