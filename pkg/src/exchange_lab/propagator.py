"""Exact time evolution for time-independent Hamiltonians (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import HermiticityError, SpaceMismatchError
from .hilbert import hermiticity_defect, max_abs

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def function(self, f) -> np.ndarray:
        """``V f(Lambda) V^+`` for a scalar function ``f``."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ v.conj().T


def hermitian_eig(h: np.ndarray) -> SpectralDecomposition:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise SpaceMismatchError(f"expected a square matrix, got shape {h.shape}")
    if max_abs(h) > 0 and max_abs(h - h.conj().T) > HERMITIAN_TOL * max(1.0, max_abs(h)):
        raise HermiticityError(f"matrix is not Hermitian (defect {hermiticity_defect(h):.3e})")
    # symmetrize so eigh sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return SpectralDecomposition(w, v, h)


def _as_decomposition(h) -> SpectralDecomposition:
    return h if isinstance(h, SpectralDecomposition) else hermitian_eig(h)


def evolution(h, t: float) -> np.ndarray:
    """``U(t) = exp(-i H t)``; ``h`` may be a matrix or its decomposition."""
    dec = _as_decomposition(h)
    if t == 0:
        return np.eye(dec.dim, dtype=complex)
    return dec.function(lambda w: np.exp(-1j * w * t))


def expm(a: np.ndarray) -> np.ndarray:
    """General matrix exponential (scaling and squaring, Pade kernel)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpaceMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise FloatingPointError("non-finite entries in exponent")
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"matrix exponential overflowed (max|A| = {max_abs(a):.3e})")
    return out


def eta_shifted_evolution(h, h_e, eta: float, t: float) -> np.ndarray:
    """Counting-field evolution ``exp(i eta H_E) U(t) exp(-i eta H_E)``."""
    u = evolution(h, t)
    if eta == 0:
        return u
    dec_e = _as_decomposition(h_e)
    left = dec_e.function(lambda w: np.exp(1j * eta * w))
    return left @ u @ left.conj().T


def propagate_density(rho0: np.ndarray, u: np.ndarray) -> np.ndarray:
    rho0 = np.asarray(rho0)
    u = np.asarray(u)
    if rho0.shape != u.shape or rho0.ndim != 2:
        raise SpaceMismatchError(f"shape mismatch {rho0.shape} vs {u.shape}")
    return u @ rho0 @ u.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))
