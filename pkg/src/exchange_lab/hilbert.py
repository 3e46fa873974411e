"""Finite-dimensional Hilbert spaces and dense operator algebra.

Operators are plain complex ``numpy`` arrays. A :class:`HilbertSpace` only
describes how the joint basis is built: factors are combined row-major in
declaration order, so the first factor is the slowest-varying index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import SpaceMismatchError


@dataclass(frozen=True)
class Levels:
    """A plain ``n``-level system with basis ``|0>, ..., |n-1>``."""

    n: int

    @property
    def dim(self) -> int:
        return self.n

    def validate(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"Levels needs n >= 1, got {self.n!r}")


@dataclass(frozen=True)
class BosonFock:
    """A bosonic mode truncated at occupation ``n_max``."""

    n_max: int

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def validate(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"BosonFock needs n_max >= 0, got {self.n_max!r}")


@dataclass(frozen=True)
class FermionModes:
    """``m`` fermionic modes in the occupation basis (mode 0 slowest)."""

    m: int

    @property
    def dim(self) -> int:
        return 2**self.m

    def validate(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"FermionModes needs m >= 1, got {self.m!r}")


FactorKind = Union[Levels, BosonFock, FermionModes]


@dataclass(frozen=True)
class HilbertSpace:
    factors: tuple[FactorKind, ...]

    @property
    def dim(self) -> int:
        return math.prod(f.dim for f in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def make_space(factors: Sequence[FactorKind]) -> HilbertSpace:
    """Build a joint space from an ordered list of factors."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("a Hilbert space needs at least one factor")
    for f in factors:
        if not isinstance(f, (Levels, BosonFock, FermionModes)):
            raise TypeError(f"unknown factor kind {f!r}")
        f.validate()
    space = HilbertSpace(factors)
    dim = space.dim
    if dim == 0:
        raise ValueError("zero-dimensional space")
    if dim > np.iinfo(np.intp).max:
        raise OverflowError(f"dimension {dim} overflows the platform index type")
    return space


def _check_square(a: np.ndarray, side: int | None = None) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpaceMismatchError(f"operator must be square, got shape {a.shape}")
    if side is not None and a.shape[0] != side:
        raise SpaceMismatchError(f"operator side {a.shape[0]} != space dimension {side}")


def lift(op: np.ndarray, factor: int, space: HilbertSpace) -> np.ndarray:
    """Embed an operator on one factor as identity x ... x op x ... x identity."""
    if not 0 <= factor < len(space):
        raise SpaceMismatchError(f"factor index {factor} not in a {len(space)}-factor space")
    op = np.asarray(op, dtype=complex)
    _check_square(op, space.factors[factor].dim)
    before = math.prod(space.dims[:factor])
    after = math.prod(space.dims[factor + 1:])
    return np.kron(np.kron(np.eye(before), op), np.eye(after))


def lift_block(op: np.ndarray, first: int, last: int, space: HilbertSpace) -> np.ndarray:
    """Embed an operator acting on the contiguous factors ``first..last-1``."""
    if not 0 <= first < last <= len(space):
        raise SpaceMismatchError(f"factor range [{first}, {last}) invalid for {len(space)} factors")
    op = np.asarray(op, dtype=complex)
    _check_square(op, math.prod(space.dims[first:last]))
    before = math.prod(space.dims[:first])
    after = math.prod(space.dims[last:])
    return np.kron(np.kron(np.eye(before), op), np.eye(after))


def boson_ladder(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation operators on ``|0>..|n_max>``.

    ``create|n_max> = 0``, so ``[a, a^+] = I - (n_max + 1)|n_max><n_max|``.
    """
    BosonFock(n_max).validate()
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    return a, a.conj().T


def fermion_ladder(mode: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Jordan-Wigner annihilation/creation for ``mode`` among ``m`` modes.

    Each mode uses the ordering (|0>, |1>); the parity string acts on all
    modes with a smaller index.
    """
    FermionModes(m).validate()
    if not 0 <= mode < m:
        raise IndexError(f"mode {mode} out of range for {m} modes")
    z = np.diag([1.0, -1.0]).astype(complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    c = np.ones((1, 1), dtype=complex)
    for j in range(m):
        if j < mode:
            c = np.kron(c, z)
        elif j == mode:
            c = np.kron(c, lower)
        else:
            c = np.kron(c, np.eye(2))
    return c, c.conj().T


def number_operator(annihilate: np.ndarray) -> np.ndarray:
    return annihilate.conj().T @ annihilate


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``AB - BA`` with no tolerance applied."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_square(a)
    _check_square(b, a.shape[0])
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_square(a)
    _check_square(b, a.shape[0])
    return a @ b + b @ a


def max_abs(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_zero(a: np.ndarray, tol: float, scale: float = 1.0) -> bool:
    """True iff ``max|a_ij| <= tol * max(1, scale)``.

    ``scale`` is the entry magnitude of the inputs that produced ``a``
    (for a commutator, the product of the operand magnitudes).
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return max_abs(a) <= tol * max(1.0, scale)


def hermiticity_defect(a: np.ndarray) -> float:
    """``max|A - A^+|`` relative to ``max|A|`` (zero for the zero matrix)."""
    size = max_abs(a)
    if size == 0.0:
        return 0.0
    return max_abs(a - a.conj().T) / size


def op_norm(a: np.ndarray) -> float:
    """Spectral norm."""
    return float(np.linalg.norm(a, 2)) if np.asarray(a).size else 0.0
