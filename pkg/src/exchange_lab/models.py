"""Model Hamiltonians, product initial states and commutation classes.

The joint space is always ``S (x) E``: system factors first, environment
factors after them. ``h_s``, ``h_e`` and ``h_se`` of a :class:`ModelSpec`
are stored on the joint space; the local ``h_s_local`` / ``h_e_local`` are
kept to define the eigenbases in which initial-state amplitudes are given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .errors import HermiticityError, NormalizationError, NotCaseBError, SpaceMismatchError
from .hilbert import (
    BosonFock,
    FermionModes,
    HilbertSpace,
    Levels,
    boson_ladder,
    commutator,
    fermion_ladder,
    is_zero,
    lift_block,
    make_space,
    max_abs,
    number_operator,
    op_norm,
)
from .propagator import SpectralDecomposition, hermitian_eig

BUILD_HERMITIAN_TOL = 1e-10
NORMALIZATION_TOL = 1e-10
DEFAULT_N_MAX = 8


@dataclass(frozen=True, eq=False)
class ModelSpec:
    space: HilbertSpace
    n_system_factors: int
    h_s: np.ndarray
    h_e: np.ndarray
    h_se: np.ndarray
    h_s_local: np.ndarray
    h_e_local: np.ndarray
    name: str = "generic"
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def dim_s(self) -> int:
        return math.prod(self.space.dims[: self.n_system_factors])

    @property
    def dim_e(self) -> int:
        return math.prod(self.space.dims[self.n_system_factors:])

    @cached_property
    def h(self) -> np.ndarray:
        return self.h_s + self.h_e + self.h_se

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return hermitian_eig(self.h)

    @cached_property
    def system_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """(energies, unitary with eigenvectors as columns) of the local H_S."""
        return _eigenbasis(self.h_s_local)

    @cached_property
    def env_basis(self) -> tuple[np.ndarray, np.ndarray]:
        return _eigenbasis(self.h_e_local)

    @cached_property
    def energy_scale(self) -> float:
        """``||H_E||``, floored at 1 for models with a trivial environment."""
        return max(1.0, op_norm(self.h_e))

    @cached_property
    def total_scale(self) -> float:
        return max(1.0, op_norm(self.h))


def _eigenbasis(h_local: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Operators already diagonal keep their declared basis order; eigh
    # would re-sort degenerate or unordered levels.
    h_local = np.asarray(h_local, dtype=complex)
    off = h_local - np.diag(np.diag(h_local))
    if max_abs(off) <= 1e-14 * max(1.0, max_abs(h_local)):
        return np.real(np.diag(h_local)).copy(), np.eye(h_local.shape[0], dtype=complex)
    dec = hermitian_eig(h_local)
    return dec.eigenvalues, dec.eigenvectors


def _require_hermitian(name: str, a: np.ndarray) -> None:
    if max_abs(a - a.conj().T) > BUILD_HERMITIAN_TOL * max(1.0, max_abs(a)):
        raise HermiticityError(f"{name} is not Hermitian")


def _split_index(space: HilbertSpace, dim_s: int, dim_e: int) -> int:
    for k in range(1, len(space)):
        if math.prod(space.dims[:k]) == dim_s and math.prod(space.dims[k:]) == dim_e:
            return k
    raise SpaceMismatchError(
        f"cannot split space dims {space.dims} into system {dim_s} x environment {dim_e}"
    )


def build_generic(
    space: HilbertSpace,
    h_s_local: np.ndarray,
    h_e_local: np.ndarray,
    h_se: np.ndarray,
    *,
    n_system_factors: int | None = None,
    name: str = "generic",
    params: dict[str, Any] | None = None,
) -> ModelSpec:
    """Assemble ``H = H_S + H_E + H_SE`` on ``S (x) E``.

    ``h_s_local`` acts on the system factors, ``h_e_local`` on the
    environment factors and ``h_se`` on the whole space.
    """
    h_s_local = np.asarray(h_s_local, dtype=complex)
    h_e_local = np.asarray(h_e_local, dtype=complex)
    h_se = np.asarray(h_se, dtype=complex)
    for label, a in (("h_s", h_s_local), ("h_e", h_e_local), ("h_se", h_se)):
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise SpaceMismatchError(f"{label} must be square, got {a.shape}")
    if n_system_factors is None:
        n_system_factors = _split_index(space, h_s_local.shape[0], h_e_local.shape[0])
    k = n_system_factors
    if not 1 <= k < len(space):
        raise SpaceMismatchError("need at least one system and one environment factor")
    if h_se.shape[0] != space.dim:
        raise SpaceMismatchError(f"h_se side {h_se.shape[0]} != joint dimension {space.dim}")
    _require_hermitian("h_s", h_s_local)
    _require_hermitian("h_e", h_e_local)
    _require_hermitian("h_se", h_se)
    h_s = lift_block(h_s_local, 0, k, space)
    h_e = lift_block(h_e_local, k, len(space), space)
    return ModelSpec(
        space=space,
        n_system_factors=k,
        h_s=h_s,
        h_e=h_e,
        h_se=h_se,
        h_s_local=h_s_local,
        h_e_local=h_e_local,
        name=name,
        params=dict(params or {}),
    )


def _boson_block_ops(n_modes: int, n_max: int) -> list[np.ndarray]:
    """Annihilators for ``n_modes`` bosonic factors on their own joint block."""
    sub = make_space([BosonFock(n_max)] * n_modes)
    a, _ = boson_ladder(n_max)
    return [lift_block(a, i, i + 1, sub) for i in range(n_modes)]


def build_impurity_bec(
    eps: Sequence[float],
    e: Sequence[float],
    *,
    v_b: float = 0.0,
    volume: float = 1.0,
    n_max: int = DEFAULT_N_MAX,
    q: float = 0.0,
    coupling: str = "density",
) -> ModelSpec:
    """Fermionic impurity modes coupled to bosonic modes at zero momentum transfer.

    ``coupling="density"`` uses ``(1/V) N_f N_b``; ``coupling="exchange"``
    keeps the literal ``(1/V) sum c+_k3 c_k4 a+_k4 a_k3`` and needs as many
    boson modes as fermion modes. ``v_b`` scales the q=0 two-body boson term
    ``(v_b / 2V) sum a+_k1 a+_k2 a_k2 a_k1``.
    """
    if q != 0:
        raise ValueError("only the zero momentum-transfer instance (q = 0) is supported")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if volume <= 0:
        raise ValueError("volume must be positive")
    if coupling not in ("density", "exchange"):
        raise ValueError(f"unknown coupling variant {coupling!r}")
    eps = [float(x) for x in eps]
    e = [float(x) for x in e]
    m_f, m_b = len(eps), len(e)
    if m_f < 1 or m_b < 1:
        raise ValueError("need at least one fermion and one boson mode")
    if coupling == "exchange" and m_f != m_b:
        raise ValueError("exchange coupling pairs fermion and boson modes one to one")

    space = make_space([FermionModes(m_f)] + [BosonFock(n_max)] * m_b)
    cs = [fermion_ladder(k, m_f)[0] for k in range(m_f)]
    bs = _boson_block_ops(m_b, n_max)
    ns_f = [number_operator(c) for c in cs]
    ns_b = [number_operator(b) for b in bs]

    h_s_local = sum(ek * n for ek, n in zip(eps, ns_f))
    h_e_local = sum(ek * n for ek, n in zip(e, ns_b))
    if v_b != 0:
        two_body = sum(
            b1.conj().T @ b2.conj().T @ b2 @ b1 for b1 in bs for b2 in bs
        )
        h_e_local = h_e_local + v_b / (2.0 * volume) * two_body

    if coupling == "density":
        h_se = np.kron(sum(ns_f), sum(ns_b)) / volume
    else:
        h_se = sum(
            np.kron(cs[k3].conj().T @ cs[k4], bs[k4].conj().T @ bs[k3])
            for k3 in range(m_f)
            for k4 in range(m_f)
        ) / volume

    params = dict(eps=eps, e=e, v_b=v_b, volume=volume, n_max=n_max, q=0.0, coupling=coupling)
    return build_generic(
        space, h_s_local, h_e_local, h_se, n_system_factors=1, name="impurity-bec-q0", params=params
    )


@dataclass(frozen=True)
class TwoLevelLevel:
    """One system level ``j`` and its 2x2 coupling block ``<j g|H_SE|j g'>``.

    ``r12`` and ``i12`` are the real and imaginary parts of
    ``<j 1|H_SE|j 2>``; ``v11`` and ``v22`` are the diagonal elements.
    """

    eps: float
    c: complex
    r12: float
    i12: float
    v11: float = 0.0
    v22: float = 0.0

    @property
    def block(self) -> np.ndarray:
        w = complex(self.r12, self.i12)
        return np.array([[self.v11, w], [w.conjugate(), self.v22]], dtype=complex)


@dataclass(frozen=True)
class TwoLevelParams:
    levels: tuple[TwoLevelLevel, ...]
    e1: float
    e2: float
    d11: float
    d22: float
    c_damp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ValueError("need at least one system level")
        norm = sum(abs(lv.c) ** 2 for lv in self.levels)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"sum |c_j|^2 = {norm!r} != 1")
        if self.d11 < 0 or self.d22 < 0 or abs(self.d11 + self.d22 - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"invalid environment weights ({self.d11}, {self.d22})")

    @property
    def delta12(self) -> float:
        return self.e1 - self.e2

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([lv.c for lv in self.levels], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.d11, self.d22])


def build_two_level_env(params: TwoLevelParams) -> ModelSpec:
    """System levels ``eps_j`` coupled block-diagonally to a two-level environment."""
    n = len(params.levels)
    space = make_space([Levels(n), Levels(2)])
    h_s_local = np.diag([lv.eps for lv in params.levels]).astype(complex)
    h_e_local = np.diag([params.e1, params.e2]).astype(complex)
    h_se = np.zeros((2 * n, 2 * n), dtype=complex)
    for j, lv in enumerate(params.levels):
        h_se[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = lv.block
    model = build_generic(
        space, h_s_local, h_e_local, h_se, n_system_factors=1, name="two-level-env",
        params=dict(e1=params.e1, e2=params.e2, c_damp=params.c_damp),
    )
    if not classify_commutation(model).case_b:
        raise NotCaseBError("H_SE does not commute with H_S")
    return model


@dataclass(frozen=True)
class ElectronPhononParams:
    """Zero-mode electron-phonon parameters.

    ``k`` is the electron mode occupied in the state ``|k>`` used for the
    matrix elements ``<k n0|exp(-iHt)|k n0p>``.
    """

    nu: int
    eps: tuple[float, ...]
    omega0: float
    v0: float
    n_max: int = DEFAULT_N_MAX
    n0: int = 0
    n0p: int = 0
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(x) for x in self.eps))
        if self.nu < 1:
            raise ValueError("nu must be >= 1")
        if len(self.eps) != self.nu:
            raise ValueError(f"need {self.nu} single-electron energies, got {len(self.eps)}")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if self.n_max < max(2, self.n0, self.n0p):
            raise ValueError("n_max must be >= max(2, n0, n0p)")
        if min(self.n0, self.n0p) < 0:
            raise ValueError("phonon quantum numbers must be non-negative")
        if not 0 <= self.k < self.nu:
            raise ValueError(f"electron mode k={self.k} out of range")

    @property
    def coupling(self) -> float:
        """``nu * V(0)``, the coupling appearing in the closed forms."""
        return self.nu * self.v0


def build_electron_phonon_q0(params: ElectronPhononParams) -> ModelSpec:
    """``H_S = sum eps_k n_k``, ``H_E = w0 a+a``, ``H_SE = V(0)(a+ + a) sum n_k``."""
    nu = params.nu
    space = make_space([FermionModes(nu), BosonFock(params.n_max)])
    ns = [number_operator(fermion_ladder(k, nu)[0]) for k in range(nu)]
    a, ad = boson_ladder(params.n_max)
    h_s_local = sum(ek * n for ek, n in zip(params.eps, ns))
    h_e_local = params.omega0 * (ad @ a)
    h_se = params.v0 * np.kron(sum(ns), ad + a)
    return build_generic(
        space, h_s_local, h_e_local, h_se, n_system_factors=1, name="electron-phonon-q0",
        params=dict(nu=nu, eps=list(params.eps), omega0=params.omega0, v0=params.v0,
                    n_max=params.n_max),
    )


@dataclass(frozen=True, eq=False)
class InitialState:
    system_amplitudes: np.ndarray
    env_weights: np.ndarray
    rho_s: np.ndarray
    rho_e: np.ndarray

    @cached_property
    def rho0(self) -> np.ndarray:
        return np.kron(self.rho_s, self.rho_e)


def initial_state(model: ModelSpec, c: Sequence[complex], d: Sequence[float]) -> InitialState:
    """Product state ``|psi_S><psi_S| (x) sum_g d_g |g><g|`` in the H_S / H_E eigenbases."""
    c = np.asarray(c, dtype=complex).ravel()
    d = np.asarray(d, dtype=float).ravel()
    if c.shape[0] != model.dim_s:
        raise SpaceMismatchError(f"need {model.dim_s} system amplitudes, got {c.shape[0]}")
    if d.shape[0] != model.dim_e:
        raise SpaceMismatchError(f"need {model.dim_e} environment weights, got {d.shape[0]}")
    norm = float(np.vdot(c, c).real)
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"sum |c|^2 = {norm!r} != 1")
    if np.any(d < -NORMALIZATION_TOL) or abs(d.sum() - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError("environment weights must be a probability vector")
    _, vs = model.system_basis
    _, ve = model.env_basis
    psi = vs @ c
    rho_s = np.outer(psi, psi.conj())
    rho_e = (ve * d) @ ve.conj().T
    return InitialState(c, d, rho_s, rho_e)


def basis_state(model: ModelSpec, system_index: int = 0, env_index: int = 0) -> InitialState:
    c = np.zeros(model.dim_s, dtype=complex)
    c[system_index] = 1.0
    d = np.zeros(model.dim_e)
    d[env_index] = 1.0
    return initial_state(model, c, d)


def reduced_env_state(model: ModelSpec, rho: np.ndarray) -> np.ndarray:
    r = rho.reshape(model.dim_s, model.dim_e, model.dim_s, model.dim_e)
    return np.einsum("ijik->jk", r)


@dataclass(frozen=True)
class CommutationClass:
    case_a: bool
    case_b: bool
    tolerance: float
    env_commutator_norm: float
    system_commutator_norm: float


def classify_commutation(model: ModelSpec, tol: float = 1e-10) -> CommutationClass:
    """Case (a): ``[H_E, H_SE] = 0``; case (b): ``[H_S, H_SE] = 0``."""
    se = max_abs(model.h_se)
    ce = commutator(model.h_e, model.h_se)
    cs = commutator(model.h_s, model.h_se)
    return CommutationClass(
        case_a=is_zero(ce, tol, max_abs(model.h_e) * se),
        case_b=is_zero(cs, tol, max_abs(model.h_s) * se),
        tolerance=tol,
        env_commutator_norm=max_abs(ce),
        system_commutator_norm=max_abs(cs),
    )


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_amplitudes(n: int, rng: np.random.Generator) -> np.ndarray:
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return c / np.linalg.norm(c)


def random_weights(n: int, rng: np.random.Generator) -> np.ndarray:
    d = rng.random(n)
    return d / d.sum()
