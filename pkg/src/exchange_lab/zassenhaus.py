"""Zassenhaus splitting of ``exp(X + Y)`` into ordered exponential factors.

``exp(X + Y) = exp(X) exp(Y) exp(-c2/2!) exp(-c3/3!) exp(-c4/4!) ...``

The exponents ``c_n`` are integer combinations of nested commutators of
total degree ``n``. Two tables are available for ``c4``:

* ``"standard"``: ``[[[X,Y],X],X] + 3[[[X,Y],X],Y] + 3[[[X,Y],Y],Y]``, which
  makes the order-4 product accurate to fifth order;
* ``"printed"``: ``c3 + 3[[[X,Y],Y],Y] + [[[X,Y],X],Y] + [[X,Y],[X,Y]]``.
  It carries a degree-3 piece, so the order-4 product is only third-order
  accurate; kept for comparison.

``c2`` and ``c3`` are the same in both tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NotCaseBError, SpaceMismatchError
from .hilbert import commutator, max_abs
from .models import ModelSpec, classify_commutation
from .propagator import evolution, expm

Bracket = Union[str, tuple["Bracket", "Bracket"]]

SUPPORTED_ORDERS = (2, 3, 4)
VARIANTS = ("standard", "printed")
SCALAR_TOL = 1e-10


def _letters(b: Bracket) -> int:
    return 1 if isinstance(b, str) else _letters(b[0]) + _letters(b[1])


def _render(b: Bracket) -> str:
    return b if isinstance(b, str) else f"[{_render(b[0])},{_render(b[1])}]"


def _well_formed(b: Bracket) -> bool:
    if isinstance(b, str):
        return b in ("X", "Y")
    return isinstance(b, tuple) and len(b) == 2 and all(_well_formed(x) for x in b)


@dataclass(frozen=True)
class CommutatorWord:
    """``coefficient * bracket`` where ``bracket`` nests the letters X and Y."""

    bracket: Bracket
    coefficient: int = 1

    def __post_init__(self):
        if not _well_formed(self.bracket):
            raise ValueError(f"malformed bracket {self.bracket!r}")
        if self.order < 2:
            raise ValueError("a commutator word has at least two letters")

    @property
    def order(self) -> int:
        return _letters(self.bracket)

    def __str__(self) -> str:
        return f"{self.coefficient}*{_render(self.bracket)}"


XY = ("X", "Y")
C2 = (CommutatorWord(XY, 1),)
C3 = (CommutatorWord((XY, "Y"), 2), CommutatorWord((XY, "X"), 1))
C4_STANDARD = (
    CommutatorWord(((XY, "X"), "X"), 1),
    CommutatorWord(((XY, "X"), "Y"), 3),
    CommutatorWord(((XY, "Y"), "Y"), 3),
)
C4_PRINTED = C3 + (
    CommutatorWord(((XY, "Y"), "Y"), 3),
    CommutatorWord(((XY, "X"), "Y"), 1),
    CommutatorWord((XY, XY), 1),
)


@dataclass(frozen=True)
class ZassenhausExpansion:
    max_order: int
    terms: tuple[tuple[int, tuple[CommutatorWord, ...]], ...]
    variant: str = "standard"

    def words(self, n: int) -> tuple[CommutatorWord, ...]:
        for order, words in self.terms:
            if order == n:
                return words
        raise KeyError(n)


def _check_order(max_order: int) -> None:
    if max_order not in SUPPORTED_ORDERS:
        raise ValueError(f"max_order must be one of {SUPPORTED_ORDERS}, got {max_order!r}")


def zassenhaus_terms(max_order: int, variant: str = "standard") -> ZassenhausExpansion:
    _check_order(max_order)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    table = {2: C2, 3: C3, 4: C4_STANDARD if variant == "standard" else C4_PRINTED}
    return ZassenhausExpansion(
        max_order, tuple((n, table[n]) for n in range(2, max_order + 1)), variant
    )


def _same_space(x: np.ndarray, y: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape != y.shape:
        raise SpaceMismatchError(f"X {x.shape} and Y {y.shape} are not on one space")


def _eval_bracket(b: Bracket, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if isinstance(b, str):
        return x if b == "X" else y
    return commutator(_eval_bracket(b[0], x, y), _eval_bracket(b[1], x, y))


def evaluate_word(word: CommutatorWord, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    _same_space(x, y)
    return word.coefficient * _eval_bracket(word.bracket, x, y)


def evaluate_term(words, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return sum(evaluate_word(w, x, y) for w in words)


def scalar_commutator(x: np.ndarray, y: np.ndarray, tol: float = SCALAR_TOL) -> complex | None:
    """``kappa`` if ``[X, Y] = kappa * I`` within ``tol`` (relative), else None."""
    c = commutator(x, y)
    n = c.shape[0]
    kappa = np.trace(c) / n
    residue = max_abs(c - kappa * np.eye(n))
    if residue <= tol * max(1.0, max_abs(x) * max_abs(y)):
        return complex(kappa)
    return None


def bch_closed_form(x: np.ndarray, y: np.ndarray, tol: float = SCALAR_TOL) -> np.ndarray:
    """``exp(X) exp(Y) exp(-[X,Y]/2)`` when ``[X,Y]`` commutes with X and Y.

    Raises ``ValueError`` when the commutator is not central; a scalar
    commutator ``kappa * I`` reduces the last factor to ``exp(-kappa/2)``.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    _same_space(x, y)
    kappa = scalar_commutator(x, y, tol)
    base = expm(x) @ expm(y)
    if kappa is not None:
        return base * np.exp(-kappa / 2)
    c = commutator(x, y)
    scale = max(1.0, max_abs(x) * max_abs(y) * max(max_abs(x), max_abs(y)))
    if max_abs(commutator(x, c)) > tol * scale or max_abs(commutator(y, c)) > tol * scale:
        raise ValueError("[X, Y] is not central; the closed form does not apply")
    return base @ expm(-c / 2)


def zassenhaus_apply(
    x: np.ndarray, y: np.ndarray, max_order: int, variant: str = "standard"
) -> np.ndarray:
    """Left-to-right product ``exp(X) exp(Y) prod_{n=2..max_order} exp(-c_n/n!)``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    _same_space(x, y)
    exp_ = zassenhaus_terms(max_order, variant)
    out = expm(x) @ expm(y)
    for n, words in exp_.terms:
        out = out @ expm(-evaluate_term(words, x, y) / math.factorial(n))
    kappa = scalar_commutator(x, y)
    if kappa is not None:
        closed = expm(x) @ expm(y) * np.exp(-kappa / 2)
        if max_abs(closed - out) > 1e-10 * max(1.0, max_abs(closed)):
            raise ArithmeticError("scalar-commutator closed form disagrees with the product")
        return closed
    return out


def truncation_errors(p: np.ndarray, q: np.ndarray, times, orders=SUPPORTED_ORDERS,
                      variant: str = "standard") -> np.ndarray:
    """``max|product - expm(X+Y)|`` for ``X = -i t P``, ``Y = -i t Q``.

    Returns an array of shape ``(len(times), len(orders))``.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    out = np.empty((len(times), len(orders)))
    for i, t in enumerate(times):
        x, y = -1j * t * p, -1j * t * q
        exact = expm(x + y)
        for k, order in enumerate(orders):
            out[i, k] = max_abs(zassenhaus_apply(x, y, order, variant) - exact)
    return out


def fitted_slopes(times, errors: np.ndarray, floor: float = 1e-14, min_points: int = 3) -> np.ndarray:
    """Least-squares log-log slope per column.

    Points at or below ``floor`` are round-off and are left out of the fit;
    a column keeping fewer than ``min_points`` points gets NaN.
    """
    logt = np.log(np.asarray(times, dtype=float))
    slopes = np.full(errors.shape[1], np.nan)
    for k in range(errors.shape[1]):
        keep = errors[:, k] > floor
        if keep.sum() >= min_points:
            slopes[k] = np.polyfit(logt[keep], np.log(errors[keep, k]), 1)[0]
    return slopes


def electron_phonon_factorization(model: ModelSpec, t: float) -> np.ndarray:
    """``exp(-i H_S t) exp(-i (H_E + H_SE) t)``, exact when ``[H_S, H_SE] = 0``."""
    if not classify_commutation(model).case_b:
        raise NotCaseBError("factorization needs [H_S, H_SE] = 0")
    if t == 0:
        return np.eye(model.dim, dtype=complex)
    return evolution(model.h_s, t) @ expm(-1j * t * (model.h_e + model.h_se))
