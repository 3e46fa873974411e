import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exchange_lab.errors import HermiticityError, SpaceMismatchError
from exchange_lab.models import random_hermitian
from exchange_lab.propagator import (
    eta_shifted_evolution,
    evolution,
    expm,
    hermitian_eig,
    propagate_density,
    unitarity_defect,
)


def taylor_expm(a, terms=60):
    # independent oracle for small-norm inputs
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


class TestEvolution:
    @given(st.integers(min_value=1, max_value=6), st.floats(-5, 5), st.integers(0, 2**31))
    def test_unitary(self, n, t, seed):
        h = random_hermitian(n, np.random.default_rng(seed))
        assert unitarity_defect(evolution(h, t)) < 1e-10

    def test_matches_taylor(self, rng):
        h = random_hermitian(4, rng, 0.5)
        np.testing.assert_allclose(evolution(h, 0.7), taylor_expm(-0.7j * h), atol=1e-12)

    def test_identity_at_zero(self, rng):
        u = evolution(random_hermitian(3, rng), 0.0)
        assert np.array_equal(u, np.eye(3))

    def test_group_property(self, rng):
        h = random_hermitian(5, rng)
        np.testing.assert_allclose(evolution(h, 0.4) @ evolution(h, 1.1), evolution(h, 1.5), atol=1e-12)

    def test_decomposition_reused(self, rng):
        h = random_hermitian(3, rng)
        dec = hermitian_eig(h)
        np.testing.assert_allclose(evolution(dec, 2.0), evolution(h, 2.0), atol=1e-14)

    def test_rejects_non_hermitian(self):
        with pytest.raises(HermiticityError):
            evolution(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)

    def test_rejects_non_square(self):
        with pytest.raises(SpaceMismatchError):
            hermitian_eig(np.zeros((2, 3)))


class TestExpm:
    def test_against_taylor(self, rng):
        a = 0.3 * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        np.testing.assert_allclose(expm(a), taylor_expm(a), atol=1e-13)

    def test_scalar(self):
        assert expm(np.array([[1.0]]))[0, 0] == pytest.approx(math.e)

    def test_nonfinite(self):
        with pytest.raises(FloatingPointError):
            expm(np.array([[np.nan]]))

    def test_overflow(self):
        with pytest.raises(OverflowError):
            expm(np.array([[1e4]]))


class TestCountingField:
    def test_eta_zero_is_plain(self, rng):
        h = random_hermitian(4, rng)
        np.testing.assert_array_equal(eta_shifted_evolution(h, np.eye(4), 0.0, 1.2), evolution(h, 1.2))

    def test_shift_conjugates(self, rng):
        h, he = random_hermitian(3, rng), random_hermitian(3, rng)
        u = eta_shifted_evolution(h, he, 0.8, 1.3)
        phase = taylor_expm(0.8j * he)
        np.testing.assert_allclose(u, phase @ evolution(h, 1.3) @ phase.conj().T, atol=1e-12)

    def test_density_trace_preserved(self, rng):
        h = random_hermitian(4, rng)
        rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
        out = propagate_density(rho, evolution(h, 3.0))
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(SpaceMismatchError):
            propagate_density(rho, np.eye(3))
