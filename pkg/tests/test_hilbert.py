import numpy as np
import pytest
from hypothesis import given, strategies as st

from exchange_lab.errors import SpaceMismatchError
from exchange_lab.hilbert import (
    BosonFock,
    FermionModes,
    Levels,
    anticommutator,
    boson_ladder,
    commutator,
    fermion_ladder,
    is_zero,
    lift,
    lift_block,
    make_space,
    number_operator,
    op_norm,
)


class TestSpaces:
    def test_dimensions(self):
        sp = make_space([FermionModes(2), BosonFock(3), Levels(5)])
        assert sp.dims == (4, 4, 5)
        assert sp.dim == 80
        assert len(sp) == 3

    @pytest.mark.parametrize("factor", [Levels(0), BosonFock(-1), FermionModes(0)])
    def test_invalid_factor(self, factor):
        with pytest.raises(ValueError):
            make_space([factor])

    def test_empty_space(self):
        with pytest.raises(ValueError):
            make_space([])


class TestLift:
    def test_ordering_first_factor_slowest(self):
        sp = make_space([Levels(2), Levels(3)])
        a = np.diag([1.0, 2.0])
        b = np.diag([10.0, 20.0, 30.0])
        np.testing.assert_allclose(lift(a, 0, sp), np.kron(a, np.eye(3)))
        np.testing.assert_allclose(lift(b, 1, sp), np.kron(np.eye(2), b))

    def test_lifts_on_different_factors_commute(self, rng):
        sp = make_space([Levels(2), Levels(3), Levels(2)])
        a = lift(rng.normal(size=(2, 2)), 0, sp)
        b = lift(rng.normal(size=(2, 2)), 2, sp)
        assert np.max(np.abs(commutator(a, b))) < 1e-14

    def test_block(self):
        sp = make_space([Levels(2), Levels(2), Levels(3)])
        op = np.arange(16.0).reshape(4, 4)
        np.testing.assert_allclose(lift_block(op, 0, 2, sp), np.kron(op, np.eye(3)))

    def test_wrong_side(self):
        sp = make_space([Levels(2), Levels(3)])
        with pytest.raises(SpaceMismatchError):
            lift(np.eye(3), 0, sp)
        with pytest.raises(SpaceMismatchError):
            lift(np.eye(2), 2, sp)


class TestBoson:
    @given(st.integers(min_value=1, max_value=12))
    def test_truncated_commutator(self, n_max):
        a, ad = boson_ladder(n_max)
        expected = np.eye(n_max + 1)
        expected[n_max, n_max] = -n_max
        np.testing.assert_allclose(commutator(a, ad), expected, atol=1e-12)

    def test_number_operator(self):
        a, _ = boson_ladder(5)
        np.testing.assert_allclose(np.diag(number_operator(a)).real, np.arange(6), atol=1e-14)

    def test_ladder_action(self):
        a, ad = boson_ladder(4)
        ket2 = np.eye(5)[2]
        np.testing.assert_allclose(ad @ ket2, np.sqrt(3) * np.eye(5)[3])
        np.testing.assert_allclose(a @ ket2, np.sqrt(2) * np.eye(5)[1])
        np.testing.assert_allclose(ad @ np.eye(5)[4], 0)


class TestFermion:
    @given(st.integers(min_value=1, max_value=4))
    def test_canonical_anticommutation(self, m):
        ops = [fermion_ladder(j, m) for j in range(m)]
        eye = np.eye(2**m)
        for i, (ci, cdi) in enumerate(ops):
            for j, (cj, cdj) in enumerate(ops):
                np.testing.assert_allclose(anticommutator(ci, cdj), eye * (i == j), atol=1e-14)
                np.testing.assert_allclose(anticommutator(ci, cj), 0, atol=1e-14)

    def test_jordan_wigner_string(self):
        z = np.diag([1.0, -1.0])
        low = np.array([[0.0, 1.0], [0.0, 0.0]])
        c, _ = fermion_ladder(1, 3)
        np.testing.assert_allclose(c, np.kron(np.kron(z, low), np.eye(2)))

    def test_bad_mode(self):
        with pytest.raises(IndexError):
            fermion_ladder(3, 3)


class TestHelpers:
    def test_commutator_shape_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            commutator(np.eye(2), np.eye(3))

    def test_is_zero_scaled(self):
        assert is_zero(np.full((2, 2), 5e-11), 1e-10)
        assert not is_zero(np.full((2, 2), 5e-10), 1e-10)
        assert is_zero(np.full((2, 2), 5e-10), 1e-10, scale=10.0)
        with pytest.raises(ValueError):
            is_zero(np.zeros((1, 1)), -1.0)

    def test_op_norm(self):
        assert op_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)
