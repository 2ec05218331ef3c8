from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jandl.phase import (Phase, as_unitary, dagger, phase_product, phase_to_unitary,
                         random_unitary, unitarity_defect, unitary_from_json,
                         unitary_path_product, unitary_to_json)

angles = st.fractions(max_denominator=60)
phases = angles.map(Phase)


class TestPhase:
    def test_reduced_into_unit_interval(self):
        assert Phase(Fraction(5, 4)) == Phase(Fraction(1, 4))
        assert Phase(Fraction(-1, 3)).angle == Fraction(2, 3)
        assert Phase(7).is_one()

    def test_text_round_trip(self):
        p = Phase(Fraction(5, 12))
        assert p.to_text() == "5/12"
        assert Phase.parse("5/12") == p
        assert Phase.parse("0/1") == Phase.one()
        assert Phase.parse("3") == Phase.one()

    def test_complex_value(self):
        assert complex(Phase(Fraction(1, 4))) == pytest.approx(1j)
        assert complex(Phase(Fraction(1, 2))) == pytest.approx(-1)

    def test_immutable(self):
        with pytest.raises(AttributeError):
            Phase(0).num = 3

    @given(phases, phases, phases)
    def test_group_laws(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * a.inv() == Phase.one()
        assert a / b == a * b.inv()
        assert a.conj() == a.inv()

    @given(phases, st.integers(-5, 5))
    def test_power(self, a, k):
        assert a ** k == Phase(a.angle * k)

    @given(st.lists(phases, max_size=8))
    def test_product_matches_angle_sum(self, ps):
        assert phase_product(ps) == Phase(sum((p.angle for p in ps), Fraction(0)))

    @given(phases, phases)
    def test_equality_is_hash_consistent(self, a, b):
        if a == b:
            assert hash(a) == hash(b)


class TestUnitaries:
    def test_random_unitary_is_unitary(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3, 5):
            assert unitarity_defect(random_unitary(n, rng)) < 1e-12

    def test_as_unitary_rejects(self):
        with pytest.raises(ValueError):
            as_unitary([[1, 1], [0, 1]])
        with pytest.raises(ValueError):
            as_unitary([1, 0])
        assert as_unitary([[0, 1], [1, 0]]).dtype == complex

    def test_path_product_order(self):
        rng = np.random.default_rng(1)
        a, b = random_unitary(2, rng), random_unitary(2, rng)
        assert np.allclose(unitary_path_product([a, b]), a @ b)
        with pytest.raises(ValueError):
            unitary_path_product([])
        with pytest.raises(ValueError):
            unitary_path_product([a, random_unitary(3, rng)])

    def test_dagger_inverts(self):
        u = random_unitary(3, np.random.default_rng(2))
        assert np.allclose(dagger(u) @ u, np.eye(3))

    def test_phase_to_unitary(self):
        assert np.allclose(phase_to_unitary(Phase(Fraction(1, 2)), 2), -np.eye(2))

    def test_json_round_trip(self):
        u = random_unitary(2, np.random.default_rng(3))
        assert np.array_equal(unitary_from_json(unitary_to_json(u)), u)
