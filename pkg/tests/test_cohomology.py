import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jandl.cohomology import (CohomologyError, TwistedCochain, brute_force_cohomology_order,
                              class_coordinates, cohomology, delta, finite_cohomology_order,
                              is_coboundary, is_cocycle, obstruction_o3, random_cochain,
                              smith_normal_form, twist_classes)
from jandl.group import cyclic_group, jandl_group, klein_four, z4_alternating

GROUPS = [cyclic_group(2), jandl_group(), klein_four("second"), klein_four("trivial"),
          z4_alternating(), cyclic_group(3)]


class TestCochains:
    def test_length_checked(self):
        with pytest.raises(CohomologyError):
            TwistedCochain(jandl_group(), 2, (Fraction(0),) * 3)

    def test_values_reduced_mod_one(self):
        c = TwistedCochain.from_values(jandl_group(), 1, [Fraction(3, 2), Fraction(-1, 4)])
        assert c.values == (Fraction(1, 2), Fraction(3, 4))

    def test_degree_zero_twisted_action(self):
        g = jandl_group()
        c = TwistedCochain.from_values(g, 0, [Fraction(1, 3)])
        # (delta c)(k) = eps(k) c - c
        assert delta(c).value((1,)) == Fraction(1, 3)
        assert is_cocycle(TwistedCochain.from_values(g, 0, [Fraction(1, 2)]))

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(GROUPS), st.integers(0, 2), st.integers(0, 10 ** 6))
    def test_delta_squared(self, group, degree, seed):
        c = random_cochain(group, degree, np.random.default_rng(seed))
        assert delta(delta(c)).is_zero()


class TestSmithForm:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10 ** 6))
    def test_factorization(self, m, n, seed):
        D = np.random.default_rng(seed).integers(-4, 5, size=(m, n))
        sf = smith_normal_form(D)
        S = sf.U @ D @ sf.V
        expected = np.zeros((m, n), dtype=np.int64)
        for i, s in enumerate(sf.diag):
            expected[i, i] = s
        assert np.array_equal(S, expected)
        assert np.array_equal(sf.V @ sf.V_inv, np.eye(n, dtype=np.int64))
        assert all(b % a == 0 for a, b in zip(sf.diag, sf.diag[1:]))
        assert round(abs(np.linalg.det(sf.U))) == 1
        assert sf.rank == np.linalg.matrix_rank(D)


class TestKnownGroups:
    @pytest.mark.parametrize("group, expected", [
        (cyclic_group(2), ["Q/Z", "Z/2", "0", "Z/2"]),
        (jandl_group(), ["Z/2", "0", "Z/2", "0"]),
        (klein_four("trivial"), ["Q/Z", "Z/2 + Z/2", "Z/2", "Z/2 + Z/2 + Z/2"]),
        (klein_four("second"), ["Z/2", "Z/2", "Z/2 + Z/2", "Z/2 + Z/2"]),
        (z4_alternating(), ["Z/2", "0", "Z/2", "0"]),
        (cyclic_group(3), ["Q/Z", "Z/3", "0", "Z/3"]),
    ])
    def test_describe(self, group, expected):
        assert [cohomology(group, n).describe() for n in range(4)] == expected

    @pytest.mark.parametrize("group", GROUPS)
    def test_representatives(self, group):
        for n in (1, 2, 3):
            h = cohomology(group, n)
            for rep, s in zip(h.representatives, h.invariant_factors):
                assert rep.is_normalized() and is_cocycle(rep)
                assert is_coboundary(rep) is None
                multiple = TwistedCochain(group, n, tuple(v * s for v in rep.values))
                assert is_coboundary(multiple) is not None

    def test_degree_range(self):
        with pytest.raises(CohomologyError):
            cohomology(jandl_group(), 7)


class TestCoboundaries:
    @pytest.mark.parametrize("group", GROUPS)
    def test_witness(self, group):
        rng = np.random.default_rng(3)
        for n in (1, 2, 3):
            b = random_cochain(group, n - 1, rng)
            c = delta(b)
            w = is_coboundary(c)
            assert w is not None and delta(w) == c

    def test_class_coordinates_add(self):
        g = klein_four("second")
        h = cohomology(g, 2)
        a, b = h.representatives
        assert class_coordinates(a) == (1, 0)
        assert class_coordinates(a + b) == (1, 1)
        shifted = a + delta(random_cochain(g, 1, np.random.default_rng(0), normalized=True))
        assert class_coordinates(shifted) == (1, 0)


class TestObstruction:
    def test_trivial_class_is_trivialized(self):
        g = klein_four("second")
        u = delta(random_cochain(g, 2, np.random.default_rng(1), normalized=True))
        ob = obstruction_o3(u)
        assert ob.zero and delta(ob.trivializer) == u

    def test_nontrivial_class(self):
        rep = cohomology(cyclic_group(2), 3).representatives[0]
        ob = obstruction_o3(rep)
        assert not ob.zero and ob.trivializer is None and ob.coordinates == (1,)

    def test_rejects_non_cocycle(self):
        g = klein_four("second")
        bad = random_cochain(g, 3, np.random.default_rng(5))
        assert not is_cocycle(bad)
        with pytest.raises(CohomologyError):
            obstruction_o3(bad)


class TestClassification:
    def test_twist_classes(self):
        assert len(twist_classes(jandl_group())) == 2
        assert len(twist_classes(cyclic_group(2))) == 1
        assert len(twist_classes(klein_four("second"))) == 4

    def test_twist_classes_are_distinct(self):
        classes = twist_classes(klein_four("second"))
        for a, b in itertools.combinations(classes, 2):
            assert is_coboundary(a - b) is None


class TestOracles:
    @pytest.mark.parametrize("group", [jandl_group(), cyclic_group(2), z4_alternating()])
    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_brute_force_agrees(self, group, degree):
        for N in (2, 4):
            assert finite_cohomology_order(group, degree, N) == \
                brute_force_cohomology_order(group, degree, N)

    def test_needs_prime_power(self):
        with pytest.raises(CohomologyError):
            finite_cohomology_order(jandl_group(), 1, 6)
