"""Acceptance suite: one test class per criterion.

Run on its own with ``pytest tests/test_acceptance.py -v``; the terminal
summary lists one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from jandl.cohomology import (brute_force_cohomology_order, coboundary_matrix, cohomology,
                              delta, finite_cohomology_order, orders_from_finite, twist_classes,
                              TwistedCochain)
from jandl.descent import canonical_pullback, orbit_space, quotient, random_flat_datum, validate_flat
from jandl.group import cyclic_group, jandl_group, klein_four, product_group, z4_alternating
from jandl.holonomy import (holonomy, holonomy_double, holonomy_oriented,
                            square, sweep, values_agree)
from jandl.localdata import (apply_gauge, generate_pure_gauge, m_scale, random_gauge, subdivide,
                             validate)
from jandl.phase import Phase
from jandl.surface import SurfaceError, enumerate_choices, section_choice

from conftest import surface

SURFACES = ("mobius", "klein", "rp2", "annulus", "torus", "disk")
N_DATA = 25
N_GAUGES = 10


def criterion(n, title):
    return pytest.mark.criterion(n, title)


@criterion(1, "choice independence, 25 pure-gauge data per surface, exact")
@pytest.mark.parametrize("model", SURFACES)
class TestChoiceIndependence:
    def test_all_choices_agree(self, model):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, background=True)
            res = sweep(d, dc, cap=2 ** 14, samples=1000, seed=seed)
            assert res.invariant, f"{model} seed {seed}: holonomy depends on the choice"
            assert res.count >= min(1000, res.count)
            assert isinstance(res.value, Phase)


@criterion(2, "gauge invariance, 25 data x 10 gauges, exact at rank 1, 1e-9 at rank 2, 3")
@pytest.mark.parametrize("model", SURFACES)
class TestGaugeInvariance:
    def test_rank_one_exact(self, model):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, background=True)
            rng = np.random.default_rng(seed)
            choices = list(enumerate_choices(dc, d.adm, cap=1, samples=3, seed=seed))
            ref = [holonomy(d, dc, ch) for ch in choices]
            for _ in range(N_GAUGES):
                dg = apply_gauge(d, random_gauge(dc, d.adm, rng), dc)
                assert [holonomy(dg, dc, ch) for ch in choices] == ref

    @pytest.mark.parametrize("rank", [2, 3])
    def test_rank_n_within_tolerance(self, model, rank):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, rank=rank, background=True)
            rng = np.random.default_rng(1000 + seed)
            choices = list(enumerate_choices(dc, d.adm, cap=1, samples=2, seed=seed))
            ref = [holonomy(d, dc, ch) for ch in choices]
            for _ in range(N_GAUGES):
                dg = apply_gauge(d, random_gauge(dc, d.adm, rng, rank), dc)
                for ch, r in zip(choices, ref):
                    assert values_agree(holonomy(dg, dc, ch), r, 1e-9)


@criterion(3, "square law against the oriented double")
@pytest.mark.parametrize("model", SURFACES)
class TestSquareLaw:
    def test_rank_one_every_choice(self, model):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, background=True)
            res = sweep(d, dc, cap=2 ** 14, samples=1000, seed=seed)
            assert res.square_law
            assert square(res.value) == holonomy_double(d, dc)

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_gauged_data(self, model, rank):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, rank=rank, background=True)
            rng = np.random.default_rng(2000 + seed)
            ch = next(enumerate_choices(dc, d.adm, cap=1, samples=1, seed=seed))
            for _ in range(N_GAUGES):
                dg = apply_gauge(d, random_gauge(dc, d.adm, rng, rank), dc)
                v, dbl = holonomy(dg, dc, ch), holonomy_double(dg, dc)
                if rank == 1:
                    assert square(v) == dbl
                else:
                    assert values_agree(square(v), dbl, 1e-7)


@criterion(4, "reduction to the oriented formula, empty boundary factor on closed surfaces")
class TestReductions:
    @pytest.mark.parametrize("model", ["torus", "annulus", "disk"])
    @pytest.mark.parametrize("rank", [1, 2])
    def test_section_choice_matches_oriented(self, model, rank):
        dc = surface(model)
        for seed in range(N_DATA):
            d = generate_pure_gauge(dc, seed, rank=rank, background=True)
            for sheet in (dc.global_section(), tuple(1 - s for s in dc.global_section())):
                ch = section_choice(dc, d.adm, sheet)
                ours = holonomy(d, dc, ch)
                oriented = holonomy_oriented(d, dc, sheet, ch)
                if rank == 1:
                    assert ours == oriented
                else:
                    assert values_agree(ours, oriented, 0.0)

    @pytest.mark.parametrize("model", ["torus", "klein", "rp2", "sphere"])
    def test_closed_surfaces_have_no_boundary_factor(self, model):
        dc = surface(model)
        assert dc.boundary_components == ()
        d = generate_pure_gauge(dc, 0, rank=2, background=True)
        ch = next(enumerate_choices(dc, d.adm, cap=1, samples=1))
        assert isinstance(holonomy(d, dc, ch), Phase)


def _refine(d, dc, rng, steps):
    for step in range(steps):
        for e in rng.permutation(dc.n_edges):
            try:
                d, dc = subdivide(d, dc, int(e), seed=int(rng.integers(1 << 30)))
                break
            except SurfaceError:
                continue
        else:
            raise AssertionError("no edge can be bisected")
        yield d, dc


@criterion(5, "refinement invariance under 5 successive subdivisions")
@pytest.mark.parametrize("model", SURFACES)
class TestRefinement:
    def test_five_subdivisions(self, model):
        dc0 = surface(model)
        for seed in range(5):
            d0 = generate_pure_gauge(dc0, seed, background=True)
            ref = sweep(d0, dc0, samples=200, seed=seed).value
            rng = np.random.default_rng(seed)
            for d, dc in _refine(d0, dc0, rng, 5):
                assert validate(d, dc) == []
                res = sweep(d, dc, cap=2 ** 10, samples=100, seed=seed)
                assert res.invariant and res.value == ref


def _perturb(d, rng):
    tabs = d.tables()
    names = sorted(k for k, v in tabs.items() if v)
    name = names[rng.integers(len(names))]
    keys = sorted(tabs[name])
    key = keys[rng.integers(len(keys))]
    shift = Phase(Fraction(int(rng.integers(1, 12)), 12))
    new = dict(tabs[name])
    v = new[key]
    new[key] = v * shift if isinstance(v, Phase) else m_scale(v, shift)
    return d.with_tables(**{name: new}), name


@criterion(6, "validator soundness, 1000 single-entry perturbations")
class TestValidatorSoundness:
    def test_generator_output_is_clean(self):
        for model, seed, rank, twist, bg in itertools.product(
                SURFACES + ("sphere",), range(4), (1, 2), (None, 1), (False, True)):
            dc = surface(model)
            tw = twist_classes(jandl_group())[twist] if twist else None
            d = generate_pure_gauge(dc, seed, rank=rank, twist=tw, background=bg)
            assert validate(d, dc) == []

    def test_every_perturbation_is_reported(self):
        rng = np.random.default_rng(6)
        missed = []
        for trial in range(1000):
            model = SURFACES[trial % len(SURFACES)]
            dc = surface(model)
            d = generate_pure_gauge(dc, trial, rank=1 if trial % 3 else 2, background=True)
            assert validate(d, dc) == []
            bad, name = _perturb(d, rng)
            if not validate(bad, dc):
                missed.append((model, trial, name))
        assert missed == []


GROUPS_UP_TO_8 = [
    cyclic_group(2), jandl_group(), cyclic_group(4), z4_alternating(),
    klein_four("second"), klein_four("trivial"), cyclic_group(3),
    cyclic_group(6, [1, -1] * 3), cyclic_group(8, [1, -1] * 4),
    product_group(cyclic_group(2), cyclic_group(4), [1, 1, 1, 1, -1, -1, -1, -1]),
    product_group(klein_four("trivial"), cyclic_group(2), [1, -1] * 4),
]


@criterion(7, "twisted group cohomology against the finite-coefficient oracle")
class TestCohomology:
    @pytest.mark.parametrize("group, degree, expected", [
        (cyclic_group(2), 1, (2,)),
        (jandl_group(), 2, (2,)),
        (jandl_group(), 3, ()),
        (cyclic_group(2), 3, (2,)),
        (klein_four("second"), 2, (2, 2)),
        (klein_four("second"), 3, (2, 2)),
    ])
    def test_listed_groups(self, group, degree, expected):
        h = cohomology(group, degree)
        assert h.divisible_rank == 0
        assert h.invariant_factors == expected

    @pytest.mark.parametrize("group", [cyclic_group(2), jandl_group(), klein_four("second"),
                                       klein_four("trivial"), z4_alternating()])
    def test_snf_matches_modular_oracle(self, group):
        N = 32
        finite = [finite_cohomology_order(group, n, N) for n in range(4)]
        orders = orders_from_finite(group, 3, finite)
        for n in (1, 2, 3):
            assert cohomology(group, n).order == orders[n - 1]

    @pytest.mark.parametrize("group, degree", [
        (jandl_group(), 1), (jandl_group(), 2), (jandl_group(), 3), (cyclic_group(2), 3),
        (klein_four("second"), 1), (klein_four("second"), 2),
    ])
    def test_modular_oracle_matches_brute_force(self, group, degree):
        for N in (2, 4):
            assert finite_cohomology_order(group, degree, N) == \
                brute_force_cohomology_order(group, degree, N)

    @pytest.mark.parametrize("group", GROUPS_UP_TO_8, ids=lambda g: f"order{g.order}")
    def test_delta_squared_vanishes_on_basis(self, group):
        for n in range(3):
            first = coboundary_matrix(group, n, normalized=False)
            second = coboundary_matrix(group, n + 1, normalized=False)
            assert not np.any(second @ first)
        for n in range(2):
            for tup in itertools.product(group.elements, repeat=n):
                basis = TwistedCochain.from_values(group, n, {tup: Fraction(1, 7)})
                assert delta(delta(basis)).is_zero()


@criterion(8, "twist sensitivity on the Klein bottle")
class TestTwistSensitivity:
    def test_two_twist_classes_differ_by_half(self):
        dc = surface("klein")
        classes = twist_classes(jandl_group())
        assert len(classes) == 2
        for seed in range(5):
            vals = []
            for tw in classes:
                d = generate_pure_gauge(dc, seed, twist=tw, background=True)
                res = sweep(d, dc, cap=2 ** 14, samples=1000, seed=seed)
                assert res.invariant
                vals.append(res.value)
            assert vals[1] / vals[0] == Phase(Fraction(1, 2)), (
                f"seed {seed}: twisted {vals[1]} vs untwisted {vals[0]}")


@criterion(9, "descent: clean quotients and exact round trips")
class TestDescent:
    def test_quotients_are_clean(self):
        v4 = klein_four("second")
        layouts = [([[0]], [2]), ([[0, 1]], [4]), ([[0], [0, 1]], [1, 2])]
        for seed in range(100):
            stabs, labels = layouts[seed % len(layouts)]
            space = orbit_space(v4, stabs, labels)
            assert space.indices.size == 8
            d = random_flat_datum(space, seed, rank=(1, 2, 0)[seed % 3])
            assert validate_flat(d) == []
            q, _ = quotient(d)
            assert q.group.order == 2 and q.space.indices.size == 8 // 2
            assert validate_flat(q) == []

    def test_round_trip_is_exact(self):
        v4, z2 = klein_four("second"), jandl_group()
        layouts = [([[0, 1]], [3]), ([[0], [0, 1]], [1, 1])]
        twist = twist_classes(z2)[1]
        for seed in range(100):
            stabs, labels = layouts[seed % len(layouts)]
            space = orbit_space(z2, stabs, labels)
            assert space.indices.size == 3
            if seed % 4 == 3:
                dq = random_flat_datum(space, seed, twist=twist)
            else:
                dq = random_flat_datum(space, seed, rank=seed % 3)
            up = canonical_pullback(dq, v4)
            assert validate_flat(up) == []
            back, _ = quotient(up)
            assert back.tables_equal(dq)
