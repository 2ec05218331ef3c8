from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jandl.cohomology import TwistedCochain, twist_classes
from jandl.group import jandl_group
from jandl.localdata import (DatumError, GaugeDatum, apply_gauge, apply_twist, check_complete,
                             compose_gauge, generate_pure_gauge, m_close, m_scale,
                             random_admissible, random_gauge, subdivide, trivial_datum,
                             twist_sign, validate)
from jandl.phase import Phase
from jandl.surface import MODELS

from conftest import surface

HALF = Phase(Fraction(1, 2))


def _tables_close(a, b):
    ta, tb = a.tables(), b.tables()
    for name in ta:
        if set(ta[name]) != set(tb[name]):
            return False
        for key, v in ta[name].items():
            if not m_close(v, tb[name][key], 1e-9):
                return False
    return True


def _shift(d, table, key, by=Phase(Fraction(1, 12))):
    new = dict(d.tables()[table])
    v = new[key]
    new[key] = v * by if isinstance(v, Phase) else m_scale(v, by)
    return d.with_tables(**{table: new})


class TestGenerator:
    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(MODELS), st.integers(0, 10 ** 6), st.integers(1, 3),
           st.booleans(), st.booleans())
    def test_output_is_clean(self, model, seed, rank, twisted, background):
        dc = surface(model)
        d = generate_pure_gauge(dc, seed, rank=rank, twist=HALF if twisted else None,
                                background=background)
        check_complete(d, dc)
        assert validate(d, dc) == []

    def test_deterministic(self):
        dc = surface("klein")
        a, b = generate_pure_gauge(dc, 5), generate_pure_gauge(dc, 5)
        assert a.tables() == b.tables()

    def test_trivial_datum_is_clean(self):
        for model in MODELS:
            dc = surface(model)
            adm = random_admissible(dc, np.random.default_rng(0))
            assert validate(trivial_datum(dc, adm, 2), dc) == []


class TestCompleteness:
    def test_missing_entry(self):
        dc = surface("mobius")
        d = generate_pure_gauge(dc, 0)
        tab = dict(d.face_b)
        tab.pop(next(iter(tab)))
        with pytest.raises(DatumError):
            check_complete(d.with_tables(face_b=tab), dc)

    def test_extra_entry(self):
        dc = surface("mobius")
        d = generate_pure_gauge(dc, 0)
        tab = dict(d.f_v)
        tab[(0, 999)] = Phase(0)
        with pytest.raises(DatumError):
            check_complete(d.with_tables(f_v=tab), dc)


class TestValidatorReports:
    # every table is tied to its sigma-partner by one relation
    PARTNER = {"face_b": "R4", "edge_a": "R5", "g_v": "R6", "edge_pi": "R7", "chi_v": "R8",
               "f_v": "R9", "edge_t": "R10", "g_mod": "R11", "h_mod": "R12"}

    @pytest.mark.parametrize("table", sorted(PARTNER))
    @pytest.mark.parametrize("rank", [1, 2])
    def test_single_entry_names_its_relation(self, table, rank):
        dc = surface("mobius")
        d = generate_pure_gauge(dc, 3, rank=rank, background=True)
        key = sorted(d.tables()[table])[0]
        bad = validate(_shift(d, table, key), dc)
        assert self.PARTNER[table] in {v.relation for v in bad}

    def test_cocycle_relation_fires_with_four_indices(self):
        dc = surface("torus")
        d = generate_pure_gauge(dc, 1, n_labels=3)
        key = next(k for k in sorted(d.g_v) if len(d.adm.vertex[k[0]]) >= 4)
        rels = {v.relation for v in validate(_shift(d, "g_v", key), dc)}
        assert {"R3", "R6"} <= rels

    def test_violation_json(self):
        dc = surface("disk")
        d = generate_pure_gauge(dc, 0)
        v = validate(_shift(d, "f_v", sorted(d.f_v)[0]), dc)[0]
        js = v.to_json()
        assert set(js) == {"relation", "cell", "indices"}


class TestGauge:
    @pytest.mark.parametrize("model", MODELS)
    @pytest.mark.parametrize("rank", [1, 3])
    def test_gauge_preserves_cleanliness(self, model, rank):
        dc = surface(model)
        rng = np.random.default_rng(7)
        d = generate_pure_gauge(dc, 7, rank=rank, background=True)
        dg = apply_gauge(d, random_gauge(dc, d.adm, rng, rank), dc)
        assert validate(dg, dc) == []

    @pytest.mark.parametrize("rank", [1, 2])
    def test_composition(self, rank):
        dc = surface("annulus")
        rng = np.random.default_rng(11)
        d = generate_pure_gauge(dc, 11, rank=rank, background=True)
        g1, g2 = random_gauge(dc, d.adm, rng, rank), random_gauge(dc, d.adm, rng, rank)
        step = apply_gauge(apply_gauge(d, g1, dc), g2, dc)
        once = apply_gauge(d, compose_gauge(g1, g2), dc)
        assert _tables_close(step, once)

    def test_empty_gauge_is_identity(self):
        dc = surface("rp2")
        d = generate_pure_gauge(dc, 2)
        assert apply_gauge(d, GaugeDatum(), dc).tables() == d.tables()


class TestTwist:
    def test_sign_from_cocycle(self):
        trivial, nontrivial = twist_classes(jandl_group())
        assert twist_sign(trivial).is_one()
        assert twist_sign(nontrivial) == HALF
        assert twist_sign(None).is_one()

    def test_rejects_non_cocycle(self):
        bad = TwistedCochain.from_values(jandl_group(), 2, [0, 0, 0, Fraction(1, 3)])
        with pytest.raises(ValueError):
            twist_sign(bad)
        with pytest.raises(ValueError):
            twist_sign(Phase(Fraction(1, 3)))

    @pytest.mark.parametrize("model", MODELS)
    def test_twist_keeps_relations(self, model):
        dc = surface(model)
        d = generate_pure_gauge(dc, 4, rank=2, background=True)
        assert validate(apply_twist(d, dc, HALF), dc) == []


class TestSubdivide:
    @pytest.mark.parametrize("model", MODELS)
    @pytest.mark.parametrize("rank", [1, 2])
    def test_refined_datum_is_clean(self, model, rank):
        dc = surface(model)
        d = generate_pure_gauge(dc, 9, rank=rank, background=True)
        for e in range(dc.n_edges):
            try:
                d2, dc2 = subdivide(d, dc, e, seed=e)
            except ValueError:
                continue
            check_complete(d2, dc2)
            assert validate(d2, dc2) == []
