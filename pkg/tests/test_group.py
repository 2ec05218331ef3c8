import itertools

import pytest

from jandl.group import (GroupError, IndexAction, OrientifoldGroup, cyclic_group, jandl_group,
                         klein_four, product_group, quotient_group, regular_action,
                         z4_alternating)


class TestOrientifoldGroup:
    def test_jandl_group(self):
        g = jandl_group()
        k = g.element("k")
        assert g.order == 2 and g.eps(k) == -1 and g.mul(k, k) == g.identity
        assert g.kernel() == [0] and g.odd() == [1]

    @pytest.mark.parametrize("g", [cyclic_group(6), z4_alternating(), klein_four("first"),
                                   product_group(cyclic_group(2), cyclic_group(3))])
    def test_axioms(self, g):
        for a in g.elements:
            assert g.mul(a, g.inv(a)) == g.identity
        for a, b in itertools.product(g.elements, repeat=2):
            assert g.eps(g.mul(a, b)) == g.eps(a) * g.eps(b)

    def test_rejects_bad_tables(self):
        with pytest.raises(GroupError):
            OrientifoldGroup(("a", "b"), ((0, 1), (1, 1)), (1, 1))
        with pytest.raises(GroupError):
            OrientifoldGroup(("1", "k"), ((0, 1), (1, 0)), (-1, 1))
        with pytest.raises(GroupError):
            cyclic_group(3, [1, -1, -1])

    def test_json_round_trip(self):
        g = klein_four("second")
        assert OrientifoldGroup.from_json(g.to_json()) == g

    def test_named_table_entries(self):
        g = OrientifoldGroup.from_json({"elements": ["1", "k"], "table": [["1", "k"], ["k", "1"]],
                                        "epsilon": [1, -1], "identity": "1"})
        assert g == jandl_group()

    def test_quotient(self):
        q, proj = quotient_group(klein_four("second"))
        assert q == jandl_group()
        assert proj == [0, 1, 0, 1]
        q, proj = quotient_group(cyclic_group(4))
        assert q.order == 1 and set(proj) == {0}


class TestIndexAction:
    def test_regular_action_is_free(self):
        g = klein_four()
        act = regular_action(g)
        assert act.is_free_on(g.elements)
        assert len(act.orbits(g.kernel())) == 2

    def test_action_law_checked(self):
        g = jandl_group()
        with pytest.raises(GroupError):
            IndexAction(g, ((0, 1, 2), (1, 2, 0)))

    def test_fixed_points_are_not_free(self):
        g = jandl_group()
        act = IndexAction(g, ((0, 1, 2), (1, 0, 2)))
        assert not act.is_free_on(g.elements)
        assert act.orbits(g.elements) == [(0, 1), (2,)]
