from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab import (
    EXACT,
    FLOAT,
    Cone,
    ConeComplement,
    ConeShell,
    DimensionMismatch,
    Everywhere,
    LeftHalfSpace,
    ModeMismatch,
    RightHalfSpace,
    add,
    dirac,
    equal_on,
    new_measure,
    restrict,
    scale,
    total_variation,
    zero_measure,
)
from conelab.measure import NumericMode, to_float

from conftest import measures, small_rationals


def m1(weights: dict):
    return new_measure(1, [((x,), w) for x, w in weights.items()])


class TestCanonicalForm:
    def test_duplicates_merge(self):
        assert new_measure(1, [(0, 1), (0, 2)]).atoms == (((F(0),), F(3)),)

    def test_cancellation_gives_zero(self):
        m = new_measure(1, [(0, 1), (0, -1)])
        assert m.is_zero and m.atoms == ()

    def test_lex_order(self):
        m = new_measure(2, [((1, 1), F(1, 2)), ((1, -1), F(1, 3))])
        assert m.atoms == (((F(1), F(-1)), F(1, 3)), ((F(1), F(1)), F(1, 2)))

    def test_wrong_point_dimension(self):
        with pytest.raises(DimensionMismatch):
            new_measure(2, [((1,), 1)])

    def test_measures_are_immutable(self):
        m = dirac(0)
        with pytest.raises(AttributeError):
            m.atoms = ()

    def test_weight_lookup(self):
        m = m1({0: 1, -2: 3})
        assert m.weight((-2,)) == 3 and m.weight((5,)) == 0

    @given(measures(2))
    def test_idempotent(self, m):
        assert new_measure(m.dim, m.atoms) == m


class TestArithmetic:
    def test_add_cancels(self):
        assert add(dirac(0), scale(dirac(0), -1)).is_zero

    def test_scale(self):
        assert scale(m1({0: 1, -2: 3}), 2) == m1({0: 2, -2: 6})

    def test_add_disjoint(self):
        assert add(m1({0: 1}), m1({-1: 1})) == m1({0: 1, -1: 1})

    def test_operators_match_functions(self):
        a, b = m1({0: 1, 1: 2}), m1({1: -2, 3: 1})
        assert a + b == add(a, b)
        assert a - b == add(a, scale(b, -1))
        assert 3 * a == scale(a, 3)

    def test_mismatched_dimensions(self):
        with pytest.raises(DimensionMismatch):
            add(dirac(0), dirac((0, 0)))

    def test_mismatched_modes(self):
        with pytest.raises(ModeMismatch):
            add(dirac(0), to_float(dirac(0)))

    @given(measures(2), measures(2), measures(2))
    def test_add_commutative_associative(self, a, b, c):
        assert add(a, b) == add(b, a)
        assert add(add(a, b), c) == add(a, add(b, c))

    @given(measures(2), measures(2), small_rationals)
    def test_scale_distributes(self, a, b, c):
        assert scale(add(a, b), c) == add(scale(a, c), scale(b, c))


class TestTotalVariation:
    def test_zero(self):
        assert total_variation(zero_measure(1)) == 0

    def test_one_dim(self):
        assert total_variation(m1({0: 1, -2: -3})) == 4

    def test_two_dim(self):
        assert total_variation(new_measure(2, [((1, 1), F(1, 2)), ((1, -1), F(-1, 2))])) == 1

    @given(measures(1), measures(1))
    def test_triangle(self, a, b):
        assert total_variation(add(a, b)) <= total_variation(a) + total_variation(b)


class TestRegions:
    C = Cone(2)

    def test_left_half_space(self):
        m = new_measure(2, [((1, 0), 1), ((-3, 0), 2)])
        assert restrict(m, LeftHalfSpace(0)) == new_measure(2, [((-3, 0), 2)])

    def test_right_half_space_complements_left(self):
        m = new_measure(2, [((1, 0), 1), ((-3, 0), 2), ((0, 5), 1)])
        assert add(restrict(m, LeftHalfSpace(0)), restrict(m, RightHalfSpace(0))) == m

    def test_vertex_inside_cone(self):
        assert restrict(dirac((0, 0)), ConeComplement(self.C, 0)).is_zero

    def test_outside_cone(self):
        m = dirac((1, 1))
        # 1 + |1| = 2 > 0
        assert restrict(m, ConeComplement(self.C, 0)) == m

    def test_shell(self):
        m = new_measure(2, [((0, 0), 1), ((1, 0), 2), ((3, 0), 4)])
        assert restrict(m, ConeShell(self.C, 0, 2)) == new_measure(2, [((1, 0), 2)])
        with pytest.raises(ValueError):
            ConeShell(self.C, 2, 2)

    def test_region_cone_dimension(self):
        with pytest.raises(DimensionMismatch):
            restrict(dirac(0), ConeComplement(self.C, 0))

    @pytest.mark.parametrize(
        "region", [Everywhere(), LeftHalfSpace(F(1, 2)), RightHalfSpace(-1), ConeComplement(Cone(2), 1)]
    )
    @given(m=measures(2))
    def test_restrict_idempotent(self, region, m):
        once = restrict(m, region)
        assert restrict(once, region) == once

    @given(measures(2))
    def test_everywhere_is_identity(self, m):
        assert restrict(m, Everywhere()) == m


class TestEqualOn:
    @given(measures(1))
    def test_reflexive(self, m):
        assert equal_on(m, m, LeftHalfSpace(0))

    def test_differing_atoms_in_region(self):
        assert not equal_on(m1({0: 1, -3: 1}), m1({0: 1, -2: 1}), LeftHalfSpace(-1))

    def test_difference_outside_region_ignored(self):
        assert equal_on(m1({0: 1, 5: 1}), m1({0: 1, 7: 2}), LeftHalfSpace(1))

    @given(measures(2), measures(2), st.sampled_from([LeftHalfSpace(0), ConeComplement(Cone(2), 0)]))
    def test_matches_restricted_difference(self, a, b, region):
        assert equal_on(a, b, region) == restrict(add(a, scale(b, -1)), region).is_zero

    def test_exact_mode_rejects_tolerance(self):
        with pytest.raises(ValueError):
            equal_on(dirac(0), dirac(0), Everywhere(), tol=1e-3)

    def test_float_tolerance(self):
        a = new_measure(1, [(0, 1.0)], FLOAT)
        b = new_measure(1, [(0, 1.0 + 1e-6)], FLOAT)
        assert equal_on(a, b, Everywhere(), tol=1e-5)
        assert not equal_on(a, b, Everywhere(), tol=1e-8)


class TestFloatMode:
    def test_relative_pruning(self):
        m = new_measure(1, [(0, 1e6), (1, 1e-9), (2, 1.0)], FLOAT)
        assert m.support == [(0.0,), (2.0,)]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            NumericMode("exact", 1e-3)
        with pytest.raises(ValueError):
            NumericMode("float", -1.0)

    def test_exact_default(self):
        assert dirac(0).mode == EXACT

    def test_near_points_merge(self):
        m = new_measure(1, [(0.666666666666, 1.0), (0.666666666667, 1.0), (0.7, 1.0)], FLOAT)
        assert len(m) == 2 and m.atoms[0][1] == 2.0

    def test_near_points_merge_two_dim(self):
        m = new_measure(2, [((1.0, 2.0), 1.0), ((1.0 + 1e-11, 2.0 - 1e-11), 1.0), ((1.0, 2.5), 1.0)], FLOAT)
        assert [w for _, w in m.atoms] == [2.0, 1.0]
