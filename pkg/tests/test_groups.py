import math
import random
from fractions import Fraction
from itertools import product

import pytest

from flatchains.errors import (
    CoefficientOverflow,
    NormAxiomViolation,
    TrivialGroup,
    ZeroElement,
)
from flatchains.groups import (
    BoundedIntGroup,
    FiniteProductGroup,
    cyclic_group,
    min_nonzero_norm,
    sti_gap,
    validate_group,
)


def brute_force_gap(group, g, int_limit=8):
    """Independent decomposition search: enumerate all nonzero pairs a+b=g.

    For the integer model this scans abs(a) <= int_limit, wide enough to
    cover every candidate the monotone bound |a|+|g-a| >= |a| allows for
    the small g used in tests.
    """
    if isinstance(group, BoundedIntGroup):
        pairs = [
            (a, g - a)
            for a in range(-int_limit, int_limit + 1)
            if a != 0 and g - a != 0
        ]
        costs = [group.scale * (abs(a) + abs(b)) for a, b in pairs]
    else:
        pairs = [
            (a, group.sub(g, a))
            for a in group.nonzero_elements()
            if group.sub(g, a) != group.zero()
        ]
        costs = [group.norm(a) + group.norm(b) for a, b in pairs]
    if not pairs:
        return math.inf
    if isinstance(group, BoundedIntGroup):
        base = group.scale * abs(g)
    else:
        base = group.norm(g)
    return min(costs) - base


def sti_holds_two_conditions(group, g, int_limit=8):
    """The equivalent form: discreteness plus strict triangle on all splits."""
    if min_nonzero_norm(group) <= 0:
        return False
    gap = brute_force_gap(group, g, int_limit)
    return gap > 0


class TestValidation:
    def test_z2_valid(self):
        g = validate_group({"kind": "finite", "orders": [2], "norms": {"(1)": "1"}})
        assert g.norm((1,)) == 1

    def test_z2_zero_norm_rejected(self):
        with pytest.raises(NormAxiomViolation) as err:
            validate_group({"kind": "finite", "orders": [2], "norms": {"(1)": "0"}})
        assert err.value.axiom == "positivity"
        assert err.value.witness == (1,)

    def test_z3_triangle_violation(self):
        # |1+1| = |2| = 3 > |1| + |1| = 2, found by the exhaustive pair check
        with pytest.raises(NormAxiomViolation) as err:
            validate_group(
                {"kind": "finite", "orders": [3], "norms": {"(1)": "1", "(2)": "3"}}
            )
        assert err.value.axiom == "triangle"
        assert err.value.witness == ((1,), (1,))

    def test_symmetry_violation(self):
        with pytest.raises(NormAxiomViolation) as err:
            validate_group(
                {"kind": "finite", "orders": [3], "norms": {"(1)": "1", "(2)": "2"}}
            )
        assert err.value.axiom == "symmetry"

    def test_missing_entry_rejected(self):
        with pytest.raises(NormAxiomViolation):
            validate_group({"kind": "finite", "orders": [3], "norms": {"(1)": "1"}})

    def test_int_group_requires_positive_scale(self):
        with pytest.raises(NormAxiomViolation):
            validate_group({"kind": "int", "scale": "0", "bound": 4})

    def test_group_spec_roundtrip(self, z6):
        again = validate_group(z6.describe())
        assert again.describe() == z6.describe()


class TestArithmetic:
    def test_z3_add(self, z3):
        assert z3.add((2,), (2,)) == (1,)

    def test_bounded_norm_of_negative(self):
        g = BoundedIntGroup(scale=Fraction(1), bound=10)
        assert g.norm(-3) == 3

    def test_bounded_overflow(self):
        g = BoundedIntGroup(scale=Fraction(1), bound=3)
        with pytest.raises(CoefficientOverflow):
            g.add(3, 1)

    def test_product_arithmetic(self, z2xz2):
        assert z2xz2.add((1, 0), (1, 1)) == (0, 1)
        assert z2xz2.neg((1, 1)) == (1, 1)


class TestStiGap:
    def test_z_unit_g1(self, z_int):
        rep = sti_gap(z_int, 1)
        assert rep.gap == brute_force_gap(z_int, 1) == 2
        assert rep.witness == (-1, 2)
        assert rep.holds

    def test_z_unit_g2(self, z_int):
        rep = sti_gap(z_int, 2)
        assert rep.gap == brute_force_gap(z_int, 2) == 0
        assert rep.witness == (1, 1)
        assert not rep.holds

    def test_z2_infinite(self, z2):
        rep = sti_gap(z2, (1,))
        assert rep.gap == math.inf
        assert rep.witness is None
        assert rep.holds

    def test_z3_allones(self, z3):
        rep = sti_gap(z3, (1,))
        assert rep.gap == brute_force_gap(z3, (1,)) == 1
        assert rep.witness == ((2,), (2,))
        assert rep.holds

    def test_zero_element_rejected(self, z3):
        with pytest.raises(ZeroElement):
            sti_gap(z3, (0,))

    def test_witness_consistency(self, test_groups):
        # witness invariants: a, b nonzero, a+b = g, |a|+|b|-|g| = gap
        for group in test_groups:
            if isinstance(group, BoundedIntGroup):
                gs = [1, 2, 3, -2]
            else:
                gs = group.nonzero_elements()
            for g in gs:
                rep = sti_gap(group, g)
                if rep.witness is None:
                    assert rep.gap == math.inf
                    continue
                a, b = rep.witness
                assert not group.is_zero(a) and not group.is_zero(b)
                if isinstance(group, BoundedIntGroup):
                    assert a + b == g
                    assert group.scale * (abs(a) + abs(b) - abs(g)) == rep.gap
                else:
                    assert group.add(a, b) == g
                    assert group.norm(a) + group.norm(b) - group.norm(g) == rep.gap

    def test_equivalent_two_condition_form(self, test_groups):
        # cross-check gap > 0 against the discreteness + strict-split form
        for group in test_groups:
            gs = [1, 2, 3] if isinstance(group, BoundedIntGroup) else group.nonzero_elements()
            for g in gs:
                assert sti_gap(group, g).holds == sti_holds_two_conditions(group, g)

    def test_symmetric_under_negation(self, test_groups):
        for group in test_groups:
            gs = [1, 2, 5] if isinstance(group, BoundedIntGroup) else group.nonzero_elements()
            for g in gs:
                assert sti_gap(group, g).gap == sti_gap(group, group.neg(g)).gap


class TestMinNonzeroNorm:
    def test_z3(self, z3):
        assert min_nonzero_norm(z3) == 1

    def test_half_scale(self, z_half):
        assert min_nonzero_norm(z_half) == Fraction(1, 2)

    def test_z6_table(self, z6):
        assert min_nonzero_norm(z6) == 1

    def test_trivial_group(self):
        with pytest.raises(TrivialGroup):
            min_nonzero_norm(FiniteProductGroup((1,), {}))


class TestNormAxiomsRandomized:
    def test_pairs_satisfy_axioms(self, test_groups, seed):
        rng = random.Random(seed)
        for group in test_groups:
            if isinstance(group, BoundedIntGroup):
                draw = lambda: rng.randint(-group.bound // 2, group.bound // 2)
            else:
                elems = group.elements()
                draw = lambda: rng.choice(elems)
            for _ in range(2000):
                x, y = draw(), draw()
                assert group.norm(group.add(x, y)) <= group.norm(x) + group.norm(y)
                assert group.norm(group.neg(x)) == group.norm(x)
