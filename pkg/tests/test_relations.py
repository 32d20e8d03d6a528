import itertools

import pytest
from hypothesis import given, strategies as st

from eigenbundle import (PreconditionError, ProductOfSpheres, ProjectiveSpace, RingClass, Sphere,
                         cp_forced_diagonalizable, enumerate_admissible_n2, star_check,
                         symmetric_poly_check)
from eigenbundle.relations import classes_from_pairings, enumerate_star_candidates

small = st.integers(-5, 5)


def test_ring_ranks():
    assert (Sphere().rank2, Sphere().rank4) == (1, 0)
    assert (ProductOfSpheres().rank2, ProductOfSpheres().rank4) == (2, 1)
    assert ProjectiveSpace(1).rank4 == 0 and ProjectiveSpace(3).rank4 == 1
    with pytest.raises(PreconditionError):
        ProjectiveSpace(0)


def test_product_cup_relations():
    a, b = ProductOfSpheres().generators()
    assert (a * a).is_zero and (b * b).is_zero
    assert (a * b).coeffs == (1,)
    assert ((2 * a + b) * (a - 3 * b)).coeffs == (-6 + 1,)


def test_ring_class_validation():
    with pytest.raises(PreconditionError):
        RingClass(Sphere(), 2, (1, 2))
    with pytest.raises(PreconditionError):
        RingClass(Sphere(), 3, (1,))
    with pytest.raises(PreconditionError):
        RingClass(Sphere(), 2, (1,)) + RingClass(ProductOfSpheres(), 2, (1, 0))


def test_sphere_sum_rule():
    cls = classes_from_pairings(Sphere(), [(2,), (-1,), (-1,)])
    rep = symmetric_poly_check(cls)
    assert rep.s1_ok and rep.s2_ok and rep.ok
    assert not symmetric_poly_check(classes_from_pairings(Sphere(), [(1,), (1,)])).ok


def test_star_examples():
    assert star_check(1, -1, 0, 0).holds
    assert star_check(1, -1, 1, -1).lhs == 2
    assert star_check(2, 0, -1, 2).holds
    assert not star_check(1, 0, 1, 0).holds


@given(small, small, small, small)
def test_star_matches_ring_arithmetic(k1, k2, l1, l2):
    model = ProductOfSpheres()
    cls = classes_from_pairings(model, [(k1, l1), (k2, l2), (-k1 - k2, -l1 - l2)])
    rep = symmetric_poly_check(cls)
    assert rep.s1_ok
    assert rep.s2_ok == star_check(k1, k2, l1, l2).holds
    assert rep.s2.coeffs == (-star_check(k1, k2, l1, l2).lhs,)


def test_admissible_n2_count():
    for bound in range(5):
        classes = enumerate_admissible_n2(bound)
        assert len(classes) == 4 * bound + 1
        assert all(k * l == 0 for k, l in classes)
    with pytest.raises(PreconditionError):
        enumerate_admissible_n2(-1)


def test_n2_admissible_matches_s2():
    model = ProductOfSpheres()
    for k, l in itertools.product(range(-3, 4), repeat=2):
        rep = symmetric_poly_check(classes_from_pairings(model, [(k, l), (-k, -l)]))
        assert rep.ok == ((k, l) in enumerate_admissible_n2(3))


def test_star_candidates_contain_trivial_and_are_sound():
    cands = enumerate_star_candidates(1)
    assert (0, 0, 0, 0) in cands
    assert all(star_check(*t).holds for t in cands)


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=5))
def test_cp_verdicts(ks):
    v2 = cp_forced_diagonalizable(2, ks)
    v1 = cp_forced_diagonalizable(1, ks)
    if sum(ks) != 0:
        assert not v1.feasible and not v2.feasible
    else:
        assert v1.feasible
        assert v2.feasible == all(k == 0 for k in ks)
