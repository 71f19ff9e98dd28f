from fractions import Fraction

import pytest

from ultraspec.berkline import (
    CLOSED,
    CLOSURE_OPEN,
    BerkPoint,
    Disk,
    Neighborhood,
    Region,
    UndecidableMembership,
    contains_point,
    disk_contains,
    enclosing_radius,
    neighborhood_member,
    normalize,
    poly_image,
    separation,
    spectra_equal,
)
from ultraspec.valcore import Exponent


def D(f, c, r, kind=CLOSED):
    return Disk(f.scalar(c), Exponent.of(r), kind)


def test_rigid_membership_closed_and_open(Q2):
    d = D(Q2, "0", 1)
    assert contains_point(d, BerkPoint.rigid(Q2.scalar("2")), Q2)
    assert not contains_point(d, BerkPoint.rigid(Q2.scalar("sqrt(2)")), Q2)
    o = D(Q2, "0", 1, CLOSURE_OPEN)
    assert not contains_point(o, BerkPoint.rigid(Q2.scalar("2")), Q2)
    assert contains_point(o, BerkPoint.rigid(Q2.scalar("4")), Q2)


def test_closure_contains_its_shilov_point(Q2):
    o = D(Q2, "0", 1, CLOSURE_OPEN)
    assert contains_point(o, BerkPoint.shilov(Q2.zero(), 1), Q2)
    assert not contains_point(o, BerkPoint.shilov(Q2.zero(), Fraction(1, 2)), Q2)
    assert contains_point(o, BerkPoint.shilov(Q2.scalar("4"), 3), Q2)


def test_type4_membership(laurent):
    pt = BerkPoint.type4(Exponent(3), [(laurent.zero(), 1), (laurent.scalar("t^2"), 2)])
    assert contains_point(D(laurent, "0", 1), pt, laurent)
    assert not contains_point(D(laurent, "t", 5), pt, laurent)
    with pytest.raises(UndecidableMembership):
        contains_point(D(laurent, "t^2", Fraction(5, 2)), pt, laurent)


def test_disk_contains(Q2):
    assert disk_contains(D(Q2, "0", 0), D(Q2, "2", 1), Q2)
    assert not disk_contains(D(Q2, "0", 1), D(Q2, "0", 0), Q2)
    assert disk_contains(D(Q2, "0", 0), D(Q2, "0", 0, CLOSURE_OPEN), Q2)
    assert not disk_contains(D(Q2, "0", 0, CLOSURE_OPEN), D(Q2, "0", 0), Q2)


def test_normalize_merges_overlaps(Q2, Q3):
    s = normalize([D(Q2, "0", 1), D(Q2, "2", 1)], Q2)
    assert len(s) == 1
    s = normalize([D(Q3, "0", 1), D(Q3, "1", 1)], Q3)
    assert len(s) == 2 and s.components == ((0,), (1,))


def test_normalize_touching_closures_share_a_component(laurent):
    s = normalize([D(laurent, "0", 0, CLOSURE_OPEN), D(laurent, "1", 0, CLOSURE_OPEN)], laurent)
    assert len(s) == 2
    assert s.components == ((0, 1),)


def test_separation(Q2):
    s = normalize([D(Q2, "0", 2)], Q2)
    assert separation(BerkPoint.rigid(Q2.scalar("1")), s) == 0
    assert separation(BerkPoint.rigid(Q2.scalar("sqrt(2)")), s) == Fraction(1, 2)
    assert separation(BerkPoint.rigid(Q2.scalar("4")), s) == "contained"


def test_poly_image(Q2):
    d = D(Q2, "0", 1)
    # X^2 on D+(0, 1/2) is D+(0, 1/4)
    img = poly_image([0, 0, 1], d, Q2)
    assert img.radius == 2 and img.center == Q2.zero()
    # X + 3 translates
    img = poly_image([3, 1], d, Q2)
    assert img.center == Q2.scalar("3") and img.radius == 1


def test_enclosing_radius(Q2):
    assert enclosing_radius(normalize([D(Q2, "0", 1)], Q2)) == 1
    assert enclosing_radius(normalize([D(Q2, "1", 1)], Q2)) == 0


def test_spectra_equal_is_set_equality(Q2):
    a = normalize([D(Q2, "0", 1), D(Q2, "2", 3)], Q2)
    b = normalize([D(Q2, "2", 1)], Q2)
    assert spectra_equal(a, b)


def test_neighborhood_member(Q2):
    s = normalize([D(Q2, "0", 1)], Q2)
    n = Neighborhood((Region(Q2.zero(), Fraction(1, 2)),), ((Region(Q2.zero(), Fraction(1, 2), Fraction(3, 2)),),))
    n.validate(Q2)
    assert neighborhood_member(s, n)
    tiny = normalize([D(Q2, "0", 5)], Q2)
    assert not neighborhood_member(tiny, n)  # misses the rim annulus
    big = normalize([D(Q2, "0", 0)], Q2)
    assert not neighborhood_member(big, n)


def test_region_rejects_inverted_annulus(Q2):
    with pytest.raises(ValueError):
        Region(Q2.zero(), 2, 1)


def test_disk_rejects_bad_kind(Q2):
    with pytest.raises(ValueError):
        Disk(Q2.zero(), Exponent(), "open")
