from fractions import Fraction

import pytest

from ultraspec.berkline import Neighborhood, Region
from ultraspec.diffmod import DiffModuleSpec
from ultraspec.vary import (
    NotANeighborhood,
    SegmentSpec,
    discontinuity_witness,
    left_continuity_threshold,
    margin_neighborhood,
    sample_segment,
    spectrum_at,
    two_sided_threshold,
)
from ultraspec.valcore import Exponent


@pytest.fixture
def zero_module(Q2):
    return DiffModuleSpec.from_matrix([[0]], Q2)


def test_uniform_grid_mixes_types(Q2):
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 17)
    assert len(seg.grid) == 17
    assert seg.grid[0] == 0 and seg.grid[-1] == 4
    rational = [g for g in seg.grid if g.is_rational]
    assert 0 < len(rational) < 17
    assert list(seg.grid) == sorted(seg.grid)


def test_segment_rejects_bad_input(Q2):
    with pytest.raises(ValueError):
        SegmentSpec(Q2.zero(), 0, 1)
    with pytest.raises(ValueError):
        SegmentSpec(Q2.zero(), 1, 0, (Exponent(2),))


def test_samples_follow_closed_form(Q2, zero_module):
    seg = SegmentSpec.uniform(Q2.zero(), 2, 0, 5)
    for s in sample_segment(zero_module, seg, Q2):
        assert s.spectrum.disks[0].radius == 1 - s.rho
        assert s.point_type == (2 if s.rho.is_rational else 3)


def test_left_threshold_matches_margin(Q2, zero_module):
    # Sigma_y' = D+(0, 2^-(1 - rho')) stays in D-(0, 2^-(3/4)) iff rho' < 1/4
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 17)
    n = margin_neighborhood(spectrum_at(zero_module, Q2.zero(), 0, Q2), Fraction(1, 4))
    t = left_continuity_threshold(zero_module, seg, Exponent(0), n, Q2)
    assert Fraction(1, 4) - Fraction(1, 2**20) < t.a <= Fraction(1, 4)


def test_two_sided_at_type3(Q2, zero_module):
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 17)
    y = seg.grid[1]
    assert not y.is_rational
    n = margin_neighborhood(spectrum_at(zero_module, Q2.zero(), y, Q2), Fraction(1, 2))
    t = two_sided_threshold(zero_module, seg, y, n, Q2)
    assert t is not None and t > 0


def test_not_a_neighborhood(Q2, zero_module):
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 5)
    n = Neighborhood((Region(Q2.zero(), 3),))
    with pytest.raises(NotANeighborhood):
        left_continuity_threshold(zero_module, seg, Exponent(0), n, Q2)


@pytest.mark.parametrize("y,b", [(1, "1"), (2, "1/2")])
def test_discontinuity_witness(Q2, zero_module, y, b):
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 17)
    rep = discontinuity_witness(zero_module, seg, Exponent(y), Q2)
    assert rep.witness == Q2.scalar(b)
    assert rep.in_sigma_y and rep.constant and rep.never_enters
    assert all(s == 1 - y for _, s in rep.samples)


def test_witness_needs_type2(Q2, zero_module):
    seg = SegmentSpec.uniform(Q2.zero(), 4, 0, 17)
    with pytest.raises(ValueError, match="type \\(2\\)"):
        discontinuity_witness(zero_module, seg, seg.grid[1], Q2)


def test_witness_avoids_other_eigenvalues(Q3):
    m = DiffModuleSpec.from_matrix([[0, 0], [0, 1]], Q3)
    seg = SegmentSpec.uniform(Q3.zero(), 2, 0, 5)
    rep = discontinuity_witness(m, seg, Exponent(0), Q3)
    assert rep.constant and rep.never_enters
