from fractions import Fraction
from math import factorial

import pytest

from ultraspec.berkline import BerkPoint, separation
from ultraspec.diffmod import AffinoidDomain, ClosedDiskDomain
from ultraspec.oracle import (
    OracleError,
    TruncatedOperator,
    TruncatedSpace,
    TruncationError,
    annulus_resolvent_probe,
    divergence_witness,
    finite_dim_block_spectrum_check,
    kernel_witness,
    resolvent_radius_probe,
    spectral_norm_estimate,
    truncated_power_norm,
    truncated_power_norms,
    type4_bound_check,
)
from ultraspec.specengine import derivation_spectrum
from ultraspec.valcore import Exponent, FieldSpec, vp


def disk(f, rho):
    return ClosedDiskDomain(f.zero(), Exponent(rho))


def test_derivation_matrix_on_monomials(Q2):
    sp_ = TruncatedSpace.disk(Q2.zero(), Exponent(0), 4)
    d = TruncatedOperator.derivation(sp_, Q2)
    # d S^3 = 3 S^2
    out = d.apply({sp_.index(0, 3): Q2.one()})
    assert out == {sp_.index(0, 2): Q2.scalar(3)}


def test_power_norms_direct(Q2):
    # |d^n| on D+(0,1) is |n!|; computed straight from factorials
    got = truncated_power_norms(12, disk(Q2, 0), Q2, 13)
    assert got == [Exponent(vp(factorial(n), 2)) for n in range(13)]


def test_power_norm_on_annulus(Q3):
    c = Q3.zero()
    dom = AffinoidDomain(c, Exponent(0), ((c, Exponent(1)),))
    # |d^n| = |n!| / r_1^n with r_1 = 1/3
    for n in (1, 2, 5):
        assert truncated_power_norm(n, dom, Q3, 12) == vp(factorial(n), 3) - n


def test_truncation_too_short(Q2):
    with pytest.raises(TruncationError):
        truncated_power_norm(8, disk(Q2, 0), Q2, 4)


def test_spectral_estimate(Q3):
    est = spectral_norm_estimate(disk(Q3, 0), Q3, 3)
    assert est.ns == (3, 9, 27)
    assert est.exponents == (Fraction(1, 3), Fraction(4, 9), Fraction(13, 27))
    assert est.limit == Fraction(1, 2) and est.gap == Fraction(1, 54)
    assert est.monotone


def test_kernel_witness(Q2, laurent):
    dom = disk(Q2, 0)
    assert kernel_witness(Q2.scalar(4), dom, Q2)
    assert not kernel_witness(Q2.scalar(2), dom, Q2)  # boundary: exp(2S) diverges on |S| = 1
    assert kernel_witness(Q2.zero(), dom, Q2)
    assert kernel_witness(laurent.scalar("t^(1/2)"), disk(laurent, 0), laurent)
    assert not kernel_witness(laurent.scalar("1"), disk(laurent, 0), laurent)


def test_divergence_witness(Q3):
    assert divergence_witness(Q3, 0, 4) == [Exponent(-Fraction(l, 2)) for l in range(5)]
    with pytest.raises(OracleError):
        divergence_witness(FieldSpec.trivial(), 0, 2)


def test_annulus_probe(Q2):
    c = Q2.zero()
    dom = AffinoidDomain(c, Exponent(0), ((c, Exponent(1)),))
    # spectrum D+(0, omega / (1/2)) = D+(0, 1)
    assert annulus_resolvent_probe(Q2.one(), dom, Q2).verdict == "diverges"
    assert annulus_resolvent_probe(Q2.scalar("1/2"), dom, Q2).verdict == "converges"
    with pytest.raises(OracleError):
        annulus_resolvent_probe(Q2.zero(), dom, Q2)
    with pytest.raises(OracleError):
        annulus_resolvent_probe(Q2.one(), disk(Q2, 0), Q2)


def test_resolvent_probe(Q2):
    dom = disk(Q2, 0)
    sigma = derivation_spectrum(dom, Q2)
    for lit in ("1", "sqrt(2)", "1/2"):
        a = Q2.scalar(lit)
        pr = resolvent_radius_probe(a, dom, Q2)
        assert abs(float(pr.separation) - float(separation(BerkPoint.rigid(a), sigma))) <= 0.1
    with pytest.raises(OracleError):
        resolvent_radius_probe(Q2.scalar(2), dom, Q2)


def test_type4_bound(laurent):
    fam = [(laurent.zero(), Exponent(1)), (laurent.scalar("t"), Exponent(2))]
    pt = BerkPoint.type4(Exponent(3), fam)
    rep = type4_bound_check(pt, laurent.scalar("t^-3"), laurent, samples=10)
    assert rep.holds and rep.min_ratio >= 3
    with pytest.raises(OracleError):
        type4_bound_check(pt, laurent.scalar("t^-2"), laurent)


def test_type4_explicit_rhs(laurent):
    # (d - a) f = 1 has f = -1/a exactly
    fam = [(laurent.zero(), Exponent(1))]
    pt = BerkPoint.type4(Exponent(2), fam)
    rep = type4_bound_check(pt, laurent.scalar("t^-2"), laurent, polys=[[1]])
    assert rep.ratio_exponents == ((Exponent(2),),)


def test_block_law(Q3):
    rep = finite_dim_block_spectrum_check([[1]], [[2, 1], [0, 2]], [[5, 7]], Q3)
    assert rep.holds and rep.charpoly_product
    assert dict(rep.eigenvalues) == {Q3.one(): 1, Q3.scalar(2): 2}
