"""Acceptance criteria 1-10; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
from fractions import Fraction

import pytest

from ultraspec.berkline import CLOSED, CLOSURE_OPEN, BerkPoint, Disk, separation
from ultraspec.cli import parse_config, run
from ultraspec.diffmod import AffinoidDomain, ClosedDiskDomain, DiffModuleSpec, DiffPoly, PointDomain
from ultraspec.oracle import (
    annulus_resolvent_probe,
    divergence_witness,
    kernel_witness,
    resolvent_radius_probe,
    spectral_norm_estimate,
    truncated_power_norm,
    type4_bound_check,
)
from ultraspec.specengine import derivation_spectrum, module_spectrum, spectra_report
from ultraspec.valcore import Exponent, FieldSpec, omega, vp
from ultraspec.vary import (
    SegmentSpec,
    discontinuity_witness,
    left_continuity_threshold,
    margin_neighborhood,
    sample_segment,
    two_sided_threshold,
)

RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 ---------------------------------------------------------------------


def test_c01_operator_norm_law():
    bad = []
    for p in (2, 3):
        f = FieldSpec.padic(p)
        for rho in (1, 0, -1):  # r = 1/p, 1, p
            dom = ClosedDiskDomain(f.zero(), Exponent(rho))
            for n in range(1, 33):
                got = truncated_power_norm(n, dom, f, n + 1)
                # |d^n| = |n!| / r^n, counted from the factorial itself
                want = sum(vp(k, p) for k in range(2, n + 1)) - n * rho
                if got != want:
                    bad.append((p, rho, n, got))
    report(1, "operator norm of d^n equals |n!|/r^n", not bad, f"192 cases, tol 0, {len(bad)} off")


# 2 ---------------------------------------------------------------------


def test_c02_spectral_norm_limit():
    notes, ok = [], True
    for p in (2, 3):
        f = FieldSpec.padic(p)
        for rho in (0, 1):
            est = spectral_norm_estimate(ClosedDiskDomain(f.zero(), Exponent(rho)), f, 5)
            want_gap = Fraction(1, (p - 1) * p**5)
            ok &= est.ns[-1] == p**5 and est.gap == want_gap
            ok &= est.limit == omega(f) - rho
            # magnitudes |d^n|^(1/n) shrink: exponents never decrease
            ok &= est.monotone
            notes.append(f"p={p} gap={est.gap}")
    report(2, "spectral norm estimate gap 1/((p-1)p^5), monotone", ok, ", ".join(notes[::2]))


# 3 ---------------------------------------------------------------------


def test_c03_divergence_witness():
    f = FieldSpec.padic(2)
    got = divergence_witness(f, Exponent(0), 8)
    want = [Exponent(-Fraction(l, 2)) for l in range(9)]
    report(3, "divergence witness grows like |p|^(-l/2)", got == want, f"levels 0..8, last {got[-1]}")


# 4 ---------------------------------------------------------------------

P2 = {"mode": "p-adic", "p": 2}
LAUR = {"mode": "equal-char-zero"}

CELLS = [
    # name, field, domain, expected (radius exp, kind) of Sigma_d
    ("charp/disk", P2, {"kind": "closed-disk", "center": "0", "radius_exp": "0"}, (Exponent(1), CLOSED)),
    ("charp/affinoid", P2, {"kind": "affinoid", "center": "0", "radius_exp": "0",
                            "holes": [{"center": "0", "radius_exp": "2"}, {"center": "1", "radius_exp": "1"}]},
     (Exponent(-1), CLOSED)),
    ("charp/type2", P2, {"kind": "point", "type": "type2", "center": "1", "radius_exp": "1"}, (Exponent(0), CLOSED)),
    ("charp/type3", P2, {"kind": "point", "type": "type3", "center": "0", "radius_exp": "sqrt2"},
     (Exponent(1, -1), CLOSED)),
    ("charp/type4", P2, {"kind": "point", "type": "type4", "radius_exp": "3",
                         "family": [{"center": "0", "radius_exp": "1"}, {"center": "2", "radius_exp": "2"}]},
     (Exponent(-2), CLOSED)),
    ("char0/disk", LAUR, {"kind": "closed-disk", "center": "t", "radius_exp": "1"}, (Exponent(-1), CLOSURE_OPEN)),
    ("char0/affinoid", LAUR, {"kind": "affinoid", "center": "0", "radius_exp": "0",
                              "holes": [{"center": "t", "radius_exp": "3/2"}]},
     (Exponent(Fraction(-3, 2)), CLOSED)),
    ("char0/type2", LAUR, {"kind": "point", "type": "type2", "center": "0", "radius_exp": "1/3"},
     (Exponent(Fraction(-1, 3)), CLOSED)),
    ("char0/type3", LAUR, {"kind": "point", "type": "type3", "center": "t", "radius_exp": "sqrt2"},
     (Exponent(0, -1), CLOSED)),
    ("char0/type4", LAUR, {"kind": "point", "type": "type4", "radius_exp": "3",
                           "family": [{"center": "0", "radius_exp": "1"}, {"center": "t^2", "radius_exp": "2"},
                                      {"center": "t^2+t^(5/2)", "radius_exp": "5/2"}]},
     (Exponent(-3), CLOSURE_OPEN)),
]


def _half_steps(start: Exponent, sign: int, count: int) -> list:
    """The ``count`` nearest multiples of 1/2 strictly beyond ``start`` in direction ``sign``."""
    approx = float(start.a) + float(start.b) * math.sqrt(2)
    x = Fraction(math.floor(2 * approx) - 2 * sign, 2)
    out = []
    while len(out) < count:
        e = Exponent(x)
        if (e > start) if sign > 0 else (e < start):
            out.append(e)
        x += Fraction(sign, 2)
    return out


def _check_cell(name, field, domain, expected):
    cfg = parse_config({"field": field, "command": "spectrum", "domain": domain,
                        "module": {"kind": "matrix", "entries": [["0"]]}})
    f, dom = cfg.field, cfg.domain
    doc, _, sigma = run({"field": field, "command": "spectrum", "domain": domain,
                         "module": {"kind": "matrix", "entries": [["0"]]}})
    R, kind = expected
    problems = []
    if not (len(sigma) == 1 and sigma.disks[0].radius == R and sigma.disks[0].kind == kind
            and not sigma.disks[0].center):
        problems.append(f"family {doc['spectrum']}")

    # kernel witness on the disk whose functions embed into the domain's
    if isinstance(dom, ClosedDiskDomain):
        kdisk = dom
    elif isinstance(dom, AffinoidDomain):
        kdisk = ClosedDiskDomain(dom.center, dom.radius)
    else:
        kdisk = ClosedDiskDomain(dom.point.center, dom.point.radius)
    interior = [f.uniformizer_power(e) for e in _half_steps(R, +1, 10)]
    for a in interior:
        k = kernel_witness(a, kdisk, f)
        if k and not sigma.contains(BerkPoint.rigid(a)):
            problems.append(f"kernel outside at {a}")
        if not isinstance(dom, AffinoidDomain) and not k:
            problems.append(f"no kernel at interior {a}")

    # annulus probe where a hole exists
    if isinstance(dom, AffinoidDomain) or (isinstance(dom, PointDomain) and dom.point.kind == "type23"):
        grid = [f.uniformizer_power(e) for e in _half_steps(R, -1, 5)[::-1] + _half_steps(R, +1, 5)]
        if R.is_rational and f.in_value_group(R):
            grid[4] = f.uniformizer_power(R)  # include the boundary circle
        for a in grid:
            diverges = annulus_resolvent_probe(a, dom, f).verdict == "diverges"
            if diverges != sigma.contains(BerkPoint.rigid(a)):
                problems.append(f"annulus verdict at {a}")

    for e in _half_steps(R, -1, 5):
        a = f.uniformizer_power(e)
        s = separation(BerkPoint.rigid(a), sigma)
        if s == "contained" or s != e:
            problems.append(f"separation at {a}: {s}")
    return problems


def test_c04_main_table():
    bad = {}
    for name, field, domain, expected in CELLS:
        probs = _check_cell(name, field, domain, expected)
        if probs:
            bad[name] = probs
    report(4, "main table: 8 cells (type 2 and 3 both covered)", not bad,
           f"{len(CELLS)} fixtures" + (f", failing {bad}" if bad else ""))


# 5 ---------------------------------------------------------------------


def test_c05_union_merge():
    f3, f2 = FieldSpec.padic(3), FieldSpec.padic(2)
    s3 = module_spectrum(DiffModuleSpec.from_matrix([[0, 0], [0, 1]], f3), ClosedDiskDomain(f3.zero(), Exponent(0)), f3).spectrum
    s2 = module_spectrum(DiffModuleSpec.from_matrix([[0, 0], [0, 2]], f2), ClosedDiskDomain(f2.zero(), Exponent(0)), f2).spectrum
    ok = s3.disks == (Disk(f3.zero(), Exponent(Fraction(1, 2))), Disk(f3.one(), Exponent(Fraction(1, 2))))
    ok &= len(s3.components) == 2
    ok &= s2.disks == (Disk(f2.zero(), Exponent(1)),)
    report(5, "diag(0,1) p=3 splits, diag(0,2) p=2 merges", ok, f"{len(s3)} disks / {len(s2)} disk")


# 6 ---------------------------------------------------------------------


def test_c06_operator_vs_module():
    f = FieldSpec.padic(2)
    cmp_ = spectra_report(DiffPoly(("0", "0")), ClosedDiskDomain(f.zero(), Exponent(0)), f)
    ok = cmp_.operator.disks == (Disk(f.zero(), Exponent(2)),)
    ok &= cmp_.module.spectrum.disks == (Disk(f.zero(), Exponent(1)),)
    ok &= cmp_.verdict == "operator ⊊ module"
    report(6, "D^2: D+(0,1/4) strictly inside D+(0,1/2)", ok, cmp_.verdict)


# 7 ---------------------------------------------------------------------


def test_c07_resolvent_radius():
    f2, f3 = FieldSpec.padic(2), FieldSpec.padic(3)
    cases = [(f2, ClosedDiskDomain(f2.zero(), Exponent(0)), lit) for lit in ("1", "3", "sqrt(2)", "1/2", "1+sqrt(2)")]
    hole = AffinoidDomain(f3.zero(), Exponent(1), ((f3.zero(), Exponent(2)),))
    # Sigma = D+(0, 3^(3/2)); exterior means |a| > 3^(3/2)
    cases += [(f3, hole, lit) for lit in ("1/9", "2/9", "1/27", "1/9+1/27", "1/27*sqrt(3)")]
    worst = Fraction(0)
    for f, dom, lit in cases:
        a = f.scalar(lit)
        sigma = derivation_spectrum(dom, f)
        want = separation(BerkPoint.rigid(a), sigma)
        got = resolvent_radius_probe(a, dom, f).separation
        worst = max(worst, abs(Fraction(float(got)) - Fraction(float(want))))
    report(7, "resolvent radius matches separation", worst <= Fraction(1, 10),
           f"10 points, max deviation {float(worst):.3g} <= 0.1")


# 8 ---------------------------------------------------------------------


def test_c08_variation():
    f = FieldSpec.padic(2)
    m = DiffModuleSpec.from_matrix([[0]], f)
    seg = SegmentSpec.uniform(f.zero(), 4, 0, 17)
    kinds = {g.is_rational for g in seg.grid}
    ok = kinds == {True, False}
    samples = sample_segment(m, seg, f)
    left = two = 0
    for s in samples:
        for eps in (Fraction(1, 4), Fraction(1, 2)):
            n = margin_neighborhood(s.spectrum, eps)
            t = left_continuity_threshold(m, seg, s.rho, n, f)
            ok &= t is not None and t > 0
            left += 1
            if s.point_type == 3:
                t2 = two_sided_threshold(m, seg, s.rho, n, f)
                ok &= t2 is not None and t2 > 0
                two += 1
    w = discontinuity_witness(m, seg, Exponent(1), f)
    ok &= w.in_sigma_y and w.constant and w.never_enters
    ok &= all(sep != "contained" and sep == w.boundary_exp for _, sep in w.samples)
    report(8, "left-continuity everywhere, two-sided at type 3, type-2 jump", ok,
           f"{left} one-sided, {two} two-sided, witness b={w.witness}")


# 9 ---------------------------------------------------------------------


def test_c09_type4_bound():
    f = FieldSpec.equal_char_zero()
    fam = [(f.zero(), Exponent(1)), (f.scalar("t"), Exponent(Fraction(3, 2))),
           (f.scalar("t+t^(3/2)"), Exponent(2)), (f.scalar("t+t^(3/2)+t^2"), Exponent(Fraction(5, 2)))]
    pt = BerkPoint.type4(Exponent(3), fam)
    PointDomain(pt)  # well-formed family
    rep = type4_bound_check(pt, f.scalar("t^-3"), f, N=8, samples=50, seed=2024)
    ok = rep.holds and len(rep.ratio_exponents) == 50 and all(len(r) == 4 for r in rep.ratio_exponents)
    ok &= all(x >= 3 for row in rep.ratio_exponents for x in row)
    report(9, "type-4 inverse bound |f| <= r|g|", ok, f"50 samples x 4 levels, min ratio exp {rep.min_ratio}")


# 10 --------------------------------------------------------------------


def test_c10_property_suites():
    import test_properties as props

    suites = [
        props.test_normalize_idempotent_and_order_free,
        props.test_legendre_exhaustive_small,
        props.test_legendre_against_direct_sum,
        props.test_poly_image_sampling_sound,
        props.test_block_law,
    ]
    failures = []
    for fn in suites:
        try:
            fn()
        except Exception as exc:  # noqa: BLE001
            failures.append(f"{fn.__name__}: {exc!r}"[:200])
    report(10, "property suites (normalize 500, Legendre, poly_image 100, block 50)", not failures,
           "zero failures" if not failures else "; ".join(failures))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
