"""Closed-form spectra of ``d/dS``, of constant-coefficient modules and of
differential polynomials, over affinoid domains and residue fields ``H(x)``.

The derivation spectrum is always a disk centred at 0 (or, for disjoint
unions, the normalized union of such disks).  Writing ``R`` for its radius:

==========================  ======================  =========================
domain                      residue char p          residue char 0
==========================  ======================  =========================
closed disk ``r``           ``D+(0, omega/r)``      closure of ``D-(0, 1/r)``
affinoid with holes         ``D+(0, omega/min r_i)`` ``D+(0, 1/min r_i)``
``H(x)``, x of type 2/3     ``D+(0, omega/r(x))``   ``D+(0, 1/r(x))``
``H(x)``, x of type 4       ``D+(0, omega/r(x))``   closure of ``D-(0, 1/r(x))``
==========================  ======================  =========================

A module with eigenvalues ``a_i`` has spectrum ``U (a_i + Sigma_d)``.  The
operator ``P(d)`` has spectrum ``Q(Sigma_d)`` for the commutative transform
``Q`` of ``P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ultraspec import berkline
from ultraspec.berkline import (
    CLOSED,
    CLOSURE_OPEN,
    BerkPoint,
    Disk,
    Spectrum,
    normalize,
    poly_image,
    spectra_equal,
    spectrum_contains,
)
from ultraspec.diffmod import (
    AffinoidDomain,
    ClosedDiskDomain,
    DiffModuleSpec,
    DiffPoly,
    DisjointUnionDomain,
    ModuleAnalysis,
    PointDomain,
    validate_domain,
)
from ultraspec.valcore import Exponent, FieldSpec, omega

__all__ = [
    "SpectrumReport",
    "ComparisonReport",
    "SymbolicDisk",
    "case_tag",
    "derivation_spectrum",
    "module_spectrum",
    "diffpoly_operator_spectrum",
    "spectra_report",
    "alternative_eigenvalue_check",
    "CLOSURE_NOTE",
]

# outputs are subsets of the line over an algebraic closure of the scalars
CLOSURE_NOTE = "over-closure"


def _residue(f: FieldSpec) -> str:
    return "char0" if f.residue_char_zero else "charp"


def case_tag(dom, f: FieldSpec) -> str:
    """Name of the table row that applies to ``(f, dom)``."""
    if isinstance(dom, ClosedDiskDomain) or (
        isinstance(dom, AffinoidDomain) and not dom.holes
    ):
        kind = "disk"
    elif isinstance(dom, AffinoidDomain):
        kind = "affinoid"
    elif isinstance(dom, DisjointUnionDomain):
        kind = "union"
    elif isinstance(dom, PointDomain):
        kind = f"point-type{dom.point_type(f)}"
    else:
        raise TypeError(f"unknown domain {dom!r}")
    return f"{f.mode}/{_residue(f)}/{kind}"


def _connected_spectrum_disk(dom, f: FieldSpec) -> Disk:
    zero = f.zero()
    w = omega(f)
    if isinstance(dom, (ClosedDiskDomain, AffinoidDomain)):
        holes = getattr(dom, "holes", ())
        if not holes:
            kind = CLOSURE_OPEN if f.residue_char_zero else CLOSED
            return Disk(zero, w - dom.radius, kind)
        return Disk(zero, w - dom.min_radius_exp(), CLOSED)
    if isinstance(dom, PointDomain):
        rx = dom.point.radius
        if f.residue_char_zero and dom.point_type(f) == 4:
            return Disk(zero, w - rx, CLOSURE_OPEN)
        return Disk(zero, w - rx, CLOSED)
    raise TypeError(f"not a connected domain: {dom!r}")


def derivation_spectrum(dom, f: FieldSpec) -> Spectrum:
    """Spectrum of ``d/dS`` acting on ``O(X)`` or ``H(x)``."""
    validate_domain(dom, f)
    if isinstance(dom, DisjointUnionDomain):
        return normalize([_connected_spectrum_disk(p, f) for p in dom.parts], f)
    return normalize([_connected_spectrum_disk(dom, f)], f)


@dataclass(frozen=True)
class SymbolicDisk:
    """``a + Sigma`` for a root ``a`` known only through its valuation."""

    factor: tuple
    root_valuation: Exponent
    multiplicity: int
    radius: Exponent
    kind: str


@dataclass(frozen=True)
class SpectrumReport:
    spectrum: Spectrum
    enclosing_radius: Exponent
    case: str
    flags: tuple = ()
    eigenvalues: tuple = ()
    symbolic: tuple = field(default_factory=tuple)

    @property
    def valuation_only(self) -> bool:
        return "valuation-only" in self.flags


def _flags(spec: Spectrum, extra=()) -> tuple:
    flags = list(extra)
    if spec.mixed_kind:
        flags.append("mixed-kind")
    flags.append(CLOSURE_NOTE)
    return tuple(flags)


def module_spectrum(
    m: DiffModuleSpec | ModuleAnalysis, dom, f: FieldSpec
) -> SpectrumReport:
    """``U (a_i + Sigma_d)`` over the eigenvalues of the module's matrix."""
    analysis = m.analyze(f) if isinstance(m, DiffModuleSpec) else m
    sigma = derivation_spectrum(dom, f)
    disks = [d.translate(a) for a, _ in analysis.eigenvalues for d in sigma.disks]
    symbolic = []
    for fac in analysis.unresolved:
        vals = (
            [Exponent()] * fac.degree if fac.newton is None else fac.newton.as_multiset()
        )
        for v in sorted(set(vals)):
            for d in sigma.disks:
                if v >= d.radius:
                    # every root of this valuation lies in d itself
                    disks.append(d)
                else:
                    symbolic.append(SymbolicDisk(fac.coeffs, v, fac.multiplicity, d.radius, d.kind))
    extra = ["valuation-only"] if analysis.unresolved else []
    spec = normalize(disks, f) if disks else Spectrum((), (), f)
    enc = berkline.enclosing_radius(spec) if disks else None
    for s in symbolic:
        r = min(s.root_valuation, s.radius)
        enc = r if enc is None else min(enc, r)
    return SpectrumReport(
        spectrum=spec,
        enclosing_radius=enc,
        case=case_tag(dom, f),
        flags=_flags(spec, extra),
        eigenvalues=analysis.eigenvalues,
        symbolic=tuple(symbolic),
    )


def diffpoly_operator_spectrum(P: DiffPoly, dom, f: FieldSpec) -> Spectrum:
    """Spectrum of ``P(d)`` as an operator on the functions: ``Q(Sigma_d)``."""
    Q = P.transform(f)
    sigma = derivation_spectrum(dom, f)
    return normalize([poly_image(Q, d, f) for d in sigma.disks], f)


@dataclass(frozen=True)
class ComparisonReport:
    module: SpectrumReport
    operator: Spectrum
    verdict: str


def spectra_report(P: DiffPoly, dom, f: FieldSpec) -> ComparisonReport:
    """Module spectrum of ``P`` (companion form) against that of ``P(d)``."""
    mod = module_spectrum(DiffModuleSpec.from_diffpoly(P, f), dom, f)
    op = diffpoly_operator_spectrum(P, dom, f)
    if mod.valuation_only:
        verdict = "undetermined"
    elif spectra_equal(mod.spectrum, op):
        verdict = "equal"
    elif spectrum_contains(mod.spectrum, op):
        verdict = "operator ⊊ module"
    elif spectrum_contains(op, mod.spectrum):
        verdict = "module ⊊ operator"
    else:
        verdict = "incomparable"
    return ComparisonReport(mod, op, verdict)


def alternative_eigenvalue_check(alt_eigenvalues, spec: Spectrum, eigenvalues) -> bool:
    """Necessary condition for another constant basis with eigenvalues ``alt``.

    Each alternative eigenvalue has to fall in a connected component of the
    spectrum that also contains one of the original eigenvalues.
    """
    f = spec.field

    def component_of(a):
        pt = BerkPoint.rigid(a)
        for ci, comp in enumerate(spec.components):
            if any(berkline.contains_point(spec.disks[i], pt, f) for i in comp):
                return ci
        return None

    home = {component_of(a) for a in eigenvalues}
    home.discard(None)
    return all(component_of(a) in home for a in alt_eigenvalues)
