"""Spectra along a segment ``[x, x_{c0,r0}]`` and their (dis)continuity.

A segment fixes the centre ``c`` and lets the radius exponent ``rho`` run from
``rho_high`` (small radius, near ``x``) down to ``rho_low``.  Approaching a
sample ``y`` *from below* means ``rho' > rho_y``: those spectra contain
``Sigma_y`` and shrink onto it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ultraspec.berkline import (
    BerkPoint,
    Neighborhood,
    Region,
    Spectrum,
    neighborhood_member,
    separation,
)
from ultraspec.diffmod import DiffModuleSpec, ModuleAnalysis, PointDomain
from ultraspec.specengine import module_spectrum
from ultraspec.valcore import Exponent, FieldSpec, omega, valuation

__all__ = [
    "SegmentSpec",
    "Sample",
    "NotANeighborhood",
    "sample_segment",
    "spectrum_at",
    "margin_neighborhood",
    "left_continuity_threshold",
    "two_sided_threshold",
    "discontinuity_witness",
]


class NotANeighborhood(ValueError):
    """The supplied open set is not a neighbourhood of ``Sigma_y``."""


@dataclass(frozen=True)
class SegmentSpec:
    center: object
    rho_high: Exponent
    rho_low: Exponent
    grid: tuple = ()

    def __post_init__(self):
        hi, lo = Exponent.of(self.rho_high), Exponent.of(self.rho_low)
        if hi < lo:
            raise ValueError("rho_high must be >= rho_low")
        grid = tuple(sorted(Exponent.of(g) for g in self.grid))
        if any(g < lo or g > hi for g in grid):
            raise ValueError("grid point outside the segment")
        object.__setattr__(self, "rho_high", hi)
        object.__setattr__(self, "rho_low", lo)
        object.__setattr__(self, "grid", grid)

    @property
    def width(self) -> Exponent:
        return self.rho_high - self.rho_low

    @classmethod
    def uniform(cls, center, rho_high, rho_low, n: int) -> "SegmentSpec":
        """``n`` evenly spaced points, every other interior one moved off the value group."""
        hi, lo = Exponent.of(rho_high), Exponent.of(rho_low)
        if not (hi.is_rational and lo.is_rational):
            raise ValueError("uniform grids need rational endpoints")
        step = (hi.a - lo.a) / (n - 1) if n > 1 else Fraction(0)
        # (sqrt2 - 1)/2 of a step: strictly between neighbours, never rational
        nudge = Exponent(-step / 2, step / 2)
        pts = []
        for k in range(n):
            e = lo + step * k
            if k % 2 == 1 and k < n - 1:
                e = e + nudge
            pts.append(e)
        return cls(center, hi, lo, tuple(pts))


@dataclass(frozen=True)
class Sample:
    rho: Exponent
    point_type: int
    spectrum: Spectrum


def _analysis(m, f: FieldSpec) -> ModuleAnalysis:
    a = m.analyze(f) if isinstance(m, DiffModuleSpec) else m
    if not a.resolved:
        raise ValueError("valuation-only module: eigenvalues are not all resolved")
    return a


def spectrum_at(m, center, rho, f: FieldSpec) -> Spectrum:
    rho = Exponent.of(rho)
    dom = PointDomain(BerkPoint.shilov(center, rho))
    return module_spectrum(_analysis(m, f), dom, f).spectrum


def sample_segment(m, seg: SegmentSpec, f: FieldSpec) -> list:
    """``Sigma`` of the module over ``H(y)`` for every grid point ``y``."""
    a = _analysis(m, f)
    out = []
    for rho in seg.grid:
        t = 2 if f.in_value_group(rho) else 3
        out.append(Sample(rho, t, spectrum_at(a, seg.center, rho, f)))
    return out


def margin_neighborhood(s: Spectrum, eps) -> Neighborhood:
    """``U`` = disks enlarged by ``base^eps``; parts = those disks and rim annuli."""
    eps = Exponent.of(eps)
    U = tuple(Region(d.center, d.radius - eps) for d in s.disks)
    parts = tuple((Region(d.center, d.radius - eps),) for d in s.disks) + tuple(
        (Region(d.center, d.radius - eps, d.radius + eps),) for d in s.disks
    )
    return Neighborhood(U, parts)


def _bisect(good, lo: Exponent, hi: Exponent, steps: int) -> Exponent:
    # good(lo) may be vacuous; good(hi) is False
    for _ in range(steps):
        mid = (lo + hi) / 2
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _side_threshold(a, seg, rho_y, n, f, sign: int, steps: int):
    room = seg.rho_high - rho_y if sign > 0 else rho_y - seg.rho_low
    if room == Exponent():
        return seg.width  # nothing to approach from on this side

    def good(delta):
        rho = rho_y + delta * sign
        return neighborhood_member(spectrum_at(a, seg.center, rho, f), n)

    if good(room):
        return room
    lo = _bisect(good, Exponent(), room, steps)
    return lo if lo > Exponent() else None


def _check_neighborhood(a, seg, rho_y, n, f):
    n.validate(f)
    if not neighborhood_member(spectrum_at(a, seg.center, rho_y, f), n):
        raise NotANeighborhood("n is not a neighbourhood of the spectrum at y")


def left_continuity_threshold(m, seg: SegmentSpec, y, n: Neighborhood, f: FieldSpec, steps: int = 24):
    """Largest ``delta`` (up to bisection) with ``Sigma_{y'}`` in ``n`` for ``0 < rho' - rho_y < delta``.

    Membership is monotone in ``rho'`` on this side (the spectra grow), so
    checking the endpoint of each candidate interval suffices.  Returns
    ``None`` when no positive threshold exists.
    """
    a = _analysis(m, f)
    rho_y = Exponent.of(y)
    _check_neighborhood(a, seg, rho_y, n, f)
    return _side_threshold(a, seg, rho_y, n, f, +1, steps)


def two_sided_threshold(m, seg: SegmentSpec, y, n: Neighborhood, f: FieldSpec, steps: int = 24):
    """Like :func:`left_continuity_threshold` but also from above (larger radii)."""
    a = _analysis(m, f)
    rho_y = Exponent.of(y)
    _check_neighborhood(a, seg, rho_y, n, f)
    below = _side_threshold(a, seg, rho_y, n, f, +1, steps)
    above = _side_threshold(a, seg, rho_y, n, f, -1, steps)
    if below is None or above is None:
        return None
    return min(below, above)


@dataclass(frozen=True)
class DiscontinuityReport:
    witness: object
    boundary_exp: Exponent
    in_sigma_y: bool
    samples: tuple  # ((rho', separation exponent or "contained"), ...)
    neighborhood: Neighborhood
    constant: bool
    never_enters: bool


def discontinuity_witness(m, seg: SegmentSpec, y, f: FieldSpec, samples: int = 10) -> DiscontinuityReport:
    """A rigid point on the rim of ``Sigma_y`` that every spectrum above ``y`` misses."""
    rho_y = Exponent.of(y)
    if not f.in_value_group(rho_y):
        raise ValueError("witness requires type (2)")
    if f.mode != "p-adic":
        raise ValueError("witness construction is implemented for p-adic fields")
    a = _analysis(m, f)
    B = omega(f) - rho_y
    try:
        step = f.uniformizer_power(B)
    except ValueError:
        raise ValueError(f"boundary exponent {B} is not realizable") from None
    eig = a.eigenvalue_set()
    sigma_y = spectrum_at(a, seg.center, rho_y, f)

    witness = None
    for unit in [1, -1] + list(range(2, f.p)):
        b = eig[0] + step * unit
        if all(_dist_ok(b, e, B, f) for e in eig):
            witness = b
            break
    if witness is None:
        raise ValueError("every candidate witness is too close to another eigenvalue")

    pt = BerkPoint.rigid(witness)
    room = rho_y - seg.rho_low
    if room == Exponent():
        room = Exponent(1)
    rows = []
    for k in range(1, samples + 1):
        rho = rho_y - room * Fraction(k, samples)
        rows.append((rho, separation(pt, spectrum_at(a, seg.center, rho, f))))
    base_n = margin_neighborhood(sigma_y, Fraction(1, 2))
    rim = Region(witness, B)
    n = Neighborhood(base_n.U + (rim,), base_n.parts + ((rim,),))
    never = all(not neighborhood_member(spectrum_at(a, seg.center, rho, f), n) for rho, _ in rows)
    constant = all(s == B for _, s in rows)
    return DiscontinuityReport(
        witness=witness,
        boundary_exp=B,
        in_sigma_y=sigma_y.contains(pt),
        samples=tuple(rows),
        neighborhood=n,
        constant=constant,
        never_enters=never and neighborhood_member(sigma_y, n),
    )


def _dist_ok(b, e, B, f) -> bool:
    # |b - e| must not drop below the boundary radius
    return valuation(b - e, f) <= B
