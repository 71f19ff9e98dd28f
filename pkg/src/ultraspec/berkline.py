"""Disk calculus on the Berkovich affine line.

A disk is stored as ``(center, radius exponent, kind)``; the radius is
``base ** (-radius_exp)``, so a *larger* exponent is a *smaller* disk.  All
comparisons are made on exponents.  Distances between scalars are
valuations: ``|a - b| <= R`` reads ``valuation(a - b) >= R_exp``.

``kind`` is ``"closed"`` for ``D+(c, R)`` and ``"closure-open"`` for the
Berkovich closure of the open disk ``D-(c, R)``, i.e. ``D-(c, R)`` together
with its Shilov point ``x_{c,R}``.  When ``R`` is outside the value group the
two coincide; containment tests use that identification.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ultraspec import _poly
from ultraspec.valcore import Exponent, FieldSpec, valuation

CLOSED = "closed"
CLOSURE_OPEN = "closure-open"
KINDS = (CLOSED, CLOSURE_OPEN)

__all__ = [
    "CLOSED",
    "CLOSURE_OPEN",
    "Disk",
    "scalar_key",
    "BerkPoint",
    "Spectrum",
    "Region",
    "Neighborhood",
    "UndecidableMembership",
    "contains_point",
    "disk_contains",
    "normalize",
    "separation",
    "poly_image",
    "neighborhood_member",
    "enclosing_radius",
    "spectrum_contains",
    "spectra_equal",
]


class UndecidableMembership(ValueError):
    """The finite data of a type (4) point cannot decide the question."""


@dataclass(frozen=True)
class Disk:
    center: object
    radius: Exponent
    kind: str = CLOSED

    def __post_init__(self):
        object.__setattr__(self, "radius", Exponent.of(self.radius))
        if self.kind not in KINDS:
            raise ValueError(f"unknown disk kind {self.kind!r}")
        if self.radius.inf:
            raise ValueError("disk radius must be strictly positive")

    def translate(self, a) -> "Disk":
        return Disk(self.center + a, self.radius, self.kind)


@dataclass(frozen=True)
class BerkPoint:
    """A point of the line: ``type1`` (rigid), ``type23`` (``x_{c,r}``) or ``type4``.

    A type (4) point carries its radius ``r(x)`` and a finite nested family
    ``((c_1, r_1), (c_2, r_2), ...)`` of closed disks shrinking towards it.
    """

    kind: str
    center: object = None
    radius: Exponent | None = None
    family: tuple = ()

    @classmethod
    def rigid(cls, c) -> "BerkPoint":
        return cls("type1", c)

    @classmethod
    def shilov(cls, c, radius) -> "BerkPoint":
        return cls("type23", c, Exponent.of(radius))

    @classmethod
    def type4(cls, radius, family) -> "BerkPoint":
        fam = tuple((c, Exponent.of(r)) for c, r in family)
        return cls("type4", fam[-1][0] if fam else None, Exponent.of(radius), fam)

    def point_type(self, f: FieldSpec) -> int:
        if self.kind == "type1":
            return 1
        if self.kind == "type4":
            return 4
        return 2 if f.in_value_group(self.radius) else 3

    def validate(self, f: FieldSpec) -> None:
        if self.kind == "type1":
            return
        if self.radius is None or self.radius.inf:
            raise ValueError("point radius must be positive")
        if self.kind == "type23":
            return
        if self.kind != "type4":
            raise ValueError(f"unknown point kind {self.kind!r}")
        if not self.family:
            raise ValueError("type (4) point needs a nonempty nested family")
        prev = None
        for c, r in self.family:
            if not r < self.radius:
                raise ValueError("family radii must exceed the declared radius")
            if prev is not None:
                pc, pr = prev
                if not r > pr:
                    raise ValueError("family radii must strictly decrease")
                if valuation(c - pc, f) < pr:
                    raise ValueError("family centers are not nested")
            prev = (c, r)


def _dist(a, b, f: FieldSpec) -> Exponent:
    return valuation(a - b, f)


def _effective_kind(d: Disk, f: FieldSpec) -> str:
    if d.kind == CLOSURE_OPEN and not f.in_value_group(d.radius):
        return CLOSED
    return d.kind


def contains_point(d: Disk, pt: BerkPoint, f: FieldSpec) -> bool:
    """Membership of a Berkovich point in a closed disk or closure of an open disk."""
    R = d.radius
    if pt.kind == "type1":
        dist = _dist(pt.center, d.center, f)
        return dist >= R if d.kind == CLOSED else dist > R
    if pt.kind == "type23":
        return _contains_shilov(d, pt.center, pt.radius, f)
    # type (4): decided from the deepest family disk when it is fine enough
    cL, rL = pt.family[-1]
    if rL >= R:
        # family disk no larger than d: inside iff its Shilov point is
        if d.kind == CLOSURE_OPEN and rL == R and _dist(cL, d.center, f) >= R:
            raise UndecidableMembership("type (4) point sits under the Shilov point of the disk")
        return _contains_shilov(d, cL, rL, f)
    if pt.radius < R or _dist(cL, d.center, f) < rL:
        return False
    raise UndecidableMembership("disk is finer than the finite family of the type (4) point")


def _contains_shilov(d: Disk, c, rho: Exponent, f: FieldSpec) -> bool:
    R = d.radius
    dist = _dist(c, d.center, f)
    if d.kind == CLOSED:
        return dist >= R and rho >= R
    return (dist > R and rho > R) or (rho == R and dist >= R)


def disk_contains(outer: Disk, inner: Disk, f: FieldSpec) -> bool:
    """Whether ``inner`` is a subset of ``outer`` (as sets of Berkovich points)."""
    ko, ki = _effective_kind(outer, f), _effective_kind(inner, f)
    dist = _dist(inner.center, outer.center, f)
    R1, R2 = inner.radius, outer.radius
    if ko == CLOSED:
        return R1 >= R2 and dist >= R2
    if ki == CLOSED:
        return R1 > R2 and dist > R2
    return dist > R2 and R1 >= R2


def _touching(d1: Disk, d2: Disk, f: FieldSpec) -> bool:
    return (
        _effective_kind(d1, f) == CLOSURE_OPEN
        and _effective_kind(d2, f) == CLOSURE_OPEN
        and d1.radius == d2.radius
        and _dist(d1.center, d2.center, f) == d1.radius
    )


def scalar_key(c):
    """Order scalars by absolute value (0 first), then by literal."""
    v = c.valuation()
    return (not v.inf, Exponent() if v.inf else -v, c.sort_key())


def _disk_key(d: Disk):
    return scalar_key(d.center) + (d.radius, d.kind)


@dataclass(frozen=True)
class Spectrum:
    """A normalized finite union of pairwise non-nested disks."""

    disks: tuple
    components: tuple
    field: FieldSpec

    @property
    def mixed_kind(self) -> bool:
        return len({d.kind for d in self.disks}) > 1

    def contains(self, pt: BerkPoint) -> bool:
        return any(contains_point(d, pt, self.field) for d in self.disks)

    def __iter__(self):
        return iter(self.disks)

    def __len__(self):
        return len(self.disks)


def normalize(disks: Sequence[Disk], f: FieldSpec) -> Spectrum:
    """Canonical form: drop contained disks, group touching ones, sort."""
    disks = list(disks)
    if not disks:
        raise ValueError("cannot normalize an empty union of disks")
    ordered = sorted(disks, key=_disk_key)
    kept: list[Disk] = []
    for d in ordered:
        if any(disk_contains(k, d, f) for k in kept):
            continue
        kept = [k for k in kept if not disk_contains(d, k, f)]
        kept.append(d)
    kept.sort(key=_disk_key)

    parent = list(range(len(kept)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(kept)):
        for j in range(i + 1, len(kept)):
            if _touching(kept[i], kept[j], f):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(kept)):
        groups.setdefault(find(i), []).append(i)
    components = tuple(sorted(tuple(g) for g in groups.values()))
    return Spectrum(tuple(kept), components, f)


def separation(pt: BerkPoint, s: Spectrum):
    """``"contained"`` or the exponent of the distance from a rigid point to ``s``."""
    if pt.kind != "type1":
        raise ValueError("separation is defined for rigid points")
    if s.contains(pt):
        return "contained"
    return max(_dist(pt.center, d.center, s.field) for d in s.disks)


def poly_image(Q: Sequence, d: Disk, f: FieldSpec) -> Disk:
    """Image of a disk under a nonconstant polynomial (coefficients low to high)."""
    Q = _poly.trim(list(Q))
    if len(Q) < 2:
        raise ValueError("poly_image needs a nonconstant polynomial")
    zero = f.zero()
    coeffs = _poly.taylor_shift([f.scalar(c) for c in Q], d.center, zero)
    radius = min(
        valuation(c, f) + d.radius * i for i, c in enumerate(coeffs) if i >= 1 and c
    )
    return Disk(coeffs[0], radius, d.kind)


def enclosing_radius(s: Spectrum) -> Exponent:
    """Exponent of the smallest closed disk centred at 0 containing ``s``."""
    return min(min(valuation(d.center, s.field), d.radius) for d in s.disks)


def spectrum_contains(big: Spectrum, small: Spectrum) -> bool:
    f = big.field
    return all(any(disk_contains(b, d, f) for b in big.disks) for d in small.disks)


def spectra_equal(s1: Spectrum, s2: Spectrum) -> bool:
    return spectrum_contains(s1, s2) and spectrum_contains(s2, s1)


# --------------------------------------------------------------------------
# Neighbourhoods in the space of compact subsets


@dataclass(frozen=True)
class Region:
    """Open set ``{y : inner < |T - c|_y < outer}``; ``inner=None`` is an open disk."""

    center: object
    outer: Exponent
    inner: Exponent | None = None

    def __post_init__(self):
        object.__setattr__(self, "outer", Exponent.of(self.outer))
        if self.inner is not None:
            inner = Exponent.of(self.inner)
            object.__setattr__(self, "inner", inner)
            if not inner > self.outer:
                raise ValueError("annulus inner radius must be below the outer radius")

    @property
    def is_disk(self) -> bool:
        return self.inner is None

    def _value_ok(self, v: Exponent) -> bool:
        # v is the exponent of |T - c|; open bounds
        if not v > self.outer:
            return False
        return self.inner is None or v < self.inner


@dataclass(frozen=True)
class Neighborhood:
    """The basic open set of compact subsets inside ``U`` meeting every part."""

    U: tuple
    parts: tuple = field(default_factory=tuple)

    def validate(self, f: FieldSpec) -> None:
        for part in self.parts:
            for reg in part:
                if not any(_region_in_region(reg, u, f) for u in self.U):
                    raise ValueError("cover part is not contained in U")


def _value_range(d: Disk, c, f: FieldSpec):
    """Exponents of ``|T - c|`` over points of ``d``: ``("point", v)`` or ``("down", R)``."""
    dist = _dist(d.center, c, f)
    k = _effective_kind(d, f)
    if k == CLOSED:
        inside = dist >= d.radius
    else:
        inside = dist > d.radius
    if inside:
        return ("down", d.radius)  # all values in [0, R]
    return ("point", dist)


def _disk_meets_region(d: Disk, reg: Region, f: FieldSpec) -> bool:
    kind, v = _value_range(d, reg.center, f)
    if kind == "point":
        return reg._value_ok(v)
    if reg.inner is None:
        return True
    # values fill [0, R]; meets (inner, outer) iff R > inner
    return v < reg.inner


def _disk_in_region(d: Disk, reg: Region, f: FieldSpec) -> bool:
    kind, v = _value_range(d, reg.center, f)
    if kind == "point":
        return reg._value_ok(v)
    return reg.inner is None and v > reg.outer


def _disk_covered(d: Disk, regions: Sequence[Region], f: FieldSpec) -> bool:
    if any(_disk_in_region(d, reg, f) for reg in regions):
        return True
    shilov = BerkPoint.shilov(d.center, d.radius)
    for reg in regions:
        if reg.inner is None or not _point_in_region(shilov, reg, f):
            continue
        # the annulus swallows the rim of d around its center reg.center;
        # what remains is the closed disk of the inner radius about that center
        if _dist(reg.center, d.center, f) >= d.radius:
            rest = Disk(reg.center, reg.inner, CLOSED)
            if _disk_covered(rest, regions, f):
                return True
    return False


def _point_in_region(pt: BerkPoint, reg: Region, f: FieldSpec) -> bool:
    v = min(_dist(pt.center, reg.center, f), pt.radius)
    return reg._value_ok(v)


def _region_in_region(a: Region, b: Region, f: FieldSpec) -> bool:
    dist = _dist(a.center, b.center, f)
    if a.inner is None:
        if dist > a.outer:
            # a contains b's center
            return b.inner is None and a.outer >= b.outer
        return b._value_ok(dist)
    if dist >= a.inner:
        # b's center is within the hole: |T - b.center| = |T - a.center| on a
        lo_ok = b.inner is None or a.inner <= b.inner
        return lo_ok and a.outer >= b.outer
    if dist > a.outer:
        # b's center lies in a, so values of |T - b.center| fill [0, outer)
        return b.inner is None and a.outer >= b.outer
    return b._value_ok(dist)


def neighborhood_member(s: Spectrum, n: Neighborhood) -> bool:
    """Whether ``s`` lies in ``U`` and meets every cover part."""
    f = s.field
    if not all(_disk_covered(d, n.U, f) for d in s.disks):
        return False
    return all(
        any(_disk_meets_region(d, reg, f) for d in s.disks for reg in part)
        for part in n.parts
    )
