"""Differential modules with constant coefficients and the domains they live on.

A module is given either by its constant matrix ``G`` (so that the connection
reads ``d + G`` on a basis) or by a monic differential polynomial, which is
turned into a matrix through its companion form.  Its spectral data is the
multiset of eigenvalues of ``G``; when an irreducible factor of the
characteristic polynomial has no root among the package's scalars only the
valuations of its roots (Newton polygon) are reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import sympy as sp

from ultraspec import _poly
from ultraspec.berkline import CLOSED, CLOSURE_OPEN, BerkPoint, Disk, disk_contains, scalar_key
from ultraspec.valcore import (
    Exponent,
    FieldSpec,
    PuiseuxScalar,
    QuadScalar,
    valuation,
)

__all__ = [
    "DiffPoly",
    "DiffModuleSpec",
    "ModuleAnalysis",
    "UnresolvedFactor",
    "NewtonPolygon",
    "ClosedDiskDomain",
    "AffinoidDomain",
    "DisjointUnionDomain",
    "PointDomain",
    "DomainError",
    "companion_matrix",
    "characteristic_polynomial",
    "eigenvalue_multiset",
    "newton_polygon_slopes",
    "validate_domain",
]


class DomainError(ValueError):
    """An ill-formed domain description."""


# --------------------------------------------------------------------------
# Modules


@dataclass(frozen=True)
class DiffPoly:
    """``g_0 + g_1 D + ... + g_{nu-1} D^{nu-1} + D^nu`` with constant ``g_i``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise ValueError("a differential polynomial needs degree >= 1")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def transform(self, f: FieldSpec) -> list:
        """The commutative polynomial with the same coefficients, low to high."""
        return [f.scalar(c) for c in self.coeffs] + [f.one()]


def companion_matrix(P: DiffPoly, f: FieldSpec) -> tuple:
    nu = P.order
    zero, one = f.zero(), f.one()
    rows = [[zero] * nu for _ in range(nu)]
    for i in range(1, nu):
        rows[i][i - 1] = one
    for i, g in enumerate(P.coeffs):
        rows[i][nu - 1] = -f.scalar(g)
    return tuple(tuple(r) for r in rows)


def _check_square(G) -> int:
    n = len(G)
    if n == 0 or any(len(row) != n for row in G):
        raise ValueError("matrix must be square and nonempty")
    return n


def characteristic_polynomial(G: Sequence[Sequence], f: FieldSpec) -> list:
    """``det(X I - G)`` by Faddeev-LeVerrier, coefficients low to high."""
    n = _check_square(G)
    A = [[f.scalar(x) for x in row] for row in G]
    zero, one = f.zero(), f.one()
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    M = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M <- A M + c_{n-k+1} I
        AM = [[sum((A[i][l] * M[l][j] for l in range(n)), zero) for j in range(n)] for i in range(n)]
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            AM[i][i] = AM[i][i] + c_prev
        M = AM
        trace = sum((sum((A[i][l] * M[l][i] for l in range(n)), zero) for i in range(n)), zero)
        coeffs[n - k] = -(trace / k)
    return coeffs


@dataclass(frozen=True)
class NewtonPolygon:
    """Root valuations with multiplicities; roots equal to zero are counted apart."""

    valuations: tuple  # ((Exponent, multiplicity), ...) sorted increasingly
    zero_roots: int = 0

    def as_multiset(self) -> list:
        out = []
        for v, m in self.valuations:
            out.extend([v] * m)
        return out


def newton_polygon_slopes(Q: Sequence, f: FieldSpec) -> NewtonPolygon:
    """Valuations of the roots of ``Q`` read off its lower convex hull."""
    if f.mode == "trivial":
        raise NotImplementedError("Newton polygons need a nontrivial valuation")
    Q = _poly.trim([f.scalar(c) for c in Q])
    if len(Q) < 2:
        raise ValueError("Newton polygon of a constant polynomial")
    k = next(i for i, c in enumerate(Q) if c)
    pts = [(i, valuation(c, f)) for i, c in enumerate(Q) if c]
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (i1, v1), (i2, v2) = hull[-2], hull[-1]
            i3, v3 = pt
            # drop the middle point if it is not strictly below the chord
            if (v2 - v1) * (i3 - i1) >= (v3 - v1) * (i2 - i1):
                hull.pop()
            else:
                break
        hull.append(pt)
    vals: dict = {}
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        root_val = (v1 - v2) / (i2 - i1)
        vals[root_val] = vals.get(root_val, 0) + (i2 - i1)
    return NewtonPolygon(tuple(sorted(vals.items(), key=lambda kv: kv[0])), k)


# ---- factorization through sympy -----------------------------------------

_X = sp.Symbol("X")
_S = sp.Symbol("s")


def _to_sympy(c, f: FieldSpec, D: int = 1):
    if isinstance(c, PuiseuxScalar):
        return sum(
            (sp.Rational(cf.numerator, cf.denominator) * _S ** int(q * D) for q, cf in c.terms),
            sp.Integer(0),
        )
    out = sp.Rational(c.u.numerator, c.u.denominator)
    if c.v:
        out += sp.Rational(c.v.numerator, c.v.denominator) * sp.sqrt(f.p)
    return out


def _rat(e) -> Fraction:
    e = sp.nsimplify(e)
    if not e.is_Rational:
        raise ValueError(f"non-rational coefficient {e}")
    return Fraction(int(e.p), int(e.q))


def _from_sympy(e, f: FieldSpec, D: int = 1):
    e = sp.expand(e)
    if f.mode == "equal-char-zero":
        terms = {}
        for mono, cf in sp.Poly(e, _S, 1 / _S).terms() if e.has(_S) else [((0, 0), e)]:
            q = Fraction(mono[0] - mono[1], D)
            terms[q] = terms.get(q, Fraction(0)) + _rat(cf)
        return PuiseuxScalar(terms)
    if f.mode == "p-adic":
        r = sp.sqrt(f.p)
        v = e.coeff(r)
        u = sp.expand(e - v * r)
        return QuadScalar(_rat(u), _rat(v), f.p)
    return QuadScalar(_rat(e), 0, None)


def _puiseux_denominator(Q, nu: int) -> int:
    den = 1
    for c in Q:
        for q, _ in c.terms:
            den = lcm(den, q.denominator)
    return den * lcm(*range(1, min(nu, 4) + 1))


@dataclass(frozen=True)
class UnresolvedFactor:
    """Monic factor without roots among the scalars, with its root valuations."""

    coeffs: tuple
    multiplicity: int
    newton: NewtonPolygon | None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ModuleAnalysis:
    charpoly: tuple
    eigenvalues: tuple  # ((scalar, multiplicity), ...)
    unresolved: tuple = field(default_factory=tuple)

    @property
    def resolved(self) -> bool:
        return not self.unresolved

    def eigenvalue_set(self) -> list:
        return [a for a, _ in self.eigenvalues]


def _monic_or_none(coeffs: list):
    lead = coeffs[-1]
    try:
        inv = lead.inverse()
    except (ArithmeticError, ZeroDivisionError):
        return None
    return [c * inv for c in coeffs]


def eigenvalue_multiset(Q: Sequence, f: FieldSpec) -> tuple[tuple, tuple]:
    """Roots of ``Q`` with multiplicities, and the factors left unresolved."""
    Q = _poly.trim([f.scalar(c) for c in Q])
    if len(Q) < 2:
        raise ValueError("eigenvalues of a constant polynomial")
    Q = _poly.monic(Q)
    nu = len(Q) - 1
    D = _puiseux_denominator(Q, nu) if f.mode == "equal-char-zero" else 1
    expr = sum((_to_sympy(c, f, D) * _X**i for i, c in enumerate(Q)), sp.Integer(0))
    if f.mode == "equal-char-zero":
        shift = min(
            (int(q * D) for c in Q for q, _ in c.terms),
            default=0,
        )
        expr = sp.expand(expr * _S ** (-shift)) if shift < 0 else expr
        _, factors = sp.factor_list(expr, _X, _S)
    elif f.mode == "p-adic":
        _, factors = sp.factor_list(expr, _X, extension=sp.sqrt(f.p))
    else:
        _, factors = sp.factor_list(expr, _X)

    roots: dict = {}
    unresolved: list = []
    leftover = list(Q)
    zero = f.zero()
    for fac, mult in factors:
        poly = sp.Poly(fac, _X)
        deg = poly.degree()
        if deg == 0:
            continue
        coeffs = [_from_sympy(c, f, D) for c in reversed(poly.all_coeffs())]
        monic = _monic_or_none(coeffs)
        if monic is None:
            continue  # swept into the leftover factor below
        if deg == 1:
            root = -monic[0]
            roots[root] = roots.get(root, 0) + mult
            for _ in range(mult):
                leftover, _r = _poly.divmod_(leftover, [-root, f.one()], zero)
        else:
            unresolved.append((tuple(monic), mult))
            for _ in range(mult):
                leftover, _r = _poly.divmod_(leftover, monic, zero)
    if len(_poly.trim(leftover)) > 1:
        unresolved.append((tuple(_poly.monic(leftover)), 1))
    eig = tuple(sorted(roots.items(), key=lambda kv: scalar_key(kv[0])))
    unres = []
    for coeffs, mult in unresolved:
        np_ = None if f.mode == "trivial" else newton_polygon_slopes(coeffs, f)
        unres.append(UnresolvedFactor(coeffs, mult, np_))
    return eig, tuple(unres)


@dataclass(frozen=True)
class DiffModuleSpec:
    """A constant matrix ``G``; ``source`` remembers a differential polynomial."""

    matrix: tuple
    source: DiffPoly | None = None

    @classmethod
    def from_matrix(cls, G, f: FieldSpec) -> "DiffModuleSpec":
        _check_square(G)
        return cls(tuple(tuple(f.scalar(x) for x in row) for row in G))

    @classmethod
    def from_diffpoly(cls, P: DiffPoly, f: FieldSpec) -> "DiffModuleSpec":
        return cls(companion_matrix(P, f), P)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def analyze(self, f: FieldSpec) -> ModuleAnalysis:
        chi = characteristic_polynomial(self.matrix, f)
        eig, unres = eigenvalue_multiset(chi, f)
        return ModuleAnalysis(tuple(chi), eig, unres)


# --------------------------------------------------------------------------
# Domains


@dataclass(frozen=True)
class ClosedDiskDomain:
    center: object
    radius: Exponent

    kind = "closed-disk"

    def __post_init__(self):
        object.__setattr__(self, "radius", Exponent.of(self.radius))


@dataclass(frozen=True)
class AffinoidDomain:
    """``D+(c_0, r_0)`` minus the open disks ``D-(c_i, r_i)``."""

    center: object
    radius: Exponent
    holes: tuple = ()

    kind = "affinoid"

    def __post_init__(self):
        object.__setattr__(self, "radius", Exponent.of(self.radius))
        object.__setattr__(
            self, "holes", tuple((c, Exponent.of(r)) for c, r in self.holes)
        )

    def min_radius_exp(self) -> Exponent:
        # the smallest radius is the largest exponent
        return max([self.radius] + [r for _, r in self.holes])


@dataclass(frozen=True)
class DisjointUnionDomain:
    parts: tuple

    kind = "disjoint-union"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class PointDomain:
    """The completed residue field ``H(x)`` of a point of type (2), (3) or (4)."""

    point: BerkPoint

    kind = "point"

    def point_type(self, f: FieldSpec) -> int:
        return self.point.point_type(f)


def _check_radius(r: Exponent) -> None:
    if r.inf:
        raise DomainError("radii must be strictly positive")


def _connected_disks(dom) -> tuple[Disk, list[Disk]]:
    if isinstance(dom, ClosedDiskDomain):
        return Disk(dom.center, dom.radius, CLOSED), []
    return (
        Disk(dom.center, dom.radius, CLOSED),
        [Disk(c, r, CLOSURE_OPEN) for c, r in dom.holes],
    )


def _open_disjoint(c1, r1, c2, r2, f: FieldSpec) -> bool:
    # D-(c1, r1) and D-(c2, r2) are disjoint iff |c1 - c2| >= max(r1, r2)
    return valuation(c1 - c2, f) <= min(r1, r2)


def _connected_disjoint(a, b, f: FieldSpec) -> bool:
    outer_a, holes_a = _connected_disks(a)
    outer_b, holes_b = _connected_disks(b)
    dist = valuation(outer_a.center - outer_b.center, f)
    # closed disks: disjoint iff |c_a - c_b| > max(r_a, r_b)
    if dist < min(outer_a.radius, outer_b.radius):
        return True
    # otherwise nested; the smaller must sit inside a hole of the larger
    small, big_holes = (outer_b, holes_a) if outer_b.radius >= outer_a.radius else (outer_a, holes_b)
    return any(_open_contains_closed(h, small, f) for h in big_holes)


def _open_contains_closed(hole: Disk, d: Disk, f: FieldSpec) -> bool:
    return disk_contains(hole, d, f) and d.radius > hole.radius


def validate_domain(dom, f: FieldSpec) -> None:
    """Raise :class:`DomainError` unless ``dom`` is a well-formed domain."""
    if isinstance(dom, ClosedDiskDomain):
        f.scalar(dom.center)
        _check_radius(dom.radius)
        return
    if isinstance(dom, AffinoidDomain):
        _check_radius(dom.radius)
        for c, r in dom.holes:
            _check_radius(r)
            if r < dom.radius:
                raise DomainError("hole radius exceeds the outer radius")
            if valuation(c - dom.center, f) < dom.radius:
                raise DomainError("hole centre lies outside the outer disk")
        for i, (c1, r1) in enumerate(dom.holes):
            for c2, r2 in dom.holes[i + 1:]:
                if not _open_disjoint(c1, r1, c2, r2, f):
                    raise DomainError("holes overlap")
        return
    if isinstance(dom, DisjointUnionDomain):
        if not dom.parts:
            raise DomainError("empty disjoint union")
        for part in dom.parts:
            if not isinstance(part, (ClosedDiskDomain, AffinoidDomain)):
                raise DomainError("disjoint unions take disks and affinoids only")
            validate_domain(part, f)
        for i, a in enumerate(dom.parts):
            for b in dom.parts[i + 1:]:
                if not _connected_disjoint(a, b, f):
                    raise DomainError("components of the union overlap")
        return
    if isinstance(dom, PointDomain):
        pt = dom.point
        if pt.kind == "type1":
            raise DomainError("H(x) of a rigid point is the ground field; not a domain here")
        try:
            pt.validate(f)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        return
    raise DomainError(f"unknown domain {dom!r}")
