"""Truncated Banach-space models used to cross-check the closed forms.

Functions on a domain are modelled by finitely many monomials ``(S - c)^i``
(negative ``i`` for principal parts at holes and for Laurent bands), each
carrying the weight exponent ``i * rho`` of its norm.  Elements are normed by
the weighted max-norm, operators by the exact weighted matrix formula

    ||A||  ->  min over nonzero entries (i, j) of  val(A_ij) + w_i - w_j,

which is the operator norm of a matrix acting on an orthogonal basis.
Nothing here is consulted by :mod:`ultraspec.specengine`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ultraspec import _poly
from ultraspec.berkline import BerkPoint
from ultraspec.diffmod import (
    AffinoidDomain,
    ClosedDiskDomain,
    DisjointUnionDomain,
    PointDomain,
    characteristic_polynomial,
    eigenvalue_multiset,
)
from ultraspec.valcore import (
    INF,
    Exponent,
    FieldSpec,
    PuiseuxScalar,
    omega,
    valuation,
)

__all__ = [
    "TruncationError",
    "OracleError",
    "TruncatedSpace",
    "TruncatedOperator",
    "truncated_power_norm",
    "truncated_power_norms",
    "spectral_norm_estimate",
    "kernel_witness",
    "divergence_witness",
    "annulus_resolvent_probe",
    "resolvent_radius_probe",
    "type4_bound_check",
    "finite_dim_block_spectrum_check",
]


class TruncationError(ValueError):
    """The truncation is too small for the requested quantity to be exact."""


class OracleError(ValueError):
    """A probe was asked something outside its documented scope."""


# --------------------------------------------------------------------------
# Spaces and operators


@dataclass(frozen=True)
class TruncatedSpace:
    """Orthogonal basis ``(summand, center, power)`` with weight ``power * rho``."""

    basis: tuple  # ((summand, center, power, rho), ...)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {(s, i): k for k, (s, _c, i, _r) in enumerate(self.basis)}
        )

    def __len__(self):
        return len(self.basis)

    def weight(self, k: int) -> Exponent:
        _s, _c, i, rho = self.basis[k]
        return rho * i

    def index(self, summand: int, power: int):
        return self._index.get((summand, power))

    def norm_exp(self, vec: dict, f: FieldSpec) -> Exponent:
        return min(
            (valuation(x, f) + self.weight(k) for k, x in vec.items() if x), default=INF
        )

    @classmethod
    def disk(cls, c, rho, N: int, summand: int = 0) -> "TruncatedSpace":
        rho = Exponent.of(rho)
        return cls(tuple((summand, c, i, rho) for i in range(N + 1)))

    @classmethod
    def laurent(cls, c, rho, N: int, summand: int = 0) -> "TruncatedSpace":
        """Band ``-N..N`` at a single radius: the model of ``H(x_{c,r})``."""
        rho = Exponent.of(rho)
        return cls(tuple((summand, c, i, rho) for i in range(-N, N + 1)))

    @classmethod
    def for_domain(cls, dom, N: int) -> "TruncatedSpace":
        """Mittag-Leffler model: a disk summand plus one principal-part summand per hole."""
        basis: list = []

        def add_connected(d):
            s = len({b[0] for b in basis})
            basis.extend((s, d.center, i, d.radius) for i in range(N + 1))
            for c, r in getattr(d, "holes", ()):
                s += 1
                basis.extend((s, c, -j, r) for j in range(1, N + 1))

        if isinstance(dom, (ClosedDiskDomain, AffinoidDomain)):
            add_connected(dom)
        elif isinstance(dom, DisjointUnionDomain):
            for part in dom.parts:
                add_connected(part)
        elif isinstance(dom, PointDomain):
            pt = dom.point
            if pt.kind == "type4":
                # r(x) is all the closed form uses; a disk of that radius
                c = pt.family[-1][0]
                return cls.disk(c, pt.radius, N)
            return cls.laurent(pt.center, pt.radius, N)
        else:
            raise OracleError(f"no truncated model for {dom!r}")
        return cls(tuple(basis))


@dataclass
class TruncatedOperator:
    """Sparse exact matrix, stored by columns: ``cols[j] = {i: entry}``.

    Images leaving the band are dropped, so this is the compression of the
    true operator to the truncation.
    """

    space: TruncatedSpace
    cols: list
    field: FieldSpec

    @classmethod
    def derivation(cls, space: TruncatedSpace, f: FieldSpec) -> "TruncatedOperator":
        cols = []
        for s, _c, i, _r in space.basis:
            col = {}
            if i != 0:
                k = space.index(s, i - 1)
                if k is not None:
                    col[k] = f.scalar(i)
            cols.append(col)
        return cls(space, cols, f)

    @classmethod
    def identity(cls, space: TruncatedSpace, f: FieldSpec) -> "TruncatedOperator":
        return cls(space, [{k: f.one()} for k in range(len(space))], f)

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for j, x in vec.items():
            if not x:
                continue
            for i, a in self.cols[j].items():
                out[i] = out[i] + a * x if i in out else a * x
        return {i: x for i, x in out.items() if x}

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.space, [self.apply(c) for c in other.cols], self.field)

    def norm_exp(self) -> Exponent:
        sp, f = self.space, self.field
        best = INF
        for j, col in enumerate(self.cols):
            wj = sp.weight(j)
            for i, a in col.items():
                e = valuation(a, f) + sp.weight(i) - wj
                if e < best:
                    best = e
        return best


def _check_domain_for_band(dom, n: int, N: int) -> None:
    negative = isinstance(dom, PointDomain) and dom.point.kind != "type4"
    negative = negative or any(
        getattr(p, "holes", ())
        for p in (dom.parts if isinstance(dom, DisjointUnionDomain) else (dom,))
    )
    if N < n or (negative and N < n + 1):
        raise TruncationError(f"truncation N={N} too small for n={n}")


def truncated_power_norms(nmax: int, dom, f: FieldSpec, N: int) -> list:
    """Norm exponents of ``(d/dS)^n`` for ``n = 0..nmax`` on one truncation."""
    _check_domain_for_band(dom, nmax, N)
    space = TruncatedSpace.for_domain(dom, N)
    d = TruncatedOperator.derivation(space, f)
    power = TruncatedOperator.identity(space, f)
    out = [power.norm_exp()]
    for _ in range(nmax):
        power = d @ power
        out.append(power.norm_exp())
    return out


def truncated_power_norm(n: int, dom, f: FieldSpec, N: int) -> Exponent:
    """Exact norm exponent of ``(d/dS)^n`` on the degree-``N`` truncation."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return truncated_power_norms(n, dom, f, N)[n]


@dataclass(frozen=True)
class SpectralEstimate:
    ns: tuple
    exponents: tuple  # norm exponent of d^n, divided by n
    limit: Exponent
    gap: Exponent  # limit minus the last per-n exponent

    @property
    def monotone(self) -> bool:
        """Norms ``||d^n||^(1/n)`` never increase along the sampled n."""
        return all(a <= b for a, b in zip(self.exponents, self.exponents[1:]))


def _dominant_radius_exp(dom) -> Exponent:
    if isinstance(dom, DisjointUnionDomain):
        return max(_dominant_radius_exp(p) for p in dom.parts)
    if isinstance(dom, PointDomain):
        return dom.point.radius
    return max([dom.radius] + [r for _c, r in getattr(dom, "holes", ())])


def spectral_norm_estimate(dom, f: FieldSpec, K: int) -> SpectralEstimate:
    """``||d^n||^(1/n)`` at ``n = base^1 .. base^K`` against ``omega / min r``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    base = f.base
    ns = tuple(base**k for k in range(1, K + 1))
    norms = truncated_power_norms(ns[-1], dom, f, ns[-1] + 1)
    exps = tuple(norms[n] / n for n in ns)
    limit = omega(f) - _dominant_radius_exp(dom)
    return SpectralEstimate(ns, exps, limit, limit - exps[-1])


# --------------------------------------------------------------------------
# Witnesses on the closed disk


def _disk_rho(dom) -> Exponent:
    if isinstance(dom, ClosedDiskDomain) or (
        isinstance(dom, AffinoidDomain) and not dom.holes
    ):
        return dom.radius
    raise OracleError("this witness needs a closed-disk domain")


def kernel_witness(a, dom, f: FieldSpec) -> bool:
    """Whether ``exp(a (S - c))`` converges on the disk, so ``d - a`` has a kernel.

    Compares the exact coefficient exponents ``val(a^n / n!) + n rho`` at two
    consecutive powers of the base; they tend to infinity iff they increase.
    """
    rho = _disk_rho(dom)
    a = f.scalar(a)
    if not a:
        return True
    base = f.base

    def coeff_exp(n: int) -> Exponent:
        fact = 1
        for k in range(2, n + 1):
            fact *= k
        return valuation(a**n / f.scalar(fact), f) + rho * n

    if f.mode == "p-adic":
        n1, n2 = base, base * base
    else:
        n1, n2 = 1, 2
    return coeff_exp(n2) > coeff_exp(n1)


def divergence_witness(f: FieldSpec, rho, L: int) -> list:
    """Exponents of ``|a_{p^l}| r^{p^l}`` for the non-surjectivity witness at ``|a| = omega/r``.

    The right-hand side is ``g = sum_l beta^l / alpha^(p^l - 1) (S - c)^(p^l - 1)``
    with ``|alpha| = r`` and ``|beta| = |p|^(1/2)``; the antecedent is computed
    with the one-step recurrence ``n a_n = a a_(n-1) + b_(n-1)``, ``a_0 = 0``.
    """
    if f.mode != "p-adic":
        raise OracleError("the divergence witness needs a p-adic field")
    rho = Exponent.of(rho)
    p = f.p
    try:
        a = f.uniformizer_power(omega(f) - rho)
        alpha = f.uniformizer_power(rho)
    except ValueError as exc:
        raise OracleError(f"boundary not realizable: {exc}") from None
    beta = f.uniformizer_power(Fraction(1, 2))
    top = p**L
    b = {p**l - 1: beta**l / alpha ** (p**l - 1) for l in range(L + 1)}
    zero = f.zero()
    coeffs = [zero]
    for n in range(1, top + 1):
        coeffs.append((a * coeffs[n - 1] + b.get(n - 1, zero)) / n)
    return [valuation(coeffs[p**l], f) + rho * p**l for l in range(L + 1)]


# --------------------------------------------------------------------------
# Probes on principal parts


@dataclass(frozen=True)
class AnnulusProbe:
    verdict: str  # "diverges" or "converges"
    slope: Fraction
    exponents: tuple  # (n, exponent of |a_n| r^-n) over the window


def _hole_radius(dom) -> tuple:
    if isinstance(dom, AffinoidDomain) and dom.holes:
        c, r = max(dom.holes, key=lambda h: h[1])
        return c, r
    if isinstance(dom, PointDomain) and dom.point.kind == "type23":
        return dom.point.center, dom.point.radius
    raise OracleError("the annulus probe needs a domain with a hole (or H(x) of type 2/3)")


def annulus_resolvent_probe(a, dom, f: FieldSpec, N: int = 256) -> AnnulusProbe:
    """Solve ``(d - a) f = 1/(S - c)`` on the principal parts at the smallest hole.

    The coefficients are ``a_n = (n-1)! / (-a)^n``; the verdict is read from
    the slope of the lower envelope of ``val(a_n) - n rho_1`` over ``[N/2, N]``:
    a strictly positive slope means the solution converges.
    """
    a = f.scalar(a)
    if not a:
        raise OracleError("a = 0 always lies in the spectrum; probe skipped")
    if N < 8:
        raise TruncationError("window too short")
    c, rho1 = _hole_radius(dom)
    coeffs = [None, -(f.one() / a)]
    for n in range(2, N + 1):
        coeffs.append(-(coeffs[n - 1] * (n - 1)) / a)
    exps = [(n, valuation(coeffs[n], f) - rho1 * n) for n in range(N // 2, N + 1)]
    q = N // 4
    lo1 = min(e for n, e in exps if n < N // 2 + q)
    lo2 = min(e for n, e in exps if n >= N - q)
    slope = (lo2 - lo1) / q
    verdict = "converges" if slope > 0 else "diverges"
    return AnnulusProbe(verdict, slope, tuple(exps))


def _shift_plan(space: TruncatedSpace) -> list:
    # back-substitution order: each summand from its top power down
    order = sorted(range(len(space)), key=lambda k: (space.basis[k][0], -space.basis[k][2]))
    plan = []
    for k in order:
        s, _c, i, _r = space.basis[k]
        src = space.index(s, i + 1)
        plan.append((k, src if i + 1 != 0 else None, i + 1))
    return plan


def _solve_shift(plan: list, inv, y: dict, zero) -> dict:
    """``x`` with ``(d - a) x = y`` on the truncation, ``inv = 1/a``."""
    x: dict = {}
    for k, src, coef in plan:
        acc = -y[k] if k in y else None
        if src is not None and src in x:
            t = x[src] * coef
            acc = t if acc is None else acc + t
        if acc:
            x[k] = acc * inv
    return x


@dataclass(frozen=True)
class ResolventProbe:
    separation: Exponent
    per_n: tuple  # ((n, norm exponent of R^n divided by n), ...)


def resolvent_radius_probe(a, dom, f: FieldSpec, N: int = 32, K: int | None = None) -> ResolventProbe:
    """Distance from ``a`` to the spectrum, read from ``||(d - a)^-n||^(1/n)``.

    ``R^n`` is applied to every basis vector with the triangular recurrence;
    the estimate is ``-max_n log||R^n|| / n`` over ``n = 1, base, base^2, ...``.
    """
    from ultraspec.specengine import derivation_spectrum

    a = f.scalar(a)
    if derivation_spectrum(dom, f).contains(BerkPoint.rigid(a)):
        raise OracleError("inside spectrum")
    base = f.base
    if K is None:
        K = 1
        while base**K < 8:
            K += 1
    ns = [1] + [base**k for k in range(1, K + 1)]
    space = TruncatedSpace.for_domain(dom, N)
    per_n = {n: INF for n in ns}
    plan = _shift_plan(space)
    inv, zero = f.one() / a, f.zero()
    for j in range(len(space)):
        vec = {j: f.one()}
        wj = space.weight(j)
        for n in range(1, ns[-1] + 1):
            vec = _solve_shift(plan, inv, vec, zero)
            if n in per_n:
                e = space.norm_exp(vec, f) - wj
                if e < per_n[n]:
                    per_n[n] = e
    rows = tuple((n, per_n[n] / n) for n in ns)
    return ResolventProbe(-max(e for _n, e in rows), rows)


# --------------------------------------------------------------------------
# Type (4) boundedness


@dataclass(frozen=True)
class Type4Report:
    ratio_exponents: tuple  # per sample, per level: val|f| - val|g|
    bound: Exponent  # exponent of r(x)
    min_ratio: Exponent
    holds: bool


def _gauss_exp(coeffs: list, c, rho: Exponent, f: FieldSpec) -> Exponent:
    shifted = _poly.taylor_shift(coeffs, c, f.zero())
    return min(
        (valuation(x, f) + rho * i for i, x in enumerate(shifted) if x), default=INF
    )


def _inverse_on_polys(g: list, a, f: FieldSpec) -> list:
    # (d - a) f = g on k[S]: f_i = ((i+1) f_{i+1} - g_i) / a, from the top down
    n = len(g)
    out = [f.zero()] * n
    nxt = f.zero()
    for i in range(n - 1, -1, -1):
        nxt = (nxt * (i + 1) - g[i]) / a
        out[i] = nxt
    return _poly.trim(out)


def _random_poly(rng: random.Random, deg: int, f: FieldSpec) -> list:
    out = []
    for _ in range(deg + 1):
        num = rng.randint(-9, 9)
        den = rng.randint(1, 5)
        c = f.scalar(Fraction(num, den))
        if f.mode == "equal-char-zero":
            c = c * PuiseuxScalar({Fraction(rng.randint(-4, 4), 2): 1})
        out.append(c)
    if not _poly.trim(out):
        out[0] = f.one()
    return out


def type4_bound_check(
    point: BerkPoint,
    a,
    f: FieldSpec,
    N: int = 8,
    samples: int = 50,
    seed: int = 0,
    polys: Sequence | None = None,
) -> Type4Report:
    """Check ``|(d - a)^-1 g|_{x_l} <= r(x) |g|_{x_l}`` on each disk of the family."""
    if not f.residue_char_zero:
        raise OracleError("the type (4) bound is a residue-characteristic-0 statement")
    if point.kind != "type4":
        raise OracleError("needs a type (4) point")
    a = f.scalar(a)
    rx = point.radius
    if valuation(a, f) != -rx:
        raise OracleError("precondition |a| = 1/r(x) fails")
    if polys is None:
        rng = random.Random(seed)
        polys = [_random_poly(rng, N, f) for _ in range(samples)]
    table = []
    for g in polys:
        g = [f.scalar(x) for x in g]
        sol = _inverse_on_polys(g, a, f)
        row = []
        for c, rl in point.family:
            row.append(_gauss_exp(sol, c, rl, f) - _gauss_exp(g, c, rl, f))
        table.append(tuple(row))
    lo = min(min(r) for r in table)
    return Type4Report(tuple(table), rx, lo, lo >= rx)


# --------------------------------------------------------------------------
# Finite-dimensional block law


@dataclass(frozen=True)
class BlockReport:
    charpoly_product: bool
    eigenvalues: tuple
    block_eigenvalues: tuple
    holds: bool


def _merge(*multisets) -> dict:
    out: dict = {}
    for ms in multisets:
        for a, m in ms:
            out[a] = out.get(a, 0) + m
    return out


def finite_dim_block_spectrum_check(G1, G2, C, f: FieldSpec) -> BlockReport:
    """Eigenvalues of ``[[G1, C], [0, G2]]`` against those of the diagonal blocks."""
    n1, n2 = len(G1), len(G2)
    if len(C) != n1 or any(len(row) != n2 for row in C):
        raise ValueError("coupling block has the wrong shape")
    zero = f.zero()
    top = [list(G1[i]) + list(C[i]) for i in range(n1)]
    bottom = [[zero] * n1 + list(G2[i]) for i in range(n2)]
    G = top + bottom
    chi = characteristic_polynomial(G, f)
    chi1 = characteristic_polynomial(G1, f)
    chi2 = characteristic_polynomial(G2, f)
    product_ok = _poly.trim(chi) == _poly.mul(chi1, chi2, zero)
    eig, _ = eigenvalue_multiset(chi, f)
    e1, _ = eigenvalue_multiset(chi1, f)
    e2, _ = eigenvalue_multiset(chi2, f)
    blocks = _merge(e1, e2)
    holds = product_ok and _merge(eig) == blocks
    return BlockReport(product_ok, eig, tuple(sorted(blocks.items(), key=lambda kv: kv[0].sort_key())), holds)
