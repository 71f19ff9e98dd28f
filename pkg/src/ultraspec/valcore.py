"""Exact scalars, valuations and value exponents.

Every absolute value in the package is stored as an *exponent* ``e`` with
``|x| = base ** (-e)``.  Exponents live in ``Q + Q*sqrt(2)`` so that radii
outside the value group (type (3) points) can be represented exactly, and
compared without floating point.

Scalars depend on the field mode:

* ``p-adic``: :class:`QuadScalar` ``u + v*sqrt(p)`` with ``u, v`` rational.
* ``trivial``: :class:`QuadScalar` with ``v = 0`` and the trivial valuation.
* ``equal-char-zero``: :class:`PuiseuxScalar`, finite sums ``c * t**q``
  (``q`` rational) valued by the order in the formal uniformizer ``t``.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

__all__ = [
    "FieldSpec",
    "Exponent",
    "INF",
    "QuadScalar",
    "PuiseuxScalar",
    "InvalidScalarError",
    "compare_exponents",
    "valuation",
    "factorial_valuation",
    "omega",
    "parse_scalar",
    "parse_exponent",
    "format_scalar",
    "vp",
]

Rational = Union[int, Fraction]

MODES = ("p-adic", "equal-char-zero", "trivial")


class InvalidScalarError(ValueError):
    """A scalar does not belong to the field of the current mode."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("vp(0) is infinite")
    num, den = abs(x.numerator), x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _sign_quad(x: Fraction, y: Fraction) -> int:
    """Exact sign of ``x + y*sqrt(2)``."""
    sx = (x > 0) - (x < 0)
    sy = (y > 0) - (y < 0)
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    # opposite signs; x**2 == 2*y**2 has no rational solution besides 0
    return sx if x * x > 2 * y * y else sy


@functools.total_ordering
@dataclass(frozen=True)
class Exponent:
    """The real number ``a + b*sqrt(2)``, or ``+inf`` (valuation of zero)."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    inf: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.inf and (self.a or self.b):
            object.__setattr__(self, "a", Fraction(0))
            object.__setattr__(self, "b", Fraction(0))

    @classmethod
    def of(cls, value) -> "Exponent":
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            return parse_exponent(value)
        return cls(Fraction(value))

    @property
    def is_rational(self) -> bool:
        return not self.inf and self.b == 0

    def sign(self) -> int:
        if self.inf:
            return 1
        return _sign_quad(self.a, self.b)

    def __lt__(self, other):
        other = _coerce_exp(other)
        if other is NotImplemented:
            return NotImplemented
        if self.inf:
            return False
        if other.inf:
            return True
        return _sign_quad(self.a - other.a, self.b - other.b) < 0

    def __eq__(self, other):
        other = _coerce_exp(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.inf, self.a, self.b) == (other.inf, other.a, other.b)

    def __hash__(self):
        return hash((self.inf, self.a, self.b))

    def __add__(self, other):
        other = _coerce_exp(other)
        if other is NotImplemented:
            return NotImplemented
        if self.inf or other.inf:
            return INF
        return Exponent(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        if self.inf:
            raise ArithmeticError("cannot negate an infinite exponent")
        return Exponent(-self.a, -self.b)

    def __sub__(self, other):
        other = _coerce_exp(other)
        if other is NotImplemented:
            return NotImplemented
        if other.inf:
            raise ArithmeticError("cannot subtract an infinite exponent")
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_exp(other) - self

    def __mul__(self, k):
        if isinstance(k, Exponent):
            return NotImplemented
        k = Fraction(k)
        if self.inf:
            if k > 0:
                return INF
            raise ArithmeticError("non-positive multiple of an infinite exponent")
        return Exponent(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / Fraction(k))

    def __float__(self):
        if self.inf:
            return float("inf")
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __str__(self):
        return format_exponent(self)

    def __repr__(self):
        return f"Exponent({format_exponent(self)!r})"


INF = Exponent(inf=True)


def _coerce_exp(x):
    if isinstance(x, Exponent):
        return x
    if isinstance(x, (int, Fraction)):
        return Exponent(Fraction(x))
    return NotImplemented


def compare_exponents(e1, e2) -> str:
    """Return ``"<"``, ``"="`` or ``">"`` for the real values of two exponents."""
    e1, e2 = Exponent.of(e1), Exponent.of(e2)
    if e1 == e2:
        return "="
    return "<" if e1 < e2 else ">"


def _fmt_q(q: Fraction) -> str:
    return str(q)


def format_exponent(e: Exponent) -> str:
    if e.inf:
        return "inf"
    if e.b == 0:
        return _fmt_q(e.a)
    if e.b == 1:
        tail = "sqrt2"
    elif e.b == -1:
        tail = "-sqrt2"
    else:
        tail = f"{_fmt_q(e.b)}*sqrt2"
    if e.a == 0:
        return tail
    if tail.startswith("-"):
        return f"{_fmt_q(e.a)}{tail}"
    return f"{_fmt_q(e.a)}+{tail}"


_EXP_TERM_RE = re.compile(r"[+-]?[^+-]+")


def parse_exponent(text: str) -> Exponent:
    """Parse ``"a"``, ``"a+b*sqrt2"``, ``"-sqrt2"`` or ``"inf"``."""
    s = str(text).replace(" ", "").replace("sqrt(2)", "sqrt2")
    if s in ("inf", "+inf", "oo"):
        return INF
    if not s or _EXP_TERM_RE.sub("", s):
        raise ValueError(f"bad exponent literal {text!r}")
    a = b = Fraction(0)
    try:
        for term in _EXP_TERM_RE.findall(s):
            if term.endswith("sqrt2"):
                coef = term[: -len("sqrt2")].rstrip("*")
                if coef in ("", "+", "-"):
                    coef += "1"
                b += Fraction(coef)
            else:
                a += Fraction(term)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad exponent literal {text!r}") from None
    return Exponent(a, b)


# --------------------------------------------------------------------------
# Fields


@dataclass(frozen=True)
class FieldSpec:
    """Ground-field configuration: residue characteristic and valuation."""

    mode: str
    p: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown field mode {self.mode!r}")
        if self.mode == "p-adic":
            if self.p is None or not _is_prime(int(self.p)):
                raise ValueError(f"p-adic mode needs a prime p, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.mode} mode takes no prime")

    @classmethod
    def padic(cls, p: int) -> "FieldSpec":
        return cls("p-adic", p)

    @classmethod
    def equal_char_zero(cls) -> "FieldSpec":
        return cls("equal-char-zero")

    @classmethod
    def trivial(cls) -> "FieldSpec":
        return cls("trivial")

    @property
    def base(self) -> int:
        return self.p if self.mode == "p-adic" else 2

    @property
    def residue_char_zero(self) -> bool:
        return self.mode != "p-adic"

    def in_value_group(self, e: Exponent) -> bool:
        """Whether ``base**(-e)`` is the absolute value of some nonzero scalar."""
        e = Exponent.of(e)
        if e.inf:
            return False
        if self.mode == "trivial":
            return e == Exponent()
        return e.b == 0

    def scalar(self, x) -> "QuadScalar | PuiseuxScalar":
        """Coerce ``x`` (int, Fraction, literal string or scalar) into this field."""
        if isinstance(x, str):
            return parse_scalar(x, self)
        if self.mode == "equal-char-zero":
            if isinstance(x, PuiseuxScalar):
                return x
            if isinstance(x, QuadScalar):
                if x.v:
                    raise InvalidScalarError("sqrt(p) component outside p-adic mode")
                return PuiseuxScalar.const(x.u)
            return PuiseuxScalar.const(Fraction(x))
        p = self.p if self.mode == "p-adic" else None
        if isinstance(x, QuadScalar):
            if x.v and x.p != p:
                raise InvalidScalarError(f"scalar {x} does not live in this field")
            return QuadScalar(x.u, x.v, p)
        if isinstance(x, PuiseuxScalar):
            if not x.is_constant:
                raise InvalidScalarError("uniformizer t only exists in equal-char-zero mode")
            return QuadScalar(x.constant_term(), 0, p)
        return QuadScalar(Fraction(x), 0, p)

    def zero(self):
        return self.scalar(0)

    def one(self):
        return self.scalar(1)

    def uniformizer_power(self, e) -> "QuadScalar | PuiseuxScalar":
        """A scalar whose valuation is exactly ``e``; raises if not realizable."""
        e = Exponent.of(e)
        if not e.is_rational:
            raise ValueError(f"exponent {e} is not attained by any scalar")
        q = e.a
        if self.mode == "equal-char-zero":
            return PuiseuxScalar({q: Fraction(1)})
        if self.mode == "trivial":
            if q != 0:
                raise ValueError("trivial valuation only attains exponent 0")
            return self.one()
        twice = 2 * q
        if twice.denominator != 1:
            raise ValueError(f"exponent {e} is not attained in Q(sqrt({self.p}))")
        k = int(twice)
        whole = Fraction(self.p) ** (k // 2)
        if k % 2 == 0:
            return QuadScalar(whole, 0, self.p)
        return QuadScalar(0, whole, self.p)


# --------------------------------------------------------------------------
# Scalars


def _coerce_like(ref, other):
    if isinstance(other, (int, Fraction)):
        if isinstance(ref, QuadScalar):
            return QuadScalar(Fraction(other), 0, ref.p)
        return PuiseuxScalar.const(other)
    if type(other) is type(ref):
        return other
    return NotImplemented


@dataclass(frozen=True)
class QuadScalar:
    """``u + v*sqrt(p)``; ``p`` is None for plain rationals outside p-adic mode."""

    u: Fraction
    v: Fraction = Fraction(0)
    p: int | None = None

    def __post_init__(self):
        if type(self.u) is not Fraction:
            object.__setattr__(self, "u", Fraction(self.u))
        if type(self.v) is not Fraction:
            object.__setattr__(self, "v", Fraction(self.v))
        if self.v and self.p is None:
            raise InvalidScalarError("sqrt component requires a prime")

    def _join(self, other: "QuadScalar") -> int | None:
        if self.p is None:
            return other.p
        if other.p is not None and other.p != self.p:
            raise InvalidScalarError("scalars from different fields")
        return self.p

    def __add__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return QuadScalar(self.u + other.u, self.v + other.v, self._join(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.u, -self.v, self.p)

    def __sub__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        p = self._join(other)
        pp = p or 0
        return QuadScalar(
            self.u * other.u + pp * self.v * other.v,
            self.u * other.v + self.v * other.u,
            p,
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadScalar":
        return QuadScalar(self.u, -self.v, self.p)

    def norm(self) -> Fraction:
        return self.u * self.u - (self.p or 0) * self.v * self.v

    def inverse(self) -> "QuadScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        c = self.conj()
        return QuadScalar(c.u / n, c.v / n, self.p)

    def __truediv__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce_like(self, other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadScalar(1, 0, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.u or self.v)

    def __eq__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self.u == other.u and self.v == other.v

    def __hash__(self):
        return hash((self.u, self.v))

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def valuation(self) -> Exponent:
        if not self:
            return INF
        if self.p is None:
            return Exponent()
        cands = []
        if self.u:
            cands.append(Fraction(vp(self.u, self.p)))
        if self.v:
            cands.append(vp(self.v, self.p) + Fraction(1, 2))
        return Exponent(min(cands))

    def sort_key(self):
        return (0, self.u, self.v)

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"QuadScalar({format_scalar(self)!r})"


@dataclass(frozen=True)
class PuiseuxScalar:
    """Finite sum ``sum c_q t**q`` over the rationals, valued by ``ord_t``."""

    terms: tuple = ()

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc: dict[Fraction, Fraction] = {}
        for q, c in items:
            q, c = Fraction(q), Fraction(c)
            acc[q] = acc.get(q, Fraction(0)) + c
        object.__setattr__(
            self, "terms", tuple(sorted((q, c) for q, c in acc.items() if c != 0))
        )

    @classmethod
    def const(cls, c) -> "PuiseuxScalar":
        return cls({Fraction(0): Fraction(c)})

    @property
    def is_constant(self) -> bool:
        return all(q == 0 for q, _ in self.terms)

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> Fraction:
        return dict(self.terms).get(Fraction(0), Fraction(0))

    def __add__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return PuiseuxScalar(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxScalar(tuple((q, -c) for q, c in self.terms))

    def __sub__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return PuiseuxScalar(
            tuple((q1 + q2, c1 * c2) for q1, c1 in self.terms for q2, c2 in other.terms)
        )

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxScalar":
        if not self.terms:
            raise ZeroDivisionError("inverse of zero scalar")
        if not self.is_monomial:
            raise ArithmeticError(f"{self} is not a monomial; its inverse is an infinite series")
        (q, c), = self.terms
        return PuiseuxScalar({-q: 1 / c})

    def __truediv__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce_like(self, other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = PuiseuxScalar.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = _coerce_like(self, other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def valuation(self) -> Exponent:
        if not self.terms:
            return INF
        return Exponent(self.terms[0][0])

    def sort_key(self):
        return (1, self.terms)

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"PuiseuxScalar({format_scalar(self)!r})"


Scalar = Union[QuadScalar, PuiseuxScalar]


def valuation(s, f: FieldSpec) -> Exponent:
    """Valuation of ``s`` in the ground field ``f`` (``+inf`` for zero)."""
    if isinstance(s, QuadScalar) and s.v and f.mode != "p-adic":
        raise InvalidScalarError("sqrt(p) component outside p-adic mode")
    if isinstance(s, QuadScalar) and s.v and s.p != f.p:
        raise InvalidScalarError(f"scalar {s} is not in Q(sqrt({f.p}))")
    return f.scalar(s).valuation()


def factorial_valuation(n: int, f: FieldSpec) -> Exponent:
    """Valuation of ``n!`` via Legendre's digit-sum formula."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if f.mode != "p-adic":
        return Exponent()
    p = f.p
    digits, m = 0, n
    while m:
        digits += m % p
        m //= p
    return Exponent(Fraction(n - digits, p - 1))


def omega(f: FieldSpec) -> Exponent:
    """Exponent of ``|p|**(1/(p-1))`` in residue characteristic p, else 0."""
    if f.mode == "p-adic":
        return Exponent(Fraction(1, f.p - 1))
    return Exponent()


# --------------------------------------------------------------------------
# Literals

_TERM_RE = re.compile(
    r"""(?P<sign>[+-])?\s*
        (?P<coef>\d+(?:/\d+)?)?\s*\*?\s*
        (?:(?P<sqrt>sqrt\(\s*(?P<root>\d+)\s*\))
          |(?P<t>t(?:\s*\^\s*(?:\(\s*(?P<e1>[+-]?\d+(?:/\d+)?)\s*\)|(?P<e2>[+-]?\d+)))?))?
    """,
    re.X,
)


def parse_scalar(text: str, f: FieldSpec):
    """Parse a scalar literal such as ``"3/2"``, ``"1-2*sqrt(2)"`` or ``"t^(1/2)+1"``."""
    s = str(text).replace(" ", "")
    if not s:
        raise InvalidScalarError("empty scalar literal")
    pos = 0
    u = v = Fraction(0)
    tterms: dict[Fraction, Fraction] = {}
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise InvalidScalarError(f"bad scalar literal {text!r}")
        if not first and not m.group("sign"):
            raise InvalidScalarError(f"bad scalar literal {text!r}")
        coef_txt = m.group("coef")
        if coef_txt is None and not (m.group("sqrt") or m.group("t")):
            raise InvalidScalarError(f"bad scalar literal {text!r}")
        coef = Fraction(coef_txt) if coef_txt else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        if m.group("sqrt"):
            root = int(m.group("root"))
            if f.mode != "p-adic":
                raise InvalidScalarError("sqrt(p) only exists in p-adic mode")
            if root != f.p:
                raise InvalidScalarError(f"sqrt({root}) is not sqrt(p) for p={f.p}")
            v += coef
        elif m.group("t"):
            if f.mode != "equal-char-zero":
                raise InvalidScalarError("uniformizer t only exists in equal-char-zero mode")
            e = m.group("e1") or m.group("e2") or "1"
            q = Fraction(e)
            tterms[q] = tterms.get(q, Fraction(0)) + coef
        else:
            u += coef
        pos = m.end()
        first = False
    if f.mode == "equal-char-zero":
        tterms[Fraction(0)] = tterms.get(Fraction(0), Fraction(0)) + u
        return PuiseuxScalar(tterms)
    return QuadScalar(u, v, f.p if f.mode == "p-adic" else None)


def _join_terms(parts: Iterable[tuple[Fraction, str]]) -> str:
    out = ""
    for coef, base in parts:
        if base:
            if coef == 1:
                body = base
            elif coef == -1:
                body = "-" + base
            else:
                body = f"{coef}*{base}"
        else:
            body = str(coef)
        if out and not body.startswith("-"):
            out += "+"
        out += body
    return out or "0"


def format_scalar(s) -> str:
    """Inverse of :func:`parse_scalar`."""
    if isinstance(s, QuadScalar):
        parts = []
        if s.u or not s.v:
            parts.append((s.u, ""))
        if s.v:
            parts.append((s.v, f"sqrt({s.p})"))
        return _join_terms(parts)
    parts = []
    for q, c in s.terms:
        if q == 0:
            parts.append((c, ""))
        elif q == 1:
            parts.append((c, "t"))
        elif q.denominator == 1:
            parts.append((c, f"t^{q}"))
        else:
            parts.append((c, f"t^({q})"))
    return _join_terms(parts)
