"""Dense univariate polynomials as coefficient lists, lowest degree first."""
from __future__ import annotations

from math import comb


def trim(c: list) -> list:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def degree(c: list) -> int:
    return len(trim(c)) - 1


def add(a: list, b: list, zero) -> list:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(x + y)
    return trim(out)


def scale(a: list, k) -> list:
    return trim([x * k for x in a])


def sub(a: list, b: list, zero) -> list:
    return add(a, scale(b, -1), zero)


def mul(a: list, b: list, zero) -> list:
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def evaluate(c: list, x, zero):
    acc = zero
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def derivative(c: list) -> list:
    return trim([c[i] * i for i in range(1, len(c))])


def taylor_shift(c: list, a, zero) -> list:
    """Coefficients of ``Q(a + X)`` given those of ``Q(X)``."""
    n = len(c)
    out = [zero] * n
    powers = [zero + 1]
    for _ in range(1, n):
        powers.append(powers[-1] * a)
    for j, cj in enumerate(c):
        if not cj:
            continue
        for i in range(j + 1):
            out[i] = out[i] + cj * comb(j, i) * powers[j - i]
    return trim(out)


def divmod_(a: list, b: list, zero) -> tuple[list, list]:
    """Euclidean division; ``b``'s leading coefficient must be invertible."""
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = 1 / b[-1] if not hasattr(b[-1], "inverse") else b[-1].inverse()
    q = [zero] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        factor = r[-1] * lead_inv
        q[shift] = factor
        for i, y in enumerate(b):
            r[shift + i] = r[shift + i] - factor * y
        r = trim(r[:-1]) if not r[-1] else trim(r)
    return trim(q), trim(r)


def monic(a: list) -> list:
    a = trim(a)
    lead = a[-1]
    inv = 1 / lead if not hasattr(lead, "inverse") else lead.inverse()
    return [x * inv for x in a]
