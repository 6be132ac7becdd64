"""Finite fields F_{p^r} in a polynomial basis, with log/Zech tables for the counting kernels."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

MAX_DEGREE = 7

__all__ = [
    "MAX_DEGREE",
    "FieldCtx",
    "FieldElement",
    "FieldTables",
    "make_field",
    "quadratic_character",
    "element_degree",
    "is_prime",
    "prime_factors",
    "mobius",
    "count_exact_degree",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def mobius(n: int) -> int:
    res, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            res = -res
        d += 1
    return -res if n > 1 else res


def count_exact_degree(p: int, d: int) -> int:
    """Number of elements of F_{p^d} of exact degree d."""
    return sum(mobius(d // e) * p**e for e in range(1, d + 1) if d % e == 0)


# polynomials over F_p as lists, lowest degree first


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, m, p)


def _ppowmod(a, e, m, p):
    result, base = [1], _pmod(list(a), m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(m, p) -> bool:
    r = len(m) - 1
    if r == 1:
        return True
    x = [0, 1]
    # x^{p^r} = x mod m, and no factor of degree dividing a proper divisor of r
    if _ppowmod(x, p**r, m, p) != _pmod(x, m, p):
        return False
    for d in range(1, r):
        if r % d == 0:
            h = _ppowmod(x, p**d, m, p)
            h = h + [0] * (2 - len(h))
            h[1] = (h[1] - 1) % p
            if len(_pgcd(m, h, p)) > 1:
                return False
    return True


@dataclass(frozen=True)
class FieldTables:
    """exp[k] = encoding of g^k; log[e] = k with log[0] = q - 1; zech[k] = log(1 + g^k)."""

    exp: np.ndarray
    log: np.ndarray
    zech: np.ndarray

    @property
    def zero(self) -> int:
        return len(self.exp)


@dataclass(frozen=True)
class FieldCtx:
    p: int
    r: int
    modulus: tuple  # monic, lowest degree first

    @property
    def q(self) -> int:
        return self.p**self.r

    def __repr__(self):
        return f"FieldCtx(F_{self.p}^{self.r}, modulus={self.modulus})"

    def element(self, value) -> "FieldElement":
        """From an integer encoding sum c_i p^i, or a coefficient sequence."""
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (int, np.integer)):
            value = int(value)
            if not 0 <= value < self.q:
                if self.r == 1:
                    return FieldElement(self, (value % self.p,))
                raise ValueError(f"encoding {value} out of range for q = {self.q}")
            coeffs = []
            for _ in range(self.r):
                value, c = divmod(value, self.p)
                coeffs.append(c)
            return FieldElement(self, tuple(coeffs))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.r:
            coeffs = _pmod(coeffs, list(self.modulus), self.p)
        coeffs = coeffs + [0] * (self.r - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def from_int(self, n: int) -> "FieldElement":
        """Image of the rational integer n."""
        return FieldElement(self, (n % self.p,) + (0,) * (self.r - 1))

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def elements(self):
        for e in range(self.q):
            yield self.element(e)

    @cached_property
    def generator(self) -> "FieldElement":
        """Least encoding of multiplicative order q - 1."""
        q = self.q
        ps = prime_factors(q - 1)
        for e in range(1, q):
            g = self.element(e)
            if all(g ** ((q - 1) // ell) != self.one() for ell in ps):
                return g
        raise ArithmeticError("no generator found")

    @cached_property
    def tables(self) -> FieldTables:
        from ._kernels import build_exp_table

        q, p = self.q, self.p
        g = np.array(self.generator.coeffs, dtype=np.int64)
        mod = np.array(self.modulus, dtype=np.int64)
        exp = build_exp_table(p, self.r, mod, g, q)
        log = np.empty(q, dtype=np.int64)
        log[0] = q - 1
        log[exp] = np.arange(q - 1, dtype=np.int64)
        c0 = exp % p
        plus1 = exp - c0 + (c0 + 1) % p
        zech = log[plus1]
        return FieldTables(exp, log, zech)

    def log(self, x) -> int:
        return int(self.tables.log[self.element(x).encode()])


class FieldElement:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    def encode(self) -> int:
        p, v = self.ctx.p, 0
        for c in reversed(self.coeffs):
            v = v * p + c
        return v

    def _co(self, other):
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        ctx = self.ctx
        if ctx.r == 1:
            return FieldElement(ctx, (self.coeffs[0] * o.coeffs[0] % ctx.p,))
        prod = _pmulmod(list(self.coeffs), list(o.coeffs), list(ctx.modulus), ctx.p)
        return FieldElement(ctx, tuple(prod + [0] * (ctx.r - len(prod))))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        ctx = self.ctx
        if ctx.r == 1:
            return FieldElement(ctx, (pow(self.coeffs[0], e, ctx.p),))
        res = _ppowmod(list(self.coeffs), e, list(ctx.modulus), ctx.p)
        return FieldElement(ctx, tuple(res + [0] * (ctx.r - len(res))))

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self):
        return self**self.ctx.p

    def __eq__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.r, self.coeffs))

    def __repr__(self):
        if self.ctx.r == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return " + ".join(terms) or "0"


@lru_cache(maxsize=64)
def make_field(p: int, r: int = 1) -> FieldCtx:
    """Field with the least-encoding monic irreducible modulus of degree r."""
    if p % 2 == 0:
        raise ValueError("characteristic 2 is out of scope")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= r <= MAX_DEGREE:
        raise ValueError(f"extension degree must lie in 1..{MAX_DEGREE}")
    for enc in range(p**r):
        m, v = [], enc
        for _ in range(r):
            v, c = divmod(v, p)
            m.append(c)
        m.append(1)
        if r == 1 or (m[0] != 0 and _is_irreducible(m, p)):
            return FieldCtx(p, r, tuple(m))
    raise ArithmeticError("no irreducible polynomial found")


def quadratic_character(x: FieldElement) -> int:
    if x.is_zero():
        return 0
    y = x ** ((x.ctx.q - 1) // 2)
    return 1 if y == 1 else -1


def element_degree(x: FieldElement) -> int:
    y, d = x.frobenius(), 1
    while y != x:
        y, d = y.frobenius(), d + 1
    return d


def closed_point_reps(ctx: FieldCtx) -> np.ndarray:
    """
    Encodings of the nonzero elements of exact degree r that are the
    least encoding in their Frobenius orbit.
    """
    t = ctx.tables
    q, p, r = ctx.q, ctx.p, ctx.r
    enc = t.exp.copy()
    k = np.arange(q - 1, dtype=np.int64)
    best = enc.copy()
    exact = np.ones(q - 1, dtype=bool)
    cur = k
    for i in range(1, r):
        cur = (cur * p) % (q - 1)
        img = t.exp[cur]
        if r % i == 0:
            exact &= img != enc
        best = np.minimum(best, img)
    keep = exact & (best == enc)
    return np.sort(enc[keep])
