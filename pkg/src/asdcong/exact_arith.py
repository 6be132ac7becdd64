"""
Exact arithmetic in Q, in the cyclotomic field Q(w8), and in truncated
unramified p-adic rings.

Elements of Q(w8) are stored on the power basis 1, w, w^2, w^3 with
w^4 = -1.  Rationals are :class:`fractions.Fraction`.  Subfield membership
(Q(i), Q(sqrt 2), Q(sqrt -2)) is a predicate on the coordinates.

p-adic places are realised as ring homomorphisms Z[1/2][w] -> R_K where

* R_K = Z/p^K when p = 1 mod 8 (residue degree 1), and
* R_K = (Z/p^K)[s]/(s^2 - nu) for the least quadratic non-residue nu
  otherwise (residue degree 2).

The image of w is a Hensel-lifted root of x^4 + 1 in R_K.

EXAMPLES::

    >>> r2 = SQRT2 * SQRT2
    >>> r2 == 2
    True
    >>> roots = hensel_omega8(17, 1)
    >>> [x.coords[0] for x in roots]
    [2, 8, 9, 15]
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

Rational = Fraction

INF = math.inf

__all__ = [
    "Rational",
    "NumberFieldElem",
    "PadicElem",
    "INF",
    "ZERO",
    "ONE",
    "OMEGA8",
    "I",
    "SQRT2",
    "SQRT_M2",
    "nf_arith",
    "galois_conjugate",
    "hensel_omega8",
    "padic_embed",
    "padic_valuation",
    "default_precision",
    "vp_int",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


class NumberFieldElem:
    """
    Element a + b*w + c*w^2 + d*w^3 of Q(w8).

    Interoperates with ``int`` and ``Fraction`` on either side of every
    operator.  Instances are immutable and hashable.
    """

    __slots__ = ("coords",)

    def __init__(self, coords=(0, 0, 0, 0)):
        if isinstance(coords, NumberFieldElem):
            object.__setattr__(self, "coords", coords.coords)
            return
        if isinstance(coords, (int, Fraction)):
            coords = (coords, 0, 0, 0)
        c = tuple(_frac(x) for x in coords)
        if len(c) != 4:
            raise ValueError("Q(w8) elements need exactly 4 coordinates")
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError("NumberFieldElem is immutable")

    def __reduce__(self):
        return (NumberFieldElem, (self.coords,))

    # coercion
    @staticmethod
    def _coerce(other):
        if isinstance(other, NumberFieldElem):
            return other
        if isinstance(other, (int, Fraction)):
            return NumberFieldElem((other, 0, 0, 0))
        return NotImplemented

    # ring operations
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NumberFieldElem(tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldElem(tuple(-x for x in self.coords))

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NumberFieldElem(tuple(x - y for x, y in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NumberFieldElem(tuple(x * other for x in self.coords))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.coords, o.coords
        out = [Fraction(0)] * 4
        for i in range(4):
            ai = a[i]
            if not ai:
                continue
            for j in range(4):
                bj = b[j]
                if not bj:
                    continue
                k = i + j
                if k < 4:
                    out[k] += ai * bj
                else:
                    out[k - 4] -= ai * bj
        return NumberFieldElem(out)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Absolute norm to Q."""
        n = self * self.conjugate(3) * self.conjugate(5) * self.conjugate(7)
        return n.coords[0]

    def inverse(self) -> "NumberFieldElem":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(w8)")
        if self.is_rational():
            return NumberFieldElem((1 / self.coords[0], 0, 0, 0))
        rest = self.conjugate(3) * self.conjugate(5) * self.conjugate(7)
        n = (self * rest).coords[0]
        return rest * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(w8)")
            return NumberFieldElem(tuple(x / other for x in self.coords))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    # predicates
    def is_rational(self) -> bool:
        c = self.coords
        return not (c[1] or c[2] or c[3])

    def in_subfield(self, name: str) -> bool:
        """Membership in ``"Q"``, ``"i"``, ``"sqrt2"`` or ``"sqrt-2"``."""
        a, b, c, d = self.coords
        if name == "Q":
            return self.is_rational()
        if name == "i":
            return b == 0 and d == 0
        if name == "sqrt2":
            return c == 0 and b == -d
        if name == "sqrt-2":
            return c == 0 and b == d
        raise ValueError(f"unknown subfield {name!r}")

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def is_p_integral(self, p: int) -> bool:
        return all(x.denominator % p for x in self.coords)

    # automorphisms and embeddings
    def conjugate(self, k: int) -> "NumberFieldElem":
        return galois_conjugate(self, k)

    def to_complex(self, k: int = 1) -> complex:
        """Value under the complex embedding w -> exp(2 pi i k / 8)."""
        z = cmath.exp(2j * math.pi * k / 8)
        return sum(float(c) * z**j for j, c in enumerate(self.coords))

    def __repr__(self):
        names = ("", "w", "w^2", "w^3")
        terms = []
        for c, n in zip(self.coords, names):
            if not c:
                continue
            if not n:
                terms.append(str(c))
            elif c == 1:
                terms.append(n)
            elif c == -1:
                terms.append("-" + n)
            else:
                terms.append(f"{c}*{n}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def as_strings(self) -> list:
        return [str(c) for c in self.coords]

    @classmethod
    def from_strings(cls, items) -> "NumberFieldElem":
        return cls(tuple(Fraction(s) for s in items))


ZERO = NumberFieldElem((0, 0, 0, 0))
ONE = NumberFieldElem((1, 0, 0, 0))
OMEGA8 = NumberFieldElem((0, 1, 0, 0))
I = NumberFieldElem((0, 0, 1, 0))
SQRT2 = NumberFieldElem((0, 1, 0, -1))
SQRT_M2 = NumberFieldElem((0, 1, 0, 1))


def nf_arith(a, b, op: str) -> NumberFieldElem:
    """Exact field operation ``op`` in {add, sub, mul, div}."""
    a, b = NumberFieldElem(a), NumberFieldElem(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def galois_conjugate(a, k: int) -> NumberFieldElem:
    """Image of ``a`` under w -> w^k, k in {1, 3, 5, 7}."""
    if k not in (1, 3, 5, 7):
        raise ValueError(f"k must be one of 1, 3, 5, 7, got {k}")
    a = NumberFieldElem(a)
    if k == 1:
        return a
    out = [Fraction(0)] * 4
    for j, c in enumerate(a.coords):
        if not c:
            continue
        e = (j * k) % 8
        if e < 4:
            out[e] += c
        else:
            out[e - 4] -= c
    return NumberFieldElem(out)


# ---------------------------------------------------------------------------
# p-adic rings
# ---------------------------------------------------------------------------


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _least_nonresidue(p: int) -> int:
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            return a
    raise ValueError(f"no quadratic non-residue mod {p}")


class PadicElem:
    """
    Element of R_K = Z_p[s]/(s^2 - nu) mod p^K (f = 2) or Z/p^K (f = 1).

    ``coords`` are integers in [0, p^K) on the basis {1} or {1, s}.
    """

    __slots__ = ("p", "f", "K", "nu", "coords", "_mod")

    def __init__(self, p: int, K: int, coords, f: int | None = None):
        if f is None:
            f = len(coords)
        if f not in (1, 2) or len(coords) != f:
            raise ValueError("residue degree must be 1 or 2")
        mod = p**K
        self.p, self.f, self.K, self._mod = p, f, K, mod
        self.nu = _least_nonresidue(p) if f == 2 else None
        self.coords = tuple(int(c) % mod for c in coords)

    def _new(self, coords):
        return PadicElem(self.p, self.K, coords, self.f)

    def _check(self, other):
        if isinstance(other, int):
            return self._new((other,) + (0,) * (self.f - 1))
        if not isinstance(other, PadicElem):
            return NotImplemented
        if (other.p, other.f, other.K) != (self.p, self.f, self.K):
            raise ValueError("p-adic operands live in different rings")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self._new(tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return self._new(tuple(-x for x in self.coords))

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self._new(tuple(x - y for x, y in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if self.f == 1:
            return self._new((self.coords[0] * o.coords[0],))
        a, b = self.coords
        c, d = o.coords
        return self._new((a * c + self.nu * b * d, a * d + b * c))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self._new((1,) + (0,) * (self.f - 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        m = self._mod
        if self.f == 1:
            a = self.coords[0]
            if a % self.p == 0:
                raise ZeroDivisionError("non-unit in Z/p^K")
            return self._new((pow(a, -1, m),))
        a, b = self.coords
        n = (a * a - self.nu * b * b) % m
        if n % self.p == 0:
            raise ZeroDivisionError("non-unit in the unramified ring")
        ni = pow(n, -1, m)
        return self._new((a * ni, -b * ni))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((self.p, self.f, self.K, self.coords))

    def __repr__(self):
        if self.f == 1:
            return f"{self.coords[0]} mod {self.p}^{self.K}"
        return f"({self.coords[0]} + {self.coords[1]}*s) mod {self.p}^{self.K}, s^2={self.nu}"


def _newton_root(seed: PadicElem, K: int) -> PadicElem:
    p, f = seed.p, seed.f
    r = PadicElem(p, K, seed.coords, f)
    prec = 1
    while prec < K:
        fx = r**4 + 1
        r = r - fx * (4 * r**3).inverse()
        prec *= 2
    return r


@lru_cache(maxsize=None)
def hensel_omega8(p: int, K: int) -> tuple:
    """
    The four roots of x^4 + 1 in R_K, ordered by the residue of the seed.

    For p = 1 mod 8 the roots live in Z/p^K; otherwise in the unramified
    quadratic ring.  Raises ``ValueError`` for p = 2.
    """
    if p == 2:
        raise ValueError("p = 2 is ramified in Q(w8); out of scope")
    if p < 3 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not an odd prime")
    if K < 1:
        raise ValueError("precision must be positive")
    seeds = []
    if p % 8 == 1:
        for a in range(1, p):
            if (a**4 + 1) % p == 0:
                seeds.append(PadicElem(p, 1, (a,), 1))
    else:
        for a in range(p):
            for b in range(p):
                x = PadicElem(p, 1, (a, b), 2)
                if (x**4 + 1).is_zero():
                    seeds.append(x)
    if len(seeds) != 4:
        raise ArithmeticError(f"expected 4 roots of x^4+1 mod {p}, found {len(seeds)}")
    return tuple(_newton_root(s, K) for s in seeds)


def padic_embed(a, root: PadicElem) -> PadicElem:
    """Evaluate the coordinates of ``a`` at ``root``; rejects p in a denominator."""
    a = NumberFieldElem(a)
    p, m = root.p, root._mod
    acc = root._new((0,) * root.f)
    power = root._new((1,) + (0,) * (root.f - 1))
    for j, c in enumerate(a.coords):
        if c:
            if c.denominator % p == 0:
                raise ValueError(f"{a} is not p-integral at p = {p}")
            cm = c.numerator * pow(c.denominator, -1, m)
            acc = acc + power * cm
        if j < 3:
            power = power * root
    return acc


def padic_valuation(x: PadicElem):
    """Largest v < K with x = 0 mod p^v, or ``INF`` when x = 0 mod p^K."""
    best = INF
    for c in x.coords:
        if c:
            best = min(best, vp_int(c, x.p))
    return best


def default_precision(p: int, N: int) -> int:
    """Precision K = 2(1 + floor(log_p N)) + 4."""
    e, v = 0, 1
    while v * p <= N:
        v *= p
        e += 1
    return 2 * (1 + e) + 4
