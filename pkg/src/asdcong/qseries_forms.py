r"""
Truncated Puiseux series over Q(w8) and the modular forms built from them.

A :class:`PuiseuxSeries` is a finite list of coefficients ``c_k`` standing for

.. math::

    \sum_k c_k\, q^{v + k s} + O(q^{v + n s}),

where ``v`` (the valuation) and ``s`` (the step) are rationals and ``n`` is
the number of stored coefficients.  The bound ``v + n s`` is the
precision; every operation propagates it so that no coefficient is ever
reported beyond what its inputs determine.  Coefficients may be ``int``,
``Fraction`` or :class:`~asdcong.exact_arith.NumberFieldElem`.

The forms:

- ``eta_power(m, e)``: :math:`\eta(mz)^e = q^{me/24} \prod (1-q^{mn})^e`.
- ``eta_quotients``: the four weight-3 eta quotients f1, f3, f5, f7 of
  level 16 with leading exponents 1/8, 3/8, 5/8, 7/8, and their
  combination ``fprime`` with coefficients in Z[sqrt(-2)].
- ``eisenstein_E3(chi1, chi2)``: weight-3 Eisenstein series attached to a
  pair of characters of conductor 1 or 5.
- ``calibrate_E1_E2``: the pair E1 = 1 + O(Q), E2 = Q + O(Q^2) in
  Q = q^(1/5) whose quotient is the Hauptmodul of the Tate pencil.
- ``h_basis``: h_j = (E1^(4-j) E2^j)^(1/4), j = 1, 2, 3.

EXAMPLES::

    >>> f = eta_power(4, 6, 20)
    >>> [f.coefficient(e) for e in (1, 5, 9, 13, 17)]
    [1, -6, 9, 10, -30]
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .exact_arith import I, SQRT_M2, NumberFieldElem

__all__ = [
    "PuiseuxSeries",
    "PrecisionError",
    "CalibrationError",
    "DirichletCharacter",
    "TRIVIAL",
    "CHI",
    "CHI_BAR",
    "FORM_WIDTHS",
    "series_arith",
    "eta_power",
    "eta_product",
    "eta_quotient",
    "eta_quotients",
    "fprime",
    "g2",
    "eisenstein_E3",
    "eisenstein_basis",
    "calibrate_E1_E2",
    "nth_root",
    "h_basis",
    "h_form",
    "named_form",
    "j_invariant",
    "j_oracle",
    "series_csv",
]


class PrecisionError(ArithmeticError):
    """A coefficient beyond the known precision was requested."""


class CalibrationError(RuntimeError):
    pass


def _fgcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = Fraction(a), Fraction(b)
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator), a.denominator * b.denominator)


def _is_zero(c) -> bool:
    return c == 0


def _as_mpq(coeffs):
    """The coefficients as gmpy2 rationals, or None if any is not rational."""
    out = []
    for c in coeffs:
        if isinstance(c, (int, Fraction)):
            out.append(mpq(c))
        else:
            return None
    return out


def _from_mpq(x):
    if x.denominator == 1:
        return int(x.numerator)
    return Fraction(int(x.numerator), int(x.denominator))


def _to_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer")
    return x.numerator


class PuiseuxSeries:
    """Truncated series sum c_k q^(val + k*step) + O(q^prec), prec = val + len*step."""

    __slots__ = ("coeffs", "val", "step")

    def __init__(self, coeffs, val=0, step=1):
        self.coeffs = list(coeffs)
        self.val = Fraction(val)
        self.step = Fraction(step)
        if self.step <= 0:
            raise ValueError("step must be positive")
        self._normalize()

    def _normalize(self):
        k = 0
        c = self.coeffs
        while k < len(c) and _is_zero(c[k]):
            k += 1
        if k:
            self.coeffs = c[k:]
            self.val += k * self.step

    @classmethod
    def exact_bound(cls, val, step, prec, fn):
        """Series with coefficients fn(k) for exponents val + k*step < prec."""
        val, step, prec = Fraction(val), Fraction(step), Fraction(prec)
        n = max(0, math.ceil((prec - val) / step))
        return cls([fn(k) for k in range(n)], val, step)

    @classmethod
    def monomial(cls, c, e, prec):
        e = Fraction(e)
        prec = Fraction(prec)
        if prec <= e:
            return cls([], prec, 1)
        step = prec - e
        return cls([c], e, step)

    @property
    def prec(self) -> Fraction:
        return self.val + len(self.coeffs) * self.step

    @property
    def M(self) -> int:
        """Least M with every exponent (and the bound) in (1/M)Z."""
        return math.lcm(self.val.denominator, self.step.denominator)

    def __len__(self):
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coefficient(self):
        if not self.coeffs:
            raise PrecisionError("series is zero to its precision")
        return self.coeffs[0]

    def coefficient(self, e):
        e = Fraction(e)
        if e >= self.prec:
            raise PrecisionError(f"exponent {e} is beyond the precision O(q^{self.prec})")
        if e < self.val:
            return 0
        k = (e - self.val) / self.step
        if k.denominator != 1:
            return 0
        return self.coeffs[int(k)]

    def terms(self):
        """(exponent, coefficient) pairs with nonzero coefficient."""
        return [(self.val + k * self.step, c) for k, c in enumerate(self.coeffs) if not _is_zero(c)]

    # lattice handling
    def _regrid(self, val: Fraction, step: Fraction, prec: Fraction) -> list:
        n = (prec - val) / step
        n = max(0, math.ceil(n))
        out = [0] * n
        r = self.step / step
        if r.denominator != 1:
            raise ValueError("target step does not refine the series lattice")
        r = int(r)
        off = (self.val - val) / step
        if off.denominator != 1:
            raise ValueError("target lattice does not contain the series exponents")
        off = int(off)
        for k, c in enumerate(self.coeffs):
            j = off + k * r
            if j >= n:
                break
            if j >= 0:
                out[j] = c
        return out

    def truncate(self, prec) -> "PuiseuxSeries":
        prec = Fraction(prec)
        if prec >= self.prec:
            return self
        if prec <= self.val:
            return PuiseuxSeries([], prec, self.step)
        n = math.ceil((prec - self.val) / self.step)
        return PuiseuxSeries(self.coeffs[:n], self.val, self.step)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            # constants are exact
            if self.prec <= 0:
                return self
            other = PuiseuxSeries.monomial(other, 0, self.prec)
        prec = min(self.prec, other.prec)
        val = min(self.val, other.val)
        if prec <= val:
            return PuiseuxSeries([], prec, 1)
        step = _fgcd(self.step, other.step)
        for x in (self.val - val, other.val - val, prec - val):
            step = _fgcd(step, x)
        a = self._regrid(val, step, prec)
        b = other._regrid(val, step, prec)
        return PuiseuxSeries([x + y for x, y in zip(a, b)], val, step)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries([-c for c in self.coeffs], self.val, self.step)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PuiseuxSeries":
        return PuiseuxSeries([c * x for x in self.coeffs], self.val, self.step)

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by q^e."""
        return PuiseuxSeries(self.coeffs, self.val + Fraction(e), self.step)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        step = _fgcd(self.step, other.step)
        a = self._regrid(self.val, step, self.prec)
        b = other._regrid(other.val, step, other.prec)
        n = min(len(a), len(b))
        fa, fb = _as_mpq(a[:n]), _as_mpq(b[:n])
        if fa is not None and fb is not None:
            nz = [(j, y) for j, y in enumerate(fb) if y]
            acc = [mpq(0)] * n
            for i, x in enumerate(fa):
                if not x:
                    continue
                for j, y in nz:
                    if i + j >= n:
                        break
                    acc[i + j] += x * y
            return PuiseuxSeries([_from_mpq(c) for c in acc], self.val + other.val, step)
        out = [0] * n
        for i in range(n):
            x = a[i]
            if _is_zero(x):
                continue
            for j in range(n - i):
                y = b[j]
                if not _is_zero(y):
                    out[i + j] += x * y
        return PuiseuxSeries(out, self.val + other.val, step)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self) -> "PuiseuxSeries":
        if not self.coeffs:
            raise ZeroDivisionError("division by a series that vanishes to its precision")
        a = self.coeffs
        fa = _as_mpq(a)
        if fa is not None:
            n = len(fa)
            inv0 = 1 / fa[0]
            nz = [(i, x) for i, x in enumerate(fa) if i and x]
            c = [mpq(0)] * n
            c[0] = inv0
            for k in range(1, n):
                acc = mpq(0)
                for i, x in nz:
                    if i > k:
                        break
                    acc += x * c[k - i]
                c[k] = -acc * inv0
            return PuiseuxSeries([_from_mpq(x) for x in c], -self.val, self.step)
        a0 = a[0]
        inv0 = None if a0 == 1 else (Fraction(1, a0) if isinstance(a0, int) else 1 / a0)
        n = len(a)
        c = [0] * n
        c[0] = 1 if inv0 is None else inv0
        for k in range(1, n):
            acc = 0
            for i in range(1, k + 1):
                if not _is_zero(a[i]):
                    acc += a[i] * c[k - i]
            c[k] = -acc if inv0 is None else -acc * inv0
        return PuiseuxSeries(c, -self.val, self.step)

    def __truediv__(self, other):
        if not isinstance(other, PuiseuxSeries):
            if isinstance(other, int):
                other = Fraction(other)
            return self.scale(1 / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0:
                return self.inverse() ** (-e)
            result = None
            base = self
            while e:
                if e & 1:
                    result = base if result is None else result * base
                e >>= 1
                if e:
                    base = base * base
            if result is None:
                return PuiseuxSeries.monomial(1, 0, self.prec - self.val)
            return result
        return self.power(Fraction(e))

    def power(self, alpha: Fraction) -> "PuiseuxSeries":
        """s^alpha for a series with leading coefficient 1."""
        alpha = Fraction(alpha)
        if not self.coeffs:
            raise PrecisionError("power of a series that vanishes to its precision")
        if self.coeffs[0] != 1:
            raise ValueError("leading coefficient must be 1 for a fractional power")
        f = self.coeffs
        n = len(f)
        ff = _as_mpq(f)
        if ff is not None:
            al = mpq(alpha)
            nz = [(i, x) for i, x in enumerate(ff) if i and x]
            g = [mpq(0)] * n
            g[0] = mpq(1)
            for k in range(1, n):
                acc = mpq(0)
                for i, x in nz:
                    if i > k:
                        break
                    acc += (al * i - (k - i)) * x * g[k - i]
                g[k] = acc / k
            return PuiseuxSeries([_from_mpq(x) for x in g], self.val * alpha, self.step)
        g = [Fraction(0)] * n
        g[0] = Fraction(1)
        for k in range(1, n):
            acc = 0
            for i in range(1, k + 1):
                fi = f[i]
                if _is_zero(fi):
                    continue
                w = alpha * i - (k - i)
                if w:
                    acc += w * fi * g[k - i]
            g[k] = acc / k if not isinstance(acc, int) else Fraction(acc, k)
        return PuiseuxSeries(g, self.val * alpha, self.step)

    def substitute(self, factor) -> "PuiseuxSeries":
        """q -> q^factor."""
        factor = Fraction(factor)
        return PuiseuxSeries(self.coeffs, self.val * factor, self.step * factor)

    def map_coefficients(self, fn) -> "PuiseuxSeries":
        return PuiseuxSeries([fn(c) for c in self.coeffs], self.val, self.step)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        d = self - other
        return d.is_zero()

    __hash__ = None

    def indexed(self, mu: int, n_max: int) -> list:
        """[a(0), ..., a(n_max)] with a(n) the coefficient of w^n, w = q^(1/mu)."""
        if Fraction(n_max, mu) >= self.prec:
            raise PrecisionError(f"index {n_max} (q^{Fraction(n_max, mu)}) is beyond O(q^{self.prec})")
        out = [0] * (n_max + 1)
        for k, c in enumerate(self.coeffs):
            e = (self.val + k * self.step) * mu
            if e.denominator != 1:
                if not _is_zero(c):
                    raise ValueError(f"exponent {e / mu} is not on the lattice (1/{mu})Z")
                continue
            j = int(e)
            if j > n_max:
                break
            if j >= 0:
                out[j] = c
        return out

    def __repr__(self):
        parts = []
        for e, c in self.terms()[:8]:
            parts.append(f"({c})*q^{e}")
        parts.append(f"O(q^{self.prec})")
        return " + ".join(parts)


def series_arith(a, b, op: str):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "scalar_mul":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# eta functions
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _sigma1(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


def _euler_power(e: int, n: int) -> list:
    """Coefficients of prod_{k>=1} (1 - x^k)^e through x^(n-1)."""
    P = [0] * n
    if n == 0:
        return P
    P[0] = 1
    sig = [0] + [_sigma1(k) for k in range(1, n)]
    for m in range(1, n):
        acc = 0
        for k in range(1, m + 1):
            acc += sig[k] * P[m - k]
        acc *= -e
        if acc % m:
            raise ArithmeticError("non-integral eta coefficient")
        P[m] = acc // m
    return P


def eta_power(m: int, e: int, trunc) -> PuiseuxSeries:
    """eta(m z)^e + O(q^trunc)."""
    val = Fraction(m * e, 24)
    trunc = Fraction(trunc)
    n = max(0, math.ceil((trunc - val) / m))
    return PuiseuxSeries(_euler_power(e, n), val, m)


def eta_quotient(exps: dict, trunc) -> PuiseuxSeries:
    """prod eta(m z)^e over ``exps`` = {m: e}, assembled from eta_power."""
    val = sum(Fraction(m * e, 24) for m, e in exps.items())
    out = None
    for m, e in sorted(exps.items()):
        part = eta_power(m, e, trunc - val + Fraction(m * e, 24))
        out = part if out is None else out * part
    return out.truncate(trunc)


def eta_product(exps: dict, trunc) -> PuiseuxSeries:
    """The same quotient multiplied out factor by factor from (1 - q^k)^(+-1)."""
    val = sum(Fraction(m * e, 24) for m, e in exps.items())
    n = max(0, math.ceil(Fraction(trunc) - val))
    poly = [0] * n
    if n:
        poly[0] = 1
    for m, e in exps.items():
        for k in range(m, n, m):
            for _ in range(abs(e)):
                if e > 0:
                    for j in range(n - 1, k - 1, -1):
                        poly[j] -= poly[j - k]
                else:
                    for j in range(k, n):
                        poly[j] += poly[j - k]
    return PuiseuxSeries(poly, val, 1)


ETA_EXPONENTS = {
    "f1": {1: -1, 2: 12, 4: -5},
    "f3": {1: 5, 4: 1},
    "f5": {1: -5, 2: 12, 4: -1},
    "f7": {1: 1, 4: 5},
}


def eta_quotients(trunc) -> dict:
    return {k: eta_quotient(v, trunc) for k, v in ETA_EXPONENTS.items()}


def fprime(trunc) -> PuiseuxSeries:
    """f1 + 4 f5 + 2 sqrt(-2) (f3 - 4 f7)."""
    f = eta_quotients(trunc)
    one = NumberFieldElem(1)
    s = 2 * SQRT_M2
    return f["f1"].scale(one) + f["f5"].scale(4 * one) + f["f3"].scale(s) + f["f7"].scale(-4 * s)


def g2(trunc) -> PuiseuxSeries:
    """eta(4z)^6."""
    return eta_power(4, 6, trunc)


# ---------------------------------------------------------------------------
# Eisenstein series of weight 3 and level 5
# ---------------------------------------------------------------------------

_IND5 = {1: 0, 2: 1, 4: 2, 3: 3}


@dataclass(frozen=True)
class DirichletCharacter:
    """Character of conductor 1 (trivial) or 5 with chi(2) = i^k."""

    modulus: int
    k: int = 0

    def __call__(self, n: int) -> NumberFieldElem:
        if self.modulus == 1:
            return NumberFieldElem(1)
        r = n % 5
        if r == 0:
            return NumberFieldElem(0)
        return I ** ((self.k * _IND5[r]) % 4)

    @property
    def is_trivial(self) -> bool:
        return self.modulus == 1

    @property
    def parity(self) -> int:
        return 1 if self.is_trivial else (-1) ** self.k

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, (-self.k) % 4)


TRIVIAL = DirichletCharacter(1, 0)
CHI = DirichletCharacter(5, 1)
CHI_BAR = DirichletCharacter(5, 3)


def _bernoulli3_char(chi: DirichletCharacter) -> NumberFieldElem:
    """Generalised Bernoulli number B_{3,chi}."""
    if chi.is_trivial:
        return NumberFieldElem(0)
    f = chi.modulus

    def b3(x):
        return x**3 - Fraction(3, 2) * x**2 + x / 2

    acc = NumberFieldElem(0)
    for a in range(1, f + 1):
        acc = acc + chi(a) * b3(Fraction(a, f))
    return acc * f**2


def eisenstein_E3(chi1: DirichletCharacter, chi2: DirichletCharacter, trunc: int) -> PuiseuxSeries:
    """
    sum_{n>=1} (sum_{d|n} chi1(n/d) chi2(d) d^2) q^n plus the constant
    term -B_{3,chi2}/6 when chi1 is trivial, to O(q^trunc).
    """
    if chi1.parity * chi2.parity != -1:
        raise ValueError("weight 3 requires (chi1 chi2)(-1) = -1")
    coeffs = [NumberFieldElem(0)] * trunc
    if chi1.is_trivial and trunc:
        coeffs[0] = _bernoulli3_char(chi2) * Fraction(-1, 6)
    for n in range(1, trunc):
        acc = NumberFieldElem(0)
        for d in range(1, n + 1):
            if n % d == 0:
                acc = acc + chi1(n // d) * chi2(d) * (d * d)
        coeffs[n] = acc
    return PuiseuxSeries(coeffs, 0, 1)


def eisenstein_basis(trunc: int) -> dict:
    return {
        "E[1,chi]": eisenstein_E3(TRIVIAL, CHI, trunc),
        "E[1,chibar]": eisenstein_E3(TRIVIAL, CHI_BAR, trunc),
        "E[chi,1]": eisenstein_E3(CHI, TRIVIAL, trunc),
        "E[chibar,1]": eisenstein_E3(CHI_BAR, TRIVIAL, trunc),
    }


def _solve2(a, b, c, d, e, f):
    """Solve [a b; c d] (x, y) = (e, f) over Q(w8)."""
    det = a * d - b * c
    if not det:
        raise CalibrationError("singular calibration system")
    return (e * d - b * f) / det, (a * f - e * c) / det


def _rational_series(s: PuiseuxSeries) -> PuiseuxSeries:
    out = []
    for c in s.coeffs:
        c = NumberFieldElem(c)
        if not c.is_rational() or c.rational().denominator != 1:
            raise CalibrationError(f"non-integral coefficient {c}")
        out.append(int(c.rational()))
    return PuiseuxSeries(out, s.val, s.step)


def _calibration_candidates(trunc: int):
    """
    Pairs (E1, E2) built from the two series with trivial first character,
    which span the Eisenstein series vanishing at the cusp 0.  E2 is fixed
    by E2 = Q + O(Q^2); E1 runs over the diamond images E2 | <d>, which act
    on the chi-part by chi(d), normalised to constant term 1 when possible.
    """
    basis = eisenstein_basis(trunc)
    u, v = basis["E[1,chi]"], basis["E[1,chibar]"]
    cu, cv = u.coefficient(0), v.coefficient(0)
    x, y = _solve2(cu, cv, NumberFieldElem(1), NumberFieldElem(1), NumberFieldElem(0), NumberFieldElem(1))
    e2 = u.scale(x) + v.scale(y)
    out = []
    for d in (2, 3, 4):
        img = u.scale(x * CHI(d)) + v.scale(y * CHI_BAR(d))
        c0 = img.coefficient(0)
        if not c0:
            continue
        e1 = img.scale(1 / c0)
        try:
            out.append((d, _rational_series(e1), _rational_series(e2)))
        except CalibrationError:
            continue
    return out


ORACLE_Q = 80


@lru_cache(maxsize=4)
def calibrate_E1_E2(trunc: int = 80, order: int = 10):
    """
    (E1, E2) as series in q with exponents in (1/5)Z, known to O(Q^trunc),
    Q = q^(1/5).  Each candidate must have integral coefficients and pass
    the j-oracle through q^order; exactly one distinct pair may survive.
    """
    if trunc < 40:
        raise ValueError("calibration needs at least 40 coefficients in Q")
    survivors = []
    for d, e1, e2 in _calibration_candidates(trunc):
        E1 = e1.substitute(Fraction(1, 5))
        E2 = e2.substitute(Fraction(1, 5))
        if E1.coefficient(0) != 1 or E2.val != Fraction(1, 5) or E2.leading_coefficient() != 1:
            continue
        # the oracle only needs the first ORACLE_Q coefficients
        nq = min(trunc, ORACLE_Q)
        oracle_trunc = min(order, int(_oracle_reach(nq)))
        res = j_oracle(E1.truncate(Fraction(nq, 5)), E2.truncate(Fraction(nq, 5)), oracle_trunc)
        if res.is_zero():
            if not any(E1 == s[0] and E2 == s[1] for s in survivors):
                survivors.append((E1, E2))
    if len(survivors) != 1:
        raise CalibrationError(f"calibration failed: {len(survivors)} candidate pairs pass the j-oracle")
    return survivors[0]


def _oracle_reach(trunc: int) -> Fraction:
    # j_model(t) loses 7 orders of Q to the discriminant cancellation and
    # starts at Q^-5; the residual is known below q^((trunc - 7) / 5) - 1.
    return Fraction(trunc - 7, 5) - 1


# ---------------------------------------------------------------------------
# roots and the basis h1, h2, h3
# ---------------------------------------------------------------------------


def nth_root(s: PuiseuxSeries, n: int) -> PuiseuxSeries:
    if n < 1:
        raise ValueError("n must be positive")
    if not s.coeffs or s.coeffs[0] != 1:
        raise ValueError("leading coefficient must be 1")
    return s.power(Fraction(1, n))


FORM_WIDTHS = {
    "E1": 5, "E2": 5, "h1": 20, "h2": 10, "h3": 20,
    "h1+h3": 20, "h1-h3": 20, "h1+ih3": 20, "h1-ih3": 20,
    "f1": 8, "f3": 8, "f5": 8, "f7": 8, "fprime": 8, "g2": 1,
}


def _h_trunc_to_Q(trunc: int) -> int:
    # h-forms to O(w^trunc), w = q^(1/20), need E1, E2 to O(Q^(trunc/4 + 1))
    return max(40, -(-trunc // 4) + 2)


@lru_cache(maxsize=4)
def _unit_ratio(nq: int) -> tuple:
    """(E1, E2/(Q E1)) to O(Q^nq), the second with constant term 1."""
    E1, E2 = calibrate_E1_E2(max(80, nq))
    E1 = E1.truncate(Fraction(nq, 5))
    E2 = E2.truncate(Fraction(nq + 1, 5))
    u = E2 / E1
    return E1, PuiseuxSeries(u.coeffs, 0, u.step)


@lru_cache(maxsize=8)
def h_form(j: int, trunc: int = 440) -> PuiseuxSeries:
    """h_j = E1 (E2/E1)^(j/4) to O(w^trunc), w = q^(1/20)."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    E1, u = _unit_ratio(_h_trunc_to_Q(trunc))
    bound = Fraction(trunc, 20)
    h = (E1 * u.power(Fraction(j, 4))).shift(Fraction(j, 20)).truncate(bound)
    if h.prec < bound:
        raise PrecisionError("h-form precision below the requested truncation")
    return h


def h_basis(trunc: int = 440):
    """(h1, h2, h3) to O(w^trunc) with w = q^(1/20)."""
    return tuple(h_form(j, trunc) for j in (1, 2, 3))


def named_form(name: str, trunc_w: int) -> PuiseuxSeries:
    """A form by label; ``trunc_w`` bounds the index in its own w = q^(1/width)."""
    if name not in FORM_WIDTHS:
        raise KeyError(f"unknown form {name!r}")
    mu = FORM_WIDTHS[name]
    qbound = Fraction(trunc_w, mu)
    if name in ("E1", "E2"):
        nq = max(80, trunc_w + 1)
        pair = calibrate_E1_E2(nq)
        return pair[0 if name == "E1" else 1].truncate(qbound)
    if name.startswith("h"):
        hw = 20 * qbound
        hw = math.ceil(hw)
        tw = _round_trunc(hw)
        if name in ("h1", "h2", "h3"):
            return h_form(int(name[1]), tw).truncate(qbound)
        h1, h3 = h_form(1, tw), h_form(3, tw)
        combos = {
            "h1+h3": lambda: h1 + h3,
            "h1-h3": lambda: h1 - h3,
            "h1+ih3": lambda: h1.scale(NumberFieldElem(1)) + h3.scale(I),
            "h1-ih3": lambda: h1.scale(NumberFieldElem(1)) - h3.scale(I),
        }
        return combos[name]().truncate(qbound)
    if name == "fprime":
        return fprime(qbound)
    if name == "g2":
        return g2(qbound)
    return eta_quotient(ETA_EXPONENTS[name], qbound)


def _round_trunc(w: int) -> int:
    return 40 * (-(-w // 40)) + 40


# ---------------------------------------------------------------------------
# j-invariant oracle
# ---------------------------------------------------------------------------


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def j_invariant(trunc) -> PuiseuxSeries:
    """j(q) = E4^3 / Delta to O(q^trunc)."""
    n = math.ceil(Fraction(trunc)) + 2
    E4 = PuiseuxSeries([1] + [240 * _sigma3(k) for k in range(1, n)], 0, 1)
    delta = eta_power(1, 24, n + 1)
    return ((E4 ** 3) / delta).truncate(trunc)


def _eval_laurent(poly: dict, t: PuiseuxSeries) -> PuiseuxSeries:
    out = None
    for e in sorted(poly, reverse=True):
        term = (t**e).scale(poly[e])
        out = term if out is None else out + term
    return out


def j_model(t: PuiseuxSeries) -> PuiseuxSeries:
    """j of the fiber of the Tate pencil at parameter t, from its short Weierstrass form."""
    from .surface_counter import MODELS

    m = MODELS["GAMMA1_5"]
    a4 = _eval_laurent(m.coeffs[3], t)
    a6 = _eval_laurent(m.coeffs[4], t)
    num = (a4**3).scale(4)
    den = num + (a6**2).scale(27)
    return (num / den).scale(1728)


def j_oracle(E1: PuiseuxSeries, E2: PuiseuxSeries, order) -> PuiseuxSeries:
    """j(q) - j_model(E1/E2), known through q^order (raises if it is not)."""
    order = Fraction(order)
    t = E1 / E2
    jm = j_model(t)
    bound = order + Fraction(1, 5)
    if jm.prec < bound:
        raise PrecisionError(f"j_model known only to O(q^{jm.prec}); need q^{order}")
    jq = j_invariant(bound)
    return (jq - jm).truncate(bound)


# ---------------------------------------------------------------------------
# dump
# ---------------------------------------------------------------------------


def series_csv(s: PuiseuxSeries, M: int = 40) -> str:
    """Rows numerator_index, M, coord0..coord3 for every stored exponent."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["numerator_index", "M", "coord0", "coord1", "coord2", "coord3"])
    for k, c in enumerate(s.coeffs):
        e = (s.val + k * s.step) * M
        if e.denominator != 1:
            if c == 0:
                continue
            raise ValueError(f"exponent {e / M} not on the 1/{M} lattice")
        coords = NumberFieldElem(c).coords
        w.writerow([int(e), M] + [str(x) for x in coords])
    return buf.getvalue()
