"""
Characteristic polynomials of Frobenius from trace data.

Power sums s_1..s_d give e_1..e_d through Newton's identities; the weight-3
functional equation (roots closed under a -> p^2/a) gives the rest,
e_{2d-k} = det * e_k / p^{2k}.  Polynomials are integer coefficient tuples,
leading coefficient first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_arith import I, SQRT_M2, NumberFieldElem
from .surface_counter import TraceTable, trace_table

__all__ = [
    "CharPoly",
    "QuadFactor",
    "InconsistentTraceError",
    "chi_m4",
    "newton_elementary",
    "charpoly_from_traces",
    "rho_charpolys",
    "wminus_charpoly",
    "predicted_factorization",
    "expand_factors",
    "weil_check",
    "self_inversive",
    "det_sign_candidates",
    "charpoly_report",
]


class InconsistentTraceError(ArithmeticError):
    """Trace data or polynomial division that should be exact is not."""


def chi_m4(p: int) -> int:
    return 1 if p % 4 == 1 else -1


# integer polynomials, leading coefficient first


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_divmod(a, b):
    """Division over Q; returns (quotient, remainder) as Fraction lists."""
    a = [Fraction(x) for x in a]
    q = []
    while len(a) >= len(b):
        c = a[0] / b[0]
        q.append(c)
        for i, y in enumerate(b):
            a[i] -= c * y
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return q, a


def _poly_gcd(a, b):
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    while b and any(b):
        _, r = poly_divmod(a, b)
        a, b = b, r
    return [x / a[0] for x in a]


def _derivative(a):
    n = len(a) - 1
    return [c * (n - i) for i, c in enumerate(a[:-1])]


@dataclass(frozen=True)
class CharPoly:
    coeffs: tuple
    p: int

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("characteristic polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def constant(self) -> int:
        return self.coeffs[-1]

    def __mul__(self, other: "CharPoly") -> "CharPoly":
        return CharPoly(tuple(poly_mul(self.coeffs, other.coeffs)), self.p)

    def exact_div(self, other: "CharPoly") -> "CharPoly":
        q, r = poly_divmod(self.coeffs, other.coeffs)
        if r or any(x.denominator != 1 for x in q):
            raise InconsistentTraceError(f"{other} does not divide {self} exactly")
        return CharPoly(tuple(int(x) for x in q), self.p)

    def power_sums(self, m: int) -> list:
        """s_1..s_m of the roots."""
        d = self.degree
        e = [(-1) ** k * c for k, c in enumerate(self.coeffs)]  # e_0..e_d
        s = []
        for k in range(1, m + 1):
            acc = 0
            for i in range(1, k):
                if i <= d:
                    acc += (-1) ** (i - 1) * e[i] * s[k - i - 1]
            if k <= d:
                acc += (-1) ** (k - 1) * k * e[k]
            s.append(acc)
        return s

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def mod(self, m: int) -> tuple:
        return tuple(c % m for c in self.coeffs)

    def is_square(self) -> bool:
        """Whether this is the square of an integer polynomial."""
        if self.degree % 2:
            return False
        sq = _isqrt_poly(self.coeffs)
        return sq is not None

    def sqrt(self) -> "CharPoly":
        sq = _isqrt_poly(self.coeffs)
        if sq is None:
            raise InconsistentTraceError(f"{self} is not a perfect square")
        return CharPoly(tuple(sq), self.p)

    def __str__(self):
        d = self.degree
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            k = d - i
            mono = "" if k == 0 else "x" if k == 1 else f"x^{k}"
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c) + ("*" if mono else "")
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")

    def to_list(self) -> list:
        return list(self.coeffs)


def _isqrt_poly(c):
    n = len(c) - 1
    if n % 2:
        return None
    h = n // 2
    r = [Fraction(1)]
    for k in range(1, h + 1):
        acc = Fraction(c[k])
        for i in range(1, k):
            acc -= r[i] * r[k - i]
        r.append(acc / 2)
    if any(x.denominator != 1 for x in r):
        return None
    r = [int(x) for x in r]
    return r if poly_mul(r, r) == list(c) else None


def newton_elementary(power_sums) -> list:
    """e_0..e_d from s_1..s_d; raises on non-integral results."""
    e = [Fraction(1)]
    for k in range(1, len(power_sums) + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * power_sums[i - 1]
        e.append(acc / k)
    if any(x.denominator != 1 for x in e):
        raise InconsistentTraceError("trace data inconsistent: non-integral elementary symmetric function")
    return [int(x) for x in e]


def charpoly_from_traces(traces, d: int, det: int, p: int | None = None) -> CharPoly:
    """
    Degree-2d polynomial from Tr(Frob^r), r = 1..d, and the determinant.

    Traces beyond r = d, when present, are checked against the result.
    """
    if isinstance(traces, TraceTable):
        p = traces.p
        tr = dict(traces.traces)
    else:
        tr = dict(traces)
    if p is None:
        raise ValueError("p is required for raw trace mappings")
    if any(r not in tr for r in range(1, d + 1)):
        raise ValueError(f"traces for r = 1..{d} are required")
    if abs(det) != p ** (2 * d):
        raise ValueError("det must be +-p^(2d)")
    e = newton_elementary([tr[r] for r in range(1, d + 1)])
    full = e + [0] * d
    p2 = p * p
    for k in range(0, d + 1):
        num = det * e[k]
        den = p2**k
        if num % den:
            raise InconsistentTraceError(f"trace data inconsistent: e_{2 * d - k} not integral")
        val = num // den
        if k == d and val != e[d]:
            raise InconsistentTraceError("trace data inconsistent: middle coefficient breaks the functional equation")
        full[2 * d - k] = val
    poly = CharPoly(tuple((-1) ** k * x for k, x in enumerate(full)), p)
    extra = sorted(r for r in tr if r > d)
    if extra:
        sums = poly.power_sums(max(extra))
        for r in extra:
            if sums[r - 1] != tr[r]:
                raise InconsistentTraceError(f"trace data inconsistent: Tr(Frob^{r}) = {tr[r]} but polynomial gives {sums[r - 1]}")
    return poly


def det_sign_candidates(traces, d: int, p: int, divisor: CharPoly | None = None) -> list:
    """
    Signs eps for which det = eps p^(2d) yields a consistent polynomial:
    integral, matching all supplied traces, Weil, and (if given) divisible
    by ``divisor``.
    """
    good = []
    for eps in (1, -1):
        try:
            poly = charpoly_from_traces(traces, d, eps * p ** (2 * d), p)
        except InconsistentTraceError:
            continue
        if not weil_check(poly):
            continue
        if divisor is not None:
            try:
                poly.exact_div(divisor)
            except InconsistentTraceError:
                continue
        good.append(eps)
    return good


def rho_charpolys(p: int, model2: str = "K3_N2", model4: str = "K3_N4"):
    """(Char rho2, Char rho4, the two trace tables) with det = chi_{-4}(p) p^{2d}."""
    t2 = trace_table(model2, p, 2)
    t4 = trace_table(model4, p, 3)
    c = chi_m4(p)
    rho2 = charpoly_from_traces(t2, 1, c * p**2)
    rho4 = charpoly_from_traces(t4, 3, c * p**6)
    return rho2, rho4, t2, t4


def wminus_charpoly(p: int, rho2: CharPoly | None = None, rho4: CharPoly | None = None) -> CharPoly:
    """Char(rho4) / Char(rho2), checked for exactness and the square shape at p = 1 mod 8."""
    if rho2 is None or rho4 is None:
        rho2, rho4, _, _ = rho_charpolys(p)
    w = rho4.exact_div(rho2)
    if w.degree != 4:
        raise InconsistentTraceError("W- quotient has wrong degree")
    if p % 8 == 1 and not w.is_square():
        raise InconsistentTraceError(f"W- polynomial at p = {p} is not a square")
    return w


@dataclass(frozen=True)
class QuadFactor:
    """T^2 + b T + c over Q(w8)."""

    b: NumberFieldElem
    c: NumberFieldElem

    def check_shape(self, p: int):
        if not (self.b.in_subfield("Q") or _on_line(self.b, I) or _on_line(self.b, SQRT_M2)):
            raise ValueError(f"linear coefficient {self.b} is not in Q, iQ or sqrt(-2)Q")
        if not (self.c == p * p or self.c == -p * p):
            raise ValueError(f"constant term {self.c} is not +-p^2")

    def coefficients(self):
        return (NumberFieldElem(1), self.b, self.c)

    def __str__(self):
        return f"T^2 + ({self.b}) T + ({self.c})"


def _on_line(x: NumberFieldElem, unit: NumberFieldElem) -> bool:
    return (x / unit).in_subfield("Q") if x else True


def predicted_factorization(p: int, A_p) -> tuple:
    """
    The two quadratic factors of Char(W-) determined by A_p, the
    congruence coefficient of the first case of the plan:
    (T^2 - A T + p^2)^2 when p = 1 mod 8 and (T^2 - A T - p^2)(T^2 + A T - p^2)
    otherwise.
    """
    A = NumberFieldElem(A_p)
    p2 = p * p
    if p % 8 == 1:
        f = QuadFactor(-A, NumberFieldElem(p2))
        pair = (f, f)
    else:
        pair = (QuadFactor(-A, NumberFieldElem(-p2)), QuadFactor(A, NumberFieldElem(-p2)))
    for f in pair:
        f.check_shape(p)
    return pair


def expand_factors(factors, p: int) -> CharPoly:
    coeffs = [NumberFieldElem(1)]
    for f in factors:
        nxt = [NumberFieldElem(0)] * (len(coeffs) + 2)
        for i, x in enumerate(coeffs):
            for j, y in enumerate(f.coefficients()):
                nxt[i + j] = nxt[i + j] + x * y
        coeffs = nxt
    out = []
    for c in coeffs:
        if not c.is_rational() or c.rational().denominator != 1:
            raise ValueError(f"product of factors is not an integer polynomial (coefficient {c})")
        out.append(int(c.rational()))
    return CharPoly(tuple(out), p)


def self_inversive(poly: CharPoly) -> bool:
    """Exact functional equation c_{2d-k} p^{2k} = det c_k."""
    n, p, det = poly.degree, poly.p, poly.constant
    return all(poly.coeffs[n - k] * p ** (2 * k) == det * poly.coeffs[k] for k in range(n + 1))


def weil_check(poly: CharPoly, rtol: float = 1e-9) -> bool:
    """All complex roots have modulus p (square-free part, numerically)."""
    c = poly.coeffs
    g = _poly_gcd(c, _derivative(c))
    core, rem = poly_divmod(c, g)
    if rem:
        return False
    core = [float(x) for x in core]
    if len(core) == 1:
        return True
    roots = np.roots(core)
    return bool(np.all(np.abs(np.abs(roots) / poly.p - 1.0) <= rtol))


def _factors_json(factors):
    return [[NumberFieldElem(x).as_strings() for x in f.coefficients()] for f in factors]


def charpoly_report(p: int, A_p=None) -> dict:
    """Record for one prime: rho2, rho4, W-, optional predicted factors and all checks."""
    rho2, rho4, t2, t4 = rho_charpolys(p)
    w = wminus_charpoly(p, rho2, rho4)
    c = chi_m4(p)
    checks = {
        "det_rho2": rho2.constant == c * p**2,
        "det_rho4": rho4.constant == c * p**6,
        "det_wminus": w.constant == p**4,
        "det_sign_rho2_forced": det_sign_candidates(t2, 1, p) == [c],
        "det_sign_rho4_forced": det_sign_candidates(
            {r: t4[r] for r in range(1, 4)}, 3, p, divisor=rho2
        ) == [c],
        "mod2_wminus": w.mod(2) == (1, 0, 0, 0, 1),
        "weil_rho2": weil_check(rho2) and self_inversive(rho2),
        "weil_rho4": weil_check(rho4) and self_inversive(rho4),
        "weil_wminus": weil_check(w) and self_inversive(w),
    }
    if p % 4 == 3:
        checks["even_polys"] = rho2.is_even() and rho4.is_even()
    out = {"p": p, "rho2": rho2.to_list(), "rho4": rho4.to_list(), "wminus": w.to_list(), "factors": [], "checks": checks}
    if A_p is not None:
        fac = predicted_factorization(p, A_p)
        out["factors"] = _factors_json(fac)
        checks["factorization_matches"] = expand_factors(fac, p) == w
    return out


def report_json(records) -> str:
    return json.dumps(records, sort_keys=True, indent=2)
