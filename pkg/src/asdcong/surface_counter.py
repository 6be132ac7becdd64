"""
Point counting on elliptic surfaces over the projective t-line.

Every model is a long Weierstrass equation

    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

whose coefficients are Laurent polynomials in t with rational
coefficients.  The five shipped models are all pullbacks of the Tate
normal form with a 5-torsion point,

    y^2 + (1 - b) xy - b y = x^3 - b x^2,       Delta = b^5 (b^2 - 11 b - 1),

along b = t (GAMMA1_5, in short Weierstrass form), b = t^2 (EN_N2, K3_N2)
and b = t^4 (EN_N4, K3_N4).  The short forms carry the denominators 48 and
864 and are admissible only for p >= 5; the K3 forms are integral.

Traces follow the Lefschetz convention

    Tr(Frob_q) = - sum_{t in P^1(F_q)} (stalk trace at t),

with stalk traces a_t (smooth), +1 (split node), -1 (nonsplit node) and
0 (additive).  The fibers over t = 0 and t = oo are evaluated in a
rescaled chart (x, y) -> (u^2 x, u^3 y) with u a minimal power of the
local parameter.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .finite_field import FieldCtx, FieldElement, closed_point_reps, is_prime, make_field

__all__ = [
    "SurfaceModel",
    "FiberData",
    "TraceTable",
    "InadmissibleModelError",
    "WeilBoundError",
    "INFINITY",
    "MODELS",
    "get_model",
    "classify_fiber",
    "classify_many",
    "trace_frobenius",
    "trace_table",
    "set_threads",
]

SMOOTH, MULT_SPLIT, MULT_NONSPLIT, ADDITIVE = "smooth", "mult_split", "mult_nonsplit", "additive"
_KIND_NAMES = {K.KIND_SMOOTH: SMOOTH, K.KIND_SPLIT: MULT_SPLIT, K.KIND_NONSPLIT: MULT_NONSPLIT, K.KIND_ADDITIVE: ADDITIVE}


class InadmissibleModelError(ValueError):
    pass


class WeilBoundError(ArithmeticError):
    pass


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "oo"


INFINITY = _Infinity()


# Laurent polynomials: dict exponent -> Fraction


def _lp(*pairs):
    return {e: Fraction(c) for e, c in pairs if c}


def _lp_add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _lp_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _lp_scale(a, c):
    return {e: v * c for e, v in a.items() if v * c}


def _lp_subst(a, n):
    """a(t^n)."""
    return {e * n: c for e, c in a.items()}


_TATE_C4 = _lp((4, 1), (3, -12), (2, 14), (1, 12), (0, 1))
_TATE_C6 = _lp((6, -1), (5, 18), (4, -75), (2, -75), (1, -18), (0, -1))


def _short_from_tate(n: int):
    """(a4, a6) of y^2 = x^3 + A(T) x + B(T), T = t^n, for n = 1 with the t-twist folded in."""
    c4 = _lp_subst(_TATE_C4, n)
    c6 = _lp_subst(_TATE_C6, n)
    if n == 1:
        # y^2 = t (x^3 + A x + B) is isomorphic to Y^2 = X^3 + A t^2 X + B t^3
        return _lp_scale(c4, Fraction(-1, 48)), _lp_scale(c6, Fraction(-1, 864))
    a4 = _lp_mul(_lp_scale(c4, Fraction(-1, 48)), {-2 * n: Fraction(1)})
    a6 = _lp_mul(_lp_scale(c6, Fraction(-1, 864)), {-3 * n: Fraction(1)})
    return a4, a6


def _tate(n: int):
    b = {n: Fraction(1)}
    return (_lp_add({0: Fraction(1)}, _lp_scale(b, -1)), _lp_scale(b, -1), _lp_scale(b, -1), {}, {})


@dataclass(frozen=True, eq=False)
class SurfaceModel:
    tag: str
    coeffs: tuple  # (a1, a2, a3, a4, a6), each a Laurent polynomial dict
    description: str = ""

    @property
    def denominators(self) -> int:
        d = 1
        for a in self.coeffs:
            for c in a.values():
                d = math.lcm(d, c.denominator)
        return d

    def admissible(self, p: int) -> bool:
        return p % 2 == 1 and self.denominators % p != 0

    def check_admissible(self, p: int):
        if p == 2 or not is_prime(p):
            raise InadmissibleModelError(f"p = {p} is not an odd prime")
        if not self.admissible(p):
            raise InadmissibleModelError(
                f"model {self.tag} is inadmissible at p = {p} (coefficient denominators {self.denominators})"
            )

    def chart_exponent(self, at_infinity: bool) -> int:
        """Least k with u^i a_i integral for u = t^k (at 0) or u = s^k, s = 1/t (at oo)."""
        k = 0
        for w, a in zip((1, 2, 3, 4, 6), self.coeffs):
            if not a:
                continue
            pole = max(a) if at_infinity else -min(a)
            if pole > 0:
                k = max(k, -(-pole // w))
        return k

    def chart_constants(self, at_infinity: bool) -> tuple:
        """Rational coefficients of the rescaled fiber over t = 0 or t = oo."""
        k = self.chart_exponent(at_infinity)
        out = []
        for w, a in zip((1, 2, 3, 4, 6), self.coeffs):
            e = w * k if at_infinity else -w * k
            out.append(a.get(e, Fraction(0)))
        return tuple(out)


def _make_models():
    a4, a6 = _short_from_tate(1)
    g15 = SurfaceModel("GAMMA1_5", ({}, {}, {}, a4, a6), "y^2 = t(x^3 + A x + B), Tate pencil over X^1(5)")
    e2 = SurfaceModel("EN_N2", ({}, {}, {}) + _short_from_tate(2), "y^2 = x^3 + A(t^2) x + B(t^2)")
    e4 = SurfaceModel("EN_N4", ({}, {}, {}) + _short_from_tate(4), "y^2 = x^3 + A(t^4) x + B(t^4)")
    k2 = SurfaceModel("K3_N2", _tate(2), "y^2 + (1 - t^2) xy - t^2 y = x^3 - t^2 x^2")
    k4 = SurfaceModel("K3_N4", _tate(4), "K3_N2 with t replaced by t^2")
    return {m.tag: m for m in (g15, e2, e4, k2, k4)}


MODELS = _make_models()
_ALIASES = {"gamma15": "GAMMA1_5", "k3n2": "K3_N2", "k3n4": "K3_N4", "en2": "EN_N2", "en4": "EN_N4"}


def get_model(name) -> SurfaceModel:
    if isinstance(name, SurfaceModel):
        return name
    key = _ALIASES.get(str(name).lower().replace("_", "").replace("-", ""), str(name).upper())
    if key not in MODELS:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    return MODELS[key]


# ---------------------------------------------------------------------------
# fibers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberData:
    t: object
    kind: str
    q: int
    a_t: int | None = None

    def __post_init__(self):
        if self.kind == SMOOTH and self.a_t * self.a_t > 4 * self.q:
            raise WeilBoundError(f"|a_t| = {abs(self.a_t)} exceeds 2 sqrt({self.q}) at t = {self.t}")

    @property
    def stalk_trace(self) -> int:
        return self.power_sum(1)

    @property
    def eigenvalues(self):
        """Descriptor: the polynomial T^2 - a T + q, or the stalk eigenvalues."""
        if self.kind == SMOOTH:
            return ("roots of", (1, -self.a_t, self.q))
        return {MULT_SPLIT: (1,), MULT_NONSPLIT: (-1,), ADDITIVE: ()}[self.kind]

    def power_sum(self, m: int) -> int:
        """Trace of Frob^m on the stalk."""
        if self.kind == SMOOTH:
            return _power_sum(self.a_t, self.q, m)
        if self.kind == MULT_SPLIT:
            return 1
        if self.kind == MULT_NONSPLIT:
            return -1 if m % 2 else 1
        return 0


def _power_sum(a: int, q: int, m: int) -> int:
    s0, s1 = 2, a
    if m == 0:
        return 2
    for _ in range(m - 1):
        s0, s1 = s1, a * s1 - q * s0
    return s1


def _constant_logs(ctx: FieldCtx) -> np.ndarray:
    lg = ctx.tables.log
    p = ctx.p
    vals = [2, 4, 8, 9, 27, 24, 12, pow(4, -1, p), 36, 216]
    return np.array([lg[v % p] for v in vals], dtype=np.int64)


def _rat_log(ctx: FieldCtx, c: Fraction) -> int:
    p = ctx.p
    v = c.numerator * pow(c.denominator, -1, p) % p
    return int(ctx.tables.log[v])


@lru_cache(maxsize=256)
def _coef_arrays(model: SurfaceModel, ctx: FieldCtx):
    L = max(1, max(len(a) for a in model.coeffs))
    z = ctx.q - 1
    coef = np.full((5, L), z, dtype=np.int64)
    expo = np.zeros((5, L), dtype=np.int64)
    nterms = np.zeros(5, dtype=np.int64)
    for i, a in enumerate(model.coeffs):
        for j, (e, c) in enumerate(sorted(a.items())):
            coef[i, j] = _rat_log(ctx, c)
            expo[i, j] = e
        nterms[i] = len(a)
    return coef, expo, nterms


def _triples_generic(model, ctx, tlogs):
    tb = ctx.tables
    coef, expo, nterms = _coef_arrays(model, ctx)
    c2 = int(tb.log[2 % ctx.p])
    c4 = int(tb.log[4 % ctx.p])
    return K.eval_b_invariants(coef, expo, nterms, np.ascontiguousarray(tlogs, dtype=np.int64), tb.zech, ctx.q - 1, c2, c4)


def _triple_from_constants(ctx: FieldCtx, consts) -> np.ndarray:
    vals = []
    p = ctx.p
    for c in consts:
        vals.append(ctx.from_int(c.numerator * pow(c.denominator, -1, p)))
    a1, a2, a3, a4, a6 = vals
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    lg = ctx.tables.log
    return np.array([[lg[b2.encode()], lg[b4.encode()], lg[b6.encode()]]], dtype=np.int64)


def _log_add(a, b, zech, z):
    """Vectorised addition in the log domain (z is the zero sentinel)."""
    d = (b - a) % z
    s = zech[d]
    out = np.where(s == z, z, (a + s) % z)
    out = np.where(a == z, b, out)
    return np.where(b == z, a, out)


@lru_cache(maxsize=8)
def _char_sum_tables(ctx: FieldCtx):
    """
    For each class representative A' of F_q modulo fourth powers (and A' = 0),
    the table B -> sum_x chi(x^3 + A' x + B), indexed by the encoding of B.

    The sum over x is a correlation over the additive group (Z/p)^r and is
    evaluated with an r-dimensional FFT.
    """
    tb = ctx.tables
    q, z, p, r = ctx.q, ctx.q - 1, ctx.p, ctx.r
    chi = np.zeros(q, dtype=np.float64)
    chi[tb.exp] = 1.0 - 2.0 * (np.arange(z) & 1)
    shape = (p,) * r
    chi_hat = np.fft.fftn(chi.reshape(shape))
    lx = np.arange(z, dtype=np.int64)
    lx3 = (3 * lx) % z
    m = math.gcd(4, z)
    tables = {}
    for key in [None] + list(range(m)):
        if key is None:
            y = lx3
        else:
            y = _log_add(lx3, (lx + key) % z, tb.zech, z)
        enc = np.where(y == z, 0, tb.exp[np.minimum(y, z - 1)])
        counts = np.bincount(enc, minlength=q).astype(np.float64)
        counts[0] += 1.0  # x = 0 gives y = 0
        corr = np.fft.ifftn(np.conj(np.fft.fftn(counts.reshape(shape))) * chi_hat).real.reshape(q)
        rounded = np.rint(corr)
        if np.max(np.abs(corr - rounded)) > 1e-6:
            raise ArithmeticError("character-sum FFT lost integrality")
        tables[key] = rounded.astype(np.int64)
    return m, tables


def _smooth_traces_fft(ctx: FieldCtx, lc4: np.ndarray, lc6: np.ndarray) -> np.ndarray:
    """a_t for smooth fibers from (c4, c6) logs, via y^2 = x^3 - 27 c4 x - 54 c6 (p >= 5)."""
    tb = ctx.tables
    z, p = ctx.q - 1, ctx.p
    m, tables = _char_sum_tables(ctx)
    l27 = int(tb.log[(-27) % p])
    l54 = int(tb.log[(-54) % p])
    la = np.where(lc4 == z, z, (lc4 + l27) % z)
    lb = np.where(lc6 == z, z, (lc6 + l54) % z)
    out = np.empty(len(la), dtype=np.int64)
    zero_a = la == z
    if np.any(zero_a):
        enc = np.where(lb[zero_a] == z, 0, tb.exp[np.minimum(lb[zero_a], z - 1)])
        out[zero_a] = -tables[None][enc]
    nz = ~zero_a
    if np.any(nz):
        a = la[nz]
        key = a % m
        # u with u^4 = A / g^key; any solution of 4 lu = a - key (mod z)
        step = (a - key) // m
        inv = pow(4 // m, -1, z // m) if z // m > 1 else 0
        lu = (step * inv) % (z // m) if z // m > 1 else np.zeros_like(a)
        b = lb[nz]
        bprime = np.where(b == z, z, (b - 6 * lu) % z)
        enc = np.where(bprime == z, 0, tb.exp[np.minimum(bprime, z - 1)])
        res = np.empty(len(a), dtype=np.int64)
        for k in range(m):
            sel = key == k
            res[sel] = -tables[k][enc[sel]]
        out[nz] = res
    return out


def _classify_triples(ctx: FieldCtx, trip: np.ndarray, method: str = "auto"):
    """
    Classify rows of (b2, b4, b6) logs, evaluating each distinct row once.

    ``method="direct"`` forces the per-fiber x-sweep kernel even when the
    FFT route is available.
    """
    if len(trip) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    uniq, inv = np.unique(trip, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    z = ctx.q - 1
    consts = _constant_logs(ctx)
    if ctx.p > 3 and method != "direct":
        inv3 = K.short_invariants(np.ascontiguousarray(uniq), ctx.tables.zech, z, consts)
        smooth = inv3[:, 0] != z
        kind = np.full(len(uniq), K.KIND_SMOOTH, dtype=np.int64)
        at = np.zeros(len(uniq), dtype=np.int64)
        at[smooth] = _smooth_traces_fft(ctx, inv3[smooth, 1], inv3[smooth, 2])
        if np.any(~smooth):
            ks, _ = K.classify_triples(np.ascontiguousarray(uniq[~smooth]), ctx.tables.zech, z, consts)
            kind[~smooth] = ks
    else:
        kind, at = K.classify_triples(np.ascontiguousarray(uniq), ctx.tables.zech, z, consts)
    if np.any(kind < 0):
        raise ArithmeticError("singular fiber without a detectable singular point")
    smooth = kind == K.KIND_SMOOTH
    if np.any(at[smooth].astype(object) ** 2 > 4 * ctx.q):
        raise WeilBoundError(f"smooth fiber violates |a_t| <= 2 sqrt(q) over F_{ctx.q}")
    return kind[inv], at[inv]


def classify_many(model, ctx: FieldCtx, tlogs: np.ndarray, method: str = "auto"):
    """Vectorised classification of the nonzero points with the given logs."""
    return _classify_triples(ctx, _triples_generic(get_model(model), ctx, tlogs), method)


def _special_fiber(model: SurfaceModel, ctx: FieldCtx, at_infinity: bool):
    trip = _triple_from_constants(ctx, model.chart_constants(at_infinity))
    kind, at = _classify_triples(ctx, trip)
    return int(kind[0]), int(at[0])


def classify_fiber(model, t, ctx: FieldCtx) -> FiberData:
    """Reduction type and Frobenius data of the fiber over ``t`` (a field element or ``INFINITY``)."""
    model = get_model(model)
    model.check_admissible(ctx.p)
    if t is INFINITY or t is None:
        kind, a = _special_fiber(model, ctx, True)
    else:
        t = ctx.element(t) if not isinstance(t, FieldElement) else t
        if t.is_zero():
            kind, a = _special_fiber(model, ctx, False)
        else:
            kinds, ats = classify_many(model, ctx, np.array([ctx.tables.log[t.encode()]]))
            kind, a = int(kinds[0]), int(ats[0])
    name = _KIND_NAMES[kind]
    return FiberData(t, name, ctx.q, a if name == SMOOTH else None)


def _stalk(kind: int, a: int, qd: int, m: int) -> int:
    if kind == K.KIND_SMOOTH:
        return _power_sum(a, qd, m)
    if kind == K.KIND_SPLIT:
        return 1
    if kind == K.KIND_NONSPLIT:
        return -1 if m % 2 else 1
    return 0


def trace_frobenius(model, p: int, r: int) -> int:
    """Direct Lefschetz sum over every point of P^1(F_{p^r})."""
    model = get_model(model)
    model.check_admissible(p)
    ctx = make_field(p, r)
    kinds, ats = classify_many(model, ctx, np.arange(ctx.q - 1, dtype=np.int64))
    total = 0
    for kd in (K.KIND_SPLIT, K.KIND_NONSPLIT):
        total += _stalk(kd, 0, ctx.q, 1) * int(np.count_nonzero(kinds == kd))
    total += int(ats[kinds == K.KIND_SMOOTH].astype(object).sum())
    for inf in (False, True):
        kd, a = _special_fiber(model, ctx, inf)
        total += _stalk(kd, a, ctx.q, 1)
    return -total


@dataclass(frozen=True)
class TraceTable:
    model: str
    p: int
    traces: dict = field(default_factory=dict)

    def __post_init__(self):
        half = 3 if self.model.endswith("N4") else 1
        for r, tr in self.traces.items():
            if abs(tr) > 2 * half * self.p**r:
                raise ArithmeticError(f"trace {tr} at r = {r} exceeds the Weil bound")

    @property
    def r_max(self) -> int:
        return max(self.traces) if self.traces else 0

    @property
    def uncalibrated(self) -> bool:
        return self.p == 5

    def __getitem__(self, r):
        return self.traces[r]

    def to_json(self) -> str:
        return json.dumps(
            {"model": self.model, "p": self.p, "traces": {str(r): self.traces[r] for r in sorted(self.traces)},
             "uncalibrated": self.uncalibrated},
            sort_keys=True,
        )

    def csv_rows(self):
        return [(self.model, self.p, r, self.traces[r]) for r in sorted(self.traces)]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["model", "p", "r", "trace"])
        w.writerows(self.csv_rows())
        return buf.getvalue()


def trace_table(model, p: int, r_max: int) -> TraceTable:
    """Traces for r = 1..r_max by aggregating over closed points of degree <= r_max."""
    model = get_model(model)
    model.check_admissible(p)
    sums = {r: 0 for r in range(1, r_max + 1)}
    for d in range(1, r_max + 1):
        ctx = make_field(p, d)
        reps = closed_point_reps(ctx)
        if len(reps) == 0:
            continue
        kinds, ats = classify_many(model, ctx, ctx.tables.log[reps])
        qd = p**d
        # group smooth fibers by a_t
        smooth = kinds == K.KIND_SMOOTH
        vals, counts = np.unique(ats[smooth], return_counts=True)
        n_split = int(np.count_nonzero(kinds == K.KIND_SPLIT))
        n_non = int(np.count_nonzero(kinds == K.KIND_NONSPLIT))
        for r in range(d, r_max + 1, d):
            m = r // d
            s = sum(int(c) * _power_sum(int(a), qd, m) for a, c in zip(vals, counts))
            s += n_split * _stalk(K.KIND_SPLIT, 0, qd, m) + n_non * _stalk(K.KIND_NONSPLIT, 0, qd, m)
            sums[r] += d * s
    ctx1 = make_field(p, 1)
    for inf in (False, True):
        kd, a = _special_fiber(model, ctx1, inf)
        for r in sums:
            sums[r] += _stalk(kd, a, p, r)
    return TraceTable(model.tag, p, {r: -s for r, s in sums.items()})


def set_threads(n: int | None):
    """Cap the numba worker pool; ``None`` keeps the default."""
    if n is None:
        return
    import numba

    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
