"""
Three-term ASD congruence checks.

For a form with integer-indexed coefficients a(n) and data (A, B) at p the
checker certifies

    v( a(np) - A a(n) + B a(n/p) ) >= 2 (1 + v_p(n)),      n = 1..N,

at one place above p, chosen once for all n.  Places are the four
Hensel roots of x^4 + 1 in the unramified ring of precision K.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .charpoly_engine import chi_m4, expand_factors, predicted_factorization, rho_charpolys, wminus_charpoly
from .exact_arith import (
    INF,
    I,
    SQRT_M2,
    NumberFieldElem,
    default_precision,
    hensel_omega8,
    padic_embed,
    padic_valuation,
    vp_int,
)
from .finite_field import is_prime
from .qseries_forms import FORM_WIDTHS, eta_quotients, g2, named_form

__all__ = [
    "ASDCase",
    "ASDPlan",
    "ASDReport",
    "PrecisionTooLowError",
    "asd_plan",
    "asd_check",
    "verify_all",
    "check_pair",
    "sgn",
    "eta_data",
    "default_trunc",
    "embedding_conjugate_index",
    "check_with_embedding",
    "reports_json",
]

MAX_LISTED_FAILURES = 10


class PrecisionTooLowError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ASDCase:
    form: str
    A: NumberFieldElem
    B: NumberFieldElem


@dataclass(frozen=True)
class ASDPlan:
    p: int
    cases: tuple

    def weil_sizes_ok(self) -> bool:
        p = self.p
        for c in self.cases:
            for k in (1, 3, 5, 7):
                if abs(c.A.to_complex(k)) > 2 * p + 1e-9:
                    return False
                if abs(abs(c.B.to_complex(k)) - p * p) > 1e-9:
                    return False
        return True

    def case(self, form: str) -> ASDCase:
        for c in self.cases:
            if c.form == form:
                return c
        raise KeyError(form)


@dataclass
class ASDReport:
    form: str
    p: int
    A: NumberFieldElem
    B: NumberFieldElem
    N: int
    K: int
    verdict: str
    min_slack: int | None
    embedding: int | None
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "form": self.form,
            "Ap": self.A.as_strings(),
            "Bp": self.B.as_strings(),
            "N": self.N,
            "K": self.K,
            "embedding": self.embedding,
            "verdict": self.verdict,
            "min_slack": self.min_slack,
            "failures": self.failures,
        }

    def summary(self) -> str:
        emb = "-" if self.embedding is None else str(self.embedding)
        slack = "n/a" if self.min_slack is None else f"{self.min_slack}"
        return f"p={self.p:<3} {self.form:<7} {self.verdict.upper():<4} min_slack={slack} (valuations capped at >= {self.K}) embedding={emb}"


def sgn(p: int) -> int:
    """2^((p-1)/4) mod p as +-1, for p = 1 mod 8."""
    if p % 8 != 1:
        raise ValueError("sgn(p) is defined for p = 1 mod 8")
    v = pow(2, (p - 1) // 4, p)
    if v == 1:
        return 1
    if v == p - 1:
        return -1
    raise ArithmeticError("2^((p-1)/4) is not +-1")


def eta_data(p: int) -> dict:
    """a1(p), a3(p), a5(p), a7(p) from the eta quotients and a_g2(p)."""
    bound = Fraction(p, 8) + 1
    f = eta_quotients(bound)
    out = {k: f[k].coefficient(Fraction(p, 8)) for k in f}
    out["g2"] = g2(p + 1).coefficient(p)
    return out


def asd_plan(p: int) -> ASDPlan:
    """Congruence data for every form at p, by the residue of p mod 8."""
    if p == 2 or p < 3 or not is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime")
    a = eta_data(p)
    p2 = p * p
    one = NumberFieldElem(1)
    r = p % 8
    if r == 1:
        A = one * (sgn(p) * a["f1"])
        cases = [ASDCase("h1", A, one * p2), ASDCase("h3", A, one * p2)]
    elif r == 5:
        A = I * (4 * a["f5"])
        cases = [ASDCase("h1", -A, one * -p2), ASDCase("h3", A, one * -p2)]
    elif r == 3:
        A = SQRT_M2 * (2 * a["f3"])
        cases = [ASDCase("h1+h3", A, one * -p2), ASDCase("h1-h3", -A, one * -p2)]
    else:
        A = SQRT_M2 * (8 * a["f7"])
        cases = [ASDCase("h1+ih3", A, one * -p2), ASDCase("h1-ih3", -A, one * -p2)]
    cases.append(ASDCase("h2", one * a["g2"], one * (chi_m4(p) * p2)))
    plan = ASDPlan(p, tuple(cases))
    if not plan.weil_sizes_ok():
        raise ArithmeticError(f"plan at p = {p} violates |A| <= 2p or |B| = p^2")
    return plan


def default_trunc(N: int, p: int) -> int:
    return 40 * math.ceil(N * p / 40) + 40


def _sequence(form, N: int, p: int) -> tuple:
    """(integer-indexed coefficients up to N*p, width)."""
    if isinstance(form, str):
        mu = FORM_WIDTHS[form]
        s = named_form(form, default_trunc(N, p) if mu == 20 else N * p + 1)
    else:
        s, mu = form
    return s.indexed(mu, N * p), mu


def _scan(seq, p, A, B, N, K, root, skip_zero):
    """(failures, min_slack) of one embedding."""
    A_e, B_e = padic_embed(A, root), padic_embed(B, root)
    cache = {}

    def emb(n):
        if n not in cache:
            cache[n] = padic_embed(seq[n], root)
        return cache[n]

    failures, slack = [], None
    for n in range(1, N + 1):
        if skip_zero and seq[n * p] == 0 and seq[n] == 0 and (n % p or seq[n // p] == 0):
            continue
        need = 2 * (1 + vp_int(n, p))
        if need > K:
            raise PrecisionTooLowError(f"precision K = {K} cannot certify valuation {need}; raise precision")
        x = emb(n * p) - A_e * emb(n)
        if n % p == 0:
            x = x + B_e * emb(n // p)
        v = padic_valuation(x)
        s = K - need if v == INF else v - need
        slack = s if slack is None else min(slack, s)
        if v != INF and v < need:
            failures.append({"n": n, "achieved": v, "required": need})
    return failures, slack


def asd_check(form, p: int, A, B, N: int, K: int | None = None, skip_zero: bool = False,
              embeddings=None) -> ASDReport:
    """
    Check the congruence for n = 1..N.  ``form`` is a label or a pair
    (series, width).  Embeddings are tried in Hensel-root order (or only
    those listed in ``embeddings``); the report names the first one that
    certifies every n.
    """
    A, B = NumberFieldElem(A), NumberFieldElem(B)
    if K is None:
        K = default_precision(p, N)
    name = form if isinstance(form, str) else "custom"
    seq, _ = _sequence(form, N, p)
    roots = hensel_omega8(p, K)
    order = range(len(roots)) if embeddings is None else embeddings
    best = None
    for idx in order:
        failures, slack = _scan(seq, p, A, B, N, K, roots[idx], skip_zero)
        if not failures:
            return ASDReport(name, p, A, B, N, K, "pass", slack, idx, [])
        if best is None or len(failures) < len(best[1]):
            best = (idx, failures, slack)
    idx, failures, slack = best
    return ASDReport(name, p, A, B, N, K, "fail", slack, None, failures[:MAX_LISTED_FAILURES])


def check_pair(first: ASDCase, second: ASDCase, p: int, N: int, K: int | None = None) -> tuple:
    """
    Reports for a pair of cases that must hold at one common place: the
    place is the first one certifying ``second``; ``first`` is then checked
    at that place only.
    """
    r2 = asd_check(second.form, p, second.A, second.B, N, K)
    if r2.passed:
        r1 = asd_check(first.form, p, first.A, first.B, N, K, embeddings=[r2.embedding])
    else:
        r1 = asd_check(first.form, p, first.A, first.B, N, K)
    return r1, r2


def verify_all(p_list, N: int = 100, K: int | None = None, perturb: bool = False) -> dict:
    """
    ASD checks for every case at every p, plus the cross-checks

    * the plan's quadratic factors multiply out to Char(W-) from counting;
    * the h2 data (a_g2(p), chi_{-4}(p) p^2) is Char(rho2) from counting.

    ``perturb`` flips the sign of A for h1 (a test hook).
    """
    reports, cross = [], []
    for p in sorted(set(p_list)):
        plan = asd_plan(p)
        c1, c2, h2 = plan.cases
        if perturb and c1.form == "h1":
            c1 = ASDCase(c1.form, -c1.A, c1.B)
        reports.extend(check_pair(c1, c2, p, N, K))
        reports.append(asd_check(h2.form, p, h2.A, h2.B, N, K))
        rho2, rho4, _, _ = rho_charpolys(p)
        w = wminus_charpoly(p, rho2, rho4)
        predicted = expand_factors(predicted_factorization(p, plan.cases[0].A), p)
        rho2_from_plan = (1, -int(h2.A.rational()), int(h2.B.rational()))
        cross.append({
            "p": p,
            "wminus": w.to_list(),
            "predicted": predicted.to_list(),
            "factor_match": predicted == w,
            "rho2_match": rho2.coeffs == rho2_from_plan,
        })
    ok = all(r.passed for r in reports) and all(c["factor_match"] and c["rho2_match"] for c in cross)
    return {"ok": ok, "reports": reports, "cross_checks": cross}


def embedding_conjugate_index(p: int, K: int, idx: int, k: int) -> int:
    """Index of root^k among the Hensel roots (the place composed with w -> w^k)."""
    roots = hensel_omega8(p, K)
    target = roots[idx] ** k
    for j, r in enumerate(roots):
        if r == target:
            return j
    raise ArithmeticError("root power not among the roots")


def check_with_embedding(form, p: int, A, B, N: int, K: int, idx: int) -> bool:
    """Whether the single embedding ``idx`` certifies all n."""
    seq, _ = _sequence(form, N, p)
    root = hensel_omega8(p, K)[idx]
    A_e, B_e = padic_embed(NumberFieldElem(A), root), padic_embed(NumberFieldElem(B), root)
    for n in range(1, N + 1):
        x = padic_embed(seq[n * p], root) - A_e * padic_embed(seq[n], root)
        if n % p == 0:
            x = x + B_e * padic_embed(seq[n // p], root)
        v = padic_valuation(x)
        if v != INF and v < 2 * (1 + vp_int(n, p)):
            return False
    return True


def reports_json(result: dict) -> str:
    return json.dumps(
        {"ok": result["ok"], "reports": [r.to_dict() for r in result["reports"]], "cross_checks": result["cross_checks"]},
        sort_keys=True,
        indent=2,
    )
