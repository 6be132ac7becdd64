"""
Command-line entry point.

    asdcong traces --p 3,7,13,17 --rmax 3 --model k3n4
    asdcong charpoly --p 3-17
    asdcong series h1 --trunc 200
    asdcong calibrate --trunc 80 --out cal.json
    asdcong verify-asd --p 3,5,7,11,13,17 --N 100
    asdcong verify-all --p 3-17

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import hashlib
import json
import multiprocessing as mp
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .asd_verifier import PrecisionTooLowError, asd_plan, verify_all
from .charpoly_engine import InconsistentTraceError, charpoly_report
from .exact_arith import NumberFieldElem
from .finite_field import is_prime
from .qseries_forms import FORM_WIDTHS, CalibrationError, calibrate_E1_E2, j_oracle, named_form, series_csv
from .surface_counter import InadmissibleModelError, get_model, set_threads, trace_table

__all__ = ["RunConfig", "main", "parse_primes", "build_calibration", "load_calibration", "ensure_calibration"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
THREADS_ENV = "ASDCONG_THREADS"
CALIBRATION_VERSION = 1
DEFAULT_PRIMES = "3,5,7,11,13,17"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    primes: list = field(default_factory=list)
    r_max: int = 3
    N: int = 100
    K: int | None = None
    threads: int | None = None
    out: str | None = None
    fmt: str = "json"
    model: str | None = None
    trunc: int | None = None
    form: str | None = None
    perturb: bool = False

    def __post_init__(self):
        for name in ("r_max", "N", "K", "threads", "trunc"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '')} must be positive")
        for p in self.primes:
            if p % 2 == 0:
                raise UsageError(f"p = {p} is out of scope (odd primes only)")
        if self.fmt not in ("json", "csv"):
            raise UsageError("--format must be json or csv")


def parse_primes(text: str) -> list:
    """'3,7,13' or '3-17' (odd primes in the range) or a mix."""
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.update(p for p in range(max(lo, 3), hi + 1) if is_prime(p))
                continue
            p = int(part)
        except ValueError:
            raise UsageError(f"cannot parse prime list entry {part!r}") from None
        if p == 2:
            raise UsageError("p = 2 is out of scope")
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")
        out.add(p)
    if not out:
        raise UsageError("empty prime list")
    return sorted(out)


def resolve_threads(flag: int | None) -> int | None:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
        if n <= 0:
            raise UsageError(f"{THREADS_ENV} must be positive")
        return n
    return None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# calibration cache
# ---------------------------------------------------------------------------


def _payload_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def build_calibration(trunc: int = 80, order: int = 10) -> dict:
    E1, E2 = calibrate_E1_E2(trunc, order)
    residual = j_oracle(E1, E2, order)
    payload = {
        "version": CALIBRATION_VERSION,
        "trunc_Q": trunc,
        "oracle_order": order,
        "oracle_residual_zero": residual.is_zero(),
        "E1": {"val": str(E1.val), "step": str(E1.step), "coeffs": [str(c) for c in E1.coeffs]},
        "E2": {"val": str(E2.val), "step": str(E2.step), "coeffs": [str(c) for c in E2.coeffs]},
    }
    return {"payload": payload, "sha256": hashlib.sha256(_payload_bytes(payload)).hexdigest()}


def calibration_text(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def load_calibration(path) -> dict | None:
    """The cached document, or None if missing, unreadable or failing its checksum."""
    try:
        doc = json.loads(Path(path).read_text())
        payload = doc["payload"]
        if payload.get("version") != CALIBRATION_VERSION:
            return None
        if hashlib.sha256(_payload_bytes(payload)).hexdigest() != doc["sha256"]:
            return None
        return doc
    except (OSError, ValueError, KeyError, TypeError):
        return None


def ensure_calibration(path, trunc: int = 80, order: int = 10) -> tuple:
    """(document, rebuilt) after verifying the cache at ``path``; rebuilds it if invalid."""
    doc = load_calibration(path)
    if doc is not None and doc["payload"]["trunc_Q"] == trunc and doc["payload"]["oracle_order"] == order:
        return doc, False
    doc = build_calibration(trunc, order)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(calibration_text(doc))
    return doc, True


def default_cache_path() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "asdcong" / f"calibration-v{CALIBRATION_VERSION}.json"


def _check_against_cache(doc: dict):
    """The in-memory calibration must agree with the verified cache."""
    E1, E2 = calibrate_E1_E2()
    for name, s in (("E1", E1), ("E2", E2)):
        cached = doc["payload"][name]["coeffs"]
        n = min(len(cached), len(s.coeffs))
        if [str(c) for c in s.coeffs[:n]] != cached[:n]:
            raise InconsistentTraceError(f"cached {name} disagrees with the recomputed series")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_traces(cfg: RunConfig) -> int:
    models = [cfg.model] if cfg.model else ["K3_N2", "K3_N4"]
    tables = []
    for name in models:
        model = get_model(name)
        for p in cfg.primes:
            model.check_admissible(p)
        for p in cfg.primes:
            tables.append(trace_table(model, p, cfg.r_max))
    if cfg.fmt == "csv":
        text = "model,p,r,trace\n" + "".join(t.to_csv(header=False) for t in tables)
    else:
        text = json.dumps([json.loads(t.to_json()) for t in tables], sort_keys=True, indent=2)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_charpoly(cfg: RunConfig) -> int:
    records = []
    for p in cfg.primes:
        A = asd_plan(p).cases[0].A
        records.append(charpoly_report(p, A))
    if cfg.fmt == "csv":
        lines = ["p,rho2,rho4,wminus,checks_ok"]
        for r in records:
            lines.append(",".join([
                str(r["p"]),
                " ".join(map(str, r["rho2"])),
                " ".join(map(str, r["rho4"])),
                " ".join(map(str, r["wminus"])),
                str(all(r["checks"].values())).lower(),
            ]))
        text = "\n".join(lines)
    else:
        text = json.dumps(records, sort_keys=True, indent=2)
    _emit(text, cfg.out)
    bad = [(r["p"], k) for r in records for k, v in r["checks"].items() if not v]
    for p, k in bad:
        print(f"p={p}: check {k} failed", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_series(cfg: RunConfig) -> int:
    name = cfg.form
    if name not in FORM_WIDTHS:
        raise UsageError(f"unknown form {name!r}; choose from {', '.join(sorted(FORM_WIDTHS))}")
    mu = FORM_WIDTHS[name]
    trunc = cfg.trunc or 100
    s = named_form(name, trunc)
    if cfg.fmt == "csv":
        text = series_csv(s, mu)
    else:
        rows = [[str(e), [str(x) for x in NumberFieldElem(c).coords]] for e, c in s.terms()]
        text = json.dumps({"form": name, "width": mu, "prec": str(s.prec), "terms": rows}, sort_keys=True, indent=1)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_calibrate(cfg: RunConfig) -> int:
    trunc = cfg.trunc or 80
    if trunc < 40:
        raise UsageError("--trunc for calibration must be at least 40")
    path = Path(cfg.out) if cfg.out else default_cache_path()
    doc, rebuilt = ensure_calibration(path, trunc)
    state = "rebuilt" if rebuilt else "verified"
    ok = doc["payload"]["oracle_residual_zero"]
    print(f"calibration {state}: {path} (Q-terms {trunc}, j-oracle residual zero through q^{doc['payload']['oracle_order']}: {ok})")
    return EXIT_OK if ok else EXIT_INTERNAL


def _verify_one(args) -> dict:
    p, N, K, perturb, threads = args
    set_threads(threads)
    return verify_all([p], N, K, perturb=perturb)


def _run_verify(cfg: RunConfig) -> dict:
    jobs = [(p, cfg.N, cfg.K, cfg.perturb, 1) for p in cfg.primes]
    workers = min(cfg.threads or 1, len(jobs))
    if workers > 1:
        with cf.ProcessPoolExecutor(workers, mp_context=mp.get_context("spawn")) as ex:
            parts = list(ex.map(_verify_one, jobs))
    else:
        parts = [verify_all([p], cfg.N, cfg.K, perturb=cfg.perturb) for p in cfg.primes]
    reports = [r for part in parts for r in part["reports"]]
    cross = [c for part in parts for c in part["cross_checks"]]
    ok = all(part["ok"] for part in parts)
    return {"ok": ok, "reports": reports, "cross_checks": cross}


def _asd_document(result: dict) -> dict:
    return {
        "ok": result["ok"],
        "reports": [r.to_dict() for r in result["reports"]],
        "cross_checks": result["cross_checks"],
    }


def cmd_verify_asd(cfg: RunConfig) -> int:
    doc, _ = ensure_calibration(default_cache_path())
    _check_against_cache(doc)
    result = _run_verify(cfg)
    for r in result["reports"]:
        print(r.summary())
        for f in r.failures:
            print(f"    n={f['n']} achieved={f['achieved']} required={f['required']}")
    for c in result["cross_checks"]:
        mark = "ok" if c["factor_match"] and c["rho2_match"] else "MISMATCH"
        print(f"p={c['p']:<3} factor identity {mark}")
    if cfg.out:
        _emit(json.dumps(_asd_document(result), sort_keys=True, indent=2), cfg.out)
    return EXIT_OK if result["ok"] else EXIT_FAIL


def cmd_verify_all(cfg: RunConfig) -> int:
    records = [charpoly_report(p, asd_plan(p).cases[0].A) for p in cfg.primes]
    cp_ok = all(all(r["checks"].values()) for r in records)
    for r in records:
        bad = [k for k, v in r["checks"].items() if not v]
        print(f"p={r['p']:<3} charpoly {'ok' if not bad else 'FAILED ' + ','.join(bad)}")
    doc, _ = ensure_calibration(default_cache_path())
    _check_against_cache(doc)
    result = _run_verify(cfg)
    for r in result["reports"]:
        print(r.summary())
    if cfg.out:
        out = {"charpoly": records, "asd": _asd_document(result)}
        _emit(json.dumps(out, sort_keys=True, indent=2), cfg.out)
    return EXIT_OK if cp_ok and result["ok"] else EXIT_FAIL


COMMANDS = {
    "traces": cmd_traces,
    "charpoly": cmd_charpoly,
    "series": cmd_series,
    "calibrate": cmd_calibrate,
    "verify-asd": cmd_verify_asd,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asdcong", description="Frobenius traces, q-series and ASD congruence checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, primes=True):
        if primes:
            sp.add_argument("--p", default=DEFAULT_PRIMES, help="odd primes: '3,7,13' or a range '3-17'")
        sp.add_argument("--threads", type=int, default=None, help=f"worker threads (overrides ${THREADS_ENV})")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = sub.add_parser("traces", help="Frobenius trace tables")
    common(sp)
    sp.add_argument("--rmax", dest="r_max", type=int, default=3)
    sp.add_argument("--model", default=None, help="gamma15, k3n2, k3n4, en2, en4 (default: both K3 models)")

    sp = sub.add_parser("charpoly", help="characteristic polynomials and their checks")
    common(sp)

    sp = sub.add_parser("series", help="dump a named q-series")
    common(sp, primes=False)
    sp.add_argument("form", help="E1, E2, h1, h2, h3, h1+h3, f1, ..., fprime, g2")
    sp.add_argument("--trunc", type=int, default=None, help="largest index in the form's own w (default 100)")

    sp = sub.add_parser("calibrate", help="build or verify the cached (E1, E2) expansion")
    common(sp, primes=False)
    sp.add_argument("--trunc", type=int, default=None, help="number of Q-coefficients (default 80)")

    for name in ("verify-asd", "verify-all"):
        sp = sub.add_parser(name, help="ASD congruence checks" if name == "verify-asd" else "charpoly and ASD checks")
        common(sp)
        sp.add_argument("--N", type=int, default=100)
        sp.add_argument("--precision", dest="K", type=int, default=None, help="p-adic precision K")
        sp.add_argument("--perturb", action="store_true", help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        opts = vars(ns).copy()
        command = opts.pop("command")
        primes = parse_primes(opts.pop("p")) if "p" in opts else []
        opts["threads"] = resolve_threads(opts.get("threads"))
        cfg = RunConfig(command=command, primes=primes, **opts)
        set_threads(cfg.threads)
        return COMMANDS[command](cfg)
    except (UsageError, InadmissibleModelError, PrecisionTooLowError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InconsistentTraceError, CalibrationError, ArithmeticError) as e:
        print(f"internal inconsistency: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
