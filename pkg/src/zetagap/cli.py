"""Command-line front end: certificates, reproduction tables, series dumps.

Exit codes: 0 success (inequality holds / all checks pass), 1 inequality
fails or region infeasible, 2 invalid input, 3 internal consistency
failure (exact cancellation tripwire).

Output formats: human text (default), a single JSON document, or CSV.
Floating-point fields are serialized with shortest round-trip precision,
so parse/re-emit cycles are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .closed_forms import (SIXTH_MOMENT_RATIO, TranscriptionError,
                           a3_euler_product, eval_coefficient, kappa_taylor)
from .gap import GapParams, InfeasibleParametersError, check, sup_kappa
from .jets import DEFAULT_WINDOW, Window, WindowUnderflowError
from .oracle import LABELS, evaluate_moment
from .search import SearchConfig, optimize

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_BAD_INPUT = 2
EXIT_INTERNAL = 3


def _report(command: str, inputs: dict, outputs: dict, precision: str,
            started: float) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "tool_version": __version__,
        "precision_mode": precision,
        "timing_seconds": time.perf_counter() - started,
    }


def _emit_json(record: dict) -> None:
    print(json.dumps(record, sort_keys=True, indent=2))


def _emit_csv(rows: list[dict]) -> None:
    if not rows:
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def _parse_window(text: str) -> Window:
    parts = [int(p) for p in text.split(":")]
    if len(parts) == 2:
        return Window(parts[0], parts[1],
                      DEFAULT_WINDOW.lg_min, DEFAULT_WINDOW.lg_max)
    if len(parts) == 4:
        return Window(*parts)
    raise ValueError("window must be lam_min:lam_max[:lg_min:lg_max]")


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


# -- check ----------------------------------------------------------------

def cmd_check(args) -> int:
    started = time.perf_counter()
    params = GapParams(args.u, args.v, args.kappa, args.extended_u)
    verdict = check(params)
    outputs = {
        "holds": verdict.holds,
        "lhs": verdict.lhs,
        "rhs": verdict.rhs,
        "margin": verdict.margin,
        "gap_multiplier": verdict.gap_multiplier,
    }
    record = _report("check", {
        "u": args.u, "v": args.v, "kappa": args.kappa,
        "extended_u": args.extended_u,
    }, outputs, "double + auto escalation", started)
    if args.format == "json":
        _emit_json(record)
    elif args.format == "csv":
        _emit_csv([{"u": args.u, "v": args.v, "kappa": args.kappa,
                    **outputs}])
    else:
        word = "HOLDS" if verdict.holds else "FAILS"
        print(f"gap inequality {word} at "
              f"(u={args.u!r}, v={args.v!r}, kappa={args.kappa!r})")
        print(f"  lhs            = {verdict.lhs!r}")
        print(f"  rhs            = {verdict.rhs!r}")
        print(f"  margin         = {verdict.margin!r}")
        print(f"  gap_multiplier = {verdict.gap_multiplier!r}")
    return EXIT_OK if verdict.holds else EXIT_FAILS


# -- verify-oracle --------------------------------------------------------

def cmd_verify_oracle(args) -> int:
    started = time.perf_counter()
    kappas = _parse_floats(args.kappa_list)
    us = _parse_floats(args.u_list)
    if any(k == 0 for k in kappas):
        raise ValueError("the swap-sum oracle requires kappa != 0")
    window = _parse_window(args.window) if args.window else DEFAULT_WINDOW
    rows = []
    failures = 0
    base_a: dict[tuple, float] = {}
    try:
        for label in LABELS:
            for kappa in kappas:
                for u in us:
                    oracle = evaluate_moment(
                        label, kappa, u, window,
                        precision_bits=args.precision_bits)
                    closed = eval_coefficient(label, kappa, u)
                    rel = abs(complex(oracle).real - closed) / max(1.0, abs(closed))
                    ok = rel <= args.tol
                    failures += 0 if ok else 1
                    row = {
                        "label": label, "kappa": kappa, "u": u,
                        "oracle": complex(oracle).real, "closed_form": closed,
                        "rel_err": rel, "within_tol": ok,
                    }
                    if label == "A":
                        base_a[(kappa, u)] = complex(oracle).real
                    if label in ("D", "E"):
                        row["ratio_to_A"] = complex(oracle).real / base_a[(kappa, u)]
                    rows.append(row)
    except WindowUnderflowError as exc:
        print(f"window underflow: {exc}", file=sys.stderr)
        print("suggestion: deepen the window, e.g. --window -32:8",
              file=sys.stderr)
        return EXIT_BAD_INPUT
    record = _report("verify-oracle", {
        "kappa_list": kappas, "u_list": us, "tol": args.tol,
        "window": [window.lam_min, window.lam_max,
                   window.lg_min, window.lg_max],
        "precision_bits": args.precision_bits,
    }, {"rows": rows, "failures": failures},
        "gmpy2" if args.precision_bits else "double", started)
    if args.format == "json":
        _emit_json(record)
    elif args.format == "csv":
        flat = [{k: row.get(k, "") for k in
                 ("label", "kappa", "u", "oracle", "closed_form",
                  "rel_err", "within_tol", "ratio_to_A")} for row in rows]
        _emit_csv(flat)
    else:
        for row in rows:
            extra = (f"  D-or-E/A={row['ratio_to_A']!r}"
                     if "ratio_to_A" in row else "")
            print(f"{row['label']} kappa={row['kappa']:<7} u={row['u']:<7} "
                  f"oracle={row['oracle']:+.17e} closed={row['closed_form']:+.17e} "
                  f"rel={row['rel_err']:.2e} {'ok' if row['within_tol'] else 'FAIL'}"
                  + extra)
        print(f"{len(rows)} comparisons, {failures} failures")
    return EXIT_OK if failures == 0 else EXIT_FAILS


# -- table ----------------------------------------------------------------

def cmd_table(args) -> int:
    rows = []

    def row(name, u, v, kappa, source):
        verdict = check(GapParams(u, v, kappa, extended_u=u >= 1 / 11))
        rows.append({
            "scenario": name, "u": repr(u), "v": repr(v),
            "kappa": repr(kappa), "kappa_source": source,
            "gap_multiplier": repr(verdict.gap_multiplier),
            "holds": verdict.holds,
        })

    row("main", 0.0909, 2.13, 8.69, "given")
    row("hall", 1e-6, 2.0, 8.264, "given")
    row("ext-0.4999", 0.4999, 2.68, 10.23, "given")
    for name, u, v in (("ext-0.55", 0.55, 2.74), ("ext-0.9999", 0.9999, 3.0)):
        kappa = sup_kappa(u, v, extended_u=True)
        row(name, u, v, kappa, "sup-kappa")
    _emit_csv(rows)
    return EXIT_OK


# -- kappa-series ---------------------------------------------------------

def cmd_kappa_series(args) -> int:
    started = time.perf_counter()
    label = args.coeff.upper()
    if label not in LABELS:
        raise ValueError(f"coefficient must be one of {LABELS}")
    u_rational = None
    if args.u_rational:
        num, _, den = args.u_rational.partition("/")
        u_rational = Fraction(int(num), int(den or "1"))
        if not 0 < u_rational <= 1:
            raise ValueError("u must lie in (0, 1]")
    try:
        series = kappa_taylor(label, args.order)
    except TranscriptionError as exc:
        print(f"cancellation failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    terms = []
    for p in range(0, args.order + 1):
        poly = series.coefficient(p)
        if u_rational is not None:
            value = poly(u_rational)
            terms.append({"kappa_power": p, "value": str(value)})
        else:
            terms.append({"kappa_power": p,
                          "u_poly": [str(c) for c in poly.coeffs]})
    record = _report("kappa-series", {
        "coeff": label, "order": args.order,
        "u_rational": str(u_rational) if u_rational is not None else None,
    }, {"negative_powers": "0 (exact)", "terms": terms}, "exact rational",
        started)
    if args.format == "json":
        _emit_json(record)
    else:
        print(f"{label}: exact Taylor in kappa, negative powers: 0 (exact)")
        for t in terms:
            if "value" in t:
                print(f"  kappa^{t['kappa_power']}: {t['value']}")
            else:
                print(f"  kappa^{t['kappa_power']}: u-poly {t['u_poly']}")
    return EXIT_OK


# -- optimize -------------------------------------------------------------

def cmd_optimize(args) -> int:
    started = time.perf_counter()
    config = SearchConfig(
        u_range=(args.u_min, args.u_max),
        v_range=(args.v_min, args.v_max),
        grid=(args.grid_u, args.grid_v),
        refine_iters=args.refine,
        extended_u=args.extended_u,
    )
    try:
        result = optimize(config)
    except InfeasibleParametersError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_FAILS
    outputs = {
        "best_u": result.best.u,
        "best_v": result.best.v,
        "best_kappa": result.best.kappa,
        "gap_multiplier": result.gap_multiplier,
        "evaluations": len(result.trace),
    }
    record = _report("optimize", {
        "u_range": [args.u_min, args.u_max],
        "v_range": [args.v_min, args.v_max],
        "grid": [args.grid_u, args.grid_v],
        "refine_iters": args.refine,
        "extended_u": args.extended_u,
    }, outputs, "double + auto escalation", started)
    if args.format == "json":
        record["outputs"]["trace"] = [
            list(entry) for entry in result.trace]
        _emit_json(record)
    elif args.format == "csv":
        _emit_csv([{"u": t[0], "v": t[1], "kappa_star": t[2],
                    "multiplier": t[3]} for t in result.trace])
    else:
        print(f"best: u={result.best.u!r} v={result.best.v!r} "
              f"kappa={result.best.kappa!r}")
        print(f"gap_multiplier = {result.gap_multiplier!r} "
              f"({len(result.trace)} evaluations)")
    return EXIT_OK


# -- a3 -------------------------------------------------------------------

def cmd_a3(args) -> int:
    started = time.perf_counter()
    value, bound = a3_euler_product(args.prime_limit)
    conjecture = float(SIXTH_MOMENT_RATIO) * value
    outputs = {
        "a3_partial": value,
        "tail_bound": bound,
        "sixth_moment_leading_constant": conjecture,
    }
    record = _report("a3", {"prime_limit": args.prime_limit}, outputs,
                     "double", started)
    if args.format == "json":
        _emit_json(record)
    else:
        print(f"a3 over primes <= {args.prime_limit}: {value!r}")
        print(f"  tail bound     <= {bound!r}")
        print(f"  (42/9!) * a3    = {conjecture!r}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetagap",
        description="Certified zero-free gap lengths for zeta on the "
                    "critical line")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="evaluate the gap inequality")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--extended-u", action="store_true", dest="extended_u")
    p.add_argument("--format", choices=("text", "json", "csv"),
                   default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify-oracle",
                       help="swap-sum oracle vs closed forms")
    p.add_argument("--kappa-list", default="0.5,1,2,5,8.69")
    p.add_argument("--u-list", default="0.02,0.05,0.0909")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--window", default=None,
                   help="lam_min:lam_max[:lg_min:lg_max]")
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--format", choices=("text", "json", "csv"),
                   default="text")
    p.set_defaults(func=cmd_verify_oracle)

    p = sub.add_parser("table", help="reproduction table as CSV")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("kappa-series",
                       help="exact rational Taylor expansion in kappa")
    p.add_argument("--coeff", required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--u-rational", default=None, help="p/q in (0, 1]")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_kappa_series)

    p = sub.add_parser("optimize", help="search (u, v) for the best gap")
    p.add_argument("--u-min", type=float, required=True)
    p.add_argument("--u-max", type=float, required=True)
    p.add_argument("--v-min", type=float, required=True)
    p.add_argument("--v-max", type=float, required=True)
    p.add_argument("--grid-u", type=int, default=16)
    p.add_argument("--grid-v", type=int, default=16)
    p.add_argument("--refine", type=int, default=30)
    p.add_argument("--extended-u", action="store_true", dest="extended_u")
    p.add_argument("--format", choices=("text", "json", "csv"),
                   default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("a3", help="arithmetic Euler-product constant")
    p.add_argument("--prime-limit", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_a3)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
