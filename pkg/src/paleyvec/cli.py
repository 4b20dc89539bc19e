"""Command-line surface: build fields, compute and predict clique numbers,
survey subspace families, run verification suites, inspect forms, and
benchmark the solver.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 budget or
time limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time

from .errors import (
    BudgetExceeded,
    CapExceeded,
    ParseError,
    PaleyvecError,
    TimeLimitExceeded,
)
from .forms import BilinearForm, M_of_form, chi_of_form
from .gf import build_field, parse_field_spec
from .graph import build_graph, clique_number_exact, decompose_clique, vertex_budget
from .linalg import (
    all_hyperplanes,
    all_subspaces,
    contains_nonzero_square,
    parse_subspace,
    s_invariant,
)
from .predict import D_invariant, predict_omega
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _field_from_args(args) -> "FieldCtx":
    p, m, n = parse_field_spec(args.field)
    return build_field(p, m, n)


def _emit(args, payload: dict) -> None:
    if getattr(args, "format", "json") == "human":
        for k, v in payload.items():
            print(f"{k}: {v}")
    else:
        print(json.dumps(payload, sort_keys=True))


def _poly_str(ctx, a: int) -> str:
    coords = ctx.element_coords(a)
    terms = []
    for i, c in enumerate(coords):
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{c}*y" if c != 1 else "y")
        else:
            terms.append(f"{c}*y^{i}" if c != 1 else f"y^{i}")
    return " + ".join(terms) if terms else "0"


def cmd_field(args) -> int:
    ctx = _field_from_args(args)
    info = ctx.describe()
    if args.print_modulus:
        print("base_modulus=" + ",".join(str(c) for c in ctx.base_modulus))
        print("ext_modulus=" + ",".join(str(c) for c in ctx.ext_modulus))
        return EXIT_OK
    _emit(args, {"schema": 1, **info})
    return EXIT_OK


def cmd_omega(args) -> int:
    ctx = _field_from_args(args)
    U = parse_subspace(ctx, args.subspace)
    payload: dict = {
        "schema": 1,
        "field": {"p": ctx.p, "m": ctx.m, "n": ctx.n, "q": ctx.q, "order": ctx.order},
        "subspace": {"basis": list(U.basis), "dim": U.dim},
        "mode": args.mode,
    }
    prediction = None
    if args.mode in ("predict", "both"):
        prediction = predict_omega(U)
        payload["predicted"] = prediction.describe()
    if args.mode in ("exact", "both"):
        start = time.monotonic()
        G = build_graph(ctx, U, max_vertices=args.max_vertices)
        omega, witness = clique_number_exact(
            G,
            dominance=not args.no_dominance,
            workers=args.workers,
            time_limit=args.time_limit,
        )
        dec = decompose_clique(G, witness)
        payload["exact"] = omega
        payload["witness"] = list(witness)
        payload["decomposition"] = {"t": dec.t, "r": dec.r}
        payload["runtime_ms"] = round((time.monotonic() - start) * 1000.0, 3)
        if prediction is not None:
            payload["match"] = prediction.admits(omega)
    _emit(args, payload)
    return EXIT_OK


def _survey_dims(ctx, spec: str) -> list[int]:
    dims = set()
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if token == "n-1":
            dims.add(ctx.n - 1)
        else:
            try:
                dims.add(int(token))
            except ValueError as exc:
                raise ParseError(f"bad dimension {token!r}") from exc
    for d in dims:
        if not 1 <= d <= ctx.n - 1:
            raise ParseError(f"dimension {d} out of range 1..{ctx.n - 1}")
    return sorted(dims)


def cmd_survey(args) -> int:
    ctx = _field_from_args(args)
    dims = _survey_dims(ctx, args.dim)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(
        ["field", "basis", "dim", "has_square", "D", "s", "predicted", "omega", "match"]
    )
    field_str = f"{ctx.p}^{ctx.m}^{ctx.n}"
    exact_mismatch = False
    for d in dims:
        for U in all_subspaces(ctx, d):
            has_sq = contains_nonzero_square(U)
            D = D_invariant(U) if has_sq else ""
            s = ""
            if ctx.p != 2 and ctx.n % 2 == 0 and d == ctx.n - 1:
                s = s_invariant(U)
            pred = predict_omega(U)
            G = build_graph(ctx, U, max_vertices=args.max_vertices)
            omega, _ = clique_number_exact(
                G, dominance=not args.no_dominance, workers=args.workers
            )
            match = pred.admits(omega)
            if pred.kind == "exact" and not match:
                exact_mismatch = True
            if args.pretty:
                basis_txt = "; ".join(_poly_str(ctx, b) for b in U.basis)
            else:
                basis_txt = ",".join(str(b) for b in U.basis)
            predicted = pred.value if pred.kind == "exact" else f"{pred.lo}..{pred.hi}"
            writer.writerow(
                [field_str, basis_txt, d, int(has_sq), D, s, predicted, omega, int(match)]
            )
    return EXIT_VERIFICATION if exact_mismatch else EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failures = 0
    reports = []
    for name in names:
        report = run_suite(name, qmax=args.qmax, nmax=args.nmax)
        failures += len(report.failures)
        reports.append(report.to_json())
    out = reports[0] if len(reports) == 1 else {"schema": 1, "suites": reports}
    print(json.dumps(out, sort_keys=True))
    return EXIT_VERIFICATION if failures else EXIT_OK


def cmd_form(args) -> int:
    ctx = _field_from_args(args)
    B = BilinearForm.trace_form(ctx, args.lam)
    inv = M_of_form(B, with_witness=True)
    payload = {
        "schema": 1,
        "field": {"p": ctx.p, "m": ctx.m, "n": ctx.n, "q": ctx.q, "order": ctx.order},
        "lambda": args.lam,
        "gram": [list(r) for r in B.gram_matrix()],
        "t": inv.t,
        "witness_W": list(inv.witness_W.basis),
        "M": inv.M,
        "witness_E": list(inv.witness_E),
    }
    if ctx.p != 2:
        payload["chi"] = chi_of_form(B)
    else:
        payload["M_upper"] = inv.M_upper
    _emit(args, payload)
    return EXIT_OK


def cmd_bench(args) -> int:
    ctx = _field_from_args(args)
    classes: list[tuple[str, list]] = []
    if args.dim:
        dims = _survey_dims(ctx, args.dim)
    else:
        dims = [ctx.n - 1]
    for d in dims:
        if d == ctx.n - 1:
            family = [U for _, U in all_hyperplanes(ctx)]
        else:
            family = list(all_subspaces(ctx, d))
        classes.append((f"dim-{d}", family[: args.limit]))
    rows = []
    for label, family in classes:
        times_on: list[float] = []
        times_off: list[float] = []
        agree = True
        for U in family:
            G = build_graph(ctx, U, max_vertices=args.max_vertices)
            t0 = time.perf_counter()
            om_on, _ = clique_number_exact(G, dominance=True, workers=args.workers)
            t1 = time.perf_counter()
            om_off, _ = clique_number_exact(G, dominance=False, workers=args.workers)
            t2 = time.perf_counter()
            times_on.append((t1 - t0) * 1000)
            times_off.append((t2 - t1) * 1000)
            if om_on != om_off:
                agree = False
        if not times_on:
            continue

        def p95(xs):
            xs = sorted(xs)
            return xs[min(len(xs) - 1, int(0.95 * len(xs)))]

        rows.append(
            {
                "class": label,
                "instances": len(family),
                "median_ms_rule_on": round(statistics.median(times_on), 3),
                "p95_ms_rule_on": round(p95(times_on), 3),
                "median_ms_rule_off": round(statistics.median(times_off), 3),
                "p95_ms_rule_off": round(p95(times_off), 3),
                "speedup": round(
                    statistics.median(times_off) / max(statistics.median(times_on), 1e-9), 3
                ),
                "omega_agree": agree,
            }
        )
    if args.format == "json":
        print(json.dumps({"schema": 1, "classes": rows}, sort_keys=True))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            writer.writerow(rows[0].keys())
            for r in rows:
                writer.writerow(r.values())
        print(buf.getvalue(), end="")
    if any(not r["omega_agree"] for r in rows):
        return EXIT_VERIFICATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paleyvec",
        description="Product-subspace graphs over finite field towers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, fmt_default="json"):
        p.add_argument("--format", choices=["json", "csv", "human"], default=fmt_default)
        p.add_argument("--max-vertices", type=int, default=None,
                       help="vertex budget (default from PALEYVEC_BUDGET_VERTICES)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--time-limit", type=float, default=None)
        p.add_argument("--no-dominance", action="store_true",
                       help="disable the structural pruning rule")

    p_field = sub.add_parser("field", help="build a field tower and show its data")
    p_field.add_argument("field", help="field spec: p^m^n or q=<p^m>,n=<n>")
    p_field.add_argument("--print-modulus", action="store_true")
    p_field.add_argument("--format", choices=["json", "human"], default="json")
    p_field.set_defaults(func=cmd_field)

    p_omega = sub.add_parser("omega", help="exact and/or predicted clique number")
    p_omega.add_argument("--field", required=True)
    p_omega.add_argument("--subspace", required=True,
                         help="basis=i,j,... or ker-trace-of=c")
    p_omega.add_argument("--mode", choices=["exact", "predict", "both"], default="both")
    add_common(p_omega)
    p_omega.set_defaults(func=cmd_omega)

    p_survey = sub.add_parser("survey", help="CSV survey over a subspace family")
    p_survey.add_argument("--field", required=True)
    p_survey.add_argument("--dim", default="1,2,n-1",
                          help="comma-separated dimensions, n-1 allowed")
    p_survey.add_argument("--pretty", action="store_true",
                          help="render basis elements as polynomials")
    add_common(p_survey, fmt_default="csv")
    p_survey.set_defaults(func=cmd_survey)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    p_verify.add_argument("--qmax", type=int, default=None)
    p_verify.add_argument("--nmax", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_form = sub.add_parser("form", help="invariants of a trace bilinear form")
    p_form.add_argument("--field", required=True)
    p_form.add_argument("--lambda", dest="lam", type=int, required=True)
    p_form.add_argument("--format", choices=["json", "human"], default="json")
    p_form.set_defaults(func=cmd_form)

    p_bench = sub.add_parser("bench", help="solver timing with and without pruning")
    p_bench.add_argument("--field", required=True)
    p_bench.add_argument("--dim", default="")
    p_bench.add_argument("--limit", type=int, default=50,
                         help="instances per class")
    add_common(p_bench, fmt_default="human")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, CapExceeded, TimeLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PaleyvecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
