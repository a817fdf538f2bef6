"""Command-line harness.

Subcommands: solve1d, solve2d, solvend, cake, bench, verify, report.
Deltas and r values travel as "2^-k" strings everywhere so the dyadic
grid arithmetic stays visible end to end.  Exit codes: 0 ok, 1 a solver
hypothesis was violated, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import cake as cakemod
from .bisection import bisect_root_1d
from .discretize import (
    check_delta_continuity,
    check_monotonicity,
    check_positive_switching,
    check_sum_switching,
)
from .domain import (
    GridSpec,
    format_pow2,
    parse_dyadic,
    sign_oracle_from_table,
    to_coords,
    unit_box,
)
from .errors import GridrootsError, HypothesisViolation, InputError
from .instances import FAMILIES, cells_for_delta, make_cake_random, make_instance
from .root2d import Root2DTrace, find_root_diag, find_root_exdiag, find_root_sum
from .rootnd import check_lattice_claims, find_root_recursive, tarski_map

_SOLVERS_2D = {"diag": find_root_diag, "exdiag": find_root_exdiag, "sum": find_root_sum}

_PROPERTIES = ("delta-continuity", "positive-switching", "strict-positive-switching",
               "sum-switching", "monotone-profile", "lattice-claims")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except HypothesisViolation as e:
        _emit(args, {"error": {
            "type": type(e).__name__,
            "hypothesis": e.hypothesis,
            "message": str(e),
        }})
        return 1
    except (GridrootsError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        _emit(args, {"error": {"type": type(e).__name__, "message": str(e)}})
        return 2


def _build_parser():
    p = argparse.ArgumentParser(prog="gridroots")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, delta=True):
        sp.add_argument("--instance", required=True, help="instance JSON path")
        if delta:
            sp.add_argument("--delta", default="2^-6", help='grid spacing, e.g. "2^-8"')
        sp.add_argument("--seed", type=int, help="override the instance JSON's seed")
        sp.add_argument("--out", help="write output to this path instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    s1 = sub.add_parser("solve1d", help="bisection on a 1D instance")
    add_common(s1)
    s1.set_defaults(handler=cmd_solve1d)

    s2 = sub.add_parser("solve2d", help="2D solvers")
    add_common(s2)
    s2.add_argument("--mode", choices=tuple(_SOLVERS_2D), help="defaults to the instance's mode")
    s2.add_argument("--trace", action="store_true", help="include the solve trace")
    s2.set_defaults(handler=cmd_solve2d)

    sn = sub.add_parser("solvend", help="recursive d-dimensional solver")
    add_common(sn)
    sn.add_argument("--pure-1d-base", action="store_true",
                    help="recurse down to the 1D base (bound-validation mode)")
    sn.set_defaults(handler=cmd_solvend)

    sc = sub.add_parser("cake", help="three-group near envy-free division")
    sc.add_argument("--instance", required=True)
    sc.add_argument("--out")
    sc.add_argument("--format", choices=("json",), default="json")
    sc.add_argument("--trace", action="store_true")
    sc.set_defaults(handler=cmd_cake)

    sb = sub.add_parser("bench", help="query-count sweeps")
    sb.add_argument("--family", required=True,
                    choices=sorted(FAMILIES) + ["cake-random"])
    sb.add_argument("--deltas", required=True,
                    help='comma list or range, e.g. "2^-4..2^-12"')
    sb.add_argument("--seed", type=int, default=0, help="base seed")
    sb.add_argument("--reps", type=int, default=1, help="seeds per delta")
    sb.add_argument("--agents", type=int, default=3, help="cake-random agent count")
    sb.add_argument("--out")
    sb.add_argument("--format", choices=("csv", "json"), default="csv")
    sb.set_defaults(handler=cmd_bench)

    sv = sub.add_parser("verify", help="run a structural checker")
    add_common(sv)
    sv.add_argument("--property", required=True, choices=_PROPERTIES)
    sv.set_defaults(handler=cmd_verify)

    sr = sub.add_parser("report", help="render figures + fit table from a bench CSV")
    sr.add_argument("--bench", required=True, help="bench CSV path")
    sr.add_argument("--out-dir", required=True)
    sr.set_defaults(handler=cmd_report)
    return p


def _load_instance_doc(path):
    with open(path) as fh:
        return json.load(fh)


def _load_problem(args):
    doc = _load_instance_doc(args.instance)
    family = doc.get("family")
    if family is None:
        raise InputError("instance JSON needs a 'family' key")
    if family == "table-2d":
        return _table_problem(doc)
    delta = parse_dyadic(doc.get("delta", args.delta))
    n = cells_for_delta(family, delta)
    seed = args.seed if getattr(args, "seed", None) is not None else int(doc.get("seed", 0))
    kwargs = {k: v for k, v in doc.items() if k not in ("family", "seed", "delta")}
    return make_instance(family, seed=seed, n=n, **kwargs)


def _table_problem(doc):
    from .instances import Problem

    values = doc["values"]
    n1 = len(values) - 1
    n2 = len(values[0]) - 1
    table = {(i, j): tuple(values[i][j]) for i in range(n1 + 1) for j in range(n2 + 1)}
    if n1 != n2 or n1 & (n1 - 1):
        raise InputError("table-2d requires a square power-of-two grid")
    grid = GridSpec.regular(unit_box(2), Fraction(1, n1))
    sign = sign_oracle_from_table(table, 2)
    return Problem("table-2d", 0, 2, doc.get("mode", "diag"), sign, grid)


def _root_payload(prob, root, evaluations):
    coords = to_coords(root, prob.grid)
    return {
        "family": prob.family,
        "seed": prob.seed,
        "delta": format_pow2(prob.grid.delta),
        "root_index": list(root),
        "root": [str(c) for c in coords],
        "evaluations": evaluations,
    }


def cmd_solve1d(args) -> int:
    prob = _load_problem(args)
    if prob.d != 1:
        raise InputError("solve1d needs a one-dimensional instance")
    before = prob.sign.count
    z = bisect_root_1d(lambda i: prob.sign.evaluate((i,))[0], 0, prob.grid.cells[0])
    _emit(args, _root_payload(prob, (z,), prob.sign.count - before))
    return 0


def cmd_solve2d(args) -> int:
    prob = _load_problem(args)
    if prob.d != 2:
        raise InputError("solve2d needs a two-dimensional instance")
    mode = args.mode or prob.mode
    if mode not in _SOLVERS_2D:
        raise InputError(f"instance mode {mode!r} is not a 2D mode")
    trace = Root2DTrace() if args.trace else None
    before = prob.sign.count
    root = _SOLVERS_2D[mode](prob.sign, prob.grid, trace)
    payload = _root_payload(prob, root, prob.sign.count - before)
    payload["mode"] = mode
    if trace is not None:
        payload["trace"] = trace.to_json()
    _emit(args, payload)
    return 0


def cmd_solvend(args) -> int:
    prob = _load_problem(args)
    before = prob.sign.count
    root = find_root_recursive(prob.sign, prob.grid,
                               use_2d_base=not args.pure_1d_base)
    payload = _root_payload(prob, root, prob.sign.count - before)
    payload["mode"] = "recursive"
    _emit(args, payload)
    return 0


def cmd_cake(args) -> int:
    doc = _load_instance_doc(args.instance)
    inst = cakemod.instance_from_json(doc)
    trace = Root2DTrace() if args.trace else None
    alloc = cakemod.solve_three_groups(inst, trace)
    payload = {
        "allocation": alloc.to_json(),
        "r": format_pow2(inst.r),
        "groups": list(inst.groups),
        "verified": True,
        "valuation_queries": inst.total_queries,
    }
    if trace is not None:
        payload["trace"] = trace.to_json()
    _emit(args, payload)
    return 0


def _parse_deltas(spec: str):
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..")
        k_lo = -_pow2_exponent(parse_dyadic(lo))
        k_hi = -_pow2_exponent(parse_dyadic(hi))
        if k_lo > k_hi:
            k_lo, k_hi = k_hi, k_lo
        return [Fraction(1, 2 ** k) for k in range(k_lo, k_hi + 1)]
    return [parse_dyadic(tok) for tok in spec.split(",") if tok]


def _pow2_exponent(q: Fraction) -> int:
    return q.numerator.bit_length() - q.denominator.bit_length()


def cmd_bench(args) -> int:
    rows = []
    for delta in _parse_deltas(args.deltas):
        for rep in range(args.reps):
            seed = args.seed + rep
            start = time.perf_counter()
            if args.family == "cake-random":
                inst = make_cake_random(seed, n=args.agents, r=delta)
                cakemod.solve_three_groups(inst)
                evals, d = inst.total_queries, 2
            else:
                prob = make_instance(args.family, seed=seed, n=cells_for_delta(args.family, delta))
                before = prob.sign.count
                _solve_problem(prob)
                evals, d = prob.sign.count - before, prob.d
            wall = time.perf_counter() - start
            rows.append({
                "family": args.family,
                "d": d,
                "delta": format_pow2(delta),
                "seed": seed,
                "evaluations": evals,
                "wall_time": f"{wall:.6f}",
            })
    rows.sort(key=lambda r: (r["family"], r["d"], -parse_dyadic(r["delta"]), r["seed"]))
    if args.format == "json":
        _emit(args, rows)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["family", "d", "delta", "seed",
                                                 "evaluations", "wall_time"])
        writer.writeheader()
        writer.writerows(rows)
        _write(args, buf.getvalue())
    return 0


def _solve_problem(prob):
    if prob.mode == "bisect":
        return (bisect_root_1d(lambda i: prob.sign.evaluate((i,))[0], 0, prob.grid.cells[0]),)
    if prob.mode in _SOLVERS_2D:
        return _SOLVERS_2D[prob.mode](prob.sign, prob.grid)
    return find_root_recursive(prob.sign, prob.grid)


def cmd_verify(args) -> int:
    prob = _load_problem(args)
    name = args.property
    if name == "delta-continuity":
        rep = check_delta_continuity(prob.sign, prob.grid)
    elif name == "positive-switching":
        rep = check_positive_switching(prob.sign, prob.grid)
    elif name == "strict-positive-switching":
        rep = check_positive_switching(prob.sign, prob.grid, strict=True)
    elif name == "sum-switching":
        rep = check_sum_switching(prob.sign, prob.grid)
    elif name == "monotone-profile":
        if prob.profile is None:
            raise InputError("instance declares no monotone profile")
        rep = check_monotonicity(prob.sign, prob.profile, prob.grid)
    else:
        rep = check_lattice_claims(tarski_map(prob.sign, prob.grid))
    _emit(args, rep.to_json())
    return 0


def cmd_report(args) -> int:
    from .report import render_bench_report

    written = render_bench_report(args.bench, args.out_dir)
    _emit(args, {"written": written})
    return 0


def _emit(args, payload) -> None:
    _write(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
