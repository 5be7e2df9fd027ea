"""Command-line front end.

Exit codes: 0 success, 1 validation failure (agreement conditions violated,
or an MMS study missing its order target), 2 solver failure, 3 I/O or parse
error.
"""
import argparse
import json
import os
import sys

from . import expr as ex
from .boundary import check_agreement, classical_to_nonclassical, nonclassical_to_classical
from .errors import (
    ConvergenceError,
    InconsistentDataError,
    InvalidArgumentError,
    SingularMarchError,
)
from .grid import Domain
from .io import (
    classical_block,
    load_problem,
    nonclassical_block,
    relocate_refs,
    write_grid_function,
)
from .pde_operator import ORDER, Problem, residual
from .verification import MmsCase, convergence_study, format_table, rows_to_csv
from .volterra import SolverOptions, solve

EXIT_OK, EXIT_AGREEMENT, EXIT_SOLVER, EXIT_INPUT = 0, 1, 2, 3
MMS_ORDER_TARGET = 1.9
MMS_EXACT_FLOOR = 1e-9


def _solver_options(args, raw):
    cfg = dict(raw.get("solver", {}))
    if getattr(args, "method", None):
        cfg["method"] = args.method
    if getattr(args, "tol", None) is not None:
        cfg["tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        cfg["max_iter"] = args.max_iter
    known = {k: cfg[k] for k in ("method", "tol", "max_iter", "pivot_floor") if k in cfg}
    return SolverOptions(**known)


def cmd_check(args):
    pf = load_problem(args.problem)
    if pf.classical is None:
        print("check: the file holds non-classical data; that form needs no agreement "
              "conditions, so there is nothing to check", file=sys.stderr)
        return EXIT_INPUT
    report = check_agreement(pf.classical, pf.dom.h1, args.tol)
    print(report.to_text())
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_AGREEMENT


def cmd_convert(args):
    pf = load_problem(args.problem)
    out_dir = args.out or pf.base_dir
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.problem))[0]
    raw = relocate_refs(pf.raw, pf.base_dir, out_dir)
    if args.to == "nonclassical":
        if pf.classical is None:
            print("convert: input has no classical_data block", file=sys.stderr)
            return EXIT_INPUT
        nc = classical_to_nonclassical(pf.classical, pf.dom.h1, args.tol)
        raw["nonclassical_data"] = nonclassical_block(nc, out_dir, prefix=f"{stem}_")
    else:
        if pf.nonclassical is None:
            print("convert: input has no nonclassical_data block", file=sys.stderr)
            return EXIT_INPUT
        cd = nonclassical_to_classical(pf.nonclassical, pf.dom, pf.grid)
        raw["classical_data"] = classical_block(cd, out_dir, prefix=f"{stem}_")
    target = os.path.join(out_dir, f"{stem}_{args.to}.json")
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=2)
        fh.write("\n")
    print(target)
    return EXIT_OK


def cmd_solve(args):
    pf = load_problem(args.problem)
    opts = _solver_options(args, pf.raw)
    if pf.classical is not None:
        data = classical_to_nonclassical(pf.classical, pf.dom.h1)
    elif pf.nonclassical is not None:
        data = pf.nonclassical
    else:
        raise InvalidArgumentError("problem file has no boundary data block")
    prob = Problem(pf.dom, pf.coeffs, pf.rhs, data)
    jet, stats = solve(prob, pf.grid, opts)
    _, res_sup, res_l2 = residual(jet, prob, 2.0)
    os.makedirs(args.out, exist_ok=True)
    for i1 in range(ORDER + 1):
        for i2 in range(ORDER + 1):
            write_grid_function(jet[i1, i2], os.path.join(args.out, f"d_{i1}_{i2}.csv"))
    record = {
        "method": stats.method,
        "iterations": stats.iterations,
        "update_norm": stats.update_norm,
        "residual_sup": res_sup,
        "residual_l2": res_l2,
        "wall_ms": 1e3 * stats.wall_time,
    }
    with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    print(f"{stats.method}: {stats.iterations} iteration(s), update {stats.update_norm:.3e}")
    print(f"equation residual: sup {res_sup:.3e}, L2 {res_l2:.3e}")
    print(f"wrote 25 jet files and stats.json to {args.out}")
    return EXIT_OK


def cmd_mms(args):
    with open(args.case, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "u_exact" not in raw:
        raise InvalidArgumentError("case file needs a u_exact member")
    dom_raw = raw.get("domain", {"h1": 1.0, "h2": 1.0})
    case = MmsCase(ex.parse(raw["u_exact"]), raw.get("coefficients", {}),
                   Domain(float(dom_raw["h1"]), float(dom_raw["h2"])))
    sizes = args.sizes or raw.get("sizes") or [17, 33, 65]
    rows = convergence_study(case, sizes, _solver_options(args, raw))
    print(format_table(rows))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "convergence.csv"), "w", encoding="utf-8") as fh:
            fh.write(rows_to_csv(rows))
    else:
        print(rows_to_csv(rows), end="")
    exact = all(r.sup_error <= MMS_EXACT_FLOOR for r in rows)
    final = rows[-1].order
    ok = exact or (final is not None and final >= MMS_ORDER_TARGET)
    return EXIT_OK if ok else EXIT_AGREEMENT


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's own status 2 would read as a solver failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(
        prog="pseudoparabolic",
        description="Contact-boundary problems for the (4,4)-order pseudoparabolic equation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate the 16 corner agreement conditions")
    c.add_argument("problem")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--json", action="store_true", help="also print the report as JSON")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("convert", help="convert between classical and non-classical data")
    c.add_argument("problem")
    c.add_argument("--to", choices=("classical", "nonclassical"), required=True)
    c.add_argument("--tol", type=float, default=1e-9, help="agreement tolerance")
    c.add_argument("--out", help="output directory (default: next to the input)")
    c.set_defaults(func=cmd_convert)

    for name, func, target in (("solve", cmd_solve, "problem"), ("mms", cmd_mms, "case")):
        c = sub.add_parser(name, help="solve a problem file" if name == "solve"
                           else "run a manufactured-solution convergence study")
        c.add_argument(target)
        c.add_argument("--method", choices=("marching", "picard"))
        c.add_argument("--tol", type=float)
        c.add_argument("--max-iter", type=int, dest="max_iter")
        c.add_argument("--out", required=(name == "solve"))
        if name == "mms":
            c.add_argument("--sizes", type=int, nargs="+")
        c.set_defaults(func=func)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InconsistentDataError as err:
        print(err.report.to_text())
        print(f"error: {err}", file=sys.stderr)
        return EXIT_AGREEMENT
    except (ConvergenceError, SingularMarchError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, ValueError, KeyError, TypeError, ArithmeticError) as err:
        # json.JSONDecodeError, ParseError, InvalidArgumentError and
        # UnsupportedDerivativeError are all ValueErrors
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
