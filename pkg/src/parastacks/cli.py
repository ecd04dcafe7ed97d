"""Command line front end: ``parastacks <command> ...``.

Exit codes: 0 success (and every requested check passed), 1 a check failed
or a computation broke an exactness contract, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import analysis, arches, equations, machine, walks
from .exactnum import BiTruncatedSeries, IntPolynomial, Polynomial, RatPolynomial
from .report import SeriesReport, emit_csv, emit_json, fmt_float

SERIES = ("s", "sprim", "stilde", "c", "q", "qprim", "w00", "h00")
ORACLES = ("perms", "loops", "connected", "standard")
CHECKS = ("positivity", "inversion", "appendixB", "p1", "p2", "counterexamples", "prop4", "constant-term")
ESTIMATES = ("tc", "radius", "bounds")
VERIFY_BRUTE_MAX = 6


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    """"p/q" or an integer; decimals are refused to keep evaluation exact."""
    t = text.strip()
    if any(ch in t for ch in ".eE"):
        raise UsageError(f"rational values are written p/q, not decimals: {text!r}")
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational value {text!r}") from None


def parse_grid(text: str) -> list[Fraction]:
    """Comma separated rationals, or start:stop:step (inclusive)."""
    if ":" in text:
        parts = [parse_rational(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise UsageError("grid range is start:stop:step with a positive step")
        start, stop, step = parts
        out = []
        x = start
        while x <= stop:
            out.append(x)
            x += step
        return out
    return [parse_rational(p) for p in text.split(",") if p.strip()]


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, n_default: int | None = None):
    p.set_defaults(_parser=p)
    p.add_argument("--n", type=int, default=n_default, help="order / half-length")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--brute-bound", type=int, default=machine.DEFAULT_BRUTE_BOUND,
                   help="largest size accepted by exhaustive oracles")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="parastacks",
                                 description="Permutations sortable by two parallel stacks, and corner-weighted loops.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("execute", help="run an operation word and print the output permutation")
    p.add_argument("word", nargs="+")
    _common(p)

    p = sub.add_parser("sortable", help="decide whether a permutation is achievable")
    p.add_argument("perm", nargs="+")
    _common(p)

    p = sub.add_parser("canonical", help="canonical operation word of an achievable permutation")
    p.add_argument("perm", nargs="+")
    _common(p)

    p = sub.add_parser("canonicalize", help="canonical word with the same output as a given word")
    p.add_argument("word", nargs="+")
    _common(p)

    p = sub.add_parser("involution", help="apply the corner involution to a lattice walk")
    p.add_argument("word", nargs="+")
    _common(p)

    p = sub.add_parser("series", help="compute a generating function to order --n")
    p.add_argument("which", choices=SERIES)
    _common(p, 8)
    p.add_argument("--at", help="evaluate the corner variable at this rational a")
    p.add_argument("--refine-s", action="store_true", help="also track east steps (q, qprim)")
    p.add_argument("--verify", action="store_true", help="run oracle/residual checks before emitting")

    p = sub.add_parser("oracle", help="exhaustive enumeration oracles")
    p.add_argument("which", choices=ORACLES)
    _common(p, 6)
    p.add_argument("--refine-s", action="store_true")

    p = sub.add_parser("check", help="run a property check; exit 1 if it fails")
    p.add_argument("which", choices=CHECKS)
    _common(p)
    p.add_argument("--series", default="Q",
                   choices=("Q", "Q_refined", "Q_primitive", "Q_primitive_refined", "W00", "H00",
                            "fixed_projection"))
    p.add_argument("--v", help="projection word for fixed_projection / p2 (comma separated for p2)")

    p = sub.add_parser("estimate", help="numeric estimates (critical point, radius, growth)")
    p.add_argument("which", choices=ESTIMATES)
    _common(p)
    p.add_argument("--tol", type=float, default=1e-6, help="width of the a-interval (tc)")
    p.add_argument("--grid", default="-1:2:1/4", help="a values: p/q list or start:stop:step (radius)")
    p.add_argument("--orders", default="40,60,80,100", help="orders reported by radius")
    return ap


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _perm(args) -> machine.Permutation:
    try:
        return machine.Permutation.parse(args.perm)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _word(args) -> str:
    return machine.to_walk("".join(args.word))


def cmd_execute(args):
    w = _word(args)
    p = machine.execute(w)
    data = {"word": w, "operations": " ".join(machine.to_ops(w)), "permutation": str(p)}
    return data, f"{p}\n"


def cmd_sortable(args):
    p = _perm(args)
    ok, colouring = machine.is_achievable(p, with_colouring=True)
    data = {"permutation": str(p), "achievable": ok}
    if ok:
        data["canonical"] = machine.canonical_sequence(p)
        data["colouring"] = {str(k): v + 1 for k, v in sorted(colouring.items())}
        return data, f"yes\n{data['canonical']}\n"
    return data, "no\n"


def cmd_canonical(args):
    p = _perm(args)
    w = machine.canonical_sequence(p)
    return {"permutation": str(p), "canonical": w}, f"{w}\n"


def cmd_canonicalize(args):
    w = _word(args)
    c = arches.canonicalize(w)
    data = {"word": w, "canonical": c, "permutation": str(machine.execute(w)),
            "is_canonical": arches.is_canonical(w)}
    return data, f"{c}\n"


def cmd_involution(args):
    w = _word(args)
    bad = [i for i, ch in enumerate(w) if ch not in "ENWS"]
    if bad:
        raise machine.InvalidWordError(f"unknown letter {w[bad[0]]!r}", bad[0])
    r = arches.corner_involution(w)
    data = {"word": w, "image": r, "corners": walks.corner_count(w), "image_corners": walks.corner_count(r)}
    return data, f"{r}\n"


def _require_n(args, lo=0):
    if args.n is None or args.n < lo:
        raise UsageError(f"--n must be at least {lo}")
    return args.n


def _compare(name, computed: Sequence, oracle: Sequence, upto: int):
    for k in range(upto + 1):
        if computed[k] != oracle[k]:
            raise CheckFailed(f"{name}: coefficient {k} is {computed[k]}, oracle gives {oracle[k]}")


def _verify_series(which, args, series, N):
    lim = min(N, VERIFY_BRUTE_MAX, args.brute_bound)
    if which == "s":
        other = equations.solve_Sprim_via_Q(walks.quarter_loop_series(N), N).extra["S"]
        _compare("S (route via S•)", series.coeffs, other.coeffs, N)
        counts = [machine.enumerate_achievable(n, args.brute_bound, jobs=args.jobs) for n in range(lim + 1)]
        _compare("S (permutation enumeration)", series.coeffs, counts, lim)
        return f"passed: S• route to {N}, enumeration to {lim}"
    if which == "sprim":
        C = equations.solve_C(walks.quarter_loop_series(N), N)
        S = equations.solve_S_via_C(C, N).series
        Sp = 1 - S.inverse().map(int)
        _compare("S• (route via C)", series.coeffs, Sp.coeffs, N)
        return f"passed: route via C to {N}"
    if which == "stilde":
        counts = [equations.brute_standard_count(n) for n in range(lim + 1)]
        _compare("S~ (standard words)", series.coeffs, counts, lim)
        return f"passed: residual, standard-word enumeration to {lim}"
    if which == "c":
        lim = min(lim, 5)
        oracle = [IntPolynomial([], "b")] + [equations.brute_connected_standard(n) for n in range(1, lim + 1)]
        _compare("C (connected standard)", series.coeffs, oracle, lim)
        return f"passed: residual, connected-standard enumeration to {lim}"
    if which in ("q", "qprim"):
        prim = which == "qprim"
        oracle = [walks.brute_quarter_loops(n, args.refine_s, args.brute_bound, primitive=prim)
                  for n in range(lim + 1)]
        if prim:
            oracle[0] = series.coeffs[0]
        _compare(which, series.coeffs, oracle, lim)
        return f"passed: loop enumeration to {lim}"
    if which in ("w00", "h00"):
        region = "unconfined" if which == "w00" else "halfplane"
        lim = min(N, 5)
        oracle = walks.loop_table_oracle(lim, region)
        for i in range(lim + 1):
            for j in range(lim + 1):
                if series[i, j] != oracle[i, j]:
                    raise CheckFailed(f"{which}: cell ({i},{j}) disagrees with the step DP")
        name = "W00" if which == "w00" else "H00"
        for sign in ("1", "minus1"):
            closed = walks.closed_forms(f"{name}_at_{sign}", N)
            val = -1 if sign == "minus1" else 1
            for i in range(N + 1):
                for j in range(N + 1):
                    c = series[i, j]
                    c = c(val) if isinstance(c, IntPolynomial) else c
                    if c != closed[i, j]:
                        raise CheckFailed(f"{which}: closed form at a={val} fails at ({i},{j})")
        return f"passed: step DP to {lim}, closed forms at a=+-1 to {N}"
    return "not run"


def _evaluate_at(series, a: Fraction):
    def ev(c):
        if not isinstance(c, Polynomial):
            return c
        if any(isinstance(x, Polynomial) for x in c.coeffs):
            return RatPolynomial([x(a) if isinstance(x, Polynomial) else x for x in c.coeffs], c.var)
        return c(a)
    if isinstance(series, BiTruncatedSeries):
        return BiTruncatedSeries([[ev(c) for c in r] for r in series.coeffs], series.orders, series.vars)
    return series.map(ev)


def cmd_series(args):
    which = args.which
    N = _require_n(args, 1 if which in ("qprim", "sprim") else 0)
    at = parse_rational(args.at) if args.at is not None else None
    if at is not None and which not in ("q", "qprim", "w00", "h00"):
        raise UsageError("--at applies to q, qprim, w00 and h00")
    if args.refine_s and which not in ("q", "qprim"):
        raise UsageError("--refine-s applies to q and qprim")
    t0 = time.perf_counter()
    coeff_vars: tuple = ("a",)
    extra = {}
    if which == "s":
        C = equations.solve_C(walks.quarter_loop_series(N), N)
        sol = equations.solve_S_via_C(C, N)
        series, route, coeff_vars = sol.series, "S from C (order by order)", ()
    elif which == "sprim":
        sol = equations.solve_Sprim_via_Q(walks.quarter_loop_series(N), N)
        series, route, coeff_vars = sol.series, "S• from Q (order by order)", ()
    elif which == "stilde":
        C = equations.solve_C(walks.quarter_loop_series(N), N)
        sol = equations.solve_S_tilde(C, N)
        series, route, coeff_vars = sol.series, "S~ from C (order by order)", ()
    elif which == "c":
        sol = equations.solve_C(walks.quarter_loop_series(N), N)
        series, route, coeff_vars = sol.series, "C from Q (order by order)", ("b",)
    elif which == "q":
        series = walks.quarter_loop_series(N, args.refine_s)
        route = "loop DP"
    elif which == "qprim":
        series = walks.primitive_quarter_loop_series(N, args.refine_s)
        route = "1 - 1/Q"
    elif which == "w00":
        series, route = walks.unconfined_series(N), "constant-term extraction"
    else:
        series, route = walks.halfplane_series(N), "constant-term extraction"
    if args.refine_s and which in ("q", "qprim"):
        coeff_vars = ("s", "a")
    check = "not run"
    if args.verify:
        check = _verify_series(which, args, series, N)
    if at is not None:
        series = _evaluate_at(series, at)
        extra["a"] = str(at)
        coeff_vars = ("s",) if args.refine_s else ()
    name = {"s": "S", "sprim": "S•", "stilde": "S~", "c": "C", "q": "Q", "qprim": "Q•",
            "w00": "W00", "h00": "H00"}[which]
    rep = SeriesReport.from_series(name, series, route, oracle_check=check, coeff_vars=coeff_vars,
                                   seconds=time.perf_counter() - t0, extra=extra)
    return rep, None


def cmd_oracle(args):
    N = _require_n(args)
    t0 = time.perf_counter()
    which = args.which
    if N > args.brute_bound:
        raise UsageError(f"n={N} exceeds --brute-bound {args.brute_bound}")
    if which == "perms":
        values = [machine.enumerate_achievable(n, args.brute_bound, jobs=args.jobs) for n in range(N + 1)]
    elif which == "loops":
        values = [walks.brute_quarter_loops(n, args.refine_s, args.brute_bound) for n in range(N + 1)]
    elif which == "connected":
        values = [IntPolynomial([], "b")] + [equations.brute_connected_standard(n) for n in range(1, N + 1)]
    else:
        values = [equations.brute_standard_count(n) for n in range(N + 1)]
    data = {"oracle": which, "n": N, "values": values, "seconds": time.perf_counter() - t0}
    text = "".join(f"{n}: {v}\n" for n, v in enumerate(values))
    return data, text, (["n", "value"], [(n, v) for n, v in enumerate(values)])


def _passed(data) -> bool:
    if isinstance(data, analysis.PositivityReport):
        return data.passed
    if "pass" in data:
        return bool(data["pass"])
    return all(v for v in data.values() if isinstance(v, bool))


def cmd_check(args):
    which = args.which
    t0 = time.perf_counter()
    if which == "positivity":
        N = _require_n(args, 1)
        data = analysis.positivity_check(args.series, N, v=args.v)
    elif which == "inversion":
        N = _require_n(args, 1)
        Q = walks.quarter_loop_series(N)
        C = equations.solve_C(Q, N).series
        data = equations.inversion_checks(Q, C, N)
        data["residual_QC"] = equations.residual_QC(Q, C, N)
    elif which == "appendixB":
        N = _require_n(args, 1)
        C = equations.solve_C(walks.quarter_loop_series(N), N).series
        data = equations.appendixB_inequality_check(C, N)
    elif which == "p1":
        n = 4 if args.n is None else args.n
        data = analysis.p1_check(n, n)
    elif which == "p2":
        N = 20 if args.n is None else args.n
        vs = args.v.split(",") if args.v else None
        data = analysis.p2_check(vs, N)
    elif which == "counterexamples":
        data = analysis.counterexample_suite()
    elif which == "prop4":
        N = 100 if args.n is None else args.n
        try:
            data = analysis.prop4_asymptotics_check(N)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        N = 10 if args.n is None else args.n
        data = {"order": N, "pass": walks.constant_term_lemma_check(N)}
    ok = _passed(data)
    if isinstance(data, analysis.PositivityReport):
        data = data.to_json()
    data = dict(data)
    data.setdefault("pass", ok)
    data["check"] = which
    data["seconds"] = time.perf_counter() - t0
    text = f"{which}: {'pass' if ok else 'FAIL'}\n"
    return data, text, ok


def cmd_estimate(args):
    which = args.which
    t0 = time.perf_counter()
    if which == "tc":
        N = 100 if args.n is None else args.n
        data = analysis.tc_bracket(N, args.tol)
        text = (f"a in [{fmt_float(data['a_interval'][0])}, {fmt_float(data['a_interval'][1])}]\n"
                f"1/t_c in [{fmt_float(data['inv_tc_interval'][0])}, {fmt_float(data['inv_tc_interval'][1])}]\n"
                f"bracket 1/t_c in [{fmt_float(data['inv_tc_bracket'][0])}, "
                f"{fmt_float(data['inv_tc_bracket'][1])}]\n")
        data["a"] = data["a_interval"]
        data["inv_tc"] = data["inv_tc_interval"]
        csv_rows = (["quantity", "low", "high"],
                    [("a", *data["a_interval"]), ("inv_tc", *data["inv_tc_interval"]),
                     ("a_bracket", *data["a_bracket"]), ("inv_tc_bracket", *data["inv_tc_bracket"])])
    elif which == "radius":
        N = 100 if args.n is None else args.n
        try:
            orders = [int(x) for x in args.orders.split(",")]
        except ValueError:
            raise UsageError("--orders is a comma separated list of integers") from None
        orders = [n for n in orders if n <= N] or [N]
        rows = analysis.radius_scan(parse_grid(args.grid), N, orders, jobs=args.jobs)
        header = ["a", "n", "ratio", "exponent_proxy", "conjectured_radius"]
        csv_rows = (header, [r.as_row() for r in rows])
        data = {"N": N, "rows": [dict(zip(header, r.as_row())) for r in rows]}
        text = emit_csv(*csv_rows)
    else:
        N = 40 if args.n is None else args.n
        sol = equations.solve_Sprim_via_Q(walks.quarter_loop_series(N), N, residual_order=min(N, 6))
        data = analysis.growth_bounds(sol.extra["S"].coeffs, sol.series.coeffs)
        text = "".join(f"{k}: {fmt_float(v) if isinstance(v, float) else v}\n" for k, v in data.items())
        csv_rows = (["quantity", "value"], list(data.items()))
    data["seconds"] = time.perf_counter() - t0
    return data, text, csv_rows


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    timing = not args.no_timing
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        ok = True
        if args.command == "series":
            rep, _ = cmd_series(args)
            out = {"json": lambda: emit_json(rep.to_json(timing)), "csv": rep.csv, "text": rep.text}[args.format]()
        elif args.command in ("oracle", "check", "estimate"):
            fn = {"oracle": cmd_oracle, "check": cmd_check, "estimate": cmd_estimate}[args.command]
            data, text, third = fn(args)
            if args.command == "check":
                ok = third
                csv_rows = (["key", "value"], [(k, v) for k, v in data.items()
                                               if isinstance(v, (bool, int, float, str))])
            else:
                csv_rows = third
            if not timing:
                data.pop("seconds", None)
            out = {"json": lambda: emit_json(data, timing), "csv": lambda: emit_csv(*csv_rows),
                   "text": lambda: text}[args.format]()
        else:
            fn = {"execute": cmd_execute, "sortable": cmd_sortable, "canonical": cmd_canonical,
                  "canonicalize": cmd_canonicalize, "involution": cmd_involution}[args.command]
            data, text = fn(args)
            out = {"json": lambda: emit_json(data), "text": lambda: text,
                   "csv": lambda: emit_csv(list(data), [list(data.values())])}[args.format]()
    except UsageError as exc:
        args._parser.print_usage(sys.stderr)
        print(f"{args._parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (machine.InvalidWordError, machine.NotAchievableError) as exc:
        print(f"parastacks: {exc}", file=sys.stderr)
        return 1
    except (CheckFailed, equations.ContractViolation, ArithmeticError) as exc:
        print(f"parastacks: check failed: {exc}", file=sys.stderr)
        return 1
    except (machine.BruteForceBoundError, walks.BruteBoundError) as exc:
        print(f"parastacks: error: {exc}", file=sys.stderr)
        return 2
    _write(args, out)
    return 0 if ok else 1


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
