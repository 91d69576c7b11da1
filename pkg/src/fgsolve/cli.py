"""fgsolve: solve, verify, generate and benchmark A x X >= B over functional graphs.

Exit codes: 0 solved / verified, 1 no solution (or no match), 2 timeout,
64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from math import gcd
from pathlib import Path

from .bench import ALGORITHMS, parse_suite, run_suite, solved_proportions
from .errors import InfeasibleSpec, SolverTimeout
from .graph import (
    FunctionalGraph,
    GraphFormatError,
    canonical_form,
    format_fg,
    product_component,
    read_fg,
)
from .oracle import InstanceSpec, SplitMix64, gen_instance, write_instance
from .solver_abstraction import admissible_periods, solve_abstraction
from .solver_graph import solve_graph, solve_graph_naive
from .tabstraction import t_abstraction

EXIT_OK, EXIT_NONE, EXIT_TIMEOUT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 64, 74


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _load(path: str, *, connected: bool = True) -> FunctionalGraph:
    try:
        g = read_fg(path)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    if connected and (g.n == 0 or not g.is_connected()):
        raise UsageError(f"{path}: graph must be connected")
    return g


def cmd_solve(args) -> int:
    a, b = _load(args.a), _load(args.b)
    p_a, p_b = a.cycle_length(), b.cycle_length()
    if args.all_px:
        periods = admissible_periods(p_a, p_b)
    else:
        if args.px < 1 or p_a * args.px // gcd(p_a, args.px) != p_b:
            raise UsageError(f"--px {args.px}: lcm({p_a}, {args.px}) != {p_b}")
        periods = [args.px]
    deadline = None if args.timeout is None else time.monotonic() + args.timeout / 1000
    found = 0
    seen: set[bytes] = set()
    for p_x in periods:
        left = None if deadline is None else max(0.0, deadline - time.monotonic())
        if args.abstraction_only:
            sols = solve_abstraction(
                t_abstraction(a), t_abstraction(b), p_x,
                deadline=None if left is None else time.monotonic() + left,
            )
            for s in sols:
                found += 1
                print(f"# p_x={p_x} alignment={s.alignment}")
                print(s.tx.render())
            continue
        if args.naive:
            res = solve_graph_naive(a, b, p_x, first_only=args.first_only, timeout=left)
        else:
            res = solve_graph(
                a, b, p_x,
                height_pruning=not args.no_height_pruning,
                first_only=args.first_only,
                timeout=left,
            )
        for s in res:
            code = canonical_form(s.x)
            if code in seen:
                continue
            seen.add(code)
            found += 1
            print(format_fg(s.x, comment=f"p_x={p_x} alignment={s.alignment}"), end="")
        if args.first_only and found:
            break
    if not found:
        print("no solution", file=sys.stderr)
        return EXIT_NONE
    return EXIT_OK


def cmd_verify(args) -> int:
    a, x, b = _load(args.a, connected=False), _load(args.x, connected=False), _load(args.b)
    target = canonical_form(b)
    comps = []
    for ca in a.components():
        for cx in x.components():
            g = gcd(ca.period, cx.period)
            for i in range(g):
                comps.append((ca.cycle[0], ca.cycle[i], cx.cycle[0]))
    matches = []
    for a0, ai, x0 in comps:
        comp, _ = product_component(a, x, ai, x0)
        if comp.n == b.n and canonical_form(comp) == target:
            matches.append((a0, ai, x0))
    print(f"components: {len(comps)}")
    for a0, ai, x0 in matches:
        print(f"match: A node {ai} with X node {x0}")
    return EXIT_OK if matches else EXIT_NONE


def cmd_gen(args) -> int:
    rng = SplitMix64(args.seed)
    out = Path(args.out)
    for k in range(args.count):
        spec = InstanceSpec(
            args.na, args.nx, args.pa, args.px, args.max_indegree, rng.next_u64(), args.height
        )
        a, x, b = gen_instance(spec)
        name = f"{args.prefix}{k:04d}"
        write_instance(out, name, spec, a, x, b)
        print(f"{name}: |A|={a.n} |X|={x.n} |B|={b.n}")
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = parse_suite(args.suite)
    algorithms = tuple(args.algorithms.split(",")) if args.algorithms else ALGORITHMS
    bad = set(algorithms) - set(ALGORITHMS)
    if bad:
        raise UsageError(f"unknown algorithms: {sorted(bad)}")
    records = run_suite(suite, args.csv, timeout_ms=args.timeout, algorithms=algorithms)
    for (p_a, p_x, deg, alg), share in solved_proportions(records).items():
        print(f"p_a={p_a} p_x={p_x} max_indegree={deg} {alg}: {share:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fgsolve", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="find every connected X with A x X >= B")
    s.add_argument("a")
    s.add_argument("b")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--px", type=int, help="cycle length of X")
    g.add_argument("--all-px", action="store_true", help="try every admissible cycle length")
    s.add_argument("--abstraction-only", action="store_true", help="print T^X matrices only")
    s.add_argument("--naive", action="store_true", help="use the brute-force wiring solver")
    s.add_argument("--no-height-pruning", action="store_true")
    s.add_argument("--first-only", action="store_true", help="stop at the first solution")
    s.add_argument("--timeout", type=float, help="milliseconds")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check that a component of A x X is isomorphic to B")
    v.add_argument("a")
    v.add_argument("x")
    v.add_argument("b")
    v.set_defaults(func=cmd_verify)

    gen = sub.add_parser("gen", help="write random (A, X, B) instances")
    gen.add_argument("--na", type=int, required=True)
    gen.add_argument("--nx", type=int, required=True)
    gen.add_argument("--pa", type=int, required=True)
    gen.add_argument("--px", type=int, required=True)
    gen.add_argument("--max-indegree", type=int, default=3)
    gen.add_argument("--height", type=int)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--prefix", default="inst")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time the solvers over a grid, append CSV")
    b.add_argument("--suite", required=True, help="e.g. pa=2,3;px=3,5;n=60;deg=3;k=5;seed=1")
    b.add_argument("--timeout", type=float, default=1000, help="milliseconds per run")
    b.add_argument("--csv", required=True)
    b.add_argument("--algorithms", help=f"comma list from {','.join(ALGORITHMS)}")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InfeasibleSpec, ValueError) as exc:
        print(f"fgsolve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverTimeout:
        print("fgsolve: timed out", file=sys.stderr)
        return EXIT_TIMEOUT
    except OSError as exc:
        print(f"fgsolve: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
