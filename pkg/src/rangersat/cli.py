"""Command-line entry point: ``solve``, ``bench``, ``gen`` and ``oracle``."""

from __future__ import annotations

import argparse
import logging
import random
import sys

from .dimacs import DimacsError, InvalidSize, generate_uniform_3sat, read_dimacs, write_dimacs
from .engine import VARIANTS, SolverParams, Verdict, check_convergence_params, run
from .harness import TooLarge, brute_force_sat, run_benchmark, summarize, write_csv

EXIT_CODES = {Verdict.UNSATISFIABLE: 20, Verdict.SATISFIABLE: 10, Verdict.UNKNOWN: 0}


def _add_solver_flags(p: argparse.ArgumentParser):
    d = SolverParams()
    p.add_argument("--pi", type=float, default=d.p_i, help="import probability (default %(default)s)")
    p.add_argument("--pt", type=float, default=d.p_t, help="transformation probability (default %(default)s)")
    p.add_argument("--pg", type=float, default=d.p_g, help="greedy probability (default %(default)s)")
    p.add_argument("--per", type=float, default=d.p_er,
                   help="extended resolution probability within a transformation phase (default %(default)s)")
    p.add_argument("--width", type=int, default=None, help="max resolvent width (default: number of variables)")
    p.add_argument("--k", type=int, default=None, help="working set size (default: number of variables + 1)")
    p.add_argument("--max-tries", type=int, default=d.max_tries)
    p.add_argument("--max-steps", type=int, default=d.max_steps)
    p.add_argument("--timeout", type=float, default=d.timeout, help="seconds per run (default %(default)s)")
    p.add_argument("--pair-budget", type=int, default=None, help="max variable pairs probed (default: all)")
    p.add_argument("--er-threshold", type=int, default=d.er_threshold)


def _params(args) -> SolverParams:
    return SolverParams(
        p_i=args.pi, p_t=args.pt, p_g=args.pg, p_er=args.per, w=args.width, k=args.k,
        max_tries=args.max_tries, max_steps=args.max_steps, seed=args.seed,
        timeout=args.timeout, pair_budget=args.pair_budget, er_threshold=args.er_threshold,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rangersat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="try to refute one DIMACS instance")
    solve.add_argument("instance")
    solve.add_argument("--seed", type=int, default=1)
    solve.add_argument("--variant", choices=VARIANTS, default="upla")
    _add_solver_flags(solve)

    bench = sub.add_parser("bench", help="run instances x variants x seeds, CSV to stdout")
    bench.add_argument("instances", help="directory of .cnf files, or a single file")
    bench.add_argument("--variants", default=",".join(VARIANTS),
                       help="comma-separated subset of %s" % ",".join(VARIANTS))
    bench.add_argument("--seeds", type=int, default=10, help="number of seeds per run (default %(default)s)")
    bench.add_argument("--seed", type=int, default=1, help="first seed (default %(default)s)")
    bench.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    bench.add_argument("--summary", action="store_true", help="print per-variant statistics to stderr")
    _add_solver_flags(bench)

    gen = sub.add_parser("gen", help="generate a uniform random 3-SAT instance")
    gen.add_argument("--vars", type=int, required=True)
    gen.add_argument("--clauses", type=int, required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("-o", dest="output", default=None, help="output file (default stdout)")

    oracle = sub.add_parser("oracle", help="decide an instance by exhaustive enumeration")
    oracle.add_argument("instance")
    return parser


def _cmd_solve(args) -> int:
    formula, _ = read_dimacs(args.instance, strict=False)
    params = _params(args).for_variant(args.variant)
    for warning in check_convergence_params(params, formula.num_vars):
        logging.getLogger("rangersat").info("convergence: %s", warning)
    result = run(formula, params)
    print(f"s {result.verdict.value}")
    print(f"c iterations={result.iterations} seconds={result.elapsed:.6f} "
          f"decided_by={result.decided_by.value}")
    if result.model is not None:
        lits = [v if result.model[v] else -v for v in range(1, formula.num_vars + 1)]
        print("v " + " ".join(map(str, lits)) + " 0")
    return EXIT_CODES[result.verdict]


def _cmd_bench(args) -> int:
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    bad = [v for v in variants if v not in VARIANTS]
    if bad:
        print(f"unknown variant(s): {', '.join(bad)}", file=sys.stderr)
        return 1
    seeds = list(range(args.seed, args.seed + args.seeds))
    records = run_benchmark(args.instances, variants, seeds, _params(args), jobs=args.jobs)
    write_csv(records, sys.stdout)
    if args.summary:
        for s in summarize(args.instances, records):
            print(f"c {s.variant}: solved={s.pct_solved:.1f}% mean_time={s.mean_time} "
                  f"median_iterations={s.median_iterations}", file=sys.stderr)
    return 0


def _cmd_gen(args) -> int:
    formula = generate_uniform_3sat(args.vars, args.clauses, random.Random(args.seed))
    data = write_dimacs(formula)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("ascii"))
    return 0


def _cmd_oracle(args) -> int:
    formula, _ = read_dimacs(args.instance, strict=False)
    sat, model = brute_force_sat(formula)
    if sat:
        print("s SATISFIABLE")
        print("v " + " ".join(str(v if model[v] else -v) for v in sorted(model)) + " 0")
        return EXIT_CODES[Verdict.SATISFIABLE]
    print("s UNSATISFIABLE")
    return EXIT_CODES[Verdict.UNSATISFIABLE]


COMMANDS = {"solve": _cmd_solve, "bench": _cmd_bench, "gen": _cmd_gen, "oracle": _cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, DimacsError, InvalidSize, TooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
