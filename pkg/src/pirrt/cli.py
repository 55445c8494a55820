"""Command-line entry point: ``plan``, ``bench``, ``fit`` and ``loadcalc``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from pirrt import bench
from pirrt.errors import PlannerError
from pirrt.io import emit_tree_svg, load_scenario, write_snapshot, write_trace
from pirrt.planners import PI_RRTSHARP, RRTSHARP_VI, make_planner

PLANNER_FLAGS = {"pi": PI_RRTSHARP, "vi": RRTSHARP_VI}


def _add_plan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True, help="scenario file, or a shipped name (sparse, cluttered)")
    p.add_argument("--planner", choices=sorted(PLANNER_FLAGS), default="pi")
    p.add_argument("--iters", type=int, help="iterations (overrides the scenario default)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-timing", action="store_true", help="write zeros in the timing columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pirrt", description="Policy-iteration RRT# planner and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="run one planner and write its trace")
    _add_plan_flags(plan)
    plan.add_argument("--snapshot-every", type=int, default=0, metavar="K",
                      help="write an SVG frame every K iterations (0 = off)")

    b = sub.add_parser("bench", help="repeat trials and fit t(n) = c n^alpha")
    _add_plan_flags(b)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--processes", type=int, default=1, help="run trials in parallel (skews timing)")
    b.add_argument("--fit-min", type=int, default=bench.DEFAULT_FIT_MIN)

    f = sub.add_parser("fit", help="fit a power law to a bench table")
    f.add_argument("table")
    f.add_argument("--column", default="mean_t_plan_ns", choices=[c for c in bench.BENCH_COLUMNS if c != "iter"])
    f.add_argument("--min-n", type=int, default=bench.DEFAULT_FIT_MIN)
    f.add_argument("--max-n", type=int)

    lc = sub.add_parser("loadcalc", help="per-processor load threshold")
    lc.add_argument("--c0", type=float, required=True)
    lc.add_argument("--alpha0", type=float, required=True)
    lc.add_argument("--cpi", type=float, required=True)
    lc.add_argument("--alphapi", type=float, required=True)
    lc.add_argument("--n", type=float, required=True)
    return parser


def _config(args):
    overrides = {"iterations": args.iters, "seed": args.seed, "workers": args.workers, "eps": args.eps,
                 "eta": args.eta, "gamma": args.gamma, "planner_kind": PLANNER_FLAGS[args.planner]}
    return load_scenario(args.scenario, overrides)


def cmd_plan(args) -> int:
    env, cfg = _config(args)
    if args.snapshot_every < 0:
        raise PlannerError("--snapshot-every must be >= 0")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with make_planner(env, cfg) as planner:
        for i in range(1, cfg.iterations + 1):
            planner.step()
            if args.snapshot_every and (i % args.snapshot_every == 0 or i == cfg.iterations):
                emit_tree_svg(planner.graph, planner.policy, planner.promising, env, out / f"tree_{i:06d}.svg")
    write_trace(planner.traces, out / "trace.csv", timing=not args.no_timing)
    write_snapshot(planner.graph, planner.policy, planner.promising, out / "graph.json")
    last = planner.traces[-1]
    print(f"J_init={last.J_init:.17g} vertices={last.n_vertices} edges={last.n_edges} out={out}")
    return 0


def cmd_bench(args) -> int:
    env, cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = bench.run_trials(env, cfg, args.trials, processes=args.processes)
    name = args.planner
    bench.write_bench_table(table, out / f"bench_{name}.csv")
    if not args.no_timing and cfg.iterations > args.fit_min:
        fit = bench.fit_table(table, "mean_t_plan_ns", (args.fit_min, cfg.iterations))
        (out / f"fit_{name}.txt").write_text(fit.report(), encoding="utf-8")
        sys.stdout.write(fit.report())
    print(f"table={out / f'bench_{name}.csv'} trials={args.trials} final_mean_J_init={table.mean_J_init[-1]:.17g}")
    return 0


def cmd_fit(args) -> int:
    table = bench.read_bench_table(args.table)
    hi = args.max_n if args.max_n is not None else int(table.iters.max())
    fit = bench.fit_table(table, args.column, (args.min_n, hi))
    sys.stdout.write(fit.report())
    return 0


def cmd_loadcalc(args) -> int:
    model = bench.LoadModel(args.c0, args.alpha0, args.cpi, args.alphapi)
    threshold, procs = bench.load_threshold(model, args.n)
    print(f"coefficient: {model.coefficient:.6g}")
    print(f"exponent: {model.exponent:.6g}")
    print(f"threshold: {threshold:.6g}")
    print(f"min_processors: {procs:.6g}")
    return 0


COMMANDS = {"plan": cmd_plan, "bench": cmd_bench, "fit": cmd_fit, "loadcalc": cmd_loadcalc}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns 0 on success, 1 on runtime errors, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (PlannerError, OSError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"pirrt {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
