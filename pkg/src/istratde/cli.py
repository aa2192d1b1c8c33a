"""Command line entry point: ``istratde {run,compare,sweep,pool-census}``.

Exit codes: 0 on success, 2 on a configuration error, 1 on any other failure.
The default evaluation worker count comes from ``ISTRATDE_WORKERS``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .algorithms import Budget
from .benchmarks import FunctionId
from .engine import default_workers
from .errors import ConfigurationError
from .harness import (
    Algorithm,
    ExperimentSpec,
    compare_experiments,
    pool_census,
    population_scaling_sweep,
    run_experiment,
)

log = logging.getLogger("istratde")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")


def _add_experiment_args(p: argparse.ArgumentParser, pop_required: bool = True) -> None:
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default=Algorithm.ISTRATDE.value)
    p.add_argument("--function", choices=[f.value for f in FunctionId], required=True)
    p.add_argument("--dim", type=int, required=True)
    if pop_required:
        p.add_argument("--pop", type=int, required=True)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--budget-fes", type=int, help="evaluation budget, initial population included")
    budget.add_argument("--budget-gens", type=int, help="generation budget")
    p.add_argument("--runs", type=int, default=31)
    p.add_argument("--seed", type=int, default=0, help="master seed; run r uses seed + r")
    p.add_argument("--problem-seed", type=int, default=0)
    p.add_argument("--rotate", action="store_true")
    p.add_argument("--pool-indices", type=_int_list, default=None, help="comma list for restricted_pool")
    p.add_argument("--f", type=float, default=0.5, help="canonical DE scale factor")
    p.add_argument("--cr", type=float, default=0.9, help="canonical DE crossover rate")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="repetitions run in parallel processes")
    p.add_argument("--out", default=None)
    p.add_argument("--trace-stride", type=int, default=1)
    p.add_argument("--track", type=int, default=20, help="individuals whose ranks are recorded")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="istratde", description="Per-individual random strategy DE experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run repeated experiments and write traces plus summary.json")
    _add_experiment_args(run)

    cmp_ = sub.add_parser("compare", help="rank-sum comparison of two summaries")
    cmp_.add_argument("summary_a")
    cmp_.add_argument("summary_b")
    cmp_.add_argument("--alpha", type=float, default=0.05)

    sweep = sub.add_parser("sweep", help="population size sweep at a fixed evaluation budget")
    _add_experiment_args(sweep, pop_required=False)
    sweep.add_argument("--pops", type=_int_list, required=True, help="comma list of population sizes")

    census = sub.add_parser("pool-census", help="count dealt strategy configurations")
    census.add_argument("--samples", type=int, default=100_000)
    census.add_argument("--seed", type=int, default=0)
    census.add_argument("--pool-indices", type=_int_list, default=None)
    census.add_argument("--out", default=None)
    return parser


def _budget(args) -> Budget:
    if args.budget_gens is not None:
        return Budget.generations(args.budget_gens)
    return Budget.evaluations(args.budget_fes if args.budget_fes is not None else 200_000)


def _spec(args, pop: int) -> ExperimentSpec:
    workers = args.workers if args.workers is not None else default_workers()
    return ExperimentSpec(
        algorithm=args.algo,
        function_id=args.function,
        dim=args.dim,
        pop_size=pop,
        budget=_budget(args),
        runs=args.runs,
        seed=args.seed,
        problem_seed=args.problem_seed,
        rotate=args.rotate,
        out_dir=args.out,
        trace_stride=args.trace_stride,
        track=args.track,
        f=args.f,
        cr=args.cr,
        pool_indices=args.pool_indices,
        workers=workers,
        jobs=args.jobs,
    )


def _emit(record: dict, path: Optional[str] = None) -> None:
    text = json.dumps(record, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _dispatch(args) -> None:
    if args.command == "run":
        s = run_experiment(_spec(args, args.pop))
        print(f"{s['spec']['algorithm']} {s['problem']['function_id']} D={s['problem']['dim']}: "
              f"mean {s['mean']:.2E} sd {s['sd']:.2E} over {len(s['final_errors'])} runs")
    elif args.command == "compare":
        rec = compare_experiments(args.summary_a, args.summary_b, args.alpha)
        print(f"{rec['formatted']}  U={rec['u_statistic']:g} p={rec['p_value']:.3g} verdict={rec['verdict']}")
    elif args.command == "sweep":
        res = population_scaling_sweep(_spec(args, max(args.pops)), args.pops)
        for row in res["table"]:
            print(f"pop {row['pop_size']:>7d}  mean {row['mean']:.2E}  median {row['median']:.2E}  "
                  f"normalized {row['normalized_mean']:.3f}")
    elif args.command == "pool-census":
        rec = pool_census(args.samples, args.seed, args.pool_indices)
        out = {k: rec[k] for k in ("samples", "seed", "mean_count", "sd_count", "chi_square", "p_value")}
        if args.out:
            _emit(rec, args.out)
        else:
            print(json.dumps(out, indent=2))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _dispatch(args)
    except ConfigurationError as exc:
        print(f"istratde: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit code 1
        print(f"istratde: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
