"""The ``mopbench`` command line.

    mopbench run --problems BK1,JOS1a,QPa..QPg --methods bbdmo,bbdmo_vm \\
        --runs 200 --seed 42 --out results.csv --summary summary.csv \\
        --fronts fronts/
    mopbench list

``--problems`` accepts comma-separated registry names; a token ``A..B``
expands to every registered name between A and B in sorted registry order.
The environment variable MOPBENCH_SEED overrides ``--seed`` when set.
Exit codes: 0 on completion, 2 on configuration errors, 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import export_csv, export_front_csv, run_benchmark, summarize
from .core import ConfigError, SolverConfig
from .problems import default_registry
from .solver import Method

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mopbench",
        description="Benchmark multiobjective gradient descent solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute seeded benchmark runs")
    runp.add_argument("--problems", required=True, help="comma list, A..B ranges allowed")
    runp.add_argument(
        "--methods",
        default=",".join(m.value for m in Method),
        help="comma list of sdmo,vmmo,bbdmo,qnmo,bbdmo_vm",
    )
    runp.add_argument("--runs", type=int, default=200)
    runp.add_argument("--seed", type=int, default=42)
    runp.add_argument("--sigma", type=float, default=1e-4)
    runp.add_argument("--gamma", type=float, default=0.5)
    runp.add_argument("--alpha-min", type=float, default=1e-3)
    runp.add_argument("--alpha-max", type=float, default=1e3)
    runp.add_argument("--tol", type=float, default=1e-6)
    runp.add_argument("--max-iter", type=int, default=500)
    runp.add_argument("--out", help="per-run records CSV")
    runp.add_argument("--summary", help="per-(problem, method) summary CSV")
    runp.add_argument("--fronts", help="directory for front CSVs and figures")
    runp.add_argument(
        "--fresh-instance-per-run",
        action="store_true",
        help="regenerate quadratic instances per run index",
    )
    runp.add_argument("--jobs", type=int, default=1, help="worker threads")
    runp.add_argument(
        "--no-plots",
        action="store_true",
        help="skip figure rendering in the fronts directory",
    )

    sub.add_parser("list", help="print the problem registry")
    return parser


def _expand_problems(spec: str, names: list[str]) -> list[str]:
    """Expand comma-separated tokens; A..B covers the sorted registry slice."""
    out: list[str] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            start, _, end = token.partition("..")
            if start not in names or end not in names:
                raise ConfigError(f"range {token!r} has endpoints outside the registry")
            lo, hi = sorted((names.index(start), names.index(end)))
            out.extend(names[lo : hi + 1])
        else:
            out.append(token)
    seen = set()
    unique = [name for name in out if not (name in seen or seen.add(name))]
    if not unique:
        raise ConfigError("no problems selected")
    return unique


def _cmd_list() -> int:
    registry = default_registry()
    for name in registry.names():
        kind = "template" if registry.is_template(name) else "problem"
        print(f"{name:10s} {kind}")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    registry = default_registry()
    try:
        config = SolverConfig(
            sigma=args.sigma,
            gamma=args.gamma,
            alpha_min=args.alpha_min,
            alpha_max=args.alpha_max,
            tol=args.tol,
            max_iter=args.max_iter,
        )
        problems = _expand_problems(args.problems, registry.names())
        methods = [Method.parse(m) for m in args.methods.split(",") if m.strip()]
        if not methods:
            raise ConfigError("no methods selected")
        if args.runs < 1:
            raise ConfigError("--runs must be at least 1")
        for name in problems:
            registry.resolve(name, 0)  # fail fast on unknown names
        seed = args.seed
        env_seed = os.environ.get("MOPBENCH_SEED")
        if env_seed is not None:
            try:
                seed = int(env_seed)
            except ValueError:
                raise ConfigError(f"MOPBENCH_SEED must be an integer, got {env_seed!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    records = run_benchmark(
        problems,
        methods,
        runs=args.runs,
        master_seed=seed,
        config=config,
        registry=registry,
        fresh_instance_per_run=args.fresh_instance_per_run,
        jobs=max(1, args.jobs),
    )
    summaries = summarize(records)

    width = max(len(s.problem) for s in summaries)
    print(f"{'problem':<{width}}  {'method':<9} {'iter':>9} {'feval':>9} "
          f"{'time_ms':>9} {'conv':>6}")
    for s in summaries:
        print(
            f"{s.problem:<{width}}  {s.method:<9} {s.mean_iter:>9.2f} "
            f"{s.mean_feval:>9.2f} {s.mean_time_ms:>9.2f} "
            f"{s.converged_fraction:>6.2f}"
        )

    try:
        if args.out:
            export_csv(records, args.out)
        if args.summary:
            export_csv(summaries, args.summary)
        if args.fronts:
            _write_fronts(records, problems, methods, args.fronts, not args.no_plots)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _write_fronts(records, problems, methods, fronts_dir, render) -> None:
    from .plots import render_front_figure  # matplotlib import stays off the fast path

    directory = Path(fronts_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {fronts_dir}: {exc}") from exc
    for name in problems:
        for method in methods:
            group = [
                r for r in records if r.problem == name and r.method == method.value
            ]
            stem = f"{name}_{method.value}"
            export_front_csv(group, directory / f"{stem}.csv")
            if render:
                render_front_figure(group, f"{name} / {method.value}", directory / f"{stem}.png")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
