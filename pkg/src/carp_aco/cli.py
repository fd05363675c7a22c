"""Command line: ``carp-aco solve | bench | check | convert``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .bench import (
    DEFAULT_SEEDS,
    ExperimentConfig,
    run_experiments,
    solve_instance,
    write_table,
    write_trace,
)
from .colony import ColonyParams
from .instance_io import (
    InstanceError,
    check_solution,
    iter_instance_files,
    load_instance,
    lookup_lb,
    parse_solution,
    read_lb_table,
    write_canonical,
    write_solution,
)

ENV_INSTANCE_DIR = "CARP_INSTANCE_DIR"

_PARAM_FLAGS = [
    ("f", int, "number of ants"),
    ("f_e", int, "number of elitist ants"),
    ("rho", float, "trail persistence"),
    ("k", int, "candidate list size"),
    ("p_ls", float, "local search probability"),
    ("p_p", float, "probability of ignoring pheromone"),
    ("i_max", int, "iteration cap"),
    ("n_s", int, "iterations without improvement before erasing pheromone"),
    ("alpha", float, "saving exponent"),
    ("beta", float, "pheromone exponent"),
    ("tau0", float, "initial pheromone level"),
]


def _add_params(p: argparse.ArgumentParser) -> None:
    defaults = ColonyParams()
    g = p.add_argument_group("colony parameters")
    for name, typ, help_ in _PARAM_FLAGS:
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=typ,
                       help=f"{help_} (default {getattr(defaults, name)})")
    p.add_argument("--workers", type=int, default=1, help="threads building ants")
    p.add_argument("--lb-table", type=Path, help="sidecar file with 'name LB' lines")


def _params(args) -> ColonyParams:
    return ColonyParams().with_overrides(**{name: getattr(args, name) for name, _, _ in _PARAM_FLAGS})


def resolve_instance(name: str, instance_dir: str | None) -> Path:
    path = Path(name)
    if path.exists() or not instance_dir:
        return path
    base = Path(instance_dir)
    for cand in (base / name, base / f"{name}.dat", base / f"{name}.txt"):
        if cand.exists():
            return cand
    matches = [p for p in iter_instance_files(base) if p.stem.lower() == name.lower()]
    return matches[0] if matches else path


def cmd_solve(args) -> int:
    path = resolve_instance(args.instance, args.instance_dir)
    try:
        inst = load_instance(path)
    except (OSError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lb = args.lb
    if lb is None:
        lb = inst.lower_bound or lookup_lb(read_lb_table(args.lb_table), inst.name or path.stem)
    params = _params(args).with_overrides(seed=args.seed)
    try:
        _, _, res, sf, errors = solve_instance(inst, params, lb, args.workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dev = f"{100 * (res.best_cost - lb) / lb:.2f}%" if lb else "-"
    print(f"{inst.name}: cost {res.best_cost} LB {lb if lb else '-'} dev {dev} "
          f"best at iteration {res.best_iteration} ({res.time_to_best:.2f}s), "
          f"{res.iterations} iterations, {res.total_time:.2f}s, {len(res.best.trips)} trips")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = inst.name or path.stem
        (out / f"{name}_s{args.seed}.sol").write_text(write_solution(sf))
        if args.trace:
            with open(out / f"{name}_s{args.seed}_trace.csv", "w", newline="") as fh:
                write_trace(res, fh, params.f_e)
    for e in errors:
        print(f"invalid solution: {e}", file=sys.stderr)
    return 1 if errors else 0


def cmd_bench(args) -> int:
    names = args.instances
    if not names:
        if not args.instance_dir:
            print(f"error: no instances given and {ENV_INSTANCE_DIR} is not set", file=sys.stderr)
            return 2
        paths = iter_instance_files(args.instance_dir)
    else:
        paths = [resolve_instance(s, args.instance_dir) for s in names]
    config = ExperimentConfig(
        instances=paths,
        seeds=args.seeds,
        params=_params(args),
        out_dir=args.out_dir,
        trace=args.trace,
        lb_table=args.lb_table,
        workers=args.workers,
        timing=not args.no_timing,
    )
    rows, failures = run_experiments(config)
    write_table(rows, sys.stdout, "text", seeds=args.seeds)
    if args.out_dir:
        out = Path(args.out_dir)
        with open(out / "results.txt", "w") as fh:
            write_table(rows, fh, "text", seeds=args.seeds)
        with open(out / "results.csv", "w", newline="") as fh:
            write_table(rows, fh, "csv", seeds=args.seeds)
    for f in failures:
        print(f"FAILED {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_check(args) -> int:
    try:
        inst = load_instance(args.instance)
        sol = parse_solution(Path(args.solution).read_text())
    except (OSError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    errors = check_solution(inst, sol)
    if errors:
        for e in errors:
            print(f"invalid: {e}")
        return 1
    print(f"ok: {len(sol.trips)} trips, cost {sol.total_cost}")
    return 0


def cmd_convert(args) -> int:
    inst = load_instance(args.instance)
    text = write_canonical(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carp-aco", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--instance-dir", default=os.environ.get(ENV_INSTANCE_DIR),
                        help=f"where bare instance names are looked up (env {ENV_INSTANCE_DIR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the colony on one instance with one seed")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, default=DEFAULT_SEEDS[0])
    p.add_argument("--lb", type=int, help="stop when this cost is reached")
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--trace", action="store_true", help="write the population trace")
    _add_params(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="instances x seeds, result tables")
    p.add_argument("instances", nargs="*")
    p.add_argument("--seeds", type=int, nargs="+", default=list(DEFAULT_SEEDS))
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="write zero times (reproducible tables)")
    _add_params(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("check", help="validate a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convert", help="write an instance in canonical format")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
