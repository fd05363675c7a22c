"""Summarise how the population's costs spread out over the iterations of one run.

For each requested iteration, print min / quartiles / max of the slot costs,
the number of distinct costs and whether the pheromone was erased. Without
--iterations it prints every 10th iteration. With --csv the full trace is
also written.

    python scripts/population_trace.py tests/data/gdb1.dat --seed 1 --iterations 0 20 100
"""
import argparse
import sys

import numpy as np

from carp_aco import load_instance, prepare
from carp_aco.bench import write_trace
from carp_aco.colony import ColonyParams, run


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("instance")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--i-max", type=int, default=200)
    ap.add_argument("--iterations", type=int, nargs="*")
    ap.add_argument("--csv", help="write the full trace here")
    args = ap.parse_args(argv)

    inst = load_instance(args.instance)
    net, dist = prepare(inst)
    params = ColonyParams(seed=args.seed, i_max=args.i_max)
    # no bound: the point is to watch the population, not to stop early
    res = run(net, dist, params)
    wanted = set(args.iterations) if args.iterations else set(range(0, len(res.trace), 10))
    print(f"{'it':>4} {'min':>7} {'q1':>7} {'med':>7} {'q3':>7} {'max':>7} {'distinct':>8} erased")
    for rec in res.trace:
        if rec.iteration not in wanted:
            continue
        c = np.asarray(rec.costs)
        q1, med, q3 = np.percentile(c, [25, 50, 75])
        print(f"{rec.iteration:>4} {c.min():>7} {q1:>7.1f} {med:>7.1f} {q3:>7.1f} {c.max():>7} "
              f"{len(np.unique(c)):>8} {'yes' if rec.erased else ''}")
    print(f"best {res.best_cost} at iteration {res.best_iteration}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_trace(res, fh, params.f_e)
    return 0


if __name__ == "__main__":
    sys.exit(main())
