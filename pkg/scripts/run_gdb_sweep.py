"""Run the colony on every gdb file in a directory and print the result table.

    python scripts/run_gdb_sweep.py --instance-dir ~/carp/gdb --seeds 1 2 3 --out-dir runs/gdb
"""
import argparse
import logging
import os
import sys
from pathlib import Path

from carp_aco.bench import ExperimentConfig, run_experiments, summary, write_table
from carp_aco.colony import ColonyParams


def gdb_files(directory: Path) -> list[Path]:
    files = [p for p in directory.iterdir() if p.stem.lower().startswith("gdb") and p.stem[3:].isdigit()]
    return sorted(files, key=lambda p: int(p.stem[3:]))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instance-dir", type=Path, default=os.environ.get("CARP_INSTANCE_DIR"))
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--i-max", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", type=Path)
    ap.add_argument("--trace", action="store_true")
    args = ap.parse_args(argv)
    if args.instance_dir is None:
        ap.error("--instance-dir or CARP_INSTANCE_DIR is required")
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    paths = gdb_files(Path(args.instance_dir))
    if not paths:
        print(f"no gdb files in {args.instance_dir}", file=sys.stderr)
        return 2
    cfg = ExperimentConfig(instances=paths, seeds=args.seeds, params=ColonyParams(i_max=args.i_max),
                           out_dir=args.out_dir, trace=args.trace, workers=args.workers)
    rows, failures = run_experiments(cfg)
    write_table(rows, sys.stdout, "text", seeds=args.seeds)
    if args.out_dir:
        with open(args.out_dir / "results.csv", "w", newline="") as fh:
            write_table(rows, fh, "csv", seeds=args.seeds)
    av, hits = summary(rows)
    print(f"{len(rows)} instances, Av.Dev {av:.2f}%, {hits} hits" if av is not None else f"{len(rows)} instances")
    for f in failures:
        print(f"FAILED {f}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
