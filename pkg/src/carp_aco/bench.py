"""Multi-seed benchmark runs, result tables and population traces."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .colony import ColonyParams, RunResult, run
from .graph import DistanceTables, Network, build_network, shortest_paths
from .instance_io import (
    InstanceFile,
    SolutionFile,
    check_solution,
    load_instance,
    lookup_lb,
    read_lb_table,
    write_solution,
)
from .split import Solution

log = logging.getLogger(__name__)

DEFAULT_SEEDS = (1, 2, 3)


@dataclass
class ExperimentConfig:
    instances: Sequence[Path]
    seeds: Sequence[int] = DEFAULT_SEEDS
    params: ColonyParams = field(default_factory=ColonyParams)
    out_dir: Optional[Path] = None
    trace: bool = False
    lb_table: Optional[Path] = None
    workers: int = 1
    timing: bool = True  # False writes 0.0 for every time so reruns are byte-identical

    def __post_init__(self):
        if not self.instances:
            raise ValueError("at least one instance is required")
        if not self.seeds:
            raise ValueError("at least one seed is required")


@dataclass
class SeedResult:
    seed: int
    cost: int
    dev: Optional[float]
    time_best: float
    time_total: float
    iteration: int


@dataclass
class ResultRow:
    name: str
    n: int
    tau: int
    lb: Optional[int]
    runs: list[SeedResult]

    @property
    def baco(self) -> int:
        return min(r.cost for r in self.runs)

    @property
    def baco_dev(self) -> Optional[float]:
        return deviation(self.baco, self.lb)

    @property
    def avg_time(self) -> float:
        return sum(r.time_total for r in self.runs) / len(self.runs)


def deviation(cost: int, lb: Optional[int]) -> Optional[float]:
    if lb is None:
        return None
    return (cost - lb) / lb


def summary(rows: Sequence[ResultRow]) -> tuple[Optional[float], int]:
    """(mean BACO deviation in percent over rows with a bound, number of rows with BACO == LB)."""
    devs = [r.baco_dev for r in rows if r.baco_dev is not None]
    av = 100.0 * sum(devs) / len(devs) if devs else None
    hits = sum(1 for r in rows if r.lb is not None and r.baco == r.lb)
    return av, hits


def solution_file(sol: Solution, net: Network, dist: DistanceTables) -> SolutionFile:
    """Expand deadheads into node walks so the solution can be checked edge by edge."""
    trips = []
    for trip in sol.trips:
        steps = []
        pos = net.depot
        for a in trip.arcs:
            u, v = net.arc_nodes(a)
            path = dist.node_path(pos, u)
            steps += [(x, y, False) for x, y in zip(path, path[1:])]
            steps.append((u, v, True))
            pos = v
        path = dist.node_path(pos, net.depot)
        steps += [(x, y, False) for x, y in zip(path, path[1:])]
        trips.append(steps)
    return SolutionFile(net.name, trips, sol.total_cost)


def solve_instance(inst: InstanceFile, params: ColonyParams, lb: Optional[int], workers: int = 1):
    net = build_network(inst)
    dist = shortest_paths(net)
    result = run(net, dist, params, lb=lb, workers=workers)
    sf = solution_file(result.best, net, dist)
    errors = check_solution(inst, sf)
    return net, dist, result, sf, errors


def run_experiments(config: ExperimentConfig) -> tuple[list[ResultRow], list[str]]:
    """One row per instance; failures are collected and the sweep continues."""
    lbs = read_lb_table(config.lb_table)
    rows, failures = [], []
    out = Path(config.out_dir) if config.out_dir else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for path in config.instances:
        try:
            inst = load_instance(path)
        except (OSError, ValueError) as exc:
            failures.append(f"{path}: {exc}")
            log.error("%s: %s", path, exc)
            continue
        name = inst.name or Path(path).stem
        lb = inst.lower_bound or lookup_lb(lbs, name) or lookup_lb(lbs, Path(path).stem)
        runs = []
        try:
            for seed in config.seeds:
                params = config.params.with_overrides(seed=seed)
                net, dist, res, sf, errors = solve_instance(inst, params, lb, config.workers)
                if errors:
                    failures.append(f"{name} seed {seed}: " + "; ".join(errors))
                if sf.total_cost != res.best_cost:
                    failures.append(f"{name} seed {seed}: reported cost differs from solution")
                tb, tt = (res.time_to_best, res.total_time) if config.timing else (0.0, 0.0)
                runs.append(SeedResult(seed, res.best_cost, deviation(res.best_cost, lb),
                                       tb, tt, res.best_iteration))
                log.info("%s seed %d: cost %d (LB %s) at iteration %d, %.2fs",
                         name, seed, res.best_cost, lb, res.best_iteration, res.total_time)
                if out:
                    (out / f"{name}_s{seed}.sol").write_text(write_solution(sf))
                    if config.trace:
                        with open(out / f"{name}_s{seed}_trace.csv", "w", newline="") as fh:
                            write_trace(res, fh, params.f_e)
        except ValueError as exc:
            failures.append(f"{name}: {exc}")
            log.error("%s: %s", name, exc)
            continue
        rows.append(ResultRow(name, inst.node_count, inst.required_count, lb, runs))
    return rows, failures


# ----------------------------------------------------------------- tables

def _fmt_dev(dev: Optional[float]) -> str:
    return "-" if dev is None else f"{100 * dev:.2f}"


def write_table(rows: Sequence[ResultRow], fh, fmt: str = "text", seeds: Optional[Sequence[int]] = None) -> None:
    """Columns: FILE n tau LB, then per seed cost Dev TimeBest TimeTotal I, then BACO Dev AvgTime."""
    if seeds is None:
        seeds = [r.seed for r in rows[0].runs] if rows else list(DEFAULT_SEEDS)
    header = ["FILE", "n", "tau", "LB"]
    for s in seeds:
        header += [f"cost_s{s}", f"dev_s{s}", f"time_best_s{s}", f"time_total_s{s}", f"I_s{s}"]
    header += ["BACO", "BACO_dev", "avg_time"]
    av, hits = summary(rows)

    if fmt in ("csv", "delimited"):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            line = [r.name, r.n, r.tau, "" if r.lb is None else r.lb]
            for sr in r.runs:
                line += [sr.cost, "" if sr.dev is None else repr(sr.dev),
                         repr(sr.time_best), repr(sr.time_total), sr.iteration]
            line += [r.baco, "" if r.baco_dev is None else repr(r.baco_dev), repr(r.avg_time)]
            w.writerow(line)
        if rows:
            w.writerow(["Av.Dev (%)", "" if av is None else f"{av:.4f}"])
            w.writerow(["Nb hits", hits])
        return
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")

    table = [header]
    for r in rows:
        line = [r.name, str(r.n), str(r.tau), "-" if r.lb is None else str(r.lb)]
        for sr in r.runs:
            line += [str(sr.cost), _fmt_dev(sr.dev), f"{sr.time_best:.2f}", f"{sr.time_total:.2f}", str(sr.iteration)]
        line += [str(r.baco), _fmt_dev(r.baco_dev), f"{r.avg_time:.2f}"]
        table.append(line)
    widths = [max(len(row[c]) for row in table if c < len(row)) for c in range(len(header))]
    for row in table:
        fh.write("  ".join(cell.rjust(widths[c]) for c, cell in enumerate(row)).rstrip() + "\n")
    if rows:
        fh.write(f"Av.Dev (%) : {'-' if av is None else f'{av:.2f}'}\n")
        fh.write(f"Nb hits : {hits}\n")


def read_table(fh) -> list[ResultRow]:
    """Parse the delimited table back into rows (footer lines are skipped)."""
    reader = csv.reader(fh)
    header = next(reader)
    seeds = [int(h[len("cost_s"):]) for h in header if h.startswith("cost_s")]
    rows = []
    for line in reader:
        if not line or line[0] in ("Av.Dev (%)", "Nb hits"):
            continue
        name, n, tau, lb = line[0], int(line[1]), int(line[2]), int(line[3]) if line[3] else None
        runs = []
        for k, s in enumerate(seeds):
            c, d, tb, tt, it = line[4 + 5 * k: 9 + 5 * k]
            runs.append(SeedResult(s, int(c), float(d) if d else None, float(tb), float(tt), int(it)))
        rows.append(ResultRow(name, n, tau, lb, runs))
    return rows


def table_text(rows, fmt="text") -> str:
    buf = io.StringIO()
    write_table(rows, buf, fmt)
    return buf.getvalue()


# ----------------------------------------------------------------- traces

TRACE_HEADER = ["iteration", "slot", "cost", "elitist", "best_cost", "erased"]


def write_trace(result: RunResult, fh, f_e: int) -> None:
    """One record per (iteration, slot); costs within an iteration are non-increasing in slot."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for rec in result.trace:
        f = len(rec.costs)
        for slot, cost in enumerate(rec.costs, start=1):
            w.writerow([rec.iteration, slot, cost, int(slot > f - f_e), rec.best_cost, int(rec.erased)])


def read_trace(fh) -> list[dict]:
    return [{k: int(v) for k, v in row.items()} for row in csv.DictReader(fh)]
