"""Ant colony solver for the Capacitated Arc Routing Problem."""
from .colony import ColonyParams, RunResult, run
from .graph import DistanceTables, Network, build_network, shortest_paths
from .instance_io import InstanceFile, load_instance, parse_canonical, parse_classic, validate
from .split import Solution, Trip, split

__all__ = [
    "ColonyParams", "RunResult", "run", "DistanceTables", "Network", "build_network",
    "shortest_paths", "InstanceFile", "load_instance", "parse_canonical", "parse_classic",
    "validate", "Solution", "Trip", "split", "prepare",
]


def prepare(inst: InstanceFile) -> tuple[Network, DistanceTables]:
    net = build_network(inst)
    return net, shortest_paths(net)
