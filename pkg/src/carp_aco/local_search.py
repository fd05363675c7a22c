"""First-improvement local search on giant tours, scored by Split.

Three neighbourhoods are scanned in a fixed order: moving one task,
moving two consecutive tasks, and 2-opt reversal of a segment. Any
strictly improving move is applied as soon as it is found.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from . import _kernels
from .graph import DistanceTables, Network
from .split import as_tour

MoveKind = Literal["relocate", "pair", "two-opt"]
KINDS: tuple[MoveKind, ...] = ("relocate", "pair", "two-opt")
PAIR_VARIANTS = ("keep", "flip", "swap", "reverse")


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    i: int          # position of the (first) moved task, or segment start
    j: int          # insertion position, or segment end for two-opt
    variant: int    # 1 = flipped for relocate, PAIR_VARIANTS index for pair, 0 for two-opt
    new_tour: np.ndarray


def _args(net: Network, dist: DistanceTables):
    return dist.arc_dist, net.cost, net.demand, net.opposite_arc, net.capacity, net.max_trip_tasks


def neighborhood_scan(
    tour: Sequence[int], kind: MoveKind, net: Network, dist: DistanceTables
) -> Optional[tuple[Move, int]]:
    """First strictly improving move of ``kind`` and its cost decrease, or None.

    Moves are tried by ascending task position, then ascending insertion
    point (segment end for two-opt), then variant.
    """
    base, c, i, j, v, cand = _kernels.scan_first(KINDS.index(kind), as_tour(tour), *_args(net, dist))
    if c < 0:
        return None
    return Move(kind, int(i), int(j), int(v), cand.copy()), int(base - c)


def improve_with_cost(tour: Sequence[int], net: Network, dist: DistanceTables) -> tuple[np.ndarray, int]:
    new, cost, _ = _kernels.improve(as_tour(tour), *_args(net, dist))
    return new, int(cost)


def improve(tour: Sequence[int], net: Network, dist: DistanceTables) -> np.ndarray:
    return improve_with_cost(tour, net, dist)[0]
