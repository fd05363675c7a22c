"""Reading and writing CARP instances and solutions.

Two instance formats are supported:

* the classic key/value files distributed with the gdb, val and egl sets
  (Spanish keywords such as ``VERTICES``, ``CAPACIDAD``, ``LISTA_ARISTAS_REQ``;
  English synonyms are accepted as well), see ``docs/formats.md``;
* a canonical line-oriented format that round-trips bit-exactly.

Lower bounds are not part of the classic files. They come from a sidecar
table (``name LB`` per line), a default copy of which ships in ``data/``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

CANONICAL_MAGIC = "carp-instance 1"
SOLUTION_MAGIC = "carp-solution 1"


class InstanceError(ValueError):
    """Malformed or invalid instance text."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(InstanceError):
    """Canonical text that does not follow the schema; ``field`` names the offender."""

    def __init__(self, field_path: str, message: str, line: Optional[int] = None):
        self.field = field_path
        super().__init__(f"{field_path}: {message}", line)


@dataclass(frozen=True)
class EdgeRecord:
    u: int
    v: int
    cost: int
    demand: int
    required: bool


@dataclass
class InstanceFile:
    name: str
    node_count: int
    depot: int
    capacity: int
    edges: list[EdgeRecord] = field(default_factory=list)
    lower_bound: Optional[int] = None
    # parsed for completeness; fleet size is never constrained by the solver
    vehicles: Optional[int] = None

    @property
    def required_count(self) -> int:
        return sum(1 for e in self.edges if e.required)


# ---------------------------------------------------------------- classic

_KEYWORDS = {
    "NOMBRE": "name",
    "NAME": "name",
    "VERTICES": "vertices",
    "ARISTAS_REQ": "req",
    "REQUIRED EDGES": "req",
    "ARISTAS_NOREQ": "noreq",
    "NON-REQUIRED EDGES": "noreq",
    "VEHICULOS": "vehicles",
    "VEHICLES": "vehicles",
    "CAPACIDAD": "capacity",
    "CAPACITY": "capacity",
    "DEPOSITO": "depot",
    "DEPOT": "depot",
    "LISTA_ARISTAS_REQ": "list_req",
    "LIST_REQ_EDGES": "list_req",
    "LISTA_ARISTAS_NOREQ": "list_noreq",
    "LIST_NOREQ_EDGES": "list_noreq",
}

_EDGE_RE = re.compile(
    r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*(?:coste|cost)\s+(-?\d+)"
    r"(?:\s+(?:demanda|demand)\s+(-?\d+))?\s*$",
    re.IGNORECASE,
)


def _int_field(value: str, key: str, lineno: int) -> int:
    try:
        return int(value.split()[0])
    except (ValueError, IndexError):
        raise InstanceError(f"expected an integer for {key}, got {value!r}", lineno) from None


def parse_classic(text: str | bytes) -> InstanceFile:
    """Parse a classic gdb/val/egl instance file."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise InstanceError("empty instance text", 1)

    header: dict[str, object] = {}
    header_line: dict[str, int] = {}
    edges: list[EdgeRecord] = []
    seen: dict[tuple[int, int], int] = {}
    section: Optional[str] = None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.upper() == "END":
            continue
        if line.startswith("("):
            if section is None:
                raise InstanceError("edge line outside of an edge list", lineno)
            m = _EDGE_RE.match(line)
            if m is None:
                raise InstanceError(f"cannot parse edge line {line!r}", lineno)
            u, v, cost = int(m.group(1)), int(m.group(2)), int(m.group(3))
            required = section == "list_req"
            if required and m.group(4) is None:
                raise InstanceError("required edge without a demand", lineno)
            demand = int(m.group(4)) if m.group(4) is not None else 0
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(
                    f"duplicate edge ({u},{v}), first seen on line {seen[key]}", lineno
                )
            seen[key] = lineno
            edges.append(EdgeRecord(u, v, cost, demand, required))
            continue
        if ":" not in line:
            raise InstanceError(f"unrecognised line {line!r}", lineno)
        key, _, value = line.partition(":")
        tag = _KEYWORDS.get(key.strip().upper())
        value = value.strip()
        if tag in ("list_req", "list_noreq"):
            section = tag
        elif tag == "name":
            header["name"] = value
        elif tag is not None:
            header[tag] = _int_field(value, key.strip(), lineno)
            header_line[tag] = lineno
        # other keys (COMENTARIO, TIPO_COSTES_ARISTAS, COSTE_TOTAL_REQ) are ignored

    for tag in ("vertices", "capacity", "depot"):
        if tag not in header:
            raise InstanceError(f"missing header field {tag}", len(lines))
    n = int(header["vertices"])
    for lineno_key, count, want_req in (("req", "req", True), ("noreq", "noreq", False)):
        if count in header:
            got = sum(1 for e in edges if e.required == want_req)
            if got != header[count]:
                raise InstanceError(
                    f"declared {header[count]} {'required' if want_req else 'non-required'} "
                    f"edges, found {got}",
                    header_line[lineno_key],
                )
    for e in edges:
        for node in (e.u, e.v):
            if not 1 <= node <= n:
                raise InstanceError(
                    f"node id {node} out of range [1, {n}] in edge ({e.u},{e.v})",
                    seen[(min(e.u, e.v), max(e.u, e.v))],
                )

    return InstanceFile(
        name=str(header.get("name", "")),
        node_count=n,
        depot=int(header["depot"]),
        capacity=int(header["capacity"]),
        edges=edges,
        vehicles=header.get("vehicles"),  # type: ignore[arg-type]
    )


def write_classic(inst: InstanceFile) -> str:
    req = [e for e in inst.edges if e.required]
    noreq = [e for e in inst.edges if not e.required]
    out = [
        f"NOMBRE : {inst.name}",
        f"VERTICES : {inst.node_count}",
        f"ARISTAS_REQ : {len(req)}",
        f"ARISTAS_NOREQ : {len(noreq)}",
        f"VEHICULOS : {inst.vehicles if inst.vehicles is not None else 0}",
        f"CAPACIDAD : {inst.capacity}",
        "TIPO_COSTES_ARISTAS : EXPLICITOS",
        f"COSTE_TOTAL_REQ : {sum(e.cost for e in req)}",
        "LISTA_ARISTAS_REQ :",
    ]
    out += [f"   ( {e.u}, {e.v})   coste {e.cost}   demanda {e.demand}" for e in req]
    if noreq:
        out.append("LISTA_ARISTAS_NOREQ :")
        out += [f"   ( {e.u}, {e.v})   coste {e.cost}" for e in noreq]
    out.append(f"DEPOSITO :   {inst.depot}")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------- canonical

_CANONICAL_FIELDS = ("name", "nodes", "depot", "capacity", "vehicles", "lower_bound", "edges")


def write_canonical(inst: InstanceFile) -> str:
    def opt(x):
        return "-" if x is None else str(x)

    out = [
        CANONICAL_MAGIC,
        f"name {inst.name}",
        f"nodes {inst.node_count}",
        f"depot {inst.depot}",
        f"capacity {inst.capacity}",
        f"vehicles {opt(inst.vehicles)}",
        f"lower_bound {opt(inst.lower_bound)}",
        f"edges {len(inst.edges)}",
    ]
    out += [f"edge {e.u} {e.v} {e.cost} {e.demand} {int(e.required)}" for e in inst.edges]
    out.append("end")
    return "\n".join(out) + "\n"


def parse_canonical(text: str | bytes) -> InstanceFile:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.split("\n")
    if not lines or lines[0] != CANONICAL_MAGIC:
        raise SchemaError("header", f"first line must be {CANONICAL_MAGIC!r}", 1)
    pos = 1
    values: dict[str, str] = {}
    for fld in _CANONICAL_FIELDS:
        lineno = pos + 1
        line = lines[pos] if pos < len(lines) else ""
        key, _, value = line.partition(" ")
        if key != fld:
            raise SchemaError(fld, f"expected field {fld!r}, got {line!r}", lineno)
        values[fld] = value
        pos += 1

    def as_int(fld: str, optional: bool = False) -> Optional[int]:
        raw = values[fld]
        if optional and raw == "-":
            return None
        try:
            return int(raw)
        except ValueError:
            raise SchemaError(
                fld, f"not an integer: {raw!r}", _CANONICAL_FIELDS.index(fld) + 2
            ) from None

    count = as_int("edges")
    edges = []
    for idx in range(count):
        lineno = pos + 1
        parts = lines[pos].split(" ") if pos < len(lines) else []
        path = f"edges[{idx}]"
        if len(parts) != 6 or parts[0] != "edge":
            raise SchemaError(path, "expected 'edge u v cost demand required'", lineno)
        try:
            u, v, cost, demand, req = (int(p) for p in parts[1:])
        except ValueError:
            raise SchemaError(path, "non-integer value", lineno) from None
        if req not in (0, 1):
            raise SchemaError(f"{path}.required", "must be 0 or 1", lineno)
        edges.append(EdgeRecord(u, v, cost, demand, bool(req)))
        pos += 1
    if pos >= len(lines) or lines[pos] != "end":
        raise SchemaError("end", "missing end marker", pos + 1)
    if any(line for line in lines[pos + 1 :]):
        raise SchemaError("end", "trailing content after end marker", pos + 2)
    return InstanceFile(
        name=values["name"],
        node_count=as_int("nodes"),
        depot=as_int("depot"),
        capacity=as_int("capacity"),
        edges=edges,
        lower_bound=as_int("lower_bound", optional=True),
        vehicles=as_int("vehicles", optional=True),
    )


def load_instance(path: str | Path) -> InstanceFile:
    """Read either format, sniffing the first line."""
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    if text.startswith(CANONICAL_MAGIC):
        return parse_canonical(text)
    return parse_classic(text)


# ------------------------------------------------------------- validation

def validate(inst: InstanceFile) -> list[str]:
    """Return every problem found in ``inst``; an empty list means valid."""
    errors: list[str] = []
    n = inst.node_count
    if n <= 0:
        errors.append(f"node count must be positive, got {n}")
    if inst.capacity <= 0:
        errors.append(f"capacity must be positive, got {inst.capacity}")
    if not 1 <= inst.depot <= max(n, 0):
        errors.append(f"depot {inst.depot} out of range [1, {n}]")
    if inst.lower_bound is not None and inst.lower_bound <= 0:
        errors.append(f"lower bound must be positive, got {inst.lower_bound}")
    if not any(e.required for e in inst.edges):
        errors.append("no required edges")

    seen: set[tuple[int, int]] = set()
    adj: dict[int, list[int]] = {}
    for idx, e in enumerate(inst.edges):
        where = f"edge {idx} ({e.u},{e.v})"
        bad_node = False
        for node in (e.u, e.v):
            if not 1 <= node <= n:
                errors.append(f"{where}: node id {node} out of range")
                bad_node = True
        if e.u == e.v:
            errors.append(f"{where}: self-loop")
        key = (min(e.u, e.v), max(e.u, e.v))
        if key in seen:
            errors.append(f"{where}: duplicate edge")
        seen.add(key)
        if e.cost <= 0:
            errors.append(f"{where}: cost must be positive, got {e.cost}")
        if e.demand < 0:
            errors.append(f"{where}: negative demand {e.demand}")
        if e.required and e.demand > inst.capacity:
            errors.append(f"{where}: demand exceeds capacity ({e.demand} > {inst.capacity})")
        if not bad_node:
            adj.setdefault(e.u, []).append(e.v)
            adj.setdefault(e.v, []).append(e.u)

    if 1 <= inst.depot <= n:
        reached = {inst.depot}
        queue = deque([inst.depot])
        while queue:
            x = queue.popleft()
            for y in adj.get(x, ()):
                if y not in reached:
                    reached.add(y)
                    queue.append(y)
        missing = [v for v in range(1, n + 1) if v not in reached]
        if missing:
            errors.append(f"disconnected graph: nodes {missing[:10]} unreachable from depot")
    return errors


# ----------------------------------------------------------- lower bounds

def _norm_name(name: str) -> str:
    name = Path(name).name.lower()
    for suffix in (".dat", ".txt", ".carp"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    if name.startswith("egl-"):
        name = name[4:]
    return name


def read_lb_table(path: Optional[str | Path] = None) -> dict[str, int]:
    """Load ``name LB`` pairs; ``None`` loads the bundled table."""
    if path is None:
        text = resources.files("carp_aco").joinpath("data/lower_bounds.txt").read_text()
    else:
        text = Path(path).read_text()
    table = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, lb = line.split()[:2]
        table[_norm_name(name)] = int(lb)
    return table


def lookup_lb(table: dict[str, int], name: str) -> Optional[int]:
    return table.get(_norm_name(name))


# -------------------------------------------------------------- solutions

@dataclass
class SolutionFile:
    """Trips as depot-to-depot node walks.

    Each trip is a list of steps ``(u, v, serviced)`` along single edges of
    the network, so a checker can validate it without any distance table.
    """

    instance: str
    trips: list[list[tuple[int, int, bool]]]
    total_cost: int

    def serviced(self) -> list[list[tuple[int, int]]]:
        return [[(u, v) for u, v, s in trip if s] for trip in self.trips]


def write_solution(sol: SolutionFile) -> str:
    out = [SOLUTION_MAGIC, f"instance {sol.instance}", f"cost {sol.total_cost}", f"trips {len(sol.trips)}"]
    for trip in sol.trips:
        if not trip:
            raise ValueError("empty trip")
        tokens = [str(trip[0][0])]
        for u, v, serviced in trip:
            tokens.append("*" if serviced else "-")
            tokens.append(str(v))
        out.append("trip " + " ".join(tokens))
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> SolutionFile:
    lines = [line.strip() for line in text.splitlines()]
    if not lines or lines[0] != SOLUTION_MAGIC:
        raise InstanceError(f"first line must be {SOLUTION_MAGIC!r}", 1)
    header = {}
    for lineno, line in enumerate(lines[1:4], start=2):
        key, _, value = line.partition(" ")
        header[key] = (value, lineno)
    for key in ("instance", "cost", "trips"):
        if key not in header:
            raise InstanceError(f"missing {key} line", 2)
    try:
        total = int(header["cost"][0])
        count = int(header["trips"][0])
    except ValueError:
        raise InstanceError("cost and trips must be integers", header["cost"][1]) from None
    trips = []
    for lineno, line in enumerate(lines[4:], start=5):
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "trip" or len(tokens) < 4 or len(tokens) % 2 != 0:
            raise InstanceError(f"malformed trip line {line!r}", lineno)
        try:
            nodes = [int(t) for t in tokens[1::2]]
        except ValueError:
            raise InstanceError(f"non-integer node in {line!r}", lineno) from None
        marks = tokens[2::2]
        if any(m not in ("*", "-") for m in marks):
            raise InstanceError(f"step marks must be '*' or '-' in {line!r}", lineno)
        trips.append([(nodes[i], nodes[i + 1], marks[i] == "*") for i in range(len(marks))])
    if len(trips) != count:
        raise InstanceError(f"declared {count} trips, found {len(trips)}", header["trips"][1])
    return SolutionFile(header["instance"][0], trips, total)


def check_solution(inst: InstanceFile, sol: SolutionFile) -> list[str]:
    """Independent feasibility check working on raw edges only.

    Verifies that each trip is a closed walk from the depot over existing
    edges, that loads respect the capacity, that every required edge is
    serviced exactly once and that the declared cost matches.
    """
    errors = []
    by_pair: dict[tuple[int, int], EdgeRecord] = {}
    for e in inst.edges:
        by_pair[(min(e.u, e.v), max(e.u, e.v))] = e
    served: dict[tuple[int, int], int] = {}
    total = 0
    for t, trip in enumerate(sol.trips):
        if not trip:
            errors.append(f"trip {t}: empty")
            continue
        if trip[0][0] != inst.depot or trip[-1][1] != inst.depot:
            errors.append(f"trip {t}: does not start and end at depot {inst.depot}")
        load = 0
        prev = trip[0][0]
        for u, v, serviced in trip:
            if u != prev:
                errors.append(f"trip {t}: walk broken at ({u},{v})")
            prev = v
            key = (min(u, v), max(u, v))
            e = by_pair.get(key)
            if e is None:
                errors.append(f"trip {t}: ({u},{v}) is not an edge")
                continue
            total += e.cost
            if serviced:
                if not e.required:
                    errors.append(f"trip {t}: services non-required edge ({u},{v})")
                served[key] = served.get(key, 0) + 1
                load += e.demand
        if load > inst.capacity:
            errors.append(f"trip {t}: load {load} exceeds capacity {inst.capacity}")
    for key, e in by_pair.items():
        if e.required and served.get(key, 0) != 1:
            errors.append(f"required edge {key} serviced {served.get(key, 0)} times")
    if total != sol.total_cost:
        errors.append(f"declared cost {sol.total_cost} != recomputed {total}")
    return errors


def iter_instance_files(directory: str | Path, patterns: Iterable[str] = ("*.dat", "*.txt")):
    directory = Path(directory)
    found = set()
    for pat in patterns:
        found.update(directory.glob(pat))
    return sorted(found)
