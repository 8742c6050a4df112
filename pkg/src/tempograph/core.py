"""Temporal graphs, SIR infection runs and delta-edge connectivity."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

SIMPLE = "simple"
MULTILABEL = "multilabel"
MULTIEDGE = "multiedge"
MODES = (SIMPLE, MULTILABEL, MULTIEDGE)

LOWEST = "lowest"
HIGHEST = "highest"


class Edge(NamedTuple):
    u: int
    v: int
    label: int


class Infection(NamedTuple):
    """One log entry. Seeds have ``infector == infectee``."""

    infector: int
    infectee: int
    time: int

    @property
    def is_seed(self) -> bool:
        return self.infector == self.infectee


def pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class TemporalGraph:
    """Nodes ``0..n-1`` plus labelled edge instances.

    Edge instances are stored normalised (``u <= v``) and sorted, so two
    graphs with the same instances compare equal regardless of input order.
    """

    n: int
    edges: tuple[Edge, ...]
    tmax: int
    mode: str = SIMPLE

    def __post_init__(self):
        norm = sorted(Edge(*pair(int(u), int(v)), int(t)) for u, v, t in self.edges)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def labels(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Pair -> sorted labels on that pair."""
        out: dict[tuple[int, int], list[int]] = defaultdict(list)
        for u, v, t in self.edges:
            out[(u, v)].append(t)
        return {p: tuple(sorted(ts)) for p, ts in out.items()}

    @cached_property
    def neighbors(self) -> dict[int, tuple[int, ...]]:
        nb: dict[int, set[int]] = defaultdict(set)
        for u, v in self.labels:
            nb[u].add(v)
            nb[v].add(u)
        return {x: tuple(sorted(s)) for x, s in nb.items()}

    @cached_property
    def by_label(self) -> dict[int, tuple[tuple[int, int], ...]]:
        out: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for u, v, t in self.edges:
            out[t].append((u, v))
        return {t: tuple(ps) for t, ps in out.items()}

    def has_instance(self, u: int, v: int, t: int) -> bool:
        return t in self.labels.get(pair(u, v), ())

    def static_pairs(self) -> dict[tuple[int, int], int]:
        """Pair -> number of instances on it."""
        return {p: len(ts) for p, ts in self.labels.items()}

    def with_edges(self, edges: Iterable[Sequence[int]]) -> "TemporalGraph":
        return TemporalGraph(self.n, tuple(Edge(*e) for e in edges), self.tmax, self.mode)


@dataclass(frozen=True)
class SirParams:
    delta: int = 1
    k: int = 1

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.k < 1:
            raise ValueError("k must be at least 1")


def _delta(params) -> int:
    return params.delta if isinstance(params, SirParams) else int(params)


def validate(graph: TemporalGraph) -> str | None:
    """Return ``None`` when the graph is well formed, else the first problem found."""
    if graph.mode not in MODES:
        return f"unknown mode {graph.mode!r}"
    if graph.n < 0:
        return "negative node count"
    if graph.tmax < 1:
        return "tmax must be positive"
    seen_pairs = set()
    seen = set()
    for u, v, t in graph.edges:
        if u == v:
            return f"self-loop at node {u}"
        if not (0 <= u < graph.n and 0 <= v < graph.n):
            return f"edge ({u},{v}) has a node outside 0..{graph.n - 1}"
        if t < 1:
            return f"label {t} below 1"
        if t > graph.tmax:
            return f"label {t} exceeds tmax"
        if graph.mode == SIMPLE and (u, v) in seen_pairs:
            return f"duplicate pair ({u},{v}) in simple mode"
        if (u, v, t) in seen:
            return f"duplicate instance ({u},{v},{t})"
        seen_pairs.add((u, v))
        seen.add((u, v, t))
    return None


def simulate(graph: TemporalGraph, seeds: Iterable[tuple[int, int]], params=1,
             tie_break: str = LOWEST) -> list[Infection]:
    """Run the SIR process and return the infection log.

    A node infected at ``t`` is infectious during ``[t+1, t+delta]``.
    Seeds at time ``t`` are applied before edge infections at ``t``; a
    seed on a node that is already infected is dropped from the log.
    """
    delta = _delta(params)
    if tie_break not in (LOWEST, HIGHEST):
        raise ValueError(f"unknown tie-break policy {tie_break!r}")
    by_time: dict[int, list[int]] = defaultdict(list)
    for v, t in set(seeds):
        if not 0 <= t <= graph.tmax:
            raise ValueError(f"seed time {t} outside [0, {graph.tmax}]")
        if not 0 <= v < graph.n:
            raise ValueError(f"seed node {v} outside 0..{graph.n - 1}")
        by_time[t].append(v)
    if not by_time:
        return []

    infected: dict[int, int] = {}
    log: list[Infection] = []
    start = min(by_time)
    steps = sorted(set(by_time) | {t for t in graph.by_label if t > start})
    for t in steps:
        for v in sorted(by_time.get(t, ())):
            if v not in infected:
                infected[v] = t
                log.append(Infection(v, v, t))
        chosen: dict[int, int] = {}
        for u, v in graph.by_label.get(t, ()):
            for a, b in ((u, v), (v, u)):
                ta = infected.get(a)
                if ta is None or b in infected or not ta < t <= ta + delta:
                    continue
                cur = chosen.get(b)
                if cur is None or (a < cur if tie_break == LOWEST else a > cur):
                    chosen[b] = a
        for b in sorted(chosen):
            infected[b] = t
            log.append(Infection(chosen[b], b, t))
    return log


def project_timetable(log: Iterable[Sequence[int]]) -> dict[int, int]:
    return {entry[1]: entry[2] for entry in log}


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class DeltaComponents:
    """Component id per edge instance, aligned with ``graph.edges``."""

    assignment: tuple[int, ...]
    count: int
    edges: tuple[Edge, ...] = field(default=(), repr=False)

    def of(self, edge: Sequence[int]) -> int:
        return self.assignment[self.edges.index(Edge(*pair(edge[0], edge[1]), edge[2]))]

    def groups(self) -> list[list[Edge]]:
        out: list[list[Edge]] = [[] for _ in range(self.count)]
        for e, c in zip(self.edges, self.assignment):
            out[c].append(e)
        return out

    def sizes(self) -> list[int]:
        out = [0] * self.count
        for c in self.assignment:
            out[c] += 1
        return out


def delta_edge_components(graph: TemporalGraph, delta) -> DeltaComponents:
    """Partition edge instances into delta-edge connected components.

    At each node, sorting the incident instances by label and linking
    neighbours in that order whose labels differ by at most ``delta``
    yields the same closure as linking every qualifying pair.
    """
    delta = _delta(delta)
    uf = UnionFind(graph.m)
    incident: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for i, (u, v, t) in enumerate(graph.edges):
        incident[u].append((t, i))
        incident[v].append((t, i))
    for items in incident.values():
        items.sort()
        for (t1, i1), (t2, i2) in zip(items, items[1:]):
            if t2 - t1 <= delta:
                uf.union(i1, i2)
    ids: dict[int, int] = {}
    assignment = []
    for i in range(graph.m):
        assignment.append(ids.setdefault(uf.find(i), len(ids)))
    return DeltaComponents(tuple(assignment), len(ids), graph.edges)


def is_temporal_path(graph: TemporalGraph, nodes: Sequence[int]) -> bool:
    """True iff ``nodes`` is a walk whose labels can be chosen strictly increasing."""
    last = 0
    for a, b in zip(nodes, nodes[1:]):
        later = [t for t in graph.labels.get(pair(a, b), ()) if t > last]
        if not later:
            return False
        last = later[0]
    return True


def find_ideal_patient_zero(graph: TemporalGraph, params=1) -> tuple[int, int] | None:
    """First ``(v, t)`` in lexicographic order whose single seed infects every node."""
    for v in range(graph.n):
        for t in range(graph.tmax + 1):
            if len(simulate(graph, [(v, t)], params)) == graph.n:
                return (v, t)
    return None


def check_consistency(graph: TemporalGraph, seeds: Iterable[tuple[int, int]],
                      log: Iterable[Sequence[int]], params=1) -> bool:
    """True iff ``log`` could be produced by ``graph`` under some tie-break."""
    delta = _delta(params)
    seeds = set(seeds)
    log = [Infection(*e) for e in log]
    times = project_timetable(log)
    if len(times) != len(log):
        return False
    if times != project_timetable(simulate(graph, seeds, delta)):
        return False
    for a, b, t in log:
        if a == b:
            if (a, t) not in seeds:
                return False
            continue
        if not graph.has_instance(a, b, t):
            return False
        ta = times.get(a)
        if ta is None or not ta < t <= ta + delta:
            return False
    return True
