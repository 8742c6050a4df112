"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import random

from tempograph.core import Edge, TemporalGraph


def naive_timetable(graph: TemporalGraph, seeds, delta: int) -> dict[int, int]:
    """Step through every time step and node; no event queues, no label index."""
    seeds = set(seeds)
    times: dict[int, int] = {}
    instances = {(min(u, v), max(u, v), t) for u, v, t in graph.edges}
    if not seeds:
        return times
    for t in range(0, graph.tmax + 1):
        for v, ts in sorted(seeds):
            if ts == t and v not in times:
                times[v] = t
        newly = []
        for b in range(graph.n):
            if b in times:
                continue
            for a, ta in list(times.items()):
                if ta < t <= ta + delta and (min(a, b), max(a, b), t) in instances:
                    newly.append(b)
                    break
        for b in newly:
            times[b] = t
    return times


def valid_infectors(graph: TemporalGraph, times: dict[int, int], delta: int, b: int) -> set[int]:
    tb = times[b]
    out = set()
    for u, v, t in graph.edges:
        if t != tb or b not in (u, v):
            continue
        a = v if u == b else u
        if a in times and times[a] < tb <= times[a] + delta:
            out.add(a)
    return out


def closure_partition(graph: TemporalGraph, delta: int) -> set[frozenset[int]]:
    """All-pairs link matrix closed under Warshall's algorithm (rows as bitsets)."""
    m = graph.m
    edges = graph.edges
    rows = [1 << i for i in range(m)]
    for i in range(m):
        for j in range(m):
            a, b = edges[i], edges[j]
            if {a.u, a.v} & {b.u, b.v} and abs(a.label - b.label) <= delta:
                rows[i] |= 1 << j
    for k in range(m):
        bit = 1 << k
        for i in range(m):
            if rows[i] & bit:
                rows[i] |= rows[k]
    return {frozenset(j for j in range(m) if rows[i] >> j & 1) for i in range(m)}


def partition_of(assignment) -> set[frozenset[int]]:
    groups: dict[int, set[int]] = {}
    for i, c in enumerate(assignment):
        groups.setdefault(c, set()).add(i)
    return {frozenset(g) for g in groups.values()}


def brute_patient_zero(graph: TemporalGraph, delta: int):
    for v in range(graph.n):
        for t in range(graph.tmax + 1):
            if len(naive_timetable(graph, [(v, t)], delta)) == graph.n:
                return (v, t)
    return None


def log_explained(graph, seeds, log, delta) -> bool:
    times = {b: t for _, b, t in log}
    if len(times) != len(log) or times != naive_timetable(graph, seeds, delta):
        return False
    for a, b, t in log:
        if a == b:
            if (a, t) not in set(seeds):
                return False
        elif a not in valid_infectors(graph, times, delta, b):
            return False
    return True


def labelings(pairs, tmax):
    """Every simple labelling of a fixed static pair list."""
    for labels in itertools.product(range(1, tmax + 1), repeat=len(pairs)):
        yield [Edge(u, v, t) for (u, v), t in zip(pairs, labels)]


def count_consistent(n, tmax, delta, pairs, rounds, times_only=False) -> int:
    hits = 0
    for edges in labelings(pairs, tmax):
        g = TemporalGraph(n, tuple(edges), tmax)
        ok = True
        for seeds, fb in rounds:
            if times_only:
                ok = naive_timetable(g, seeds, delta) == dict(fb)
            else:
                ok = log_explained(g, seeds, fb, delta)
            if not ok:
                break
        hits += ok
    return hits


def random_simple_graph(rng: random.Random, n: int, m: int, tmax: int) -> TemporalGraph:
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = rng.sample(pairs, min(m, len(pairs)))
    return TemporalGraph(n, tuple(Edge(u, v, rng.randint(1, tmax)) for u, v in chosen), tmax)


def random_multi_graph(rng: random.Random, n: int, m: int, tmax: int, mode: str) -> TemporalGraph:
    inst = set()
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        inst.add((min(u, v), max(u, v), rng.randint(1, tmax)))
    return TemporalGraph(n, tuple(Edge(*e) for e in inst), tmax, mode)


def witness_labels(x: int) -> dict[tuple, int]:
    """The eight label rules written out with 1-based names, as symbolic keys.

    Paths on ``R``: path ``q`` walks the circle ``q, q+1, q-1, q+2, ...`` of
    ``2x`` slots, slot ``s < x`` holding ``r_{2(s+1)}`` and slot ``s >= x``
    holding ``r_{2(s-x)+1}``. ``l``-``r`` labels use twice the path position.
    """
    d = 4 * x + 1
    size = 2 * x

    def slot_to_r(s):
        return 2 * (s + 1) if s < x else 2 * (s - x) + 1

    paths = []
    for q in range(x):
        seq, step = [q], 1
        while len(seq) < size:
            seq.append((q + step) % size)
            if len(seq) < size:
                seq.append((q - step) % size)
            step += 1
        paths.append([slot_to_r(s) for s in seq])
    lab = {}
    for i in range(1, x + 1):
        p = paths[i - 1]
        for pos, r in enumerate(p):
            if r % 2 == 0:
                lab[("l", i, "r", r)] = (i - 1) * d + 2 * pos + 1
            lab[("b", i, "r", r)] = (i - 1) * d + 2 * pos + 2
        for pos in range(size - 1):
            a, b = sorted((p[pos], p[pos + 1]))
            lab[("r", a, "r", b)] = (i - 1) * d + 2 * pos + 1
        for j in range(i + 1, x + 1):
            lab[("b", i, "b", j)] = i * d - 2
        lab[("b", i, "c", i)] = i * d - 1
        for j in range(1, i):
            lab[("b", i, "c", j)] = i * d - 2
        for r in range(1, size + 1):
            lab[("c", i, "r", r)] = i * d
        for j in range(1, x + 1):
            lab[("l", i, "b", j)] = j * d
    return lab
