"""Random and structured temporal graphs, including the lower-bound families."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx

from .core import SIMPLE, Edge, TemporalGraph, pair, simulate

CONSTANT = "constant"
INCREASING = "increasing"
UNIFORM = "uniform"


@dataclass(frozen=True)
class ErtParams:
    n: int
    p: float
    tmax: int
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.tmax < 1 or self.n < 0:
            raise ValueError("need n >= 0 and tmax >= 1")


def gen_ert(params: ErtParams) -> TemporalGraph:
    """Erdos-Renyi static edges, each with one uniform label in ``[1, tmax]``."""
    rng = random.Random(params.rng_seed)
    edges = []
    for u in range(params.n):
        for v in range(u + 1, params.n):
            if rng.random() < params.p:
                edges.append(Edge(u, v, rng.randint(1, params.tmax)))
    return TemporalGraph(params.n, tuple(edges), params.tmax)


def _rng(rng) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def _label(pairs, labeling: str, tmax: int | None, rng) -> tuple:
    m = len(pairs)
    if tmax is None:
        tmax = max(1, m) if labeling != CONSTANT else 1
    if labeling == CONSTANT:
        labels = [1] * m
    elif labeling == INCREASING:
        if m > tmax:
            raise ValueError("increasing labels need tmax >= number of edges")
        labels = list(range(1, m + 1))
    elif labeling == UNIFORM:
        r = _rng(rng)
        labels = [r.randint(1, tmax) for _ in range(m)]
    else:
        raise ValueError(f"unknown labeling {labeling!r}")
    return tuple(Edge(u, v, t) for (u, v), t in zip(pairs, labels)), tmax


def _shape(n: int, pairs, labeling, tmax, rng) -> TemporalGraph:
    if n < 1:
        raise ValueError("n must be at least 1")
    edges, tmax = _label(pairs, labeling, tmax, rng)
    return TemporalGraph(n, edges, tmax)


def gen_path(n: int, labeling: str = INCREASING, tmax: int | None = None, rng=None) -> TemporalGraph:
    return _shape(n, [(i, i + 1) for i in range(n - 1)], labeling, tmax, rng)


def gen_star(n: int, labeling: str = INCREASING, tmax: int | None = None, rng=None) -> TemporalGraph:
    return _shape(n, [(0, i) for i in range(1, n)], labeling, tmax, rng)


def gen_complete(n: int, labeling: str = INCREASING, tmax: int | None = None, rng=None) -> TemporalGraph:
    return _shape(n, [(u, v) for u in range(n) for v in range(u + 1, n)], labeling, tmax, rng)


def random_tree_pairs(n: int, rng) -> list[tuple[int, int]]:
    """Uniform labelled tree via a random Pruefer sequence."""
    r = _rng(rng)
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    tree = nx.from_prufer_sequence([r.randrange(n) for _ in range(n - 2)])
    return sorted(pair(u, v) for u, v in tree.edges())


def gen_random_tree(n: int, labeling: str = UNIFORM, tmax: int | None = None, rng=None) -> TemporalGraph:
    r = _rng(rng)
    return _shape(n, random_tree_pairs(n, r), labeling, tmax, r)


# ------------------------------------------------------ source detection


class SourceInstance(NamedTuple):
    graph: TemporalGraph
    source: int
    t0: int
    delta: int
    schedule: tuple[int, ...] = ()


def build_source_path_lb(n: int, s: int) -> SourceInstance:
    """Path ``1..n`` (node ids shifted to ``0..n-1``) with labels rising away from ``s``.

    Edge ``(i, i+1)`` gets label ``n - i`` left of ``s`` and ``i`` from ``s`` on,
    so a seed at ``s`` at time 0 with ``delta = n`` reaches every node.
    """
    if not 1 <= s <= n:
        raise ValueError("need 1 <= s <= n")
    edges = [Edge(i - 1, i, n - i if i < s else i) for i in range(1, n)]
    return SourceInstance(TemporalGraph(n, tuple(edges), max(1, n)), s - 1, 0, n)


def bfs_depths(n: int, pairs, source: int) -> dict[int, int]:
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    return dict(nx.single_source_shortest_path_length(g, source))


def spreading_instance(n: int, pairs, source: int, spacing: int = 1) -> SourceInstance:
    """Label edges by BFS layer so one seed at ``source`` reaches its whole component.

    An edge gets ``spacing * (d + 1)`` where ``d`` is the smaller depth of its
    ends, and ``delta = spacing``; any start time in ``[0, spacing - 1]``
    still infects every reachable node along the same BFS tree.
    """
    depth = bfs_depths(n, pairs, source)
    edges = []
    for u, v in pairs:
        if u in depth and v in depth:
            edges.append(Edge(*pair(u, v), spacing * (min(depth[u], depth[v]) + 1)))
    tmax = max([spacing] + [e.label for e in edges])
    g = TemporalGraph(n, tuple(edges), tmax)
    return SourceInstance(g, source, 0, spacing, tuple(range(spacing)))


def connected_ert_pairs(n: int, p: float, rng) -> list[tuple[int, int]]:
    """Erdos-Renyi pairs joined with a random spanning tree so the result is connected."""
    r = _rng(rng)
    pairs = set(random_tree_pairs(n, r))
    for u in range(n):
        for v in range(u + 1, n):
            if r.random() < p:
                pairs.add((u, v))
    return sorted(pairs)


def zigzag_paths(size: int) -> list[list[int]]:
    """``size/2`` edge-disjoint Hamiltonian paths covering ``K_size`` (``size`` even)."""
    if size % 2:
        raise ValueError("size must be even")
    half = size // 2
    paths = []
    for i in range(half):
        seq = [i]
        for j in range(1, half):
            seq += [(i + j) % size, (i - j) % size]
        seq.append((i + half) % size)
        paths.append(seq)
    return paths


def walecki_cycles(n: int, hub: int | None = None) -> list[list[int]]:
    """``(n-1)/2`` edge-disjoint Hamiltonian cycles of ``K_n`` for odd ``n``.

    Each cycle is listed from the hub and returns to it implicitly.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("n must be odd and at least 3")
    hub = n - 1 if hub is None else hub
    others = [v for v in range(n) if v != hub]
    return [[hub] + [others[i] for i in path] for path in zigzag_paths(n - 1)]


def build_hamiltonian_lb(n: int, rng=None) -> SourceInstance:
    """Complete graph whose labels make round ``i`` run along Hamiltonian path ``i``.

    Edge ``e`` on path ``p`` (0-based, after shuffling) at position ``q``
    gets label ``p*n + q``; the edge closing the cycle back to the source
    gets ``q = n``. With ``delta = 1`` a seed at ``p*n`` follows path ``p``.
    """
    r = _rng(rng)
    perm = list(range(n))
    r.shuffle(perm)
    cycles = [[perm[v] for v in c] for c in walecki_cycles(n)]
    r.shuffle(cycles)
    edges = []
    for p, cyc in enumerate(cycles):
        for q in range(1, n):
            edges.append(Edge(*pair(cyc[q - 1], cyc[q]), p * n + q))
        edges.append(Edge(*pair(cyc[-1], cyc[0]), p * n + n))
    count = len(cycles)
    g = TemporalGraph(n, tuple(edges), count * n)
    return SourceInstance(g, cycles[0][0], 0, 1, tuple(p * n for p in range(count)))


# ------------------------------------------------------ graph discovery


def build_hub_family(n: int, tmax: int) -> tuple[TemporalGraph, list[tuple[int, int]]]:
    """Fixed hub edges plus the list of path pairs whose labels stay open.

    Nodes ``0..n-3`` form the path, ``n-2`` links to every path node at
    ``tmax-2``, ``n-2``/``n-1`` share ``tmax-1`` and ``n-1`` links to every
    path node at ``tmax``.
    """
    if n < 4 or n % 2 or tmax < 4:
        raise ValueError("need even n >= 4 and tmax >= 4")
    path = list(range(n - 2))
    a, b = n - 2, n - 1
    fixed = [Edge(v, a, tmax - 2) for v in path]
    fixed.append(Edge(a, b, tmax - 1))
    fixed += [Edge(v, b, tmax) for v in path]
    path_pairs = [(i, i + 1) for i in range(n - 3)]
    return TemporalGraph(n, tuple(fixed), tmax), path_pairs


def hub_relevant_pairs(n: int) -> list[tuple[int, int]]:
    """Every other path pair, so that no node touches two of them."""
    return [(i, i + 1) for i in range(0, n - 3, 2)]


class WitnessFamily(NamedTuple):
    graph: TemporalGraph
    delta: int
    L: tuple[int, ...]
    R: tuple[int, ...]
    B: tuple[int, ...]
    C: tuple[int, ...]
    lr_pairs: frozenset

    def phase(self, label: int) -> int:
        return (label - 1) // self.delta


RANK = "rank"
POSITION = "position"
WAVE = "wave"
READINGS = (RANK, POSITION, WAVE)


def witness_hard_labels(x: int, reading: str = WAVE) -> dict[tuple[str, int, str, int], int]:
    """Labels keyed by symbolic endpoints, e.g. ``('l', i, 'r', k)``.

    Indices ``i, j, q`` are 0-based; ``r`` nodes keep their 1-based index so
    that the even ones form ``R_2``. ``reading`` picks the offset of an
    ``l``-``r`` label: ``4 * rank`` among the even nodes of the path,
    ``4 * position`` on the path, or ``2 * position`` (``wave``), which puts
    it one step before the path infection reaches that node.
    """
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}")
    d = 4 * x + 1
    paths = [[_r_index(pos, x) for pos in p] for p in zigzag_paths(2 * x)]
    lab: dict = {}
    for i in range(x):
        evens = [r for r in paths[i] if r % 2 == 0]
        for j, r in enumerate(evens):
            pos = paths[i].index(r)
            off = {RANK: 4 * j, POSITION: 4 * pos, WAVE: 2 * pos}[reading]
            lab[("l", i, "r", r)] = i * d + off + 1
    for q in range(x):
        p = paths[q]
        for j in range(len(p) - 1):
            a, b = sorted((p[j], p[j + 1]))
            lab[("r", a, "r", b)] = q * d + 2 * j + 1
    for i in range(x):
        for j, r in enumerate(paths[i]):
            lab[("b", i, "r", r)] = i * d + 2 * j + 2
        for j in range(i + 1, x):
            lab[("b", i, "b", j)] = (i + 1) * d - 2
        lab[("b", i, "c", i)] = (i + 1) * d - 1
        for j in range(i):
            lab[("b", i, "c", j)] = (i + 1) * d - 2
        for r in range(1, 2 * x + 1):
            lab[("c", i, "r", r)] = (i + 1) * d
        for j in range(x):
            lab[("l", i, "b", j)] = (j + 1) * d
    return lab


def _r_index(pos: int, x: int) -> int:
    """Circle position on ``R`` to the 1-based ``r`` index; path starts land on even indices."""
    return 2 * (pos + 1) if pos < x else 2 * (pos - x) + 1


def build_witness_hard_family(x: int, reading: str = WAVE) -> WitnessFamily:
    """The ``5x``-node family where every ``L x R_2`` label needs its own round."""
    if x < 2:
        raise ValueError("x must be at least 2")
    d = 4 * x + 1
    L = tuple(range(x))
    R = tuple(range(x, 3 * x))
    B = tuple(range(3 * x, 4 * x))
    C = tuple(range(4 * x, 5 * x))
    base = {"l": lambda i: L[i], "r": lambda k: R[k - 1], "b": lambda i: B[i], "c": lambda i: C[i]}
    edges = []
    lr = set()
    for (ka, ia, kb, ib), t in witness_hard_labels(x, reading).items():
        u, v = base[ka](ia), base[kb](ib)
        edges.append(Edge(*pair(u, v), t))
        if ka == "l" and kb == "r":
            lr.add(pair(u, v))
    tmax = max(x * d, max(e.label for e in edges))
    g = TemporalGraph(5 * x, tuple(edges), tmax, SIMPLE)
    return WitnessFamily(g, d, L, R, B, C, frozenset(lr))


def phases_with_lr_success(fam: WitnessFamily, seeds) -> set[int]:
    """Phases in which a single round infects across an ``L x R_2`` edge."""
    log = simulate(fam.graph, seeds, fam.delta)
    return {fam.phase(t) for a, b, t in log if a != b and pair(a, b) in fam.lr_pairs}
