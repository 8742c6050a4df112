"""The graph discovery game: engine, discoverers, adversaries and witnesses.

Discoverers are generator functions. Each one receives a :class:`GameView`,
yields ``(seeds, phase)`` requests, receives the round's feedback, and
finally returns its claim (a graph, or a patient-zero pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Generator

from .core import (
    SIMPLE, MULTILABEL, Edge, Infection, SirParams, TemporalGraph,
    check_consistency, delta_edge_components, find_ideal_patient_zero, pair,
    project_timetable, simulate,
)
from .generators import build_hub_family
from .knowledge import FULL_LOG, TIMES_ONLY, LabelKnowledge, consistent_graphs

KNOWN_STATIC = "known_static"
NODES_ONLY = "nodes_only"

COMPONENT_DISCOVERY = "component_discovery"
COMPONENT_EXPLORATION = "component_exploration"
OTHER = "other"

GRAPH = "graph"
PATIENT_ZERO = "patient_zero"

DISCOVERER = "discoverer"
ADVERSARY = "adversary"


class AdversaryError(Exception):
    """An adversary produced feedback its own final graph cannot explain."""


@dataclass(frozen=True)
class DiscoveryConfig:
    params: SirParams = SirParams()
    feedback: str = FULL_LOG
    knowledge: str = KNOWN_STATIC
    edge_mode: str = SIMPLE
    objective: str = GRAPH
    round_cap: int | None = None
    exhaustive_check: bool = True


@dataclass(frozen=True)
class GameView:
    """What the discoverer is told before the first round."""

    n: int
    tmax: int
    params: SirParams
    feedback: str
    knowledge: str
    edge_mode: str
    static: dict | None

    @property
    def delta(self) -> int:
        return self.params.delta

    def new_knowledge(self) -> LabelKnowledge:
        return LabelKnowledge(self.n, self.tmax, self.delta, self.static, self.edge_mode)


@dataclass
class Round:
    seeds: tuple
    feedback: object
    phase: str
    log: list
    phi: int


@dataclass
class DiscoveryTranscript:
    view: GameView
    rounds: list[Round] = field(default_factory=list)
    claim: object = None
    winner: str | None = None
    reason: str = ""
    final_graph: TemporalGraph | None = None
    exhaustive: bool | None = None

    def __len__(self):
        return len(self.rounds)

    def count(self, phase: str) -> int:
        return sum(r.phase == phase for r in self.rounds)

    def to_text(self) -> str:
        lines = []
        for i, r in enumerate(self.rounds, 1):
            seeds = " ".join(f"({v},{t})" for v, t in r.seeds)
            if self.view.feedback == FULL_LOG:
                fb = " ".join(f"({a},{b},{t})" for a, b, t in r.feedback)
            else:
                fb = " ".join(f"{v}@{t}" for v, t in sorted(r.feedback.items()))
            lines.append(f"ROUND {i} SEEDS {seeds} FEEDBACK {fb} PHASE {r.phase}".rstrip())
        if isinstance(self.claim, TemporalGraph):
            edges = " ".join(f"({u},{v},{t})" for u, v, t in self.claim.edges)
            lines.append(f"CLAIM graph n={self.claim.n} tmax={self.claim.tmax} "
                         f"mode={self.claim.mode} edges {edges}".rstrip())
        else:
            lines.append(f"CLAIM {self.claim}")
        lines.append(f"VERDICT {self.winner} rounds={len(self.rounds)} {self.reason}".rstrip())
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------- adversaries

class Adversary:
    n: int
    tmax: int
    mode: str = SIMPLE

    def static_pairs(self) -> dict:
        raise NotImplementedError

    def respond(self, seeds) -> list[Infection]:
        raise NotImplementedError

    def finalize(self) -> TemporalGraph:
        raise NotImplementedError


class HonestAdversary(Adversary):
    def __init__(self, graph: TemporalGraph, params: SirParams, tie_break: str = "lowest"):
        self.graph = graph
        self.n, self.tmax, self.mode = graph.n, graph.tmax, graph.mode
        self.delta = params.delta
        self.tie_break = tie_break

    def static_pairs(self):
        counts = self.graph.static_pairs()
        if self.mode == MULTILABEL:
            return {p: None for p in counts}
        return counts

    def respond(self, seeds):
        return simulate(self.graph, seeds, self.delta, self.tie_break)

    def finalize(self):
        return self.graph


def honest_adversary(graph: TemporalGraph, params: SirParams = SirParams(),
                     tie_break: str = "lowest") -> HonestAdversary:
    return HonestAdversary(graph, params, tie_break)


def _attempts(log, delta: int, tmax: int, pool: dict[int, list[int]]) -> dict:
    """Labels at which each pool pair saw an infectious end next to a susceptible end."""
    times = project_timetable(log)
    out: dict[tuple[int, int], set[int]] = {}
    for a, ta in times.items():
        for b in pool.get(a, ()):
            tb = times.get(b)
            for t in range(ta + 1, min(ta + delta, tmax) + 1):
                if tb is None or tb > t:
                    out.setdefault(pair(a, b), set()).add(t)
    return out


def _pool(pairs) -> dict[int, list[int]]:
    pool: dict[int, list[int]] = {}
    for u, v in pairs:
        pool.setdefault(u, []).append(v)
        pool.setdefault(v, []).append(u)
    return pool


class HubPathAdversary(Adversary):
    """Hub labels are fixed; each path edge keeps failing until it would run out of labels."""

    def __init__(self, n: int, tmax: int, params: SirParams):
        fixed, path_pairs = build_hub_family(n, tmax)
        self.n, self.tmax = n, tmax
        self.delta = params.delta
        self.fixed = list(fixed.edges)
        self.path_pairs = path_pairs
        self.candidates = {p: set(range(1, tmax + 1)) for p in path_pairs}
        self.committed: dict[tuple[int, int], int] = {}

    def static_pairs(self):
        pairs = {(u, v): 1 for u, v, _ in self.fixed}
        pairs.update({p: 1 for p in self.path_pairs})
        return pairs

    def _graph(self, extra=()):
        edges = self.fixed + [Edge(*p, t) for p, t in self.committed.items()] + list(extra)
        return TemporalGraph(self.n, tuple(edges), self.tmax)

    def respond(self, seeds):
        while True:
            log = simulate(self._graph(), seeds, self.delta)
            open_pairs = [p for p in self.path_pairs if p not in self.committed]
            att = _attempts(log, self.delta, self.tmax, _pool(open_pairs))
            forced = [p for p in open_pairs if self.candidates[p] <= att.get(p, set())]
            if not forced:
                break
            p = forced[0]
            self.committed[p] = min(self.candidates[p])
            self.candidates[p] = {self.committed[p]}
        for p, ts in att.items():
            self.candidates[p] -= ts
        return log

    def finalize(self):
        rest = [Edge(*p, min(self.candidates[p])) for p in self.path_pairs if p not in self.committed]
        return self._graph(rest)


def hub_path_adversary(n: int, tmax: int, params: SirParams = SirParams()) -> HubPathAdversary:
    return HubPathAdversary(n, tmax, params)


class FloatingEdgeAdversary(Adversary):
    """Fixed edges answered honestly plus one withheld ``(pair, label)`` instance.

    Attempts on other candidates fail while at least one untested candidate
    remains; the last one standing becomes part of the graph.
    """

    def __init__(self, n, tmax, params, fixed_edges, open_pairs, labels, mode, static):
        self.n, self.tmax, self.mode = n, tmax, mode
        self.delta = params.delta
        self.fixed = [Edge(*e) for e in fixed_edges]
        self.open = {(p, t) for p in open_pairs for t in labels}
        self.pool = _pool(open_pairs)
        self.committed: tuple | None = None
        self._static = static

    def static_pairs(self):
        return self._static

    def _graph(self, extra=None):
        edges = list(self.fixed)
        if extra is not None:
            edges.append(Edge(*extra[0], extra[1]))
        return TemporalGraph(self.n, tuple(edges), self.tmax, self.mode)

    def respond(self, seeds):
        log = simulate(self._graph(self.committed), seeds, self.delta)
        if self.committed is not None:
            return log
        att = _attempts(log, self.delta, self.tmax, self.pool)
        hit = {(p, t) for (p, t) in self.open if t in att.get(p, ())}
        if self.open - hit:
            self.open -= hit
            return log
        self.committed = min(hit)
        return simulate(self._graph(self.committed), seeds, self.delta)

    def finalize(self):
        return self._graph(self.committed if self.committed is not None else min(self.open))


def _greedy_connected(n: int, count: int, max_deg: int) -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    adj = {v: set() for v in range(n)}
    order = [0]
    i = 0
    while len(edges) < count and i < len(order):
        v = order[i]
        for w in range(n):
            if len(edges) == count or len(adj[v]) >= max_deg:
                break
            if w == v or w in adj[v] or len(adj[w]) >= max_deg:
                continue
            adj[v].add(w)
            adj[w].add(v)
            edges.append(pair(v, w))
            if w not in order:
                order.append(w)
        i += 1
    if len(edges) < count:
        raise ValueError("cannot place that many edges under the degree cap")
    return edges


def unknown_graph_adversary(n: int, m: int, tmax: int,
                            params: SirParams = SirParams()) -> FloatingEdgeAdversary:
    """Adversary for the game where only the node set is public."""
    if not 1 <= m <= n * (n - 1) // 2 - n:
        raise ValueError("need 1 <= m <= C(n,2) - n")
    fixed = _greedy_connected(n, m - 1, n - 2)
    taken = set(fixed)
    open_pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in taken]
    return FloatingEdgeAdversary(n, tmax, params, [(u, v, 1) for u, v in fixed], open_pairs,
                                 range(1, tmax + 1), SIMPLE, None)


def low_degree_edges(n: int, m: int) -> list[tuple[int, int]]:
    """Grow edges from the endpoint of least positive degree to the least-used node."""
    if m == 0:
        return []
    deg = [0] * n
    adj = {v: set() for v in range(n)}
    edges = [(0, 1)]
    deg[0] = deg[1] = 1
    adj[0].add(1)
    adj[1].add(0)
    while len(edges) < m:
        done = False
        for u in sorted((v for v in range(n) if deg[v] > 0), key=lambda v: (deg[v], v)):
            targets = [w for w in range(n) if w != u and w not in adj[u]]
            if targets:
                w = min(targets, key=lambda x: (deg[x], x))
                edges.append(pair(u, w))
                adj[u].add(w)
                adj[w].add(u)
                deg[u] += 1
                deg[w] += 1
                done = True
                break
        if not done:
            raise ValueError("too many edges for n")
    return edges


def multilabel_adversary(n: int, m: int, tmax: int,
                         params: SirParams = SirParams()) -> FloatingEdgeAdversary:
    """Every static edge carries label 1; one extra label on some edge is withheld."""
    if not 1 <= m <= n * (n - 1) // 2 - n or tmax < 2:
        raise ValueError("need 1 <= m <= C(n,2) - n and tmax >= 2")
    edges = low_degree_edges(n, m)
    return FloatingEdgeAdversary(n, tmax, params, [(u, v, 1) for u, v in edges], edges,
                                 range(2, tmax + 1), MULTILABEL, {p: None for p in edges})


# -------------------------------------------------------------- discoverers

def brute_force_discoverer() -> Callable:
    """Seed every ``(v, t)`` with ``t`` in ``0..tmax-1``, batching ``k`` distinct nodes per round.

    Only ``k = 1`` is guaranteed to pin every label: two seeds sharing a round
    can infect both ends of a pair before its label comes up.
    """
    def strategy(view: GameView):
        know = view.new_knowledge()
        items = [(v, t) for t in range(view.tmax) for v in range(view.n)]
        size = max(1, min(view.params.k, view.n))
        for i in range(0, len(items), size):
            batch = items[i:i + size]
            fb = yield batch, OTHER
            know.observe(batch, fb, view.feedback)
        return know.claim(view.edge_mode)
    return strategy


class _Follower:
    """Seed bookkeeping shared by the patient-zero and discovery variants."""

    def __init__(self, view: GameView, skip_redundant: bool = False):
        self.view = view
        self.know = view.new_knowledge()
        self.done: set[tuple[int, int]] = set()
        self.explored: set[tuple[int, int]] = set()
        self.skip_redundant = skip_redundant

    def seed(self, v: int, t: int, phase: str):
        if t < 0 or t > self.view.tmax or (v, t) in self.done:
            return []
        if self.skip_redundant and not self.know.unknown_pairs_at(v):
            return []
        self.done.add((v, t))
        fb = yield [(v, t)], phase
        self.know.observe([(v, t)], fb, self.view.feedback)
        times = project_timetable(fb) if self.view.feedback == FULL_LOG else dict(fb)
        return [(w, tw) for w, tw in times.items() if (w, tw) != (v, t)]

    def explore(self, todo: list[tuple[int, int]]):
        d = self.view.delta
        stack = list(reversed(todo))
        while stack:
            u, t = stack.pop()
            if (u, t) in self.explored:
                continue
            self.explored.add((u, t))
            found = []
            # a seed at 0 still covers [1, t-1] when t - d - 1 is negative
            for tp in (max(0, t - d - 1), t - 1, t):
                found += yield from self.seed(u, tp, COMPONENT_EXPLORATION)
            stack.extend(reversed(found))

    def sweep(self, v0: int):
        d = self.view.delta
        found = []
        for i in range(math.ceil(self.view.tmax / d)):
            found += yield from self.seed(v0, i * d, COMPONENT_DISCOVERY)
        yield from self.explore(found)

    def probe_leftovers(self):
        """Seed one end of every unresolved pair just before each remaining candidate label."""
        before = len(self.done)
        for p in list(self.know.possible):
            if self.know.resolved(p):
                continue
            for t in sorted(self.know.possible[p] - self.know.confirmed[p]):
                if self.know.resolved(p):
                    break
                for end in p:
                    if (end, t - 1) not in self.done:
                        yield from self.seed(end, t - 1, OTHER)
                        break
        return len(self.done) > before


def follow_discoverer(v0: int | None = None) -> Callable:
    """Patient-zero strategy: sweep one node, explore what it reaches, solve offline."""
    def strategy(view: GameView):
        f = _Follower(view)
        if view.n == 0:
            return None
        start = 0 if v0 is None else v0
        yield from f.sweep(start)
        known = f.know.claim(view.edge_mode)
        comps = delta_edge_components(known, view.delta)
        keep = {c for e, c in zip(known.edges, comps.assignment) if start in (e.u, e.v)}
        sub = known.with_edges(e for e, c in zip(known.edges, comps.assignment) if c in keep)
        return find_ideal_patient_zero(sub, view.params)
    return strategy


def discovery_follow(skip_redundant: bool = False) -> Callable:
    """Sweep the lowest node with an unknown incident pair, explore, repeat."""
    def strategy(view: GameView):
        f = _Follower(view, skip_redundant)
        swept: set[int] = set()
        while True:
            todo = [v for v in range(view.n) if f.know.unknown_pairs_at(v)]
            if not todo:
                break
            fresh = [v for v in todo if v not in swept]
            if fresh:
                swept.add(fresh[0])
                yield from f.sweep(fresh[0])
            elif not (yield from f.probe_leftovers()):
                break
        return f.know.claim(view.edge_mode)
    return strategy


# ------------------------------------------------------------------- engine

@dataclass
class Verdict:
    discoverer_wins: bool
    reason: str
    counterexample_round: int | None = None
    exhaustive: bool | None = None


def adjudicate_unique(rounds: list, claim: TemporalGraph, view: GameView,
                      exhaustive: bool = True) -> Verdict:
    """Decide whether ``claim`` is the only graph consistent with ``rounds``.

    ``rounds`` holds :class:`Round` records or ``(seeds, feedback)`` pairs.
    For ``n <= 6`` and ``tmax <= 6`` an enumeration of every candidate graph
    double-checks the label-elimination verdict when the space is small.
    """
    pairs = [(r.seeds, r.feedback) if isinstance(r, Round) else tuple(r) for r in rounds]
    know = view.new_knowledge()
    for seeds, fb in pairs:
        know.observe(seeds, fb, view.feedback)
    enum = None
    if exhaustive and view.n <= 6 and view.tmax <= 6:
        found = consistent_graphs(pairs, view.n, view.tmax, view.delta, view.static,
                                  view.edge_mode, view.feedback)
        if found is not None:
            enum = len(found) == 1 and isinstance(claim, TemporalGraph) and found[0].edges == claim.edges
    if not isinstance(claim, TemporalGraph):
        return Verdict(False, "no graph claimed", exhaustive=enum)
    for i, (seeds, fb) in enumerate(pairs):
        if view.feedback == FULL_LOG:
            ok = check_consistency(claim, seeds, fb, view.delta)
        else:
            ok = project_timetable(simulate(claim, seeds, view.delta)) == dict(fb)
        if not ok:
            return Verdict(False, f"claim contradicts round {i + 1}", i + 1, enum)
    if know.contradiction:
        return Verdict(False, f"feedback contradiction: {know.contradiction}", exhaustive=enum)
    if not know.complete():
        return Verdict(False, "labels not uniquely determined", exhaustive=enum)
    if not know.matches(claim):
        return Verdict(False, "claim differs from the forced labels", exhaustive=enum)
    return Verdict(True, "unique consistent graph", exhaustive=enum)


def run_discovery_game(discoverer: Callable, adversary: Adversary,
                       cfg: DiscoveryConfig = DiscoveryConfig()) -> DiscoveryTranscript:
    static = adversary.static_pairs() if cfg.knowledge == KNOWN_STATIC else None
    if cfg.knowledge == KNOWN_STATIC and static is None:
        raise ValueError("adversary does not publish a static graph")
    view = GameView(adversary.n, adversary.tmax, cfg.params, cfg.feedback, cfg.knowledge,
                    cfg.edge_mode, static)
    cap = cfg.round_cap or 4 * max(1, view.n) * view.tmax
    tr = DiscoveryTranscript(view)
    judge = view.new_knowledge()
    gen: Generator = discoverer(view)
    timed_out = False
    try:
        req = next(gen)
        while True:
            if len(tr.rounds) >= cap:
                timed_out = True
                break
            seeds, phase = req
            seeds = tuple((int(v), int(t)) for v, t in seeds)
            _check_seeds(seeds, view)
            log = adversary.respond(seeds)
            fb = log if cfg.feedback == FULL_LOG else project_timetable(log)
            judge.observe(seeds, fb, cfg.feedback)
            tr.rounds.append(Round(seeds, fb, phase, log, judge.phi()))
            req = gen.send(fb)
    except StopIteration as stop:
        tr.claim = stop.value
    final = adversary.finalize()
    tr.final_graph = final
    for i, r in enumerate(tr.rounds):
        if not check_consistency(final, r.seeds, r.log, view.delta):
            raise AdversaryError(f"final graph contradicts round {i + 1}")
    if timed_out:
        tr.winner, tr.reason = ADVERSARY, f"round cap {cap} reached"
    elif cfg.objective == PATIENT_ZERO:
        truth = find_ideal_patient_zero(final, cfg.params)
        tr.winner = DISCOVERER if tr.claim == truth else ADVERSARY
        tr.reason = f"answer {tr.claim} vs {truth}"
    else:
        v = adjudicate_unique(tr.rounds, tr.claim, view, cfg.exhaustive_check)
        tr.winner = DISCOVERER if v.discoverer_wins else ADVERSARY
        tr.reason = v.reason
        tr.exhaustive = v.exhaustive
    return tr


def _check_seeds(seeds, view: GameView):
    if len(seeds) > view.params.k:
        raise ValueError(f"{len(seeds)} seeds exceed k={view.params.k}")
    nodes = [v for v, _ in seeds]
    if len(set(nodes)) != len(nodes):
        raise ValueError("at most one seed per node")
    for v, t in seeds:
        if not (0 <= v < view.n and 0 <= t <= view.tmax):
            raise ValueError(f"seed ({v},{t}) out of range")


# ---------------------------------------------------------------- witnesses

def trivial_schedule(graph: TemporalGraph) -> list[list[tuple[int, int]]]:
    return [[(e.u, e.label - 1)] for e in graph.edges]


def witness_verify(graph: TemporalGraph, schedule, params: SirParams = SirParams()) -> bool:
    """True iff honestly simulating ``schedule`` leaves exactly one label per edge."""
    static = graph.static_pairs()
    if graph.mode == MULTILABEL:
        static = {p: None for p in static}
    know = LabelKnowledge(graph.n, graph.tmax, params.delta, static, graph.mode)
    for seeds in schedule:
        know.observe(seeds, simulate(graph, seeds, params.delta))
    return know.complete() and know.phi() == graph.m


def phase_bounds(graph: TemporalGraph, delta: int) -> dict:
    """Round budgets used throughout the tests and the CLI."""
    comps = delta_edge_components(graph, delta).count
    steps = math.ceil(graph.tmax / delta)
    return {"follow": 6 * graph.m + steps, "discovery_follow": 6 * graph.m + comps * steps,
            "components": comps}
