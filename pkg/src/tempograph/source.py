"""The source detection game: a hidden source infects the graph every round
and the discoverer watches a few nodes per round to locate it.

Discoverers are generator functions ``strategy(view, rng)``. They yield the
list of nodes to watch, receive a dict ``{node: None | (time, origin)}``,
and return their suspect. ``origin`` is the infecting neighbour or
:data:`SEED` when the watched node is the source itself.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import networkx as nx

from .core import Infection, SirParams, TemporalGraph, simulate
from .discovery import KNOWN_STATIC, NODES_ONLY

SEED = "SEED"
CONSISTENT = "consistent"
DYNAMIC = "obliviously_dynamic"

TRIAL_FIELDS = ("trial", "n", "algorithm", "behavior", "knowledge", "won", "price", "rounds",
                "rng_seed")


@dataclass(frozen=True)
class SourceGameConfig:
    params: SirParams = SirParams()
    behavior: str = CONSISTENT
    knowledge: str = KNOWN_STATIC
    watchers: int = 1
    round_cap: int | None = None

    def __post_init__(self):
        if self.watchers < 1:
            raise ValueError("watchers must be at least 1")


@dataclass
class SourceView:
    """What the discoverer knows; ``adj`` is ``None`` when only nodes are public."""

    n: int
    tmax: int
    params: SirParams
    watchers: int
    behavior: str
    knowledge: str
    adj: dict[int, frozenset] | None
    notes: dict = field(default_factory=dict)

    @property
    def delta(self) -> int:
        return self.params.delta


@dataclass
class PriceMeter:
    total: int = 0
    rounds: int = 0
    per_round: list[int] = field(default_factory=list)

    def add(self, infections: int):
        self.total += infections
        self.rounds += 1
        self.per_round.append(infections)


@dataclass
class WatchRound:
    watches: tuple[int, ...]
    feedback: dict
    log: list[Infection]


@dataclass
class SourceTranscript:
    rounds: list[WatchRound] = field(default_factory=list)
    suspect: int | None = None
    source: int | None = None
    timed_out: bool = False
    notes: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = []
        for i, r in enumerate(self.rounds, 1):
            fb = " ".join(f"{v}:{'-' if o is None else f'{o[0]}/{o[1]}'}"
                          for v, o in sorted(r.feedback.items()))
            lines.append(f"ROUND {i} WATCH {' '.join(map(str, r.watches))} "
                         f"FEEDBACK {fb} INFECTED {len(r.log)}")
        lines.append(f"SUSPECT {self.suspect}")
        lines.append(f"VERDICT {'won' if self.suspect == self.source else 'lost'} "
                     f"rounds={len(self.rounds)}")
        return "\n".join(lines) + "\n"


@dataclass
class SourceResult:
    won: bool
    price: PriceMeter
    transcript: SourceTranscript


# --------------------------------------------------------------- adversaries

class SourceAdversary:
    """Emits one infection chain per round from a fixed source node."""

    def __init__(self, graph: TemporalGraph, source: int, schedule: Iterable[int],
                 params: SirParams, behavior: str):
        self.graph = graph
        self.source = source
        self.schedule = tuple(schedule)
        self.delta = params.delta
        self.behavior = behavior
        if not self.schedule:
            raise ValueError("empty start-time schedule")
        if not 0 <= source < graph.n:
            raise ValueError("source outside the node range")
        for t in self.schedule:
            if not 0 <= t <= graph.tmax:
                raise ValueError(f"start time {t} outside [0, {graph.tmax}]")
        self._cache: dict[int, list[Infection]] = {}

    def chain(self, i: int) -> list[Infection]:
        t0 = self.schedule[i % len(self.schedule)]
        if t0 not in self._cache:
            self._cache[t0] = simulate(self.graph, [(self.source, t0)], self.delta)
        return self._cache[t0]


def consistent_adversary(graph: TemporalGraph, s: int, t0: int = 0,
                         params: SirParams = SirParams()) -> SourceAdversary:
    return SourceAdversary(graph, s, (t0,), params, CONSISTENT)


def dynamic_adversary(graph: TemporalGraph, s: int, t0_schedule: Iterable[int],
                      params: SirParams = SirParams()) -> SourceAdversary:
    """Round ``i`` seeds the source at ``t0_schedule[i mod len]``."""
    return SourceAdversary(graph, s, t0_schedule, params, DYNAMIC)


# -------------------------------------------------------------------- engine

def static_adjacency(graph: TemporalGraph) -> dict[int, frozenset]:
    nb = graph.neighbors
    return {v: frozenset(nb.get(v, ())) for v in range(graph.n)}


def complete_adjacency(n: int) -> dict[int, frozenset]:
    return {v: frozenset(w for w in range(n) if w != v) for v in range(n)}


def make_view(adversary: SourceAdversary, cfg: SourceGameConfig) -> SourceView:
    """The game's delta is the adversary's; ``cfg.params`` only contributes ``k``."""
    g = adversary.graph
    adj = static_adjacency(g) if cfg.knowledge == KNOWN_STATIC else None
    params = SirParams(adversary.delta, cfg.params.k)
    return SourceView(g.n, g.tmax, params, cfg.watchers, cfg.behavior, cfg.knowledge, adj)


def watch_feedback(log: list[Infection], watches: Iterable[int]) -> dict:
    by_node = {e.infectee: e for e in log}
    out = {}
    for v in watches:
        e = by_node.get(v)
        out[v] = None if e is None else (e.time, SEED if e.is_seed else e.infector)
    return out


def run_source_game(discoverer: Callable, adversary: SourceAdversary,
                    cfg: SourceGameConfig = SourceGameConfig(), rng=None,
                    view: SourceView | None = None) -> SourceResult:
    """Play until the discoverer names a suspect or the round cap runs out."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    if cfg.behavior == CONSISTENT and len(set(adversary.schedule)) > 1:
        raise ValueError("a consistent game needs a single start time")
    view = view or make_view(adversary, cfg)
    n = adversary.graph.n
    cap = cfg.round_cap or n * n + n
    meter = PriceMeter()
    tr = SourceTranscript(source=adversary.source, notes=view.notes)
    gen = discoverer(view, rng)
    try:
        watches = next(gen)
        while True:
            if meter.rounds >= cap:
                tr.timed_out = True
                break
            watches = tuple(int(v) for v in watches)
            if len(watches) > cfg.watchers or len(set(watches)) != len(watches):
                raise ValueError(f"watch set {watches} breaks the limit of {cfg.watchers}")
            if any(not 0 <= v < n for v in watches):
                raise ValueError(f"watch set {watches} names an unknown node")
            log = adversary.chain(meter.rounds)
            meter.add(len(log))
            fb = watch_feedback(log, watches)
            tr.rounds.append(WatchRound(watches, fb, log))
            watches = gen.send(dict(fb))
    except StopIteration as stop:
        tr.suspect = stop.value
    won = not tr.timed_out and tr.suspect == adversary.source
    return SourceResult(won, meter, tr)


# --------------------------------------------------------------- discoverers

def _is_seed(obs) -> bool:
    return obs is not None and obs[1] == SEED


def watch_all_discoverer() -> Callable:
    """Watch each node once, in id order, until one reports a seed infection."""
    def strategy(view: SourceView, rng):
        for v in range(view.n):
            fb = yield [v]
            if _is_seed(fb[v]):
                return v
        return None
    return strategy


def random_watch(view: SourceView, rng: random.Random, candidates=None,
                 budget: int | None = None):
    """Watch one uniform candidate per round until it is infected.

    Returns ``(node, observation)`` or ``None`` once ``budget`` rounds pass
    without a hit.
    """
    pool = sorted(range(view.n) if candidates is None else candidates)
    used = 0
    while budget is None or used < budget:
        v = rng.choice(pool)
        fb = yield [v]
        used += 1
        if fb[v] is not None:
            view.notes["random_rounds"] = view.notes.get("random_rounds", 0) + used
            return v, fb[v]
    view.notes["random_rounds"] = view.notes.get("random_rounds", 0) + used
    return None


def random_watch_discoverer() -> Callable:
    """Stops at the first infected watched node and names it."""
    def strategy(view: SourceView, rng):
        hit = yield from random_watch(view, rng)
        return hit[0]
    return strategy


def sqrt_discoverer(abort: bool = True) -> Callable:
    """Sample about ``sqrt(n)`` nodes, then walk back along reported infectors.

    With ``abort`` the walk, together with any fallback search for a first
    infection, is limited to ``ceil(sqrt(n))`` rounds, so a game never takes
    more than twice that.
    """
    def strategy(view: SourceView, rng: random.Random):
        r = math.ceil(math.sqrt(view.n))
        seen = {}
        for v in rng.sample(range(view.n), min(r, view.n)):
            fb = yield [v]
            if _is_seed(fb[v]):
                view.notes["trace_steps"] = 0
                return v
            if fb[v] is not None:
                seen[v] = fb[v]
        budget = r if abort else None
        used = 0
        if not seen:
            before = view.notes.get("random_rounds", 0)
            hit = yield from random_watch(view, rng, budget=budget)
            used = view.notes["random_rounds"] - before
            if hit is None:
                view.notes["trace_steps"] = 0
                return None
            if _is_seed(hit[1]):
                view.notes["trace_steps"] = 0
                return hit[0]
            seen[hit[0]] = hit[1]
        anchor = min(seen, key=lambda v: (seen[v][0], v))
        view.notes["anchor"] = anchor
        cur = seen[anchor][1]
        steps = 0
        while budget is None or used + steps < budget:
            fb = yield [cur]
            steps += 1
            obs = fb[cur]
            if obs is None or _is_seed(obs):
                break
            cur = obs[1]
        view.notes["trace_steps"] = steps
        return cur
    return strategy


def _components(adj: dict[int, frozenset], removed: set[int], nodes=None) -> list[set[int]]:
    nodes = set(adj) if nodes is None else set(nodes)
    left = nodes - removed
    comps = []
    while left:
        start = left.pop()
        comp, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in left:
                    left.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _weight(nodes, weights) -> float:
    return sum(weights.get(v, 0) for v in nodes)


def is_balanced(adj, weights: dict, sep: set[int]) -> bool:
    total = _weight(adj, weights)
    return all(_weight(c, weights) <= total / 2 for c in _components(adj, set(sep)))


def _as_adj(graph) -> dict[int, frozenset]:
    if isinstance(graph, TemporalGraph):
        return static_adjacency(graph)
    if isinstance(graph, nx.Graph):
        return {v: frozenset(graph[v]) for v in graph.nodes}
    return {v: frozenset(ws) for v, ws in graph.items()}


def _as_weights(adj, candidates) -> dict[int, float]:
    if candidates is None:
        return {v: 1 for v in adj}
    if isinstance(candidates, dict):
        return dict(candidates)
    return {v: 1 for v in candidates}


def weighted_centroid(adj: dict[int, frozenset], weights: dict) -> int:
    """Node of a tree whose removal leaves the lightest heaviest branch (lowest id on ties)."""
    nodes = sorted(adj)
    root = nodes[0]
    parent = {root: None}
    order = [root]
    for u in order:
        for w in sorted(adj[u]):
            if w not in parent:
                parent[w] = u
                order.append(w)
    below = {v: weights.get(v, 0) for v in nodes}
    for v in reversed(order):
        if parent[v] is not None:
            below[parent[v]] += below[v]
    total = below[root]
    best, best_val = root, math.inf
    for v in nodes:
        heaviest = total - below[v]
        for w in adj[v]:
            if parent.get(w) == v:
                heaviest = max(heaviest, below[w])
        if heaviest < best_val:
            best, best_val = v, heaviest
    return best


def balanced_separator(graph, candidates=None, size_bound: int | None = None) -> set[int] | None:
    """Smallest node set whose removal leaves every component with at most half the weight.

    ``candidates`` is a set of nodes (weight 1) or a ``{node: weight}`` map;
    other nodes weigh 0. Trees use the weighted centroid, complete graphs take
    half of the candidates, anything else is searched exhaustively (fine up
    to about 30 nodes). Returns ``None`` if nothing within ``size_bound`` fits.
    """
    adj = _as_adj(graph)
    weights = _as_weights(adj, candidates)
    if _weight(adj, weights) == 0:
        return set()
    limit = len(adj) if size_bound is None else size_bound
    n = len(adj)
    m = sum(len(ws) for ws in adj.values()) // 2
    if m == n - 1 and len(_components(adj, set())) == 1:
        sep = {weighted_centroid(adj, weights)}
        return sep if len(sep) <= limit else None
    if m == n * (n - 1) // 2:
        heavy = sorted(adj, key=lambda v: (-weights.get(v, 0), v))
        total = _weight(adj, weights)
        sep: set[int] = set()
        for v in heavy:
            if total - _weight(sep, weights) <= total / 2:
                break
            sep.add(v)
        return sep if len(sep) <= limit else None
    if n > 30:
        raise ValueError("exhaustive separator search is limited to 30 nodes")
    for size in range(1, limit + 1):
        for sep in combinations(sorted(adj), size):
            if is_balanced(adj, weights, set(sep)):
                return set(sep)
    return None


def separator_discoverer(size_bound: int | None = 2) -> Callable:
    """Halve the candidate set each phase with a balanced separator.

    Every separator node is watched for one round. The earliest infected one
    points (through its infector) at the component holding the source; if
    none is infected a random candidate search finds a node in that
    component instead.
    """
    def strategy(view: SourceView, rng: random.Random):
        if view.adj is None:
            raise ValueError("the separator strategy needs the static graph")
        cands = set(range(view.n))
        phases = 0
        view.notes["sizes"] = [len(cands)]
        while len(cands) > 1:
            sep = balanced_separator(view.adj, cands, size_bound)
            if sep is None:
                raise ValueError(f"no balanced separator within {size_bound} nodes")
            phases += 1
            view.notes["phases"] = phases
            seen = {}
            for v in sorted(sep):
                fb = yield [v]
                if _is_seed(fb[v]):
                    return v
                if fb[v] is not None:
                    seen[v] = fb[v]
            if seen:
                first = min(seen, key=lambda v: (seen[v][0], v))
                anchor = seen[first][1]
            else:
                hit = yield from random_watch(view, rng, cands - sep)
                if _is_seed(hit[1]):
                    return hit[0]
                anchor = hit[0]
            comp = next(c for c in _components(view.adj, set(sep)) if anchor in c)
            cands = (cands & comp) - sep
            view.notes["sizes"].append(len(cands))
        return next(iter(cands)) if cands else None
    return strategy


def centroid_two_watch_discoverer() -> Callable:
    """Each round watch the centroid of the candidate subtree plus one random candidate."""
    def strategy(view: SourceView, rng: random.Random):
        if view.adj is None:
            raise ValueError("the centroid strategy needs the static graph")
        if view.watchers < 2:
            raise ValueError("the centroid strategy watches two nodes per round")
        cands = set(range(view.n))
        depth = 0
        view.notes["depth"] = 0
        while len(cands) > 1:
            sub = {v: view.adj[v] & cands for v in cands}
            c = weighted_centroid(sub, {v: 1 for v in cands})
            r = rng.choice(sorted(cands))
            watches = [c] if r == c else [c, r]
            fb = yield watches
            if _is_seed(fb[c]):
                return c
            if r != c and _is_seed(fb[r]):
                return r
            if fb[c] is not None:
                anchor = fb[c][1]
            elif r != c and fb[r] is not None:
                anchor = r
            else:
                continue
            cands = next(comp for comp in _components(sub, {c}) if anchor in comp)
            depth += 1
            view.notes["depth"] = depth
        return next(iter(cands)) if cands else None
    return strategy


def wrap_known_to_unknown(inner: Callable) -> Callable:
    """Run a known-graph strategy on an unknown graph by showing it ``K_n``.

    The inner strategy also sees the lifetime stretched to ``tmax + delta + 1``.
    """
    def strategy(view: SourceView, rng):
        inner_view = SourceView(view.n, view.tmax + view.delta + 1, view.params, view.watchers,
                                view.behavior, KNOWN_STATIC, complete_adjacency(view.n),
                                view.notes)
        view.notes["inner_tmax"] = inner_view.tmax
        return (yield from inner(inner_view, rng))
    return strategy


def wrap_k_to_one(inner: Callable, k: int = 2) -> Callable:
    """Serialise each inner round of up to ``k`` watches into single-watch rounds."""
    def strategy(view: SourceView, rng):
        inner_view = SourceView(view.n, view.tmax, view.params, k, view.behavior,
                                view.knowledge, view.adj, view.notes)
        relayed = view.notes.setdefault("relayed", [])
        gen = inner(inner_view, rng)
        try:
            watches = next(gen)
            while True:
                combined = {}
                for v in watches:
                    fb = yield [v]
                    combined[v] = fb[v]
                relayed.append(dict(combined))
                watches = gen.send(combined)
        except StopIteration as stop:
            return stop.value
    return strategy


# ------------------------------------------------------------------- trials

def trial_rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TRIAL_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: row[k] for k in TRIAL_FIELDS})
    return buf.getvalue()


def run_trials(algorithm: str, discoverer: Callable, make_instance: Callable, trials: int,
               seed: int, cfg: SourceGameConfig) -> list[dict]:
    """``make_instance(rng)`` returns an adversary; trial ``i`` uses seed ``seed + i``."""
    rows = []
    for i in range(trials):
        rng_seed = seed + i
        rng = random.Random(rng_seed)
        adv = make_instance(rng)
        res = run_source_game(discoverer, adv, cfg, rng)
        rows.append({"trial": i, "n": adv.graph.n, "algorithm": algorithm,
                     "behavior": cfg.behavior, "knowledge": cfg.knowledge, "won": int(res.won),
                     "price": res.price.total, "rounds": res.price.rounds, "rng_seed": rng_seed,
                     "notes": dict(res.transcript.notes)})
    return rows


__all__ = [
    "SEED", "CONSISTENT", "DYNAMIC", "NODES_ONLY", "KNOWN_STATIC", "SourceGameConfig",
    "SourceView", "PriceMeter", "SourceTranscript", "SourceResult", "SourceAdversary",
    "consistent_adversary", "dynamic_adversary", "run_source_game", "watch_all_discoverer",
    "random_watch", "random_watch_discoverer", "sqrt_discoverer", "balanced_separator",
    "weighted_centroid", "separator_discoverer", "centroid_two_watch_discoverer",
    "wrap_known_to_unknown", "wrap_k_to_one", "run_trials", "trial_rows_to_csv",
]
