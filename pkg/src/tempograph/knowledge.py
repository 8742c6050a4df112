"""Candidate-label bookkeeping shared by discoverers and the adjudicator."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .core import SIMPLE, MULTIEDGE, Edge, Infection, TemporalGraph, pair, project_timetable

FULL_LOG = "full_log"
TIMES_ONLY = "times_only"


class Contradiction(Exception):
    """Feedback that no graph can explain."""


class LabelKnowledge:
    """Per-pair sets of still-possible labels plus labels known to be present.

    ``static`` maps each known pair to its instance count (or ``None`` when
    the count is hidden, as with multilabels). Without ``static`` every
    unordered pair is a candidate and existence itself is unknown.
    """

    def __init__(self, n: int, tmax: int, delta: int, static: dict | None = None,
                 edge_mode: str = SIMPLE):
        self.n = n
        self.tmax = tmax
        self.delta = delta
        self.edge_mode = edge_mode
        self.nodes_only = static is None
        if static is None:
            pairs = {p: None for p in combinations(range(n), 2)}
        else:
            pairs = {pair(*p): c for p, c in static.items()}
        if edge_mode == SIMPLE and static is not None:
            pairs = {p: 1 for p in pairs}
        self.count = pairs
        self.possible = {p: set(range(1, tmax + 1)) for p in pairs}
        self.confirmed: dict[tuple[int, int], set[int]] = {p: set() for p in pairs}
        self.adj: dict[int, list[int]] = {v: [] for v in range(n)}
        for u, v in pairs:
            self.adj[u].append(v)
            self.adj[v].append(u)
        self.clauses: list[tuple[int, int, list[tuple[int, int]]]] = []
        self.contradiction: str | None = None

    def phi(self) -> int:
        return sum(len(s) for s in self.possible.values())

    def resolved(self, p) -> bool:
        p = pair(*p)
        poss, conf = self.possible[p], self.confirmed[p]
        if poss != conf:
            return False
        c = self.count[p]
        return c is None or len(conf) == c

    def complete(self) -> bool:
        return self.contradiction is None and all(self.resolved(p) for p in self.possible)

    def unknown_pairs_at(self, v: int) -> list[tuple[int, int]]:
        return [pair(v, w) for w in self.adj[v] if not self.resolved(pair(v, w))]

    def _fail(self, msg: str):
        if self.contradiction is None:
            self.contradiction = msg

    def _tidy(self, p):
        poss, conf = self.possible[p], self.confirmed[p]
        c = self.count[p]
        if not conf <= poss:
            self._fail(f"confirmed label outside candidates on {p}")
            return
        limit = 1 if self.edge_mode == SIMPLE else c
        if limit is not None and len(conf) > limit:
            self._fail(f"too many labels on {p}")
        elif limit is not None and len(conf) == limit and poss != conf:
            poss &= conf
        elif c is not None and len(poss) == c and poss != conf:
            conf |= poss
        if c is not None and len(poss) < c:
            self._fail(f"too few candidate labels on {p}")

    def confirm(self, u: int, v: int, t: int):
        p = pair(u, v)
        if p not in self.possible:
            self._fail(f"infection along a pair {p} known to be absent")
            return
        if t not in self.possible[p]:
            self._fail(f"label {t} on {p} was already excluded")
            return
        self.confirmed[p].add(t)
        self._tidy(p)

    def exclude(self, u: int, v: int, t: int):
        p = pair(u, v)
        if t in self.confirmed[p]:
            self._fail(f"label {t} on {p} both seen and excluded")
            return
        if t in self.possible[p]:
            self.possible[p].discard(t)
            self._tidy(p)

    def observe(self, seeds: Iterable[tuple[int, int]], feedback, kind: str = FULL_LOG):
        """Fold one round into the knowledge.

        ``feedback`` is a log under ``full_log`` and a timetable under
        ``times_only``.
        """
        seeds = set(seeds)
        if kind == FULL_LOG:
            log = [Infection(*e) for e in feedback]
            times = project_timetable(log)
            for a, b, t in log:
                if a != b:
                    self.confirm(a, b, t)
        else:
            times = dict(feedback)
        d = self.delta
        for a, ta in times.items():
            for b in self.adj[a]:
                tb = times.get(b)
                p = pair(a, b)
                for t in range(ta + 1, min(ta + d, self.tmax) + 1):
                    if (tb is None or tb > t) and t in self.possible[p]:
                        self.exclude(a, b, t)
        if kind != FULL_LOG:
            for w, tw in times.items():
                if (w, tw) in seeds:
                    continue
                cands = [pair(x, w) for x in self.adj[w]
                         if x in times and times[x] < tw <= times[x] + d]
                self.clauses.append((w, tw, cands))
            self.propagate()

    def propagate(self):
        """Unit propagation over 'some incident pair carries this label' clauses."""
        changed = True
        while changed and self.contradiction is None:
            changed = False
            kept = []
            for w, tw, cands in self.clauses:
                if any(tw in self.confirmed[p] for p in cands):
                    continue
                cands = [p for p in cands if tw in self.possible[p]]
                if not cands:
                    self._fail(f"infection of {w} at {tw} has no explanation")
                    return
                if len(cands) == 1:
                    self.confirm(*cands[0], tw)
                    changed = True
                    continue
                kept.append((w, tw, cands))
            self.clauses = kept

    def claim(self, mode: str | None = None) -> TemporalGraph:
        edges = [Edge(u, v, t) for (u, v), ts in self.confirmed.items() for t in ts]
        return TemporalGraph(self.n, tuple(edges), self.tmax, mode or self.edge_mode)

    def admits(self, graph: TemporalGraph) -> bool:
        """True iff ``graph`` agrees with every fact recorded so far."""
        labels = graph.labels
        for p in labels:
            if p not in self.possible:
                return False
        for p, poss in self.possible.items():
            ts = set(labels.get(p, ()))
            if not self.confirmed[p] <= ts <= poss:
                return False
            c = self.count[p]
            if c is not None and len(ts) != c:
                return False
        return True

    def matches(self, graph: TemporalGraph) -> bool:
        """True iff knowledge is complete and pins down exactly ``graph``."""
        return self.complete() and self.admits(graph) and all(
            set(graph.labels.get(p, ())) == self.confirmed[p] for p in self.possible)


def candidate_options(static: dict | None, n: int, tmax: int, edge_mode: str):
    """Per-pair list of label tuples a graph could carry, for brute enumeration."""
    labels = range(1, tmax + 1)
    pairs = list(combinations(range(n), 2)) if static is None else sorted(pair(*p) for p in static)
    out = []
    for p in pairs:
        c = None if static is None else static.get(p)
        if edge_mode == SIMPLE:
            opts = [(t,) for t in labels]
            if static is None:
                opts = [()] + opts
        elif edge_mode == MULTIEDGE and c is not None:
            opts = list(combinations(labels, c))
        else:
            lo = 0 if static is None else 1
            opts = [s for r in range(lo, tmax + 1) for s in combinations(labels, r)]
        out.append((p, opts))
    return out


def consistent_graphs(rounds: Sequence, n: int, tmax: int, delta: int, static: dict | None,
                      edge_mode: str, kind: str, cap: int = 200_000):
    """Every graph that explains all rounds, or ``None`` when the space exceeds ``cap``.

    ``rounds`` holds ``(seeds, feedback)`` pairs.
    """
    from itertools import product
    from .core import check_consistency, simulate

    options = candidate_options(static, n, tmax, edge_mode)
    size = 1
    for _, opts in options:
        size *= len(opts)
        if size > cap:
            return None
    mode = edge_mode if edge_mode != SIMPLE else SIMPLE
    found = []
    for choice in product(*(opts for _, opts in options)):
        edges = [Edge(p[0], p[1], t) for (p, _), ts in zip(options, choice) for t in ts]
        g = TemporalGraph(n, tuple(edges), tmax, mode)
        ok = True
        for seeds, fb in rounds:
            if kind == FULL_LOG:
                ok = check_consistency(g, seeds, fb, delta)
            else:
                ok = project_timetable(simulate(g, seeds, delta)) == dict(fb)
            if not ok:
                break
        if ok:
            found.append(g)
    return found
