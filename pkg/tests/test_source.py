import itertools
import math
import random
import statistics

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from tempograph.core import Edge, SirParams, TemporalGraph, simulate
from tempograph.generators import (
    build_hamiltonian_lb, build_source_path_lb, connected_ert_pairs, gen_path, gen_star,
    random_tree_pairs, spreading_instance,
)
from tempograph.source import (
    CONSISTENT, DYNAMIC, KNOWN_STATIC, NODES_ONLY, SEED, SourceAdversary, SourceGameConfig,
    SourceView, balanced_separator, centroid_two_watch_discoverer, complete_adjacency,
    consistent_adversary, dynamic_adversary, is_balanced, random_watch, random_watch_discoverer,
    run_source_game, run_trials, separator_discoverer, sqrt_discoverer, static_adjacency,
    trial_rows_to_csv, watch_all_discoverer, weighted_centroid, wrap_k_to_one,
    wrap_known_to_unknown,
)


def _tree_adversary(n, rng, spacing=1, dynamic=False):
    inst = spreading_instance(n, random_tree_pairs(n, rng), rng.randrange(n), spacing)
    if dynamic:
        sched = [rng.randrange(spacing) for _ in range(5)]
        return dynamic_adversary(inst.graph, inst.source, sched, SirParams(inst.delta))
    return consistent_adversary(inst.graph, inst.source, 0, SirParams(inst.delta))


class FixedSetAdversary(SourceAdversary):
    """Infects the same node set every round; the log carries no useful infectors."""

    def __init__(self, n, infected, source):
        super().__init__(TemporalGraph(n, (), 1), source, (0,), SirParams(1), CONSISTENT)
        self.log = [(v, v, 0) if v == source else (source, v, 1) for v in sorted(infected)]

    def chain(self, i):
        from tempograph.core import Infection
        return [Infection(*e) for e in self.log]


# ---------------------------------------------------------------- adversaries

def test_consistent_chain_matches_simulation(p3):
    adv = consistent_adversary(p3, 0, 0)
    assert adv.chain(0) == simulate(p3, [(0, 0)], 1) == adv.chain(5)


def test_dynamic_schedule_rotates():
    g = gen_path(4)
    adv = dynamic_adversary(g, 0, [0, 1])
    assert len(adv.chain(0)) == 4 and len(adv.chain(1)) == 1
    assert adv.chain(2) == adv.chain(0)


def test_single_time_dynamic_equals_consistent(p3):
    assert dynamic_adversary(p3, 0, [0]).chain(3) == consistent_adversary(p3, 0, 0).chain(3)


def test_adversary_checks():
    g = gen_path(3)
    with pytest.raises(ValueError):
        SourceAdversary(g, 0, (), SirParams(1), CONSISTENT)
    with pytest.raises(ValueError):
        consistent_adversary(g, 5)
    with pytest.raises(ValueError):
        consistent_adversary(g, 0, 9)
    with pytest.raises(ValueError):
        run_source_game(watch_all_discoverer(), dynamic_adversary(g, 0, [0, 1]))


@pytest.mark.parametrize("n", [5, 7, 9])
def test_hamiltonian_rotation(n):
    inst = build_hamiltonian_lb(n, rng=1)
    adv = dynamic_adversary(inst.graph, inst.source, inst.schedule, SirParams(inst.delta))
    paths = set()
    for i in range(len(inst.schedule)):
        chain = adv.chain(i)
        assert len(chain) == n
        used = frozenset((min(a, b), max(a, b)) for a, b, _ in chain if a != b)
        paths.add(used)
    # each round walks its own Hamiltonian path
    assert len(paths) == (n - 1) // 2
    assert all(not a & b for a, b in itertools.combinations(paths, 2))


# --------------------------------------------------------------------- engine

def test_watch_limit_enforced(p3):
    def greedy(view, rng):
        yield [0, 1]

    with pytest.raises(ValueError):
        run_source_game(greedy, consistent_adversary(p3, 0))


def test_single_node_graph():
    g = TemporalGraph(1, (), 1)
    res = run_source_game(watch_all_discoverer(), consistent_adversary(g, 0))
    assert res.won and res.price.total <= 1 and res.price.rounds == 1


def test_price_per_round_is_chain_size(p3):
    res = run_source_game(watch_all_discoverer(), consistent_adversary(p3, 2, 0))
    assert res.won and res.price.per_round == [1, 1, 1]


def test_round_cap_loses(p3):
    def never(view, rng):
        while True:
            yield [1]

    res = run_source_game(never, consistent_adversary(p3, 0), SourceGameConfig(round_cap=4))
    assert not res.won and res.transcript.timed_out and res.price.rounds == 4


def test_view_delta_comes_from_adversary():
    inst = build_source_path_lb(6, 3)
    seen = []

    def peek(view, rng):
        seen.append(view.delta)
        return 0
        yield  # pragma: no cover

    run_source_game(peek, consistent_adversary(inst.graph, inst.source, 0, SirParams(inst.delta)))
    assert seen == [6]


def test_transcript_text(p3):
    res = run_source_game(watch_all_discoverer(), consistent_adversary(p3, 1, 0))
    lines = res.transcript.to_text().splitlines()
    assert lines[0] == "ROUND 1 WATCH 0 FEEDBACK 0:1/1 INFECTED 2"
    assert lines[1] == f"ROUND 2 WATCH 1 FEEDBACK 1:0/{SEED} INFECTED 2"
    assert lines[-1] == "VERDICT won rounds=2"


def test_same_seed_same_transcript():
    rng = random.Random(3)
    adv = _tree_adversary(60, rng)
    a = run_source_game(sqrt_discoverer(), adv, rng=5)
    b = run_source_game(sqrt_discoverer(), adv, rng=5)
    assert a.transcript.to_text() == b.transcript.to_text()


# ------------------------------------------------------------------ watch all

def test_watch_all_on_path_lb():
    inst = build_source_path_lb(9, 5)
    res = run_source_game(watch_all_discoverer(),
                          consistent_adversary(inst.graph, inst.source, 0, SirParams(inst.delta)))
    assert res.won and res.price.total <= 81
    assert res.price.total == res.price.rounds * 9


def test_watch_all_source_zero(p3):
    res = run_source_game(watch_all_discoverer(), consistent_adversary(p3, 0))
    assert res.won and res.price.rounds == 1


# ----------------------------------------------------------------- random watch

def test_random_watch_full_infection():
    adv = FixedSetAdversary(10, range(10), 3)
    res = run_source_game(random_watch_discoverer(), adv, rng=1)
    assert res.price.rounds == 1 and res.price.total == 10


def test_random_watch_single_infection_is_geometric():
    n = 20
    adv = FixedSetAdversary(n, [4], 4)
    prices = [run_source_game(random_watch_discoverer(), adv, rng=s).price.total
              for s in range(1500)]
    assert abs(statistics.mean(prices) - n) < 0.15 * n


def test_random_watch_budget():
    adv = FixedSetAdversary(10, [0], 0)

    def limited(view, rng):
        return (yield from random_watch(view, rng, candidates=[5, 6], budget=3))

    res = run_source_game(limited, adv, rng=0)
    assert res.transcript.suspect is None and res.price.rounds == 3
    assert res.transcript.notes["random_rounds"] == 3


# ------------------------------------------------------------------- sqrt

def test_sqrt_trace_is_zero_when_sample_hits_source():
    g = gen_path(4)
    for seed in range(30):
        res = run_source_game(sqrt_discoverer(), consistent_adversary(g, 0, 0), rng=seed)
        if res.transcript.rounds[0].watches == (0,):
            assert res.won and res.transcript.notes["trace_steps"] == 0
            return
    pytest.fail("no trial sampled the source first")


@given(st.integers(0, 10_000), st.booleans())
def test_sqrt_round_and_price_bounds(seed, abort):
    rng = random.Random(seed)
    n = rng.randint(2, 80)
    adv = _tree_adversary(n, rng)
    res = run_source_game(sqrt_discoverer(abort), adv, rng=rng)
    r = math.ceil(math.sqrt(n))
    if abort:
        assert res.price.rounds <= 2 * r
        assert res.price.total <= 2 * n * r
    notes = res.transcript.notes
    if "anchor" in notes:
        # walking back never takes more steps than the anchor's depth in the infection tree
        log = {b: a for a, b, _ in adv.chain(0)}
        depth, v = 0, notes["anchor"]
        while log[v] != v:
            v = log[v]
            depth += 1
        assert notes["trace_steps"] <= depth
    if not abort:
        assert res.won


# -------------------------------------------------------------- separators

def _brute_separator_size(adj, cands):
    weights = {v: 1 for v in cands}
    for size in range(0, len(adj) + 1):
        for sep in itertools.combinations(sorted(adj), size):
            if is_balanced(adj, weights, set(sep)):
                return size


def test_separator_path_and_star():
    path = static_adjacency(gen_path(7))
    assert balanced_separator(path) == {3}
    assert balanced_separator(static_adjacency(gen_star(6))) == {0}


def test_separator_empty_weight():
    assert balanced_separator(static_adjacency(gen_path(4)), set()) == set()


@given(st.integers(0, 10_000))
def test_tree_separator_is_minimal(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 9)
    adj = static_adjacency(TemporalGraph(n, tuple(Edge(u, v, 1) for u, v in random_tree_pairs(n, rng)), 1))
    cands = set(rng.sample(range(n), rng.randint(1, n)))
    sep = balanced_separator(adj, cands)
    assert is_balanced(adj, {v: 1 for v in cands}, sep)
    assert len(sep) == _brute_separator_size(adj, cands)


@given(st.integers(0, 10_000))
def test_general_separator_is_minimal(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    pairs = connected_ert_pairs(n, 0.4, rng)
    g = nx.Graph(pairs)
    adj = {v: frozenset(g[v]) for v in range(n)}
    sep = balanced_separator(g)
    assert len(sep) == _brute_separator_size(adj, set(range(n)))


def test_complete_graph_separator():
    adj = complete_adjacency(9)
    sep = balanced_separator(adj)
    assert len(sep) == 5 and is_balanced(adj, {v: 1 for v in adj}, sep)
    assert balanced_separator(adj, size_bound=2) is None


def test_weighted_centroid_on_path():
    adj = static_adjacency(gen_path(5))
    assert weighted_centroid(adj, {v: 1 for v in adj}) == 2
    assert weighted_centroid(adj, {4: 1}) == 4


def test_separator_discoverer_on_trees():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.randint(2, 128)
        res = run_source_game(separator_discoverer(2), _tree_adversary(n, rng), rng=rng)
        assert res.won
        assert res.transcript.notes.get("phases", 0) <= math.ceil(math.log2(n))


def test_separator_detects_source_in_separator():
    g = gen_star(7)
    res = run_source_game(separator_discoverer(2), consistent_adversary(g, 0, 0))
    assert res.won and res.price.rounds == 1


def test_separator_needs_graph(p3):
    cfg = SourceGameConfig(knowledge=NODES_ONLY)
    with pytest.raises(ValueError):
        run_source_game(separator_discoverer(), consistent_adversary(p3, 0), cfg)


# ---------------------------------------------------------------- centroid

def test_centroid_wins_on_dynamic_trees():
    rng = random.Random(2)
    cfg = SourceGameConfig(behavior=DYNAMIC, watchers=2)
    wins = 0
    for _ in range(30):
        n = rng.randint(2, 100)
        res = run_source_game(centroid_two_watch_discoverer(),
                              _tree_adversary(n, rng, spacing=2, dynamic=True), cfg, rng)
        wins += res.won
        assert res.transcript.notes["depth"] <= math.ceil(math.log2(n))
    assert wins >= 15


def test_centroid_on_path_consistent():
    g = gen_path(9)
    res = run_source_game(centroid_two_watch_discoverer(), consistent_adversary(g, 0, 0),
                          SourceGameConfig(watchers=2), rng=0)
    assert res.won


def test_centroid_needs_two_watchers(p3):
    with pytest.raises(ValueError):
        run_source_game(centroid_two_watch_discoverer(), consistent_adversary(p3, 0))


# ---------------------------------------------------------------- wrappers

def test_known_to_unknown_matches_inner():
    rng = random.Random(4)
    for trial in range(15):
        n = rng.randint(2, 30)
        adv = _tree_adversary(n, rng)
        wrapped = run_source_game(wrap_known_to_unknown(separator_discoverer(None)), adv,
                                  SourceGameConfig(knowledge=NODES_ONLY), rng=trial)
        view = SourceView(n, adv.graph.tmax + adv.delta + 1, SirParams(adv.delta), 1, CONSISTENT,
                          KNOWN_STATIC, complete_adjacency(n))
        inner = run_source_game(separator_discoverer(None), adv, rng=trial, view=view)
        assert wrapped.transcript.suspect == inner.transcript.suspect
        assert wrapped.price.total == inner.price.total
        assert wrapped.transcript.notes["inner_tmax"] == adv.graph.tmax + adv.delta + 1


def test_known_to_unknown_watch_all_unchanged(p3):
    adv = consistent_adversary(p3, 2)
    a = run_source_game(wrap_known_to_unknown(watch_all_discoverer()), adv,
                        SourceGameConfig(knowledge=NODES_ONLY))
    b = run_source_game(watch_all_discoverer(), adv)
    assert a.transcript.to_text() == b.transcript.to_text()


def test_k_to_one_price_and_feedback():
    rng = random.Random(6)
    for trial in range(15):
        n = rng.randint(2, 60)
        adv = _tree_adversary(n, rng)
        two = run_source_game(centroid_two_watch_discoverer(), adv,
                              SourceGameConfig(watchers=2), rng=trial)
        one = run_source_game(wrap_k_to_one(centroid_two_watch_discoverer(), 2), adv, rng=trial)
        assert one.transcript.suspect == two.transcript.suspect
        assert one.price.total <= 2 * two.price.total
        assert one.transcript.notes["relayed"] == [r.feedback for r in two.transcript.rounds]


def test_k_to_one_single_watch_identical(p3):
    adv = consistent_adversary(p3, 2)
    a = run_source_game(wrap_k_to_one(watch_all_discoverer(), 1), adv)
    b = run_source_game(watch_all_discoverer(), adv)
    assert a.transcript.to_text() == b.transcript.to_text()


# ------------------------------------------------------------------ trials

def test_run_trials_rows_and_csv():
    cfg = SourceGameConfig()
    rows = run_trials("watch_all", watch_all_discoverer(),
                      lambda rng: _tree_adversary(20, rng), 5, 100, cfg)
    assert [r["rng_seed"] for r in rows] == list(range(100, 105))
    assert all(r["won"] == 1 for r in rows)
    text = trial_rows_to_csv(rows)
    assert text.splitlines()[0] == "trial,n,algorithm,behavior,knowledge,won,price,rounds,rng_seed"
    again = run_trials("watch_all", watch_all_discoverer(),
                       lambda rng: _tree_adversary(20, rng), 5, 100, cfg)
    assert trial_rows_to_csv(again) == text
