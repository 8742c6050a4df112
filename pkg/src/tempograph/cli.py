"""Command-line entry point ``tempograph``."""

from __future__ import annotations

import argparse
import math
import random
import statistics
import sys

from .core import MODES, SirParams, TemporalGraph, delta_edge_components, \
    find_ideal_patient_zero, project_timetable, simulate
from .discovery import (
    COMPONENT_DISCOVERY, COMPONENT_EXPLORATION, DISCOVERER, DiscoveryConfig,
    brute_force_discoverer, discovery_follow, honest_adversary, phase_bounds,
    run_discovery_game,
)
from .experiments import SweepSpec, rows_to_csv, run_sweep, summarize
from .formats import FormatError, read_edge_list
from .generators import build_source_path_lb, random_tree_pairs, spreading_instance
from .knowledge import FULL_LOG, TIMES_ONLY
from .source import (
    CONSISTENT, DYNAMIC, KNOWN_STATIC, NODES_ONLY, SourceGameConfig, centroid_two_watch_discoverer,
    consistent_adversary, dynamic_adversary, run_trials, separator_discoverer, sqrt_discoverer,
    trial_rows_to_csv, watch_all_discoverer, wrap_k_to_one, wrap_known_to_unknown,
)

DETECTORS = ("watch_all", "sqrt", "separator", "centroid2", "unknown_separator", "serial_centroid2")


class CliError(Exception):
    pass


def _load(args):
    if not args.graph:
        raise CliError("--graph FILE is required")
    try:
        with open(args.graph) as fh:
            graph, delta = read_edge_list(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {args.graph}: {exc.strerror}") from None
    except FormatError as exc:
        raise CliError(f"{args.graph}: {exc}") from None
    if args.delta is not None:
        delta = args.delta
    if args.tmax is not None:
        if graph.edges and args.tmax < max(e.label for e in graph.edges):
            raise CliError("--tmax is below the largest label in the file")
        graph = TemporalGraph(graph.n, graph.edges, args.tmax, graph.mode)
    return graph, delta


def _seeds(text: str | None) -> list[tuple[int, int]]:
    if not text:
        return []
    out = []
    for item in text.split(","):
        try:
            v, t = item.split(":")
            out.append((int(v), int(t)))
        except ValueError:
            raise CliError(f"bad seed {item!r}, expected NODE:TIME") from None
    return out


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    graph, delta = _load(args)
    try:
        log = simulate(graph, _seeds(args.seeds), delta)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    lines = [f"{a} {b} {t}" for a, b, t in log]
    lines.append("# timetable")
    lines += [f"{v} {t}" for v, t in sorted(project_timetable(log).items())]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_components(args) -> int:
    graph, delta = _load(args)
    comps = delta_edge_components(graph, delta)
    word = "component" if comps.count == 1 else "components"
    lines = [f"{comps.count} {word}"]
    lines += [f"{e.u} {e.v} {e.label} {c}" for e, c in zip(graph.edges, comps.assignment)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_ipz(args) -> int:
    graph, delta = _load(args)
    found = find_ideal_patient_zero(graph, delta)
    _emit(("none" if found is None else f"({found[0]},{found[1]})") + "\n", args.out)
    return 0


def cmd_discover(args) -> int:
    graph, delta = _load(args)
    mode = args.mode or graph.mode
    if mode != graph.mode:
        graph = TemporalGraph(graph.n, graph.edges, graph.tmax, mode)
    params = SirParams(delta, args.k)
    feedback = TIMES_ONLY if args.feedback == "times" else FULL_LOG
    if args.algorithm in (None, "discovery_follow"):
        strategy = discovery_follow(args.skip_redundant)
    elif args.algorithm == "brute":
        strategy = brute_force_discoverer()
    else:
        raise CliError(f"unknown discovery algorithm {args.algorithm!r}")
    cfg = DiscoveryConfig(params, feedback, edge_mode=mode)
    tr = run_discovery_game(strategy, honest_adversary(graph, params), cfg)
    comps = delta_edge_components(graph, delta).count
    bound = phase_bounds(graph, delta)["discovery_follow"]
    disc, expl = tr.count(COMPONENT_DISCOVERY), tr.count(COMPONENT_EXPLORATION)
    lines = ["n p tmax delta m components mean_component_size rounds_total rounds_discovery "
             "rounds_exploration rng_seed",
             f"{graph.n} - {graph.tmax} {delta} {graph.m} {comps} "
             f"{graph.m / comps if comps else 0:.3f} {len(tr)} {disc} {expl} -",
             f"bound {bound}",
             f"verdict {tr.winner} ({tr.reason})"]
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if tr.winner == DISCOVERER else 1


def _detector(name: str, k: int):
    if name == "watch_all":
        return watch_all_discoverer(), CONSISTENT, KNOWN_STATIC, 1
    if name == "sqrt":
        return sqrt_discoverer(True), CONSISTENT, NODES_ONLY, 1
    if name == "separator":
        return separator_discoverer(2), CONSISTENT, KNOWN_STATIC, 1
    if name == "centroid2":
        return centroid_two_watch_discoverer(), DYNAMIC, KNOWN_STATIC, max(2, k)
    if name == "unknown_separator":
        return wrap_known_to_unknown(separator_discoverer(None)), CONSISTENT, NODES_ONLY, 1
    if name == "serial_centroid2":
        return wrap_k_to_one(centroid_two_watch_discoverer(), 2), CONSISTENT, KNOWN_STATIC, 1
    raise CliError(f"unknown detection algorithm {name!r}; choose from {', '.join(DETECTORS)}")


def cmd_detect(args) -> int:
    name = args.algorithm or "watch_all"
    strategy, behavior, knowledge, watchers = _detector(name, args.k)
    graph = None
    if args.graph:
        graph, delta = _load(args)
    n = args.n
    spacing = 2 if behavior == DYNAMIC else 1

    def make(rng: random.Random):
        if graph is not None:
            if name in ("centroid2", "serial_centroid2", "separator") and graph.m != graph.n - 1:
                raise CliError(f"{name} needs a tree graph")
            return consistent_adversary(graph, rng.randrange(graph.n), 0, SirParams(delta))
        if args.instance == "path_lb":
            inst = build_source_path_lb(n, rng.randint(1, n))
        else:
            inst = spreading_instance(n, random_tree_pairs(n, rng), rng.randrange(n), spacing)
        params = SirParams(inst.delta)
        if behavior == DYNAMIC:
            sched = [rng.randrange(min(2 * spacing, inst.graph.tmax + 1)) for _ in range(7)]
            return dynamic_adversary(inst.graph, inst.source, sched, params)
        return consistent_adversary(inst.graph, inst.source, inst.t0, params)

    cfg = SourceGameConfig(SirParams(1), behavior, knowledge, watchers)
    rows = run_trials(name, strategy, make, args.trials, args.seed, cfg)
    _emit(trial_rows_to_csv(rows), args.out)
    prices = [r["price"] for r in rows]
    rate = sum(r["won"] for r in rows) / len(rows)
    med = statistics.median(prices)
    size = rows[0]["n"]
    norm = med / (size * math.log2(size)) if size > 1 else float("nan")
    print(f"# success {rate:.3f} median_price {med} median_price/(n log2 n) {norm:.4f}",
          file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    def grid(text, cast):
        return tuple(cast(x) for x in text.split(",")) if text else None

    kw = {}
    for key, text, cast in (("n", args.n_grid, int), ("p", args.p_grid, float),
                            ("tmax_ratio", args.tmax_ratio, float)):
        vals = grid(text, cast)
        if vals:
            kw[key] = vals
    if args.delta_ratio:
        kw["delta_ratio"] = tuple(None if x == "1" else float(x)
                                  for x in args.delta_ratio.split(","))
    spec = SweepSpec(trials=args.trials, seed=args.seed, skip_redundant=args.skip_redundant,
                     **kw)
    rows = run_sweep(spec, args.workers)
    _emit(rows_to_csv(rows), args.out)
    summary = summarize(rows).to_text()
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(summary)
    else:
        sys.stdout.write(summary) if args.out else sys.stderr.write(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tempograph",
                                 description="SIR spreading games on temporal graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--graph", help="temporal edge list file")
        p.add_argument("--delta", type=int, help="override the delta in the file header")
        p.add_argument("--tmax", type=int)
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--algorithm")
        p.add_argument("--trials", type=int, default=10)
        p.add_argument("--out")
        p.add_argument("--feedback", choices=("log", "times"), default="log")
        p.add_argument("--mode", choices=MODES)
        p.add_argument("--skip-redundant", action="store_true")
        return p

    common(sub.add_parser("simulate", help="print the infection log")).add_argument(
        "--seeds", help="comma separated NODE:TIME pairs")
    common(sub.add_parser("components", help="delta-edge connected components"))
    common(sub.add_parser("ipz", help="ideal patient zero"))
    common(sub.add_parser("discover", help="discovery game against an honest adversary"))
    det = common(sub.add_parser("detect", help="source detection trials"))
    det.add_argument("--n", type=int, default=64, help="size of generated instances")
    det.add_argument("--instance", choices=("tree", "path_lb"), default="tree")
    sw = common(sub.add_parser("sweep", help="DiscoveryFollow sweep over ERT graphs"))
    sw.add_argument("--n-grid")
    sw.add_argument("--p-grid")
    sw.add_argument("--tmax-ratio")
    sw.add_argument("--delta-ratio", help="ratios of tmax; the entry 1 means delta = 1")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--summary", help="write the regression and threshold summary here")
    sw.set_defaults(trials=5)
    return ap


COMMANDS = {"simulate": cmd_simulate, "components": cmd_components, "ipz": cmd_ipz,
            "discover": cmd_discover, "detect": cmd_detect, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"tempograph: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
