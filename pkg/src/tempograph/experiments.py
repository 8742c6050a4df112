"""Parameter sweeps of DiscoveryFollow over temporal Erdos-Renyi graphs."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

from scipy import stats

from .core import SirParams, delta_edge_components
from .discovery import (
    COMPONENT_DISCOVERY, COMPONENT_EXPLORATION, DISCOVERER, DiscoveryConfig,
    discovery_follow, honest_adversary, run_discovery_game,
)
from .generators import ErtParams, gen_ert

PAPER_N = tuple(range(1, 101, 5))
PAPER_P = (0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 0.7, 0.9)
PAPER_TMAX_RATIO = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0)
# None stands for the fixed delta = 1 alongside the ratios
PAPER_DELTA_RATIO = (None, 0.01, 0.05, 0.1, 0.3, 0.5)


@dataclass(frozen=True)
class SweepSpec:
    n: tuple = PAPER_N
    p: tuple = PAPER_P
    tmax_ratio: tuple = PAPER_TMAX_RATIO
    delta_ratio: tuple = PAPER_DELTA_RATIO
    trials: int = 5
    seed: int = 0
    skip_redundant: bool = True

    def __post_init__(self):
        ratios = list(self.tmax_ratio) + [r for r in self.delta_ratio if r is not None]
        if any(r <= 0 for r in ratios) or any(not 0 <= p <= 1 for p in self.p):
            raise ValueError("ratios must be positive and p must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("need at least one trial per cell")

    def cells(self) -> list[tuple[int, float, int, int]]:
        """Distinct ``(n, p, tmax, delta)`` cells; delta above tmax is skipped."""
        out = []
        for n in self.n:
            for p in self.p:
                for tr in self.tmax_ratio:
                    tmax = max(1, round(tr * n))
                    deltas = []
                    for dr in self.delta_ratio:
                        d = 1 if dr is None else max(1, round(dr * tmax))
                        if d <= tmax and d not in deltas:
                            deltas.append(d)
                    for d in deltas:
                        cell = (n, p, tmax, d)
                        if cell not in out:
                            out.append(cell)
        return out


@dataclass
class ExperimentRow:
    n: int
    p: float
    tmax: int
    delta: int
    m: int
    components: int
    mean_component_size: float
    rounds_total: int
    rounds_discovery: int
    rounds_exploration: int
    rng_seed: int
    rounds_other: int = 0
    won: int = 1

    @property
    def discovery_share(self) -> float:
        return self.rounds_discovery / self.rounds_total if self.rounds_total else 0.0

    @property
    def density_ratio(self) -> float:
        return self.n * self.p / self.tmax


ROW_FIELDS = tuple(f.name for f in fields(ExperimentRow))


def run_instance(n: int, p: float, tmax: int, delta: int, rng_seed: int,
                 skip_redundant: bool = True) -> ExperimentRow:
    g = gen_ert(ErtParams(n, p, tmax, rng_seed))
    params = SirParams(delta)
    tr = run_discovery_game(discovery_follow(skip_redundant), honest_adversary(g, params),
                            DiscoveryConfig(params, exhaustive_check=False))
    comps = delta_edge_components(g, delta)
    disc = tr.count(COMPONENT_DISCOVERY)
    expl = tr.count(COMPONENT_EXPLORATION)
    return ExperimentRow(n, p, tmax, delta, g.m, comps.count,
                         g.m / comps.count if comps.count else 0.0, len(tr), disc, expl,
                         rng_seed, len(tr) - disc - expl, int(tr.winner == DISCOVERER))


def _job(args):
    return run_instance(*args)


def sweep_jobs(spec: SweepSpec) -> list[tuple]:
    """Trial ``j`` of cell ``i`` uses seed ``spec.seed + i * trials + j``."""
    jobs = []
    for i, (n, p, tmax, d) in enumerate(spec.cells()):
        for j in range(spec.trials):
            jobs.append((n, p, tmax, d, spec.seed + i * spec.trials + j, spec.skip_redundant))
    return jobs


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ExperimentRow]:
    jobs = sweep_jobs(spec)
    if workers <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(_job, jobs, chunksize=8))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r))
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ExperimentRow]:
    kinds = {f.name: f.type for f in fields(ExperimentRow)}
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        vals = {k: (float(v) if kinds[k] == "float" else int(v)) for k, v in rec.items()}
        out.append(ExperimentRow(**vals))
    return out


@dataclass
class SweepSummary:
    slope: float
    intercept: float
    facet_slopes: dict = field(default_factory=dict)
    share_by_p: list = field(default_factory=list)
    share_p_rho: float = math.nan
    threshold: list = field(default_factory=list)
    crossing: float | None = None
    size_rho: float = math.nan

    def to_text(self) -> str:
        lines = [f"slope rounds/m = {self.slope:.3f} (intercept {self.intercept:.2f})",
                 f"spearman(discovery share, p) = {self.share_p_rho:.3f}",
                 f"spearman(mean component size, np/tmax) = {self.size_rho:.3f}",
                 "50% crossing of discovery share at np/tmax = "
                 + ("none" if self.crossing is None else f"{self.crossing:.4g}")]
        lines.append("# facet p tmax/n slope")
        for (p, r), s in sorted(self.facet_slopes.items()):
            lines.append(f"{p} {r} {s:.3f}")
        lines.append("# np/tmax discovery_share mean_component_size count")
        for x, share, size, cnt in self.threshold:
            lines.append(f"{x:.4g} {share:.4f} {size:.4f} {cnt}")
        return "\n".join(lines) + "\n"


def _slope(xs, ys) -> tuple[float, float]:
    if len(set(xs)) < 2:
        return math.nan, math.nan
    fit = stats.linregress(xs, ys)
    return float(fit.slope), float(fit.intercept)


def _rho(xs, ys) -> float:
    if len(xs) < 3 or len(set(xs)) < 2 or len(set(ys)) < 2:
        return math.nan
    return float(stats.spearmanr(xs, ys)[0])


def threshold_curve(rows, bins_per_decade: int = 2) -> list[tuple[float, float, float, int]]:
    """Mean discovery share and component size in log-spaced bins of ``np/tmax``."""
    groups: dict[int, list[ExperimentRow]] = {}
    for r in rows:
        if r.m == 0 or r.p == 0:
            continue
        b = math.floor(math.log10(r.density_ratio) * bins_per_decade)
        groups.setdefault(b, []).append(r)
    out = []
    for b in sorted(groups):
        rs = groups[b]
        centre = 10 ** ((b + 0.5) / bins_per_decade)
        out.append((centre, sum(r.discovery_share for r in rs) / len(rs),
                    sum(r.mean_component_size for r in rs) / len(rs), len(rs)))
    return out


def first_crossing(curve, level: float = 0.5) -> float | None:
    """Log-interpolated ``np/tmax`` where the share first drops from above to below ``level``."""
    for (x0, y0, *_), (x1, y1, *_) in zip(curve, curve[1:]):
        if y0 >= level > y1:
            f = (y0 - level) / (y0 - y1)
            return 10 ** (math.log10(x0) + f * (math.log10(x1) - math.log10(x0)))
    return None


def summarize(rows) -> SweepSummary:
    rows = [r for r in rows if r.m > 0]
    slope, icpt = _slope([r.m for r in rows], [r.rounds_total for r in rows])
    facets: dict = {}
    for r in rows:
        facets.setdefault((r.p, round(r.tmax / r.n, 3)), []).append(r)
    facet_slopes = {k: _slope([r.m for r in v], [r.rounds_total for r in v])[0]
                    for k, v in facets.items()}
    facet_slopes = {k: s for k, s in facet_slopes.items() if not math.isnan(s)}
    by_p: dict = {}
    for r in rows:
        by_p.setdefault(r.p, []).append(r.discovery_share)
    share_by_p = [(p, sum(v) / len(v)) for p, v in sorted(by_p.items())]
    rho_p = _rho([r.p for r in rows], [r.discovery_share for r in rows])
    curve = threshold_curve(rows)
    rho_size = _rho([r.density_ratio for r in rows], [r.mean_component_size for r in rows])
    return SweepSummary(slope, icpt, facet_slopes, share_by_p, rho_p, curve,
                        first_crossing(curve), rho_size)
