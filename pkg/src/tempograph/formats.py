"""Text formats: the temporal edge list and SNAP-style interaction CSVs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .core import MODES, MULTIEDGE, Edge, TemporalGraph, validate


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _ints(parts, line: int, what: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise FormatError(f"non-integer field in {what}", line) from None


def read_edge_list(text: str) -> tuple[TemporalGraph, int]:
    """Parse ``n m tmax delta mode`` followed by ``m`` lines ``u v t``.

    Blank lines and ``#`` comments are skipped. Returns the graph and delta.
    """
    rows = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            rows.append((no, body.split()))
    if not rows:
        raise FormatError("empty input")
    no, head = rows[0]
    if len(head) != 5:
        raise FormatError("header must be 'n m tmax delta mode'", no)
    n, m, tmax, delta = _ints(head[:4], no, "header")
    mode = head[4]
    if mode not in MODES:
        raise FormatError(f"unknown mode {mode!r}", no)
    if n < 0 or m < 0 or tmax < 1 or delta < 1:
        raise FormatError("header values out of range", no)
    body = rows[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else no)
        raise FormatError(f"expected {m} edge lines, found {len(body)}", where)
    edges = []
    seen_pairs, seen = set(), set()
    for no, parts in body:
        if len(parts) != 3:
            raise FormatError("edge line must be 'u v t'", no)
        u, v, t = _ints(parts, no, "edge line")
        e = Edge(min(u, v), max(u, v), t)
        if u == v:
            raise FormatError(f"self-loop at node {u}", no)
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"node outside 0..{n - 1}", no)
        if not 1 <= t <= tmax:
            raise FormatError(f"label {t} outside [1, {tmax}]", no)
        if e in seen:
            raise FormatError(f"duplicate instance ({e.u},{e.v},{t})", no)
        if mode == "simple" and e[:2] in seen_pairs:
            raise FormatError(f"duplicate pair ({e.u},{e.v}) in simple mode", no)
        seen.add(e)
        seen_pairs.add(e[:2])
        edges.append(e)
    g = TemporalGraph(n, tuple(edges), tmax, mode)
    problem = validate(g)
    if problem:
        raise FormatError(problem)
    return g, delta


def parse_temporal_edge_list(text: str) -> TemporalGraph:
    return read_edge_list(text)[0]


def write_temporal_edge_list(graph: TemporalGraph, delta: int = 1) -> str:
    lines = [f"{graph.n} {graph.m} {graph.tmax} {delta} {graph.mode}"]
    lines += [f"{u} {v} {t}" for u, v, t in graph.edges]
    return "\n".join(lines) + "\n"


@dataclass
class IngestReport:
    graph: TemporalGraph
    rows: int
    self_loops: int
    collapsed: int
    node_ids: dict


def snap_ingest(csv_text: str, tmax_buckets: int) -> IngestReport:
    """Turn ``u,v,timestamp[,...]`` rows into a multiedge temporal graph.

    Raw node ids are renumbered ``0..n-1`` in order of first appearance.
    Timestamps are bucketed linearly over the observed range into
    ``[1, tmax_buckets]``; repeated ``(u, v, bucket)`` rows collapse into one
    instance and self-loops are dropped (both counted in the report). A
    first row whose fields are not numeric is taken as a header.
    """
    if tmax_buckets < 1:
        raise ValueError("tmax_buckets must be at least 1")
    records = []
    for no, row in enumerate(csv.reader(io.StringIO(csv_text)), 1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3:
            raise FormatError("need at least u,v,timestamp", no)
        try:
            u, v = int(row[0]), int(row[1])
            ts = float(row[2])
        except ValueError:
            if not records and no == 1:
                continue
            raise FormatError("non-numeric field", no) from None
        records.append((u, v, ts))
    ids: dict = {}
    for u, v, _ in records:
        ids.setdefault(u, len(ids))
        ids.setdefault(v, len(ids))
    if records:
        lo = min(r[2] for r in records)
        hi = max(r[2] for r in records)
    span = (hi - lo) if records else 0
    loops = 0
    instances = set()
    kept = 0
    for u, v, ts in records:
        if u == v:
            loops += 1
            continue
        kept += 1
        b = 1 if span == 0 else 1 + min(tmax_buckets - 1, int((ts - lo) / span * tmax_buckets))
        a, c = ids[u], ids[v]
        instances.add(Edge(min(a, c), max(a, c), b))
    g = TemporalGraph(len(ids), tuple(sorted(instances)), tmax_buckets, MULTIEDGE)
    return IngestReport(g, len(records), loops, kept - len(instances), ids)
