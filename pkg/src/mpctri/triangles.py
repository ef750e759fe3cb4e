"""Exact triangle listing and counting on the simulator.

Pipeline: duplicate the edges, sort the oriented copies, count duplicates to
get degrees, tag every oriented edge with its source degree, place each edge
next to the adjacency chunks of its lower-degree endpoint, form wedges
locally, and keep the wedges whose closing edge exists. Each triangle is seen
once from each of its three edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, alpha_interval, degeneracy
from .primitives import (
    DistList,
    KeySpec,
    load_list,
    mpc_count,
    mpc_count_duplicates,
    mpc_duplicate,
    mpc_filter,
    mpc_partition_adjacency,
    mpc_sort,
    mpc_tag_count,
    pack_query,
)
from .sim import RunMetrics, SimConfig, Simulation

Query = tuple[int, int, int, int, int]  # (a, c, u, v, machine)


def default_machine_cap(n: int, m: int, d: int) -> int:
    """Machine budget: one machine per (edge, chunk) plus list storage."""
    return 4 * (m * (d + 1) + n) + 64


def form_wedges(e: tuple[int, int], w: int, chunk, machine: int = 0) -> list[Query]:
    """Queries for the wedges centred at ``w`` that use edge ``e``.

    ``chunk`` holds records ``(w, x)``; the record pointing back along ``e``
    is skipped since it closes no wedge.
    """
    u, v = e
    if w not in e:
        raise ValueError(f"{w} is not an endpoint of {e}")
    other = v if w == u else u
    eu, ev = min(u, v), max(u, v)
    out = []
    for rec in chunk:
        x = rec[1]
        if x == other:
            continue
        a, c = (other, x) if other < x else (x, other)
        out.append((a, c, eu, ev, machine))
    return out


@dataclass
class TriangleResult:
    queries: list[Query]
    triangle_count: int
    metrics: RunMetrics
    queries_formed: int = 0
    chunk_size: int = 0
    per_phase: dict[str, int] = field(default_factory=dict)

    @property
    def T(self) -> list[Query]:
        return self.queries

    def to_dict(self) -> dict:
        return {
            "triangle_count": self.triangle_count,
            "T": [list(q) for q in self.queries],
            "queries_formed": self.queries_formed,
            "metrics": self.metrics.to_dict(),
        }


def _metrics(g: Graph, sim: Simulation | None, delta: float, S: int, d: int) -> RunMetrics:
    lo, hi = alpha_interval(d)
    t = sim.trace if sim is not None else None
    return RunMetrics(
        rounds=t.rounds if t else 0,
        peak_machine_load=t.peak_machine_load if t else 0,
        peak_total_records=t.peak_total_load if t else 0,
        machines_used=t.machines_used if t else 0,
        alpha_lower=lo,
        alpha_upper=hi,
        n=g.n,
        m=g.m,
        delta=delta,
        S=S,
    )


def count_triangles(g: Graph, delta: float, M_max: int | None = None,
                    chunk_size: int | None = None) -> TriangleResult:
    d = degeneracy(g)
    if M_max is None:
        M_max = default_machine_cap(g.n, g.m, d)
    config = SimConfig.make(g.n, delta, M_max=M_max)
    if g.m == 0:
        return TriangleResult([], 0, _metrics(g, None, delta, config.S, d))
    sim = Simulation(config)
    phases: dict[str, int] = {}

    def mark(name):
        phases[name] = sim.trace.rounds

    E = load_list(sim, list(g.edges), stream="E")
    E2 = mpc_duplicate(sim, E)
    mark("duplicate")
    sE = mpc_sort(sim, E2, KeySpec((0, 1)))
    mark("sort")
    D = mpc_count_duplicates(sim, sE, 0)
    mark("degrees")
    tagged = mpc_tag_count(sim, sE, D, 0)
    mark("tag")
    # the degree list is no longer needed
    sim.step(lambda mid, st: (), active=D.machines, consume=(D.stream,))
    place = mpc_partition_adjacency(sim, tagged, chunk_size=chunk_size)
    mark("partition")

    qs = "Q"
    n = max(g.n, 2)

    def wedges(mid, store):
        res = []
        for w, other in store.get(place.edge_stream, ()):
            for qr in form_wedges((w, other), w, store.get(place.adj_stream, ()), mid):
                res.append((mid, qs, pack_query(qr, n)))
        return res

    holders = sim.step(wedges, active=place.machines, consume=(place.edge_stream, place.adj_stream))
    queries = DistList(qs, holders, 3)
    formed = queries.size(sim)
    mark("wedges")
    T = mpc_filter(sim, queries, place.edges, packed=True)
    mark("filter")
    size = mpc_count(sim, T)
    mark("count")
    if size % 3:
        raise RuntimeError(f"{size} surviving queries is not a multiple of three")
    rows = [tuple(r) for r in T.collect(sim)]
    return TriangleResult(rows, size // 3, _metrics(g, sim, delta, config.S, d),
                          queries_formed=formed, chunk_size=place.chunk_size, per_phase=phases)


def enumerate_triangles(result: TriangleResult, dedup: bool = False) -> list[tuple[int, int, int]]:
    """Vertex triples named by the surviving queries, sorted.

    Without ``dedup`` every triangle appears once per query, three times in all.
    """
    out = []
    for a, c, u, v, _ in result.queries:
        shared = {a, c} & {u, v}
        if len(shared) != 1 or a == c:
            raise ValueError(f"malformed query {(a, c, u, v)}")
        tri = tuple(sorted({a, c, u, v}))
        if len(tri) != 3:
            raise ValueError(f"query {(a, c, u, v)} does not name a triangle")
        out.append(tri)
    out.sort()
    if dedup:
        out = sorted(set(out))
    return out
