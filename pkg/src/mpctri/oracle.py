"""Sequential references for checking simulator runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations

from .graph import Graph, degeneracy, degree_vector, min_degree_endpoint_sum

TRIPLE_LOOP_LIMIT = 64
ORACLE_LIMIT = 5000


@dataclass
class OracleReport:
    triangle_count: int
    triangles: list[tuple[int, int, int]]
    wedge_query_total: int
    min_degree_sum: int

    def to_json(self) -> str:
        d = asdict(self)
        d["triangles"] = [list(t) for t in self.triangles]
        return json.dumps(d, sort_keys=True)


def triangles_by_triples(g: Graph) -> list[tuple[int, int, int]]:
    """Every vertex triple checked against the edge set; cubic in n."""
    es = set(g.edges)
    return [t for t in combinations(range(g.n), 3)
            if (t[0], t[1]) in es and (t[0], t[2]) in es and (t[1], t[2]) in es]


def triangles_by_intersection(g: Graph) -> list[tuple[int, int, int]]:
    """For each edge (u, v), neighbours of both that exceed v; each triangle once."""
    nbrs = [set(a) for a in g.adjacency()]
    out = []
    for u, v in g.edges:
        for x in sorted(nbrs[u] & nbrs[v]):
            if x > v:
                out.append((u, v, x))
    out.sort()
    return out


def wedge_query_total(g: Graph) -> int:
    deg = degree_vector(g)
    return int(sum(max(min(deg[u], deg[v]) - 1, 0) for u, v in g.edges))


def brute_force_triangles(g: Graph, method: str | None = None) -> OracleReport:
    if method is None:
        method = "triples" if g.n <= TRIPLE_LOOP_LIMIT else "intersection"
    if method == "triples":
        tris = triangles_by_triples(g)
    elif method == "intersection":
        tris = triangles_by_intersection(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OracleReport(len(tris), tris, wedge_query_total(g), min_degree_endpoint_sum(g))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Verdict:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]


def verify_run(g: Graph, result, report: OracleReport | None = None) -> Verdict:
    """Five checks of a run against the oracle; failures are recorded, not raised."""
    from .triangles import enumerate_triangles

    rep = report or brute_force_triangles(g)
    v = Verdict()
    got = result.triangle_count
    v.checks.append(Check("count", got == rep.triangle_count,
                          f"mpc {got}, oracle {rep.triangle_count}"))
    t = len(result.queries)
    v.checks.append(Check("multiplicity", t == 3 * got, f"|T|={t}, 3*count={3 * got}"))
    try:
        tris = enumerate_triangles(result, dedup=True)
        ok = tris == rep.triangles
        detail = f"{len(tris)} distinct triples" + ("" if ok else f", oracle has {len(rep.triangles)}")
    except ValueError as exc:
        ok, detail = False, str(exc)
    v.checks.append(Check("triangle_set", ok, detail))
    v.checks.append(Check("wedge_total", result.queries_formed == rep.wedge_query_total,
                          f"formed {result.queries_formed}, oracle {rep.wedge_query_total}"))
    d = degeneracy(g)
    bound = 2 * g.m * d
    v.checks.append(Check("min_degree_bound", rep.min_degree_sum <= bound,
                          f"{rep.min_degree_sum} <= 2*m*d = {bound}"))
    return v
