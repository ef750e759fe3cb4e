"""Simple undirected graphs: canonical edge lists, ingestion, degrees and generators."""

from __future__ import annotations

import heapq
import io
import random
import re
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

Edge = tuple[int, int]

_HEADER = re.compile(r"^#\s*n\s*[=:]?\s*(\d+)\s*$")


class GraphError(ValueError):
    """Raised for invalid graph data."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on vertices ``0..n-1``.

    ``edges`` is sorted, duplicate free and every edge satisfies ``u < v``.
    Use :meth:`from_edges` to build one from arbitrary pairs.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        prev = None
        for e in self.edges:
            u, v = e
            if not 0 <= u < v < self.n:
                raise GraphError(f"edge {e} is not canonical for n={self.n}")
            if prev is not None and e <= prev:
                raise GraphError("edges must be sorted and distinct")
            prev = e

    @classmethod
    def from_edges(cls, pairs: Iterable[tuple[int, int]], n: int | None = None) -> "Graph":
        canon = set()
        hi = -1
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u < 0 or v < 0:
                raise GraphError(f"negative vertex id in ({u}, {v})")
            canon.add((u, v) if u < v else (v, u))
            hi = max(hi, u, v)
        if n is None:
            n = hi + 1
        return cls(n, tuple(sorted(canon)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for row in adj:
            row.sort()
        return adj

    def as_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def to_edge_list(self) -> str:
        lines = [f"# n = {self.n}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"


def load_edge_list(stream: TextIO | str, n: int | None = None) -> Graph:
    """Parse whitespace separated ``u v`` pairs.

    Lines starting with ``#`` are comments; a comment of the form
    ``# n = 12`` fixes the vertex count (an explicit ``n`` argument wins).
    Otherwise ``n`` is one more than the largest id seen.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    header_n = None
    pairs = []
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            match = _HEADER.match(text)
            if match:
                header_n = int(match.group(1))
            continue
        tokens = text.split()
        if len(tokens) != 2:
            raise ParseError(lineno, f"expected two vertex ids, got {len(tokens)} tokens")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(lineno, f"malformed vertex id in {text!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, f"negative vertex id in {text!r}")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        pairs.append((u, v))
    if n is None:
        n = header_n
    hi = max((max(p) for p in pairs), default=-1)
    if n is not None and hi >= n:
        raise GraphError(f"vertex id {hi} out of range for n={n}")
    return Graph.from_edges(pairs, n=hi + 1 if n is None else n)


def relabel_dense(g: Graph) -> tuple[Graph, list[int]]:
    """Drop isolated vertices and renumber the rest densely.

    Returns the new graph and the list mapping new ids to old ids.
    """
    used = sorted({x for e in g.edges for x in e})
    index = {old: new for new, old in enumerate(used)}
    return Graph.from_edges(((index[u], index[v]) for u, v in g.edges), n=len(used)), used


def degree_vector(g: Graph) -> np.ndarray:
    if g.m == 0:
        return np.zeros(g.n, dtype=np.int64)
    return np.bincount(g.as_array().ravel(), minlength=g.n).astype(np.int64)


def degeneracy(g: Graph) -> int:
    """Largest degree seen at removal time when repeatedly deleting a minimum-degree vertex."""
    if g.m == 0:
        return 0
    adj = g.adjacency()
    deg = [len(a) for a in adj]
    maxd = max(deg)
    buckets: list[set[int]] = [set() for _ in range(maxd + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * g.n
    best = 0
    low = 0
    for _ in range(g.n):
        while not buckets[low]:
            low += 1
        v = min(buckets[low])
        buckets[low].remove(v)
        removed[v] = True
        best = max(best, low)
        for x in adj[v]:
            if not removed[x]:
                d = deg[x]
                buckets[d].remove(x)
                deg[x] = d - 1
                buckets[d - 1].add(x)
        low = max(low - 1, 0)
    return best


def min_degree_endpoint_sum(g: Graph) -> int:
    deg = degree_vector(g)
    return int(sum(min(deg[u], deg[v]) for u, v in g.edges))


def alpha_interval(d: int) -> tuple[int, int]:
    """Bounds on arboricity implied by degeneracy ``d`` (alpha <= d <= 2*alpha - 1)."""
    if d == 0:
        return (0, 0)
    return ((d + 2) // 2, d)


def prufer_to_tree(seq: list[int], n: int) -> list[Edge]:
    """Decode a Prüfer sequence of length ``n - 2`` into the edges of a labelled tree."""
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x) if leaf < x else (x, leaf))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b) if a < b else (b, a))
    return edges


def gen_forest_union(n: int, k: int, seed: int = 0, keep: float = 1.0) -> Graph:
    """Union of ``k`` uniform random spanning trees of K_n, each edge kept with probability ``keep``.

    Every forest contributes one forest to a decomposition, so the result has
    arboricity at most ``k``.
    """
    if n < 1 or k < 0:
        raise GraphError("need n >= 1 and k >= 0")
    if not 0.0 <= keep <= 1.0:
        raise GraphError("keep must lie in [0, 1]")
    rng = random.Random(seed)
    edges: set[Edge] = set()
    for _ in range(k):
        seq = [rng.randrange(n) for _ in range(max(n - 2, 0))]
        for e in prufer_to_tree(seq, n):
            if keep >= 1.0 or rng.random() < keep:
                edges.add(e)
    return Graph(n, tuple(sorted(edges)))


def _pair_from_index(idx: int, n: int) -> Edge:
    # row u holds pairs (u, u+1..n-1); rows are laid out consecutively
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        start = mid * (2 * n - mid - 1) // 2
        if start <= idx:
            lo = mid
        else:
            hi = mid - 1
    u = lo
    start = u * (2 * n - u - 1) // 2
    return (u, u + 1 + idx - start)


def gen_gnm(n: int, m: int, seed: int = 0) -> Graph:
    """``m`` distinct edges drawn uniformly from the ``n(n-1)/2`` possible pairs."""
    total = n * (n - 1) // 2
    if n < 0 or not 0 <= m <= total:
        raise GraphError(f"m={m} out of range for n={n} (max {total})")
    rng = random.Random(seed)
    picks = rng.sample(range(total), m)
    return Graph(n, tuple(sorted(_pair_from_index(i, n) for i in picks)))


def is_acyclic(g: Graph) -> bool:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
