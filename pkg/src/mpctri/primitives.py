"""Sort, count, duplicate, count-duplicates, tag-count, filter and adjacency partitioning.

Every primitive is a fixed sequence of supersteps whose length depends only on
delta (and on the key layout), never on the input size. Distributed lists live
in a named stream on an ordered list of machines; the order of that list is
the global order of the data.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .sim import MAX_ARITY, Simulation
from .trees import Scan, base_height, min_fanin, run_scans


class ContractViolation(RuntimeError):
    """A primitive was handed input that breaks its precondition."""


@dataclass
class DistList:
    stream: str
    machines: list[int]
    width: int

    def collect(self, sim: Simulation) -> list[tuple]:
        out: list[tuple] = []
        for m in self.machines:
            out.extend(sim.stores.get(m, {}).get(self.stream, ()))
        return out

    def size(self, sim: Simulation) -> int:
        return sum(len(sim.stores.get(m, {}).get(self.stream, ())) for m in self.machines)

    def chunks(self, sim: Simulation) -> list[list[tuple]]:
        return [list(sim.stores.get(m, {}).get(self.stream, ())) for m in self.machines]


def bulk_cap(S: int) -> int:
    """Words of list data a machine holds, leaving the rest for protocol traffic."""
    return S // 2


def per_machine(S: int, width: int) -> int:
    """Records per machine for list data of the given arity."""
    return max(1, bulk_cap(S) // max(width, 2))


def load_list(sim: Simulation, records: Sequence[tuple], stream: str = "data") -> DistList:
    """Initial placement: consecutive blocks of ``per_machine`` records."""
    if not records:
        return DistList(stream, [], 0)
    width = max(len(r) for r in records)
    rpm = per_machine(sim.S, width)
    k = -(-len(records) // rpm)
    base = sim.alloc(k)
    for j in range(k):
        sim.put(base + j, stream, [tuple(r) for r in records[j * rpm:(j + 1) * rpm]])
    return DistList(stream, [base + j for j in range(k)], width)


def _local(sim: Simulation, machines: list[int], fn, consume=()) -> list[int]:
    return sim.step(fn, active=machines, consume=consume)


def _fresh(prefix: str, sim: Simulation) -> str:
    return f"{prefix}{sim.alloc(1)}"


# ---------------------------------------------------------------- sorting

def radix_layout(n: int, S: int, delta: float) -> tuple[int, int]:
    """Digit base and digits per vertex-sized field.

    Each pass costs a constant number of rounds, so the digit count must not
    grow with n: it is fixed at ceil(1/delta)+1 and the base absorbs n.
    """
    t = math.ceil(1.0 / delta - 1e-9) + 1
    while True:
        beta = max(2, math.ceil(max(n, 2) ** (1.0 / t)))
        while (beta - 1) ** t >= max(n, 2) and beta > 2:
            beta -= 1
        while beta ** t < max(n, 2):
            beta += 1
        if 4 * beta <= S:
            return beta, t
        t += 1


def digits_for(bound: int, beta: int) -> int:
    d, span = 1, beta
    while span < bound:
        span *= beta
        d += 1
    return d


@dataclass(frozen=True)
class KeySpec:
    """Lexicographic sort key over record positions.

    ``bounds`` gives an exclusive upper bound per position (default: the
    simulation's n). A bound may also be a tuple ``(b0, b1, ...)`` describing
    a mixed-radix word ``x0 + b0*(x1 + b1*(...))``; each part gets its own
    digits, so the pass count does not depend on how the parts multiply out. With ``tiebreak`` the remaining positions extend the key,
    making the order a full-record order.
    """

    indices: tuple[int, ...]
    bounds: tuple | None = None
    tiebreak: bool = True

    def expanded(self, width: int, default_bound: int) -> list[tuple[int, int]]:
        idx = list(self.indices)
        bounds = list(self.bounds) if self.bounds is not None else [default_bound] * len(idx)
        if len(bounds) != len(idx):
            raise ValueError("bounds must match indices")
        if any(i < 0 or i >= width for i in idx):
            raise ValueError(f"key index out of range for arity {width}")
        if self.tiebreak:
            for i in range(width):
                if i not in idx:
                    idx.append(i)
                    bounds.append(default_bound)
        return list(zip(idx, bounds))


Source = DistList | tuple[DistList, Callable | None]


def mpc_sort(sim: Simulation, sources: Source | list[Source], key: KeySpec,
             out: str | None = None, width: int | None = None) -> DistList:
    """LSD radix sort; stable, so equal keys keep their input order.

    ``sources`` may be several lists, each with an optional per-record
    transform applied as the records leave on the first pass. They are
    concatenated in the given order.
    """
    if isinstance(sources, DistList) or (isinstance(sources, tuple) and len(sources) == 2
                                         and isinstance(sources[0], DistList)):
        sources = [sources]
    srcs = [(s, None) if isinstance(s, DistList) else s for s in sources]
    out = out or _fresh("_sort", sim)
    if width is None:
        if any(fn is not None for _, fn in srcs):
            raise ValueError("width is required when a transform is given")
        width = max((s.width for s, _ in srcs), default=0)
    default_bound = max(sim.config.n, 2)
    fields = key.expanded(width, default_bound) if width else []
    beta, _ = radix_layout(sim.config.n, sim.S, sim.config.delta)
    passes = []
    limits = []
    for idx, bound in reversed(fields):
        parts = bound if isinstance(bound, tuple) else (bound,)
        P = 1
        for b in parts:
            for p in range(digits_for(b, beta)):
                passes.append((idx, P, b, beta ** p))
            P *= b
        limits.append((idx, P))
    if not passes:
        passes = [(None, 1, 1, 1)]
    machines: list[int] = []
    owner: dict[int, tuple[DistList, Callable | None]] = {}
    for s, fn in srcs:
        for m in s.machines:
            owner[m] = (s, fn)
            machines.append(m)

    def first_view(mid, store):
        s, fn = owner[mid]
        recs = store.get(s.stream, ())
        if fn is not None:
            recs = [fn(r) for r in recs]
        for r in recs:
            if len(r) != width:
                raise ContractViolation(f"record {r} does not have arity {width}")
            for idx, bound in limits:
                if not 0 <= r[idx] < bound:
                    raise ContractViolation(f"key word {r[idx]} at position {idx} outside [0, {bound})")
        return recs

    first_streams = tuple(sorted({s.stream for s, _ in srcs}))
    prev = None
    for pno, spec in enumerate(passes):
        digit = _digit(spec, beta)
        if pno == 0:
            machines = _radix_pass(sim, machines, first_view, first_streams, out, width, digit, beta)
        else:
            def view(mid, store, key=prev):
                recs = store.get(out, [])
                recs.sort(key=key)
                return recs

            machines = _radix_pass(sim, machines, view, (out,), out, width, digit, beta)
        prev = digit
    if passes[-1][0] is not None:
        def settle(mid, store):
            store[out].sort(key=prev)
            return ()

        _local(sim, machines, settle)
    return DistList(out, machines, width)


def _digit(spec, beta):
    idx, P, b, pw = spec
    if idx is None:
        return lambda r: 0
    if P == 1 and b == 1:
        return lambda r: r[idx] // pw % beta
    return lambda r: r[idx] // P % b // pw % beta


def _radix_pass(sim, machines, view, consume, out, width, digit, beta):
    """One stable counting pass on the given digit."""
    pfx = _fresh("_pfx", sim)

    def summarize(mid, store):
        c = Counter(map(digit, view(mid, store)))
        return {d: (k,) for d, k in c.items()}

    def hub(totals):
        base, acc = {}, 0
        for d in sorted(totals):
            base[d] = (acc,)
            acc += totals[d][0]
        return base

    sc = Scan(sim, machines, summarize, lambda a, b: (a[0] + b[0],), 1, pfx, keys=beta, hub=hub)
    run_scans(sim, [sc])
    rpm = per_machine(sim.S, width)
    region = sim.region()

    def route(mid, store):
        off = {r[0]: r[1] for r in store.get(pfx, ())}
        res = []
        for r in view(mid, store):
            d = digit(r)
            pos = off.get(d, 0)
            off[d] = pos + 1
            res.append((region + pos // rpm, out, r))
        return res

    return _local(sim, machines, route, consume=consume + (pfx,))


# ---------------------------------------------------------------- counting

def count_height(machines: int, S: int) -> int:
    h, span = 0, 1
    while span < machines:
        span *= S
        h += 1
    return max(1, h)


def mpc_count(sim: Simulation, lst: DistList) -> int:
    """Exact size of ``lst`` through a fan-in-S aggregation tree."""
    S = sim.S
    level = list(lst.machines)
    h = count_height(len(level), S)
    stream = _fresh("_cnt", sim)
    root = None
    for r in range(1, h + 1):
        base = sim.alloc(max(1, -(-len(level) // S)))
        pos = {m: i for i, m in enumerate(level)}
        if r == 1:
            def fn(mid, store, pos=pos, base=base):
                return [(base + pos[mid] // S, stream, (len(store.get(lst.stream, ())),))]
            level = _local(sim, level, fn)
            # the list data stays put; only the counting messages move
        else:
            def fn(mid, store, pos=pos, base=base):
                return [(base + pos[mid] // S, stream, (sum(x[0] for x in store[stream]),))]
            level = _local(sim, level, fn, consume=(stream,))
        root = base
    if not lst.machines:
        return 0
    total = sum(x[0] for x in sim.stores[root].pop(stream))
    sim._refresh([root])
    return total


# ---------------------------------------------------------------- duplicate

def mpc_duplicate(sim: Simulation, edges: DistList, out: str | None = None) -> DistList:
    """One round: every (u, v) stays and its reversal (v, u) moves to a fresh machine."""
    out = out or _fresh("_dup", sim)
    region = sim.region()
    slot = {m: i for i, m in enumerate(edges.machines)}

    def fn(mid, store):
        res = []
        twin = region + slot[mid]
        for u, v in store.get(edges.stream, ()):
            res.append((mid, out, (u, v)))
            res.append((twin, out, (v, u)))
        return res

    _local(sim, edges.machines, fn, consume=(edges.stream,))
    machines = list(edges.machines) + [region + i for i in range(len(edges.machines))]
    live = [m for m in machines if sim.stores.get(m, {}).get(out)]
    return DistList(out, live, 2)


# ---------------------------------------------------------------- duplicates

def _last(a, b):
    return b


def _segcount(a, b):
    # (first key, count of the first run, last key) over a sorted segment
    fk, fc, lk = a
    if fk == lk and lk == b[0]:
        fc += b[1]
    return (fk, fc, b[2])


def mpc_count_duplicates(sim: Simulation, lst: DistList, key_index: int = 0,
                         out: str | None = None) -> DistList:
    """Sorted ``(key, multiplicity)`` pairs for a list sorted on ``key_index``.

    The machine holding the first record of a run reports it; runs that
    continue onto later machines are completed by a suffix scan.
    """
    out = out or _fresh("_cd", sim)
    region = sim.region()
    slot = {m: i for i, m in enumerate(lst.machines)}
    left, right = _fresh("_l", sim), _fresh("_r", sim)
    ki = key_index

    def last_key(mid, store):
        recs = store.get(lst.stream)
        return {0: (recs[-1][ki],)} if recs else {}

    def seg(mid, store):
        recs = store.get(lst.stream)
        if not recs:
            return {}
        fk, lk = recs[0][ki], recs[-1][ki]
        fc = 1
        while fc < len(recs) and recs[fc][ki] == fk:
            fc += 1
        return {0: (fk, fc, lk)}

    run_scans(sim, [Scan(sim, lst.machines, last_key, _last, 1, left),
                    Scan(sim, lst.machines, seg, _segcount, 3, right, reverse=True)])

    def emit(mid, store):
        recs = store.get(lst.stream, ())
        if not recs:
            return ()
        lp = store.get(left)
        rp = store.get(right)
        prev = lp[0][1] if lp else None
        keys = [r[ki] for r in recs]
        if prev is not None and prev > keys[0]:
            raise ContractViolation(f"input not sorted at machine boundary ({prev} > {keys[0]})")
        res = []
        i = 0
        while i < len(keys):
            j = i
            while j < len(keys) and keys[j] == keys[i]:
                j += 1
            if j < len(keys) and keys[j] < keys[i]:
                raise ContractViolation(f"input not sorted on machine {mid}")
            cnt = j - i
            if j == len(keys) and rp:
                fk, fc, _ = rp[0][1:]
                if fk < keys[i]:
                    raise ContractViolation("input not sorted at machine boundary")
                if fk == keys[i]:
                    cnt += fc
            if not (i == 0 and prev == keys[0]):
                res.append((region + slot[mid], out, (keys[i], cnt)))
            i = j
        return res

    live = _local(sim, lst.machines, emit, consume=(left, right))
    return DistList(out, live, 2)


# ---------------------------------------------------------------- tagging

def mpc_tag_count(sim: Simulation, lst: DistList, counts: DistList, key_index: int = 0,
                  out: str | None = None) -> DistList:
    """Append each record's key multiplicity. Merges by co-sorting with ``counts``."""
    out = out or _fresh("_tag", sim)
    w = lst.width
    if w + 2 > 6:
        raise ValueError("records too wide to tag")
    ki = key_index
    pad = (0,) * (w - 1)
    merged = mpc_sort(
        sim,
        [(counts, lambda r: (r[0], 0, r[1]) + pad), (lst, lambda r: (r[ki], 1) + tuple(r))],
        KeySpec((0, 1), bounds=(max(sim.config.n, 2), 2), tiebreak=False),
        width=w + 2,
    )
    carry = _fresh("_c", sim)

    def summ(mid, store):
        last = None
        recs = store.get(merged.stream)
        for r in recs or ():
            if r[1] == 0:
                last = r
        if last:
            return {0: (last[0], last[2])}
        return {0: ()} if recs else {}

    run_scans(sim, [Scan(sim, merged.machines, summ, _last, 2, carry)])

    def emit(mid, store):
        cp = store.get(carry)
        cur = cp[0][1:] if cp else None
        res = []
        for r in store.get(merged.stream, ()):
            if r[1] == 0:
                cur = (r[0], r[2])
            else:
                if cur is None or cur[0] != r[0]:
                    raise ContractViolation(f"key {r[0]} has no count")
                res.append((mid, out, r[2:] + (cur[1],)))
        return res

    live = _local(sim, merged.machines, emit, consume=(merged.stream, carry))
    return DistList(out, live, w + 1)


# ---------------------------------------------------------------- filter

def pack_query(q: tuple, n: int) -> tuple[int, int, int]:
    """``(a, c, u, v, M)`` as three words: pair key with origin bit, edge, machine."""
    a, c, u, v, m = q
    return ((a * n + c) * 2 + 1, u * n + v, m)


def mpc_filter(sim: Simulation, queries: DistList, edges: DistList, out: str | None = None,
               packed: bool = False) -> DistList:
    """Keep the queries ``(a, c, *payload)`` whose key ``(a, c)`` is an edge.

    Queries and edges are co-sorted on ``(a, c, origin)`` with edges first,
    so each query sees the last edge key before it. In transit a record is
    three words: the pair key with its origin bit, then the payload, where a
    three-word payload ``(u, v, M)`` travels as ``(u*n + v, M)``. With
    ``packed`` the queries already arrive in that form (see :func:`pack_query`).
    """
    out = out or _fresh("_flt", sim)
    qw = 5 if packed else queries.width
    if qw > 5:
        raise ValueError("query payload too wide")
    n = max(sim.config.n, 2)

    def pack_query(r):
        if packed:
            return r
        p = r[2:]
        if len(p) == 3:
            p = (p[0] * n + p[1], p[2])
        p = tuple(p) + (0,) * (2 - len(p))
        return ((r[0] * n + r[1]) * 2 + 1,) + p

    def unpack(r):
        a, c = divmod(r[0] >> 1, n)
        if qw == 5:
            return (a, c) + divmod(r[1], n) + (r[2],)
        return (a, c) + r[1:qw - 1]

    merged = mpc_sort(
        sim,
        [(edges, lambda r: ((r[0] * n + r[1]) * 2, 0, 0)), (queries, pack_query)],
        KeySpec((0,), bounds=((2, n, n),), tiebreak=False),
        width=3,
    )
    seen, rank = _fresh("_e", sim), _fresh("_k", sim)

    def last_edge(mid, store):
        last = None
        recs = store.get(merged.stream)
        for r in recs or ():
            if not r[0] & 1:
                last = r
        if last:
            return {0: (last[0] >> 1,)}
        return {0: ()} if recs else {}

    def survivors(mid, store):
        sp = store.get(seen)
        cur = sp[0][1] if sp else None
        keep = []
        for r in store.get(merged.stream, ()):
            if not r[0] & 1:
                cur = r[0] >> 1
            elif cur == r[0] >> 1:
                keep.append(r)
        store[merged.stream] = keep
        store.pop(seen, None)
        return {0: (len(keep),)} if keep else {}

    run_scans(sim, [Scan(sim, merged.machines, last_edge, _last, 1, seen)])
    run_scans(sim, [Scan(sim, merged.machines, survivors, lambda a, b: (a[0] + b[0],), 1, rank)])
    rpm = per_machine(sim.S, qw)
    region = sim.region()

    def route(mid, store):
        rp = store.get(rank)
        pos = rp[0][1] if rp else 0
        res = []
        for r in store.get(merged.stream, ()):
            res.append((region + pos // rpm, out, unpack(r)))
            pos += 1
        return res

    live = _local(sim, merged.machines, route, consume=(merged.stream, rank))
    return DistList(out, live, qw)


# ---------------------------------------------------------------- partition

def chunk_size_for(S: int) -> int:
    """Adjacency records per chunk; a chunk's queries must fit in the bulk cap."""
    return max(1, bulk_cap(S) // MAX_ARITY)


@dataclass
class Placement:
    """Chunk machines, each holding one edge ``(w, other)`` and a slice of ``w``'s adjacency."""

    machines: list[int]
    edge_stream: str
    adj_stream: str
    chunk_size: int
    edges: DistList
    copies: int = 0

    def contents(self, sim: Simulation) -> list[tuple[tuple, list[tuple]]]:
        res = []
        for m in self.machines:
            st = sim.stores.get(m, {})
            for e in st.get(self.edge_stream, ()):
                res.append((e, list(st.get(self.adj_stream, ()))))
        return res


def _adj_seg(a, b):
    # (marker K total, first adjacency key, last adjacency key, count of its run)
    T = a[0] + b[0]
    if b[1] < 0:
        return (T,) + a[1:]
    if a[1] < 0:
        return (T,) + b[1:]
    cnt = b[3] + (a[3] if b[1] == b[2] == a[2] else 0)
    return (T, a[1], b[2], cnt)


def mpc_partition_adjacency(sim: Simulation, tagged: DistList, chunk_size: int | None = None) -> Placement:
    """Co-locate every edge with each chunk of its lower-degree endpoint's adjacency.

    ``tagged`` holds oriented edges ``(x, y, deg(x))``. Ties in degree go to
    the smaller id. For a chosen endpoint ``w`` with ``c_w`` chosen edges and
    ``K_w = ceil(deg(w)/q)`` chunks, edge number ``j`` of ``w`` owns machines
    ``B_w + j*K_w + b`` for ``b < K_w``, where ``B_w`` sums ``c*K`` over
    smaller vertices. Adjacency record ``i`` of ``w`` is copied to slot
    ``i // q`` of every one of those blocks.
    """
    S = sim.S
    q = chunk_size or chunk_size_for(S)
    n = max(sim.config.n, 2)

    # twin join: bring the two orientations of each edge together
    tw = mpc_sort(
        sim,
        [(tagged, lambda r: (r[0], r[1], 0, r[2]) if r[0] < r[1] else (r[1], r[0], 1, r[2]))],
        KeySpec((0, 1, 2), bounds=(n, n, 2), tiebreak=False),
        width=4,
    )
    carry = _fresh("_tw", sim)

    def last_rec(mid, store):
        recs = store.get(tw.stream)
        return {0: (recs[-1][0], recs[-1][1], recs[-1][3])} if recs else {}

    run_scans(sim, [Scan(sim, tw.machines, last_rec, _last, 3, carry)])
    slot = {m: i for i, m in enumerate(tw.machines)}
    e_reg, mk_reg = sim.region(), sim.region()
    pp, es = _fresh("_pp", sim), _fresh("_E", sim)

    def emit(mid, store):
        cp = store.get(carry)
        prev = cp[0][1:] if cp else None
        res = []
        for a, b, side, d in store.get(tw.stream, ()):
            if side == 0:
                res.append((mid, pp, (a, 0, b, d)))
                res.append((e_reg + slot[mid], es, (a, b)))
            else:
                if prev is None or prev[0] != a or prev[1] != b:
                    raise ContractViolation(f"oriented edge ({b}, {a}) has no reverse")
                da, db = prev[2], d
                if da <= db:
                    res.append((mk_reg + slot[mid], pp, (a, 1, b, da)))
                else:
                    res.append((mk_reg + slot[mid], pp, (b, 1, a, db)))
                res.append((mid, pp, (b, 0, a, d)))
            prev = (a, b, d)
        return res

    _local(sim, tw.machines, emit, consume=(tw.stream, carry))
    live = lambda ms, st: [m for m in ms if sim.stores.get(m, {}).get(st)]
    E = DistList(es, live([e_reg + i for i in range(len(tw.machines))], es), 2)
    adj = DistList(pp, live(tw.machines, pp), 4)
    marks = DistList(pp, live([mk_reg + i for i in range(len(tw.machines))], pp), 4)

    # adjacency run of x first, then the markers of the edges that chose x
    srt = mpc_sort(sim, [adj, marks], KeySpec((0, 1, 2), bounds=(n, 2, n), tiebreak=False))
    recs_of = lambda store: store.get(srt.stream, ())
    K = lambda d: -(-d // q)
    left, right, mult = _fresh("_a", sim), _fresh("_m", sim), _fresh("_u", sim)

    def summ_left(mid, store):
        recs = recs_of(store)
        if not recs:
            return {}
        T = sum(K(r[3]) for r in recs if r[1] == 1)
        xs = [r[0] for r in recs if r[1] == 0]
        if not xs:
            return {0: (T, -1, -1, 0)}
        lx = xs[-1]
        cnt = 0
        for x in reversed(xs):
            if x != lx:
                break
            cnt += 1
        return {0: (T, xs[0], lx, cnt)}

    def summ_right(mid, store):
        recs = recs_of(store)
        if not recs:
            return {}
        xs = [r[0] for r in recs if r[1] == 1]
        if not xs:
            return {0: ()}
        fc = 0
        for x in xs:
            if x != xs[0]:
                break
            fc += 1
        return {0: (xs[0], fc, xs[-1])}

    run_scans(sim, [Scan(sim, srt.machines, summ_left, _adj_seg, 4, left),
                    Scan(sim, srt.machines, summ_right, _segcount, 3, right, reverse=True)])

    def ranges(mid, store):
        # replace each record by (multiplicity, x, y, step, base * 2 + kind)
        recs = store.pop(srt.stream, [])
        lp, rp = store.pop(left, None), store.pop(right, None)
        T, lx, lcnt = (lp[0][1], lp[0][3], lp[0][4]) if lp else (0, -1, 0)
        rk, rc = (rp[0][1], rp[0][2]) if rp else (-1, 0)
        local_marks = Counter(r[0] for r in recs if r[1] == 1)
        out = []
        rank_x, rank = lx, lcnt
        for x, kind, y, d in recs:
            k = K(d)
            if kind == 1:
                out.append((k, x, y, 1, T * 2 + 1))
                T += k
            else:
                if x != rank_x:
                    rank_x, rank = x, 0
                c = local_marks[x] + (rc if rk == x else 0)
                out.append((c, x, y, k, (T + rank // q) * 2))
                rank += 1
        store[mult] = out
        return {0: (sum(r[0] for r in out),)} if out else {}

    rank_s = _fresh("_o", sim)
    run_scans(sim, [Scan(sim, srt.machines, ranges, lambda a, b: (a[0] + b[0],), 1, rank_s)])
    chunk_base = sim.region()
    machines, copies = _expand(sim, srt.machines, mult, rank_s, chunk_base, {1: "pe", 0: "pa"})
    return Placement(machines, "pe", "pa", q, E, copies)


def expand_shape(S: int, delta: float, n: int) -> tuple[int, int, int]:
    """(copies per relay machine, fan-out, height) for range forwarding."""
    R = max(1, bulk_cap(S) // MAX_ARITY)
    fmax = S // (2 * MAX_ARITY) + 1
    span = -(-max(n, 2) // R) + 1
    h = base_height(delta)
    f = min_fanin(span, h)
    while f > fmax:
        h += 1
        f = min_fanin(span, h)
    return R, f, h


def _expand(sim: Simulation, leaves: list[int], stream: str, rank: str, dest_base: int,
            streams: dict[int, str]) -> tuple[list[int], int]:
    """Write ``mu`` copies of each range record ``(mu, x, y, step, base*2+kind)``.

    Copy ``j`` of a record goes to ``dest_base + base + j*step``. Copies are
    laid out in a dense position space; each relay machine owns ``R``
    positions. A range that runs past its first relay is spread over the
    relays it covers with an ``F``-ary broadcast of fixed height.
    """
    R, F, H = expand_shape(sim.S, sim.config.delta, sim.config.n)
    relay = sim.region()
    own, fwd = _fresh("_rg", sim), _fresh("_rf", sim)

    def route(mid, store):
        rp = store.get(rank)
        o = rp[0][1] if rp else 0
        res = []
        for mu, x, y, step, b2 in store.get(stream, ()):
            if mu:
                res.append((relay + o // R, own, (o, mu, x, y, step, b2)))
                o += mu
        return res

    holders = set(_local(sim, leaves, route, consume=(stream, rank)))
    copies = 0

    for rho in range(1, H + 1):
        stride = F ** (H - rho)

        def forward(mid, store, stride=stride):
            k = mid - relay
            cands = []
            mine = store.get(own)
            if mine and mine[-1][0] + mine[-1][1] > (k + 1) * R:
                cands.append(mine[-1])
            cands.extend(store.get(fwd, ()))
            res = []
            for rec in cands:
                o, mu = rec[0], rec[1]
                k0 = o // R
                span = (o + mu - 1) // R - k0 + 1
                t = k - k0
                if t % (stride * F):
                    continue
                for a in range(1, F):
                    tt = t + a * stride
                    if tt < span:
                        res.append((relay + k0 + tt, fwd, rec))
            return res

        holders.update(_local(sim, sorted(holders), forward, consume=()))

    def deliver(mid, store):
        k = mid - relay
        lo, hi = k * R, (k + 1) * R
        res = []
        for o, mu, x, y, step, b2 in list(store.get(own, ())) + list(store.get(fwd, ())):
            base, kind = b2 >> 1, b2 & 1
            st = streams[kind]
            for p in range(max(o, lo), min(o + mu, hi)):
                res.append((dest_base + base + (p - o) * step, st, (x, y)))
        return res

    out = _local(sim, sorted(holders), deliver, consume=(own, fwd))
    for m in out:
        copies += sum(len(v) for v in sim.stores[m].values())
    return out, copies
