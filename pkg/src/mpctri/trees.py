"""Fixed-height reduction trees over an ordered list of leaf machines.

A scan hands every leaf the exclusive prefix (or suffix) of per-key summaries
from the leaves before it. Summaries are sparse: a leaf reports only the keys
it holds and receives prefixes only for those keys; a missing prefix is the
identity. A leaf that contributes nothing to a key but still needs its
prefix reports an empty value. Tree height depends on delta alone, so round counts do not move
with the input size. Several scans over the same leaves can share supersteps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .sim import Simulation

Op = Callable[[tuple, tuple], tuple]
Summarize = Callable[[int, dict], dict]


def base_height(delta: float) -> int:
    return 2 * math.ceil(1.0 / delta - 1e-9) + 1


def min_fanin(leaves: int, height: int) -> int:
    f = 2
    while f ** height < leaves:
        f += 1
    return f


def min_height(leaves: int, fanin: int) -> int:
    h, span = 0, 1
    while span < leaves:
        span *= fanin
        h += 1
    return h


@dataclass
class TreeShape:
    height: int
    fanin: int
    group: int


SMALL_TREE = 8
WIDE_FANIN = 8


def plan_tree(S: int, delta: float, leaves: int, width: int, keys: int = 1) -> TreeShape:
    """Pick the tree for ``leaves`` leaves carrying ``width``-word values.

    A host stores up to ``fanin * group`` child entries of ``width + 1`` words
    (child slot and key share a word) plus ``group`` prefixes of ``width + 1``
    words. Above ``SMALL_TREE``
    leaves the height never drops below the delta-dependent base and grows
    only when the fan-in would not fit; tiny lists get a binary tree of
    minimal height instead.
    """
    fmax = (S - (width + 1)) // (width + 1)
    if fmax < 2:
        raise ValueError(f"S={S} too small for {width}-word scan summaries")
    if leaves <= SMALL_TREE:
        h = max(1, min_height(leaves, 2))
        g = max(1, min(keys, S // (3 * (width + 1))))
        return TreeShape(h, 2, g)
    h = base_height(delta)
    f = min_fanin(leaves, h)
    while f > fmax:
        h += 1
        f = min_fanin(leaves, h)
    # wider nodes mean fewer stored copies of the summaries
    f = max(f, min(fmax, WIDE_FANIN))
    g = max(1, min(keys, S // ((f + 1) * (width + 1))))
    return TreeShape(h, f, g)


class Scan:
    """One keyed scan. Drive it through :func:`run_scans`."""

    def __init__(self, sim: Simulation, leaves: list[int], summarize: Summarize, op: Op,
                 width: int, out: str, keys: int = 1, hub: Callable[[dict], dict] | None = None,
                 reverse: bool = False):
        self.sim = sim
        self.leaves = list(leaves)
        self.summarize = summarize
        self.op = (lambda a, b: op(b, a)) if reverse else op
        self.width = width
        self.out = out
        self.keys = keys
        self.hub = hub
        L = len(self.leaves)
        self.shape = plan_tree(sim.S, sim.config.delta, max(L, 1), width, keys)
        H, f, g = self.shape.height, self.shape.fanin, self.shape.group
        self.ngroups = -(-keys // g)
        self.slot = {m: (L - 1 - i if reverse else i) for i, m in enumerate(self.leaves)}
        self.leaf_at = {s: m for m, s in self.slot.items()}
        # host ids per level: base + block * ngroups + group
        self.level_base = [0]
        self.where: dict[int, tuple[int, int]] = {}
        for lvl in range(1, H + 1):
            blocks = -(-max(L, 1) // f ** lvl)
            self.level_base.append(sim.alloc(blocks * self.ngroups))
        self.hub_id = sim.alloc(1)
        tag = id(self)
        self.su = f"_su{tag}"
        self.sd = f"_sd{tag}"
        self.sh = f"_sh{tag}"
        self.rounds = 2 * H + (2 if hub else 0) if L > 1 else 1

    def host(self, lvl: int, blk: int, key: int) -> int:
        mid = self.level_base[lvl] + blk * self.ngroups + key // self.shape.group
        self.where[mid] = (lvl, blk)
        return mid

    def _fold(self, entries: list) -> dict:
        op = self.op
        acc: dict = {}
        K = self.keys
        for e in sorted(entries, key=lambda e: (e[0] % K, e[0])):
            k, val = e[0] % K, e[1:]
            cur = acc.get(k)
            if cur is None or not cur:
                acc[k] = val
            elif val:
                acc[k] = op(cur, val)
        return acc

    # one round of the schedule; returns (active list, handler, consumed streams)
    def phase(self, r: int):
        H = self.shape.height
        f = self.shape.fanin
        if len(self.leaves) <= 1:
            # a lone leaf has nothing before it; only the hub offsets apply
            def alone(mid, store):
                summ = self.summarize(mid, store)
                if not self.hub:
                    return ()
                base = self.hub({k: tuple(v) for k, v in summ.items() if v})
                return [(mid, self.out, (k,) + tuple(v)) for k, v in sorted(base.items())]
            return self.leaves, alone, ()
        if r == 1:
            def leaf_up(mid, store):
                s = self.slot[mid]
                summ = self.summarize(mid, store)
                K = self.keys
                return [(self.host(1, s // f, k), self.su, (s * K + k,) + tuple(v))
                        for k, v in sorted(summ.items())]
            return self.leaves, leaf_up, ()
        if r <= H:
            lvl = r - 1

            def up(mid, store):
                _, blk = self.where[mid]
                acc = self._fold(store.get(self.su, ()))
                K = self.keys
                return [(self.host(lvl + 1, blk // f, k), self.su, (blk * K + k,) + v)
                        for k, v in acc.items()]
            return self._hosts(lvl), up, ()
        d = r - H
        if self.hub:
            if d == 1:
                def to_hub(mid, store):
                    acc = self._fold(store.get(self.su, ()))
                    return [(self.hub_id, self.sh, (k,) + v) for k, v in acc.items()]
                return self._hosts(H), to_hub, ()
            if d == 2:
                def from_hub(mid, store):
                    totals = {rec[0]: rec[1:] for rec in store.get(self.sh, ())}
                    base = self.hub(totals)
                    return [(self.host(H, 0, k), self.sd, (k,) + tuple(v))
                            for k, v in sorted(base.items())]
                return [self.hub_id], from_hub, (self.sh,)
            d -= 2
        lvl = H - d + 1

        def down(mid, store):
            op = self.op
            pre = {rec[0]: rec[1:] for rec in store.get(self.sd, ())}
            _, blk = self.where[mid]
            out = []
            K = self.keys
            for e in sorted(store.get(self.su, ()), key=lambda e: (e[0] % K, e[0])):
                child, k = divmod(e[0], K)
                val = e[1:]
                acc = pre.get(k)
                if acc:
                    if lvl == 1:
                        out.append((self.leaf_at[child], self.out, (k,) + acc))
                    else:
                        out.append((self.host(lvl - 1, child, k), self.sd, (k,) + acc))
                    if val:
                        pre[k] = op(acc, val)
                else:
                    pre[k] = val
            return out
        return self._hosts(lvl), down, (self.su, self.sd)

    def _hosts(self, lvl: int) -> list[int]:
        return sorted(m for m, (l, _) in self.where.items() if l == lvl)


def run_scans(sim: Simulation, scans: list[Scan]) -> None:
    """Run scans side by side; a leaf shared by several scans serves each in turn."""
    total = max(s.rounds for s in scans)
    for r in range(1, total + 1):
        handlers: dict[int, list] = {}
        order: list[int] = []
        consume: set[str] = set()
        for sc in scans:
            if r > sc.rounds:
                continue
            active, fn, cons = sc.phase(r)
            consume.update(cons)
            for mid in active:
                if mid not in handlers:
                    handlers[mid] = []
                    order.append(mid)
                handlers[mid].append(fn)

        def local(mid, store):
            fns = handlers[mid]
            if len(fns) == 1:
                return fns[0](mid, store)
            out = []
            for fn in fns:
                out.extend(fn(mid, store))
            return out

        sim.step(local, active=order, consume=sorted(consume))


def scan(sim: Simulation, leaves: list[int], summarize: Summarize, op: Op, width: int,
         out: str, **kw) -> Scan:
    sc = Scan(sim, leaves, summarize, op, width, out, **kw)
    run_scans(sim, [sc])
    return sc
