"""Deterministic superstep engine for the massively parallel computation model.

Machines are integer ids. Each machine owns a store mapping stream names to
lists of records (tuples of ints); one word per tuple entry. Within a
superstep every active machine runs a local function against its store, the
emitted messages are buffered, and delivery happens at the barrier. Machines
are evaluated in the order of the ``active`` list and messages are appended to
their destination in evaluation order, so runs are fully reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

Record = tuple
Store = dict[str, list]
LocalFn = Callable[[int, Store], Iterable[tuple[int, str, Record]]]

S_FLOOR = 64
MAX_ARITY = 6
MAIN = "main"


class SimError(RuntimeError):
    pass


class BudgetViolation(SimError):
    def __init__(self, machine: int, round_no: int, kind: str, words: int, budget: int):
        self.machine = machine
        self.round = round_no
        self.kind = kind
        self.overflow = words - budget
        super().__init__(
            f"machine {machine} {kind} {words} words in round {round_no} "
            f"(budget {budget}, overflow {words - budget})"
        )


class CapacityError(SimError):
    pass


class ArityError(SimError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n: int
    delta: float
    S: int
    M_max: int | None = None

    @classmethod
    def make(cls, n: int, delta: float, M_max: int | None = None, floor: int = S_FLOOR) -> "SimConfig":
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        if n < 0:
            raise ValueError("n must be non-negative")
        S = max(math.ceil(max(n, 1) ** delta - 1e-9), floor)
        return cls(n=n, delta=delta, S=S, M_max=M_max)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.S < 1:
            raise ValueError("S must be positive")


@dataclass
class RoundTrace:
    rounds: int = 0
    peak_machine_load: int = 0
    peak_total_load: int = 0
    machines_used: int = 0
    per_round: list[tuple[int, int, int]] = field(default_factory=list)

    def copy(self) -> "RoundTrace":
        return RoundTrace(self.rounds, self.peak_machine_load, self.peak_total_load,
                          self.machines_used, list(self.per_round))


@dataclass(frozen=True)
class RunMetrics:
    rounds: int
    peak_machine_load: int
    peak_total_records: int
    machines_used: int
    alpha_lower: int
    alpha_upper: int
    n: int
    m: int
    delta: float
    S: int

    @property
    def alpha_interval(self) -> tuple[int, int]:
        return (self.alpha_lower, self.alpha_upper)

    def to_dict(self) -> dict:
        return asdict(self)


def _words(records: list) -> int:
    return sum(map(len, records))


class Simulation:
    """Machine array plus the superstep engine and its running trace."""

    def __init__(self, config: SimConfig, check_arity: bool = True):
        self.config = config
        self.S = config.S
        self.stores: dict[int, Store] = {}
        self.loads: dict[int, int] = {}
        self.total = 0
        self._next_id = 0
        self.check_arity = check_arity
        self._trace = RoundTrace()
        self.last_receivers: list[int] = []

    # id management -------------------------------------------------------

    def alloc(self, k: int) -> int:
        """Reserve ``k`` fresh machine ids and return the first one."""
        base = self._next_id
        self._next_id += max(int(k), 1)
        return base

    def region(self) -> int:
        """Base of a fresh id range wide enough for any single output list."""
        return self.alloc(1 << 40)

    # state ---------------------------------------------------------------

    def put(self, mid: int, stream: str, records: list) -> None:
        """Place records before any superstep runs (initial partitioning)."""
        store = self.stores.setdefault(mid, {})
        store.setdefault(stream, []).extend(records)
        self._refresh([mid])
        self._note_peaks(len(self.loads))

    def records(self, mid: int, stream: str = MAIN) -> list:
        return list(self.stores.get(mid, {}).get(stream, ()))

    def live_machines(self) -> list[int]:
        return sorted(self.loads)

    def machine_load(self, mid: int) -> int:
        return self.loads.get(mid, 0)

    @property
    def trace(self) -> RoundTrace:
        return self._trace

    def _refresh(self, mids: Iterable[int]) -> None:
        loads = self.loads
        for mid in mids:
            store = self.stores.get(mid)
            w = 0
            if store:
                for name in [k for k, v in store.items() if not v]:
                    del store[name]
                for recs in store.values():
                    w += _words(recs)
            old = loads.get(mid, 0)
            self.total += w - old
            if w:
                loads[mid] = w
                if w > self.S:
                    raise BudgetViolation(mid, self._trace.rounds, "holds", w, self.S)
            else:
                loads.pop(mid, None)
                self.stores.pop(mid, None)

    def _note_peaks(self, in_use: int) -> None:
        t = self._trace
        if self.loads:
            t.peak_machine_load = max(t.peak_machine_load, max(self.loads.values()))
        t.peak_total_load = max(t.peak_total_load, self.total)
        t.machines_used = max(t.machines_used, in_use)
        cap = self.config.M_max
        if cap is not None and in_use > cap:
            raise CapacityError(f"{in_use} machines in use exceeds M_max={cap}")

    # superstep -----------------------------------------------------------

    def step(self, local_fn: LocalFn, active: Iterable[int] | None = None,
             consume: Iterable[str] | None = None) -> list[int]:
        """Run one superstep and return the sorted list of receiving machines.

        ``active`` lists the machines that compute this round (default: every
        machine holding data). ``consume`` names the streams that the active
        machines give up after computing (default: all of them). Self-sends
        occupy space but do not count as communication.
        """
        S = self.S
        round_no = self._trace.rounds + 1
        if active is None:
            active = sorted(self.loads)
        else:
            active = list(active)
        consume_all = consume is None
        consume = () if consume is None else tuple(consume)
        inbox: dict[int, list] = {}
        own: dict[int, int] = {}
        sent_max = 0
        stores = self.stores
        for mid in active:
            store = stores.get(mid, {})
            out = local_fn(mid, store)
            if out:
                sent = 0
                for msg in out:
                    dest = msg[0]
                    box = inbox.get(dest)
                    if box is None:
                        box = inbox[dest] = []
                    box.append(msg)
                    if dest == mid:
                        own[mid] = own.get(mid, 0) + len(msg[2])
                    else:
                        sent += len(msg[2])
                if sent > S:
                    raise BudgetViolation(mid, round_no, "sent", sent, S)
                if sent > sent_max:
                    sent_max = sent
            if store:
                if consume_all:
                    store.clear()
                else:
                    for name in consume:
                        store.pop(name, None)
        recv_max = 0
        for dest, box in inbox.items():
            store = stores.get(dest)
            if store is None:
                store = stores[dest] = {}
            words = 0
            last_stream, lst = None, None
            for _, stream, rec in box:
                w = len(rec)
                if w > MAX_ARITY:
                    raise ArityError(f"record of arity {w} exceeds {MAX_ARITY}")
                words += w
                if stream != last_stream:
                    lst = store.get(stream)
                    if lst is None:
                        lst = store[stream] = []
                    last_stream = stream
                lst.append(rec)
            received = words - own.get(dest, 0)
            if received > S:
                raise BudgetViolation(dest, round_no, "received", received, S)
            if received > recv_max:
                recv_max = received
        touched = set(active)
        touched.update(inbox)
        self._trace.rounds = round_no
        self._refresh(touched)
        self._note_peaks(len(self.loads.keys() | touched))
        self._trace.per_round.append((sent_max, recv_max, len(touched)))
        self.last_receivers = sorted(inbox)
        return self.last_receivers


def new_simulation(config: SimConfig, initial: list, fill: int | None = None,
                   stream: str = MAIN) -> Simulation:
    """Spread ``initial`` round-robin over just enough machines.

    With the default ``fill`` of ``S`` words per machine this uses
    ``ceil(total_words / S)`` machines when records share one arity.
    """
    sim = Simulation(config)
    if not initial:
        return sim
    fill = config.S if fill is None else fill
    width = max(len(r) for r in initial)
    if width > MAX_ARITY:
        raise ArityError(f"record of arity {width} exceeds {MAX_ARITY}")
    if width > fill:
        raise ValueError(f"record width {width} exceeds fill {fill}")
    total = sum(len(r) for r in initial)
    k = max(math.ceil(total / fill), math.ceil(len(initial) / (fill // width)))
    if config.M_max is not None and k > config.M_max:
        raise CapacityError(f"{k} machines needed for the input exceeds M_max={config.M_max}")
    base = sim.alloc(k)
    buckets: list[list] = [[] for _ in range(k)]
    for i, rec in enumerate(initial):
        buckets[i % k].append(tuple(rec))
    for j, b in enumerate(buckets):
        if b:
            sim.put(base + j, stream, b)
    return sim


def run_superstep(sim: Simulation, local_fn: Callable[[int, list], Iterable[tuple[int, Record]]]) -> Simulation:
    """Every machine maps its resident records to ``(destination, record)`` pairs.

    Residents are replaced by what each machine receives.
    """

    def wrapped(mid, store):
        return [(dest, MAIN, tuple(rec)) for dest, rec in local_fn(mid, list(store.get(MAIN, ())))]

    sim.step(wrapped)
    return sim


def trace(sim: Simulation) -> RoundTrace:
    return sim.trace.copy()
