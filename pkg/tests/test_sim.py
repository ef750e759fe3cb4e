import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpctri.sim import (
    MAIN,
    ArityError,
    BudgetViolation,
    CapacityError,
    SimConfig,
    Simulation,
    new_simulation,
    run_superstep,
    trace,
)


def contents(sim):
    return Counter(r for m in sim.live_machines() for r in sim.records(m))


def test_config_floor_and_growth():
    assert SimConfig.make(16, 0.5).S == 64
    assert SimConfig.make(2**14, 0.5).S == 128
    assert SimConfig.make(10**6, 0.5).S == 1000


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.2, 1.5])
def test_config_rejects_delta(delta):
    with pytest.raises(ValueError):
        SimConfig.make(10, delta)


def test_empty_initial():
    sim = new_simulation(SimConfig.make(10, 0.5), [])
    assert sim.live_machines() == []
    assert trace(sim).rounds == 0


def test_ten_pairs_on_s8():
    cfg = SimConfig(n=10, delta=0.5, S=8)
    sim = new_simulation(cfg, [(i, i + 1) for i in range(10)])
    assert len(sim.live_machines()) == 3
    assert all(sim.machine_load(m) <= 8 for m in sim.live_machines())


def test_fresh_trace():
    sim = new_simulation(SimConfig(n=10, delta=0.5, S=8), [(i, i) for i in range(10)])
    t = trace(sim)
    assert t.rounds == 0
    assert t.peak_machine_load == max(sim.machine_load(m) for m in sim.live_machines())
    assert t.peak_total_load == 20


def test_capacity_error_on_load():
    cfg = SimConfig(n=10, delta=0.5, S=8, M_max=2)
    with pytest.raises(CapacityError):
        new_simulation(cfg, [(i, i) for i in range(10)])


def test_identity_superstep():
    sim = new_simulation(SimConfig.make(100, 0.5), [(i, i * i) for i in range(100)])
    before = {m: sim.records(m) for m in sim.live_machines()}
    run_superstep(sim, lambda mid, recs: [(mid, r) for r in recs])
    assert {m: sim.records(m) for m in sim.live_machines()} == before
    assert trace(sim).rounds == 1


def test_three_supersteps():
    sim = new_simulation(SimConfig.make(100, 0.5), [(i,) for i in range(50)])
    for _ in range(3):
        run_superstep(sim, lambda mid, recs: [(mid, r) for r in recs])
    assert trace(sim).rounds == 3


def test_forced_overflow_names_machine():
    cfg = SimConfig.make(100, 0.5)
    sim = new_simulation(cfg, [(i, i) for i in range(200)])
    with pytest.raises(BudgetViolation) as info:
        run_superstep(sim, lambda mid, recs: [(0, r) for r in recs])
    err = info.value
    assert err.machine == 0 and err.kind == "received" and err.round == 1
    assert err.overflow > 0
    assert "overflow" in str(err)


def test_send_overflow():
    sim = Simulation(SimConfig(n=4, delta=0.5, S=8))
    sim.put(0, MAIN, [(1, 2)] * 4)
    with pytest.raises(BudgetViolation) as info:
        run_superstep(sim, lambda mid, recs: [(d, r) for d in (1, 2) for r in recs])
    assert info.value.kind == "sent"


def test_residency_overflow():
    sim = Simulation(SimConfig(n=4, delta=0.5, S=8))
    with pytest.raises(BudgetViolation) as info:
        sim.put(0, MAIN, [(1, 2)] * 5)
    assert info.value.kind == "holds"


def test_arity_limit():
    sim = Simulation(SimConfig(n=4, delta=0.5, S=64))
    sim.put(0, MAIN, [(1,)])
    with pytest.raises(ArityError):
        run_superstep(sim, lambda mid, recs: [(1, (0,) * 7)])


def test_self_sends_are_free_but_resident():
    sim = Simulation(SimConfig(n=4, delta=0.5, S=8))
    sim.put(0, MAIN, [(1, 2)] * 4)
    run_superstep(sim, lambda mid, recs: [(mid, r) for r in recs])
    assert trace(sim).per_round[-1][:2] == (0, 0)


def test_partial_consume_keeps_other_streams():
    sim = Simulation(SimConfig.make(10, 0.5))
    sim.put(0, "a", [(1,)])
    sim.put(0, "b", [(2,)])
    sim.step(lambda mid, st: [(5, "c", st["a"][0])], active=[0], consume=("a",))
    assert sim.records(0, "b") == [(2,)]
    assert sim.records(0, "a") == []
    assert sim.records(5, "c") == [(1,)]


def test_random_permutation_preserves_multiset():
    rng = random.Random(0)
    cfg = SimConfig.make(10**4, 0.5)
    recs = [(rng.randrange(1000), rng.randrange(1000)) for _ in range(20_000)]
    sim = new_simulation(cfg, recs, fill=cfg.S // 2)
    machines = sim.live_machines()
    order = machines[:]
    rng.shuffle(order)
    perm = dict(zip(machines, order))
    run_superstep(sim, lambda mid, rs: [(perm[mid], r) for r in rs])
    assert contents(sim) == Counter(recs)
    assert trace(sim).peak_machine_load <= cfg.S


def test_large_initial_spread():
    rng = random.Random(1)
    cfg = SimConfig.make(10**6, 0.5)
    recs = [(rng.randrange(10**6),) for _ in range(10**6)]
    sim = new_simulation(cfg, recs)
    assert max(sim.machine_load(m) for m in sim.live_machines()) <= cfg.S
    assert contents(sim) == Counter(recs)


def _shuffle_run(seed):
    rng = random.Random(seed)
    cfg = SimConfig.make(2000, 0.5)
    sim = new_simulation(cfg, [(rng.randrange(50), i) for i in range(500)], fill=cfg.S // 2)
    k = len(sim.live_machines())
    run_superstep(sim, lambda mid, rs: [((r[0] * 7 + mid) % k, r) for r in rs])
    return {m: sim.records(m) for m in sim.live_machines()}, trace(sim)


def test_determinism():
    assert _shuffle_run(4) == _shuffle_run(4)


@given(st.lists(st.tuples(st.integers(0, 99), st.integers(0, 99)), max_size=300), st.integers(0, 50))
def test_rotation_conserves(recs, shift):
    cfg = SimConfig.make(100, 0.5)
    sim = new_simulation(cfg, recs, fill=cfg.S // 4)
    live = sim.live_machines()
    k = len(live)
    if k:
        run_superstep(sim, lambda mid, rs: [(live[(live.index(mid) + shift) % k], r) for r in rs])
    assert contents(sim) == Counter(recs)
    assert trace(sim).rounds == (1 if k else 0)


@given(st.lists(st.tuples(st.integers(0, 9)), min_size=1, max_size=200))
def test_drop_everything(recs):
    sim = new_simulation(SimConfig.make(10, 0.5), recs)
    run_superstep(sim, lambda mid, rs: [])
    assert sim.live_machines() == []
    assert sim.total == 0
