"""
Driving the superstep engine by hand
====================================

A tour of the simulator: build a configuration, spread records over
machines, run a couple of supersteps and read the trace.
"""

from mpctri.sim import BudgetViolation, SimConfig, new_simulation, run_superstep, trace

# The per-machine budget S grows like n**delta, with a floor of 64 words.
for n in (100, 2**14, 10**6):
    print(f"n={n:>8}  S={SimConfig.make(n, 0.5).S}")

# Twenty pairs spread round-robin: 40 words over as few machines as fit.
cfg = SimConfig(n=20, delta=0.5, S=8)
sim = new_simulation(cfg, [(i, i * i) for i in range(20)])
print("machines:", sim.live_machines())
print("loads:   ", [sim.machine_load(m) for m in sim.live_machines()])

# A superstep maps each machine's records to (destination, record).
# Rotating every machine's block one place to the right keeps loads even.
live = sim.live_machines()
run_superstep(sim, lambda mid, recs: [(live[(live.index(mid) + 1) % len(live)], r) for r in recs])
t = trace(sim)
print(f"after one step: rounds={t.rounds} peak load={t.peak_machine_load} words")

# Sending everything to one machine breaks the budget, and the engine says so.
try:
    run_superstep(sim, lambda mid, recs: [(live[0], r) for r in recs])
except BudgetViolation as exc:
    print("refused:", exc)
