"""
The building blocks: sort, count, tally, tag, filter
====================================================

Each primitive below runs entirely as supersteps on the simulator. The
round counter shows how many each one takes.
"""

import random

from mpctri.primitives import (
    KeySpec,
    load_list,
    mpc_count,
    mpc_count_duplicates,
    mpc_duplicate,
    mpc_filter,
    mpc_sort,
    mpc_tag_count,
)
from mpctri.sim import SimConfig, Simulation

rng = random.Random(0)
n = 4096
sim = Simulation(SimConfig.make(n, 0.5))


def rounds_of(fn):
    before = sim.trace.rounds
    out = fn()
    return out, sim.trace.rounds - before


# Random edges, doubled into both orientations and sorted by (source, target).
edges = sorted({tuple(sorted(rng.sample(range(n), 2))) for _ in range(3000)})
E = load_list(sim, edges, stream="E")
both, r = rounds_of(lambda: mpc_duplicate(sim, E))
print(f"duplicate: {both.size(sim)} oriented records, {r} round")
ordered, r = rounds_of(lambda: mpc_sort(sim, both, KeySpec((0, 1))))
print(f"sort: {len(ordered.machines)} machines, {r} rounds")

# Runs of equal sources give the degrees; tagging appends them to each record.
degrees, r = rounds_of(lambda: mpc_count_duplicates(sim, ordered, 0))
print(f"count duplicates: {degrees.size(sim)} vertices, {r} rounds")
tagged, r = rounds_of(lambda: mpc_tag_count(sim, ordered, degrees, 0))
print("tag: first records", tagged.collect(sim)[:3], f"({r} rounds)")

# Keep the (a, c, ...) queries whose pair is an edge. Duplication consumed
# the first copy of the edge list, so load it again.
E = load_list(sim, edges, stream="E2")
queries = [tuple(sorted(rng.sample(range(n), 2))) + (0, 0, i) for i in range(500)]
queries += [e + (0, 0, 500 + i) for i, e in enumerate(edges[:50])]
Q = load_list(sim, queries, stream="Q")
hits, r = rounds_of(lambda: mpc_filter(sim, Q, E))
print(f"filter: {hits.size(sim)} of {len(queries)} queries survive, {r} rounds")

# Counting goes up a fan-in-S tree, so its height is log_S of the machine count.
total, r = rounds_of(lambda: mpc_count(sim, tagged))
print(f"count: {total} records on {len(tagged.machines)} machines, {r} round(s)")
print("peak machine load", sim.trace.peak_machine_load, "of", sim.S)
