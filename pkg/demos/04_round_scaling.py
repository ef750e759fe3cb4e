"""
Rounds stay flat as the graph grows
===================================

For a fixed delta the round count comes from tree heights and digit counts
that depend on delta alone, so doubling n leaves it unchanged. Smaller delta
means smaller machines and more rounds. Total space tracks m times the
degeneracy.
"""

from mpctri.graph import degeneracy, gen_forest_union
from mpctri.triangles import count_triangles

print(f"{'delta':>5} {'n':>6} {'S':>4} {'rounds':>6} {'space/(m*d+m+n)':>16}")
for delta in (0.5, 0.25):
    for n in (1024, 2048, 4096):
        g = gen_forest_union(n, 3, seed=0)
        m = count_triangles(g, delta).metrics
        d = degeneracy(g)
        ratio = m.peak_total_records / (g.m * d + g.m + g.n)
        print(f"{delta:>5} {n:>6} {m.S:>4} {m.rounds:>6} {ratio:>16.2f}")
