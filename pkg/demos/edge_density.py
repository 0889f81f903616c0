"""
Two ways to count the edges of the strong giant.

Internal edges (both ends in the giant) per vertex tend to E[D] eta^2 for
Poisson laws.  Half the total degree of giant vertices also counts edges
that leave or enter the giant, and tends to (1/2) E[(D- + D+) 1{giant}].
At lambda = 2 these differ by about 0.26.

    python3 demos/edge_density.py
"""
import numpy as np

from diglab import (DegreeLaw, gen_directed_er, giant_edge_density, giant_internal_edge_density,
                    giant_stats, scc_decompose, solve_limits)

n, lam = 100_000, 2.0
lim = solve_limits(DegreeLaw.poisson(lam))
internal, half = [], []
for s in range(3):
    g = gen_directed_er(n, lam, s)
    gs = giant_stats(g, scc_decompose(g))
    internal.append(gs.giant_edge_count / n)
    half.append(0.5 * gs.giant_degree_sum / n)
print(f"directed ER n={n} lambda={lam}, 3 seeds")
print(f"internal edges / n       {np.mean(internal):.4f}   limit {giant_internal_edge_density(lim):.4f}")
print(f"half giant degree sum / n {np.mean(half):.4f}   limit {giant_edge_density(lim):.4f}")
