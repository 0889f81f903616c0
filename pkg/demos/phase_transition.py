"""
Strong giant of the directed Erdos-Renyi graph across the critical point.

For each mean degree we average the largest-SCC fraction over a few seeds
and set it beside zeta = (1 - q)^2, q the extinction probability of a
Poisson(lam) branching process.  Below lam = 1 both columns are ~0.

    python3 demos/phase_transition.py [n]
"""
import sys

import numpy as np

from diglab import DegreeLaw, gen_directed_er, giant_stats, scc_decompose, solve_limits

n = int(sys.argv[1]) if len(sys.argv) > 1 else 50_000
seeds = 4

print(f"n = {n}, {seeds} seeds per lambda")
print(f"{'lambda':>7} {'lscc/n':>9} {'sd':>8} {'zeta':>8} {'K_n/n':>8} {'alpha1':>8}")
for lam in (0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0):
    fr, kn, a1 = [], [], []
    for s in range(seeds):
        g = gen_directed_er(n, lam, s)
        gs = giant_stats(g, scc_decompose(g))
        fr.append(gs.size_lscc / n)
        kn.append(gs.k_n / n)
        a1.append(gs.alpha1)
    zeta = solve_limits(DegreeLaw.poisson(lam)).zeta
    print(f"{lam:7.2f} {np.mean(fr):9.4f} {np.std(fr):8.4f} {zeta:8.4f} "
          f"{np.mean(kn):8.4f} {np.mean(a1):8.4f}")

# supercritical: almost every SCC is a single vertex, so K_n/n ~ alpha1
