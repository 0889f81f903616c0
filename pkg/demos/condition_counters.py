"""
Large-component counters on a supercritical directed ER graph.

Z counts vertices whose forward and backward reach both have >= k vertices,
N^k the ordered pairs of such vertices that are not mutually reachable and
N^k(2) those with no path from the first to the second.  As k grows, Z/n
settles on the giant fraction and the pair counts drop to ~0: big in- and
out-sets almost always meet inside the giant.

    python3 demos/condition_counters.py
"""
from diglab import (DegreeLaw, condition_counters, gen_directed_er, giant_stats,
                    scc_decompose, solve_limits, zeta_geq_k_proxy)

n, lam = 20_000, 2.0
g = gen_directed_er(n, lam, 7)
scc = scc_decompose(g)
law = DegreeLaw.poisson(lam)
ks = [1, 2, 5, 10, 20, 50]
proxy = zeta_geq_k_proxy(law, ks, 20_000, seed=1)

print(f"directed ER, n = {n}, lambda = {lam}")
print(f"lscc/n = {giant_stats(g, scc).size_lscc / n:.4f}, zeta = {solve_limits(law).zeta:.4f}")
print(f"{'k':>4} {'Z/n':>8} {'tree':>8} {'N^k/n^2':>10} {'N^k(2)/n^2':>11} {'mode':>11}")
for k, (est, se) in zip(ks, proxy):
    cc = condition_counters(g, scc, k, "auto", seed=k)
    print(f"{k:4d} {cc.z_geq_k / n:8.4f} {est:8.4f} {cc.n_k / n**2:10.5f} "
          f"{cc.n_k_2 / n**2:11.5f} {cc.estimate_mode:>11}")

# the "tree" column is the branching-process chance that both trees reach k
