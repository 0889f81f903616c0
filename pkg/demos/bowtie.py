"""
Bow-tie decomposition around the largest SCC, and the two weak partitions.

On a supercritical ER graph IN and OUT each hold roughly eta - zeta of the
vertices (eta the branching-process survival probability); tubes and
tendrils are small.  A regular configuration model with d = 2 is strongly
connected apart from a vanishing fraction.

    python3 demos/bowtie.py
"""
from diglab import (DegreeLaw, bowtie, gen_directed_cm, gen_directed_er, sample_degree_sequence,
                    scc_decompose, solve_limits, weak_components)

n = 20_000
g = gen_directed_er(n, 1.5, 3)
scc = scc_decompose(g)
lim = solve_limits(DegreeLaw.poisson(1.5))
sizes = bowtie(g, scc).sizes()
print(f"directed ER n={n} lambda=1.5  (eta - zeta = {lim.eta_plus - lim.zeta:.4f})")
for part, size in sizes.items():
    print(f"  {part:<12}{size / n:8.4f}")

wc = weak_components(g, scc, limit=10**9)
print(f"  largest in-set {wc.i_max / n:.4f}, largest out-set {wc.o_max / n:.4f}")

ins, outs, _ = sample_degree_sequence(DegreeLaw.regular(2), n, 0)
h = gen_directed_cm(ins, outs, 0)
hs = bowtie(h, scc_decompose(h)).sizes()
print(f"regular(2) configuration model: LSCC {hs['LSCC'] / n:.4f}")
