"""
Neighbourhoods seen from inside the strong giant.

The radius-r forward-backward ball of a uniform vertex converges to a pair
of independent Galton-Watson trees glued at the root.  Conditioning on the
root lying in the giant amounts to conditioning both trees to survive, and
the census of giant vertices (normalised by n) sums to zeta.  We compare
the graph census with the branching-process census and list the most
common shapes.

    python3 demos/local_limit.py
"""
from diglab import (DegreeLaw, census, census_split, gen_directed_er, scc_decompose,
                    simulate_limit_census, solve_limits, tv_distance)

n, lam, r = 100_000, 1.5, 2
g = gen_directed_er(n, lam, 11)
scc = scc_decompose(g)
law = DegreeLaw.poisson(lam)

full = census(g, r)
giant, rest = census_split(g, scc, r)
limit = simulate_limit_census(law, r, 200_000, seed=5)
print(f"directed ER n={n} lambda={lam}, radius {r}")
print(f"distinct shapes: graph {len(full.freqs)}, limit {len(limit.freqs)}")
print(f"TV(graph, limit) = {tv_distance(full, limit):.4f}")
print(f"giant mass {giant.total():.4f} vs zeta {solve_limits(law).zeta:.4f}")

# shapes with zero giant mass have a root with no in- or no out-edges
for key, f in sorted(full.freqs.items(), key=lambda kv: -kv[1])[:6]:
    print(f"  {f:.4f} graph  {limit.freqs.get(key, 0.0):.4f} limit  "
          f"{giant.freqs.get(key, 0.0):.4f} in giant")
