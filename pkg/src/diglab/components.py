"""
Scalar connectivity statistics of a digraph: strong giant, SCC counts,
strongly isolated vertices, the large-component pair counters, the bow-tie
partition and three kinds of weak component.
"""
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (DEFAULT_CLOSURE_LIMIT, ClosureLimitError,
                   components_reaching, reach_closure)

__all__ = [
    "GiantStats",
    "ConditionCounters",
    "BowTie",
    "WeakComponents",
    "UnionFind",
    "giant_stats",
    "scc_count_identity",
    "large_component_mask",
    "condition_counters",
    "bowtie",
    "weak_components",
    "empirical_zeta_hat",
    "BOWTIE_PARTS",
]

DEFAULT_PAIR_SAMPLES = 1_000_000


@dataclass(frozen=True)
class GiantStats:
    """
    ``alpha1`` is the *fraction* of strongly isolated vertices (singleton
    SCCs, self-loops allowed).  ``giant_edge_count`` counts edges with both
    ends in the largest SCC; ``giant_degree_sum`` is the total in- plus
    out-degree of its vertices, which also counts edges leaving or entering
    it.  ``degree_census_in_giant`` maps ``(in_degree, out_degree)`` to the
    number of giant vertices with it.
    """

    n: int
    size_lscc: int
    size_second: int
    k_n: int
    alpha1: float
    giant_edge_count: int
    giant_degree_sum: int
    degree_census_in_giant: dict = field(repr=False)


def giant_stats(g, scc):
    sizes = scc.comp_sizes
    order = scc.comp_order
    lscc = int(order[0]) if scc.n_comps else -1
    in_giant = scc.comp_of == lscc
    e = g.edges()
    giant_edges = int(np.count_nonzero(in_giant[e[:, 0]] & in_giant[e[:, 1]]))
    din, dout = g.in_degrees()[in_giant], g.out_degrees()[in_giant]
    pairs = zip(din.tolist(), dout.tolist())
    return GiantStats(
        n=g.n,
        size_lscc=int(sizes[lscc]) if scc.n_comps else 0,
        size_second=int(sizes[order[1]]) if scc.n_comps > 1 else 0,
        k_n=scc.n_comps,
        alpha1=float(np.count_nonzero(sizes == 1)) / g.n if g.n else 0.0,
        giant_edge_count=giant_edges,
        giant_degree_sum=int(din.sum() + dout.sum()),
        degree_census_in_giant=dict(sorted(Counter(pairs).items())),
    )


def scc_count_identity(scc):
    """Exact ``sum over vertices of 1/|C_v|`` as a Fraction."""
    vertex_sizes = scc.comp_sizes[scc.comp_of]
    counts = np.bincount(vertex_sizes)
    return sum((Fraction(int(c), s) for s, c in enumerate(counts) if c), Fraction(0))


def large_component_mask(scc, k):
    """Components whose in- and out-components both have at least ``k`` vertices."""
    return components_reaching(scc, k, "out") & components_reaching(scc, k, "in")


@dataclass(frozen=True)
class ConditionCounters:
    """
    Pair counters at threshold ``k``.

    ``z_geq_k`` counts vertices with in- and out-component both ``>= k``;
    ``n_k`` counts ordered pairs of such vertices in different SCCs;
    ``n_k_2`` counts ordered pairs of such vertices with no path from the
    first to the second.  In Monte Carlo mode ``n_k_2`` is an unbiased
    estimate and ``n_k_2_se`` its standard error.
    """

    k: int
    z_geq_k: int
    n_k: int
    n_k_2: float
    n_k_2_se: float = 0.0
    estimate_mode: str = "exact"


def condition_counters(g, scc, k, pair_samples="auto", seed=0, closure=None,
                       limit=DEFAULT_CLOSURE_LIMIT):
    """
    Compute :class:`ConditionCounters`.

    ``pair_samples`` is ``"exact"``, an integer sample budget, or ``"auto"``
    (exact when the condensation is within ``limit``, otherwise one million
    sampled pairs).  ``n_k`` is always exact, via
    ``Z**2 - sum_i |C_i|**2 [C_i large]``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    large = large_component_mask(scc, k)
    sizes = scc.comp_sizes.astype(np.int64)
    z = int(sizes[large].sum())
    n_k = z * z - int((sizes[large] ** 2).sum())

    if pair_samples == "auto":
        pair_samples = "exact" if (closure is not None or scc.n_comps <= limit) \
            else DEFAULT_PAIR_SAMPLES
    if pair_samples == "exact":
        if closure is None:
            closure = reach_closure(scc, limit)
        n_k_2 = _exact_no_path_pairs(closure, large, sizes)
        return ConditionCounters(k, z, n_k, n_k_2, 0.0, "exact")

    est, se = _sampled_no_path_pairs(scc, large, int(pair_samples), seed)
    return ConditionCounters(k, z, n_k, est, se, "montecarlo")


def _exact_no_path_pairs(closure, large, sizes, chunk=1024):
    C = closure.n_comps
    idx = np.flatnonzero(large)
    weights = np.where(large, sizes, 0)
    total = 0
    for lo in range(0, len(idx), chunk):
        rows = idx[lo:lo + chunk]
        reach = np.unpackbits(closure.desc[rows], axis=1, count=C).astype(np.int64)
        reached = reach @ weights
        total += int(((weights.sum() - reached) * sizes[rows]).sum())
    return total


def _sampled_no_path_pairs(scc, large, samples, seed):
    n = scc.n
    rng = np.random.default_rng(seed)
    x = rng.integers(0, n, samples)
    y = rng.integers(0, n, samples)
    cx = scc.comp_of[x]
    cy = scc.comp_of[y]
    cand = large[cx] & large[cy]
    # ids are topological, so a path from cx to cy needs cx <= cy
    hits = int(np.count_nonzero(cand & (cx > cy)))
    need = cand & (cx < cy)
    if need.any():
        ptr, idx = scc.cond_ptr.tolist(), scc.cond_idx.tolist()
        qx, qy = cx[need], cy[need]
        order = np.argsort(qx, kind="stable")
        qx, qy = qx[order].tolist(), qy[order].tolist()
        i = 0
        while i < len(qx):
            j = i
            while j < len(qx) and qx[j] == qx[i]:
                j += 1
            targets = set(qy[i:j])
            found = _reached_targets(ptr, idx, qx[i], targets)
            hits += sum(1 for t in qy[i:j] if t not in found)
            i = j
    p = hits / samples
    scale = float(n) * n
    return scale * p, scale * np.sqrt(p * (1 - p) / samples)


def _reached_targets(ptr, idx, src, targets):
    """Subset of ``targets`` reachable from ``src``; stops once all are found."""
    found = set()
    seen = {src}
    queue = deque([src])
    while queue and len(found) < len(targets):
        a = queue.popleft()
        for b in idx[ptr[a]:ptr[a + 1]]:
            if b not in seen:
                seen.add(b)
                if b in targets:
                    found.add(b)
                queue.append(b)
    return found


def empirical_zeta_hat(g, scc, k):
    """``Z_{>=k} / n``."""
    large = large_component_mask(scc, k)
    return float(scc.comp_sizes[large].sum()) / g.n


BOWTIE_PARTS = ("LSCC", "IN", "OUT", "TENDRIL_IN", "TENDRIL_OUT", "TUBE", "OTHER")


@dataclass(frozen=True)
class BowTie:
    """``labels[v]`` indexes into :data:`BOWTIE_PARTS`."""

    labels: np.ndarray = field(repr=False)

    def part(self, name):
        return np.flatnonzero(self.labels == BOWTIE_PARTS.index(name))

    def sizes(self):
        counts = np.bincount(self.labels, minlength=len(BOWTIE_PARTS))
        return {name: int(c) for name, c in zip(BOWTIE_PARTS, counts)}


def _reach(adj, sources, n, blocked=None):
    seen = np.zeros(n, dtype=bool)
    if blocked is not None:
        seen |= blocked
    # sources are expanded even when blocked themselves
    queue = deque(sources)
    seen[sources] = True
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    if blocked is not None:
        seen &= ~blocked
    return seen


def bowtie(g, scc):
    """
    Bow-tie partition around the largest SCC.

    TUBE vertices are reachable from IN and reach OUT without passing
    through the LSCC; TENDRIL_IN vertices are reachable from IN only,
    TENDRIL_OUT vertices reach OUT only.
    """
    n = g.n
    labels = np.full(n, BOWTIE_PARTS.index("OTHER"), dtype=np.int64)
    if n == 0:
        return BowTie(labels)
    core = scc.comp_of == scc.largest
    core_list = np.flatnonzero(core).tolist()
    up = _reach(g.in_adj, core_list, n)
    down = _reach(g.out_adj, core_list, n)
    in_part = up & ~core
    out_part = down & ~core
    placed = core | in_part | out_part
    from_in = _reach(g.out_adj, np.flatnonzero(in_part).tolist(), n, blocked=placed)
    to_out = _reach(g.in_adj, np.flatnonzero(out_part).tolist(), n, blocked=placed)

    labels[core] = BOWTIE_PARTS.index("LSCC")
    labels[in_part] = BOWTIE_PARTS.index("IN")
    labels[out_part] = BOWTIE_PARTS.index("OUT")
    labels[from_in & to_out] = BOWTIE_PARTS.index("TUBE")
    labels[from_in & ~to_out] = BOWTIE_PARTS.index("TENDRIL_IN")
    labels[to_out & ~from_in] = BOWTIE_PARTS.index("TENDRIL_OUT")
    return BowTie(labels)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def labels(self):
        """Class labels numbered by first appearance."""
        seen = {}
        return np.array([seen.setdefault(self.find(a), len(seen))
                         for a in range(len(self.parent))], dtype=np.int64)


def _first_appearance(labels):
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inverse]


@dataclass(frozen=True)
class WeakComponents:
    """
    ``undirected`` and ``gkm`` are per-vertex class labels numbered by first
    appearance.  ``i_max``/``o_max`` are the largest in-/out-component
    sizes.  Fields needing exact reachability are None when the closure was
    refused.
    """

    undirected: np.ndarray = field(repr=False)
    gkm: np.ndarray = field(default=None, repr=False)
    i_max: int = None
    o_max: int = None


def weak_components(g, scc, closure=None, limit=DEFAULT_CLOSURE_LIMIT):
    """
    Undirected components, Graham-Knuth-Motzkin classes and the largest
    in-/out-component sizes.

    GKM classes join two SCCs when neither reaches the other, then take the
    transitive closure.  If the condensation exceeds ``limit`` a
    :class:`~diglab.core.ClosureLimitError` is raised whose ``partial``
    attribute carries the undirected partition.
    """
    uf = UnionFind(g.n)
    e = g.edges()
    for u, v in e.tolist():
        uf.union(u, v)
    undirected = uf.labels()

    if closure is None:
        try:
            closure = reach_closure(scc, limit)
        except ClosureLimitError as exc:
            exc.partial = WeakComponents(undirected)
            raise
    C = closure.n_comps
    cuf = UnionFind(C)
    for a in range(C):
        comparable = np.unpackbits(closure.desc[a] | closure.anc[a], count=C)
        others = np.flatnonzero(comparable[a + 1:] == 0) + a + 1
        for b in others.tolist():
            cuf.union(a, b)
    comp_class = np.array([cuf.find(c) for c in range(C)], dtype=np.int64)
    gkm = _first_appearance(comp_class[scc.comp_of]) if g.n else np.zeros(0, dtype=np.int64)
    return WeakComponents(
        undirected=undirected,
        gkm=gkm,
        i_max=int(closure.in_mass.max()) if C else 0,
        o_max=int(closure.out_mass.max()) if C else 0,
    )
