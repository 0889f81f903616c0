"""
Forward-backward neighbourhoods, rooted-isomorphism signatures and
neighbourhood censuses.

The radius-``r`` ball around ``v`` holds every ``u`` with
``min(d(u, v), d(v, u)) < r`` together with *all* edges among those
vertices.  Note the strict inequality: ``r = 1`` gives the root alone.

Signatures
----------
Hanging trees are stripped first: a non-root vertex meeting exactly one edge
is folded into its neighbour as a string token, repeatedly, which yields an
exact canonical string for every tree-shaped part.  What remains (the root
plus any cycles of the underlying multigraph) is canonicalised exactly by
individualisation-refinement when it has at most ``exact_cap`` vertices.
Larger cores fall back to a colour-refinement hash, flagged as inexact.
"""
import base64
import hashlib
import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .theory import offspring_laws

__all__ = [
    "RootedBall",
    "BallSignature",
    "Census",
    "extract_ball",
    "ball_from_edges",
    "canonical_signature",
    "census",
    "census_split",
    "tv_distance",
    "simulate_limit_census",
    "census_to_json",
    "EXACT_CAP",
]

log = logging.getLogger(__name__)

EXACT_CAP = 24
SEARCH_LEAF_BUDGET = 50_000
TREE_NODE_LIMIT = 1_000_000
SATURATED = b"SATURATED"


@dataclass(frozen=True)
class RootedBall:
    """Local vertex 0 is the root; ``origin`` is its id in the host graph."""

    n_vertices: int
    edges: tuple
    radius: int
    origin: int = -1
    host_ids: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class BallSignature:
    key: bytes
    exact: bool


def extract_ball(g, v, r):
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range [0, {g.n})")
    if r < 1:
        raise ValueError("radius must be >= 1")
    members = {v}
    for adj in (g.out_adj, g.in_adj):
        frontier = [v]
        seen = {v}
        for _ in range(r - 1):
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
            if not frontier:
                break
        members |= seen
    host = [v] + sorted(members - {v})
    local = {h: i for i, h in enumerate(host)}
    out_adj = g.out_adj
    edges = tuple((local[h], local[w]) for h in host for w in out_adj[h] if w in local)
    return RootedBall(len(host), edges, r, v, tuple(host))


def ball_from_edges(n_vertices, edges, radius=0):
    """Wrap a plain edge list (root = vertex 0) as a :class:`RootedBall`."""
    return RootedBall(int(n_vertices), tuple((int(a), int(b)) for a, b in edges), radius)


def _strip_trees(n, edges):
    """
    Fold hanging trees into string labels.  Returns ``(core, labels, mult)``
    where ``mult`` is a dict of edge multiplicities among core vertices.
    """
    mult = Counter(edges)
    out_nb = defaultdict(Counter)
    in_nb = defaultdict(Counter)
    degree = [0] * n
    for (a, b), c in mult.items():
        out_nb[a][b] += c
        in_nb[b][a] += c
        degree[a] += c
        degree[b] += c
    # only trees inside the root's weak component have a forced fold
    # direction; elsewhere a tree has no distinguished vertex to fold onto
    linked = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in list(out_nb[a]) + list(in_nb[a]):
            if b not in linked:
                linked.add(b)
                stack.append(b)
    tokens = [[] for _ in range(n)]
    alive = [True] * n
    queue = deque(v for v in range(1, n) if degree[v] == 1 and v in linked)
    while queue:
        v = queue.popleft()
        if not alive[v] or degree[v] != 1:
            continue
        alive[v] = False
        label = "(" + "".join(sorted(tokens[v])) + ")"
        if out_nb[v]:
            (p,) = out_nb[v]
            tokens[p].append("<" + label)
            del in_nb[p][v]
            out_nb[v].clear()
        else:
            (p,) = in_nb[v]
            tokens[p].append(">" + label)
            del out_nb[p][v]
            in_nb[v].clear()
        degree[v] = 0
        degree[p] -= 1
        if p != 0 and degree[p] == 1:
            queue.append(p)
    core = [v for v in range(n) if alive[v]]
    labels = {v: "".join(sorted(tokens[v])) for v in core}
    core_mult = {(a, b): c for (a, b), c in mult.items() if alive[a] and alive[b]}
    return core, labels, core_mult


def _refine(verts, colors, out_nb, in_nb, loops):
    """Colour refinement to a stable partition; colours are canonical ranks."""
    n_classes = len(set(colors.values()))
    while True:
        sig = {}
        for v in verts:
            sig[v] = (colors[v], loops.get(v, 0),
                      tuple(sorted((colors[w], c) for w, c in out_nb[v].items())),
                      tuple(sorted((colors[w], c) for w, c in in_nb[v].items())))
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        colors = {v: ranks[sig[v]] for v in verts}
        if len(ranks) == n_classes:
            return colors
        n_classes = len(ranks)


class _SearchBudget(Exception):
    pass


def _canonical_core(core, labels, mult):
    out_nb = defaultdict(dict)
    in_nb = defaultdict(dict)
    loops = {}
    for (a, b), c in mult.items():
        if a == b:
            loops[a] = c
        else:
            out_nb[a][b] = c
            in_nb[b][a] = c
    start = {v: (v == 0, labels[v]) for v in core}
    ranks = {s: i for i, s in enumerate(sorted(set(start.values())))}
    colors = _refine(core, {v: ranks[start[v]] for v in core}, out_nb, in_nb, loops)

    def twins(u, w):
        if loops.get(u, 0) != loops.get(w, 0):
            return False
        if out_nb[u].get(w, 0) != out_nb[w].get(u, 0):
            return False
        for nb in (out_nb, in_nb):
            a = {x: c for x, c in nb[u].items() if x != w}
            b = {x: c for x, c in nb[w].items() if x != u}
            if a != b:
                return False
        return True

    best = [None]
    leaves = [0]

    def search(colors):
        cells = defaultdict(list)
        for v in core:
            cells[colors[v]].append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            leaves[0] += 1
            if leaves[0] > SEARCH_LEAF_BUDGET:
                raise _SearchBudget
            order = sorted(core, key=colors.__getitem__)
            pos = {v: i for i, v in enumerate(order)}
            enc = (tuple(labels[v] for v in order),
                   tuple(sorted((pos[a], pos[b], c) for (a, b), c in mult.items())))
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        reps = []
        for v in sorted(target):
            if not any(twins(v, r) for r in reps):
                reps.append(v)
        for v in reps:
            trial = dict(colors)
            # individualised vertex sorts before the rest of its cell
            for u in target:
                trial[u] = colors[u] * 2 + (0 if u == v else 1)
            for u in core:
                if u not in target:
                    trial[u] = colors[u] * 2
            trial = _refine(core, trial, out_nb, in_nb, loops)
            search(trial)

    search(colors)
    return best[0]


def _refinement_hash(core, labels, mult):
    out_nb = defaultdict(dict)
    in_nb = defaultdict(dict)
    loops = {}
    for (a, b), c in mult.items():
        if a == b:
            loops[a] = c
        else:
            out_nb[a][b] = c
            in_nb[b][a] = c
    colors = {v: hashlib.blake2b(repr((v == 0, labels[v])).encode(), digest_size=16).hexdigest()
              for v in core}
    n_classes = len(set(colors.values()))
    while True:
        colors = {v: hashlib.blake2b(repr((
            colors[v], loops.get(v, 0),
            sorted((colors[w], c) for w, c in out_nb[v].items()),
            sorted((colors[w], c) for w, c in in_nb[v].items()))).encode(),
            digest_size=16).hexdigest() for v in core}
        k = len(set(colors.values()))
        if k == n_classes:
            break
        n_classes = k
    summary = (colors[0], sorted(colors.values()), sum(mult.values()))
    return hashlib.blake2b(repr(summary).encode(), digest_size=32).hexdigest()


def canonical_signature(ball, exact_cap=EXACT_CAP):
    """
    Signature equal for two balls exactly when they are isomorphic as rooted
    digraphs (edge multiplicities included), provided both are flagged
    exact.  Inexact signatures come from a refinement hash.
    """
    core, labels, mult = _strip_trees(ball.n_vertices, ball.edges)
    if len(core) == 1:
        return BallSignature(("T" + labels[0] + "|" + str(mult.get((0, 0), 0))).encode(), True)
    if len(core) <= exact_cap:
        try:
            enc = _canonical_core(core, labels, mult)
            return BallSignature(("C" + repr(enc)).encode(), True)
        except _SearchBudget:
            log.debug("canonical search budget exhausted on a %d-vertex core", len(core))
    return BallSignature(("H" + _refinement_hash(core, labels, mult)).encode(), False)


@dataclass
class Census:
    """
    Signature frequencies of rooted balls.  For a plain census ``freqs``
    sums to 1; the two halves returned by :func:`census_split` are
    normalised by the full vertex count instead.
    """

    radius: int
    freqs: dict = field(repr=False)
    sample_size: int
    population: str = "all"
    exact: dict = field(default_factory=dict, repr=False)

    def total(self):
        return sum(self.freqs.values())

    def inexact_share(self):
        return sum(f for s, f in self.freqs.items() if not self.exact.get(s, True))


def _tally(g, vertices, r, denom, population):
    counts = Counter()
    exact = {}
    for v in vertices:
        sig = canonical_signature(extract_ball(g, int(v), r))
        counts[sig.key] += 1
        exact[sig.key] = sig.exact
    freqs = {s: c / denom for s, c in counts.items()}
    return Census(r, freqs, len(vertices), population, exact)


def _choose(g, sample, seed):
    if sample == "all" or sample is None:
        return np.arange(g.n)
    sample = int(sample)
    if sample >= g.n:
        if sample > g.n:
            log.warning("census sample %d exceeds n=%d; using all vertices", sample, g.n)
        return np.arange(g.n)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(g.n, size=sample, replace=False))


def census(g, r, sample="all", seed=0):
    """Ball-signature frequencies over all vertices or a uniform sample."""
    if r < 1:
        raise ValueError("radius must be >= 1")
    verts = _choose(g, sample, seed)
    return _tally(g, verts, r, len(verts), "all")


def census_split(g, scc, r, sample="all", seed=0):
    """
    Censuses of the largest SCC and of its complement, both normalised by
    the number of vertices examined, so their signature-wise sum is the
    full census.
    """
    verts = _choose(g, sample, seed)
    in_giant = scc.comp_of[verts] == scc.largest
    denom = len(verts)
    return (_tally(g, verts[in_giant], r, denom, "giant"),
            _tally(g, verts[~in_giant], r, denom, "complement"))


def tv_distance(a, b):
    """Total variation distance between two censuses of the same radius."""
    if a.radius != b.radius:
        raise ValueError(f"radius mismatch: {a.radius} vs {b.radius}")
    keys = set(a.freqs) | set(b.freqs)
    return 0.5 * sum(abs(a.freqs.get(s, 0.0) - b.freqs.get(s, 0.0)) for s in keys)


def _grow(root_children, offspring, depth, rng, budget):
    """
    Edges of a Galton-Watson tree explored to ``depth`` generations, as
    ``(parent, child)`` pairs over fresh ids.  Returns None past ``budget``.
    """
    pairs = []
    frontier = []
    next_id = [1]

    def spawn(parent, count):
        ids = range(next_id[0], next_id[0] + count)
        next_id[0] += count
        pairs.extend((parent, c) for c in ids)
        return ids

    if depth >= 1:
        frontier = list(spawn(0, root_children))
    for _ in range(depth - 1):
        if not frontier:
            break
        counts = offspring(len(frontier), rng)
        if next_id[0] + int(counts.sum()) > budget:
            return None
        nxt = []
        for parent, c in zip(frontier, counts.tolist()):
            nxt.extend(spawn(parent, c))
        frontier = nxt
    return pairs, next_id[0]


def simulate_limit_census(law, r, replicates, seed, node_limit=TREE_NODE_LIMIT):
    """
    Census of the forward-backward branching-process limit of ``law``.

    The root draws its (in, out) degree from ``law``; the out-tree grows with
    the forward offspring law and the in-tree with the backward one, each
    for ``r - 1`` generations, sharing only the root.  Samples whose trees
    exceed ``node_limit`` vertices are tallied under a single saturated key.
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    if law.mean_in() <= 0:
        raise ValueError("degree law has zero mean degree")
    rng = np.random.default_rng(seed)
    if law.kind == "poisson":
        lam = law.lam
        fwd = bwd = lambda size, rng: rng.poisson(lam, size)
    else:
        f_plus, f_minus = offspring_laws(law)
        vp, pp = np.arange(len(f_plus)), f_plus / f_plus.sum()
        vm, pm = np.arange(len(f_minus)), f_minus / f_minus.sum()
        fwd = lambda size, rng: rng.choice(vp, size=size, p=pp)
        bwd = lambda size, rng: rng.choice(vm, size=size, p=pm)
    din, dout = law.sample(replicates, rng)
    counts = Counter()
    exact = {}
    cache = {}
    for j, k in zip(np.asarray(din).tolist(), np.asarray(dout).tolist()):
        out_tree = _grow(k, fwd, r - 1, rng, node_limit)
        in_tree = _grow(j, bwd, r - 1, rng, node_limit) if out_tree else None
        if out_tree is None or in_tree is None or out_tree[1] + in_tree[1] > node_limit:
            counts[SATURATED] += 1
            exact[SATURATED] = False
            continue
        (out_pairs, n_out), (in_pairs, n_in) = out_tree, in_tree
        shift = n_out - 1
        edges = out_pairs + [(c + shift if c else 0, p + shift if p else 0)
                             for p, c in in_pairs]
        # r = 2 samples are stars; memoise on their degree pair
        key = (j, k) if r <= 2 else None
        if key is not None and key in cache:
            sig = cache[key]
        else:
            sig = canonical_signature(ball_from_edges(n_out + n_in - 1, edges, r))
            if key is not None:
                cache[key] = sig
        counts[sig.key] += 1
        exact[sig.key] = sig.exact
    freqs = {s: c / replicates for s, c in counts.items()}
    return Census(r, freqs, replicates, "bp-limit", exact)


def census_to_json(c):
    """Rows ``{signature (base64), freq, exact}`` by descending freq then signature."""
    rows = sorted(c.freqs.items(), key=lambda kv: (-kv[1], kv[0]))
    return [{"signature": base64.b64encode(s).decode("ascii"),
             "freq": f,
             "exact": bool(c.exact.get(s, True))} for s, f in rows]
