"""
Immutable digraphs, strongly connected components and reachability.

Vertices are the integers ``0..n-1``.  Edges are ordered pairs; self-loops
and repeated pairs are kept, since none of the component notions below are
affected by them and dropping them would change the degree sequence of a
configuration-model sample.

Adjacency is stored in CSR form (numpy) for the vectorised code paths and
mirrored as plain Python lists for the traversal loops, which are much faster
on lists than on numpy scalars.
"""
from collections import deque

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Digraph",
    "SccDecomposition",
    "ReachClosure",
    "ClosureLimitError",
    "build_digraph",
    "scc_decompose",
    "forward_size_capped",
    "backward_size_capped",
    "components_reaching",
    "reach_closure",
    "read_edgelist",
    "write_edgelist",
    "DEFAULT_CLOSURE_LIMIT",
]

DEFAULT_CLOSURE_LIMIT = 20_000


class ClosureLimitError(RuntimeError):
    """Exact reachability was requested on a condensation that is too big."""


def _csr(n, rows, cols):
    order = np.lexsort((cols, rows))
    idx = cols[order].astype(np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=ptr[1:])
    return ptr, idx


class Digraph:
    """
    A directed multigraph on ``n`` vertices.

    ``out_ptr``/``out_idx`` and ``in_ptr``/``in_idx`` are CSR arrays; the
    out-neighbours of ``v`` are ``out_idx[out_ptr[v]:out_ptr[v+1]]``, sorted
    ascending.  Instances are never mutated after construction.
    """

    __slots__ = ("n", "m", "out_ptr", "out_idx", "in_ptr", "in_idx",
                 "_out_lists", "_in_lists")

    def __init__(self, n, tails, heads):
        tails = np.asarray(tails, dtype=np.int64)
        heads = np.asarray(heads, dtype=np.int64)
        self.n = int(n)
        self.m = int(len(tails))
        self.out_ptr, self.out_idx = _csr(self.n, tails, heads)
        self.in_ptr, self.in_idx = _csr(self.n, heads, tails)
        for arr in (self.out_ptr, self.out_idx, self.in_ptr, self.in_idx):
            arr.setflags(write=False)
        self._out_lists = None
        self._in_lists = None

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"

    @property
    def out_adj(self):
        """Per-vertex sorted out-neighbour lists."""
        if self._out_lists is None:
            self._out_lists = _split(self.out_ptr, self.out_idx)
        return self._out_lists

    @property
    def in_adj(self):
        """Per-vertex sorted in-neighbour lists."""
        if self._in_lists is None:
            self._in_lists = _split(self.in_ptr, self.in_idx)
        return self._in_lists

    def out_degrees(self):
        return np.diff(self.out_ptr)

    def in_degrees(self):
        return np.diff(self.in_ptr)

    def edges(self):
        """Edge array of shape ``(m, 2)`` sorted by ``(u, v)``."""
        tails = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.out_ptr))
        return np.column_stack([tails, self.out_idx])

    def transpose(self):
        e = self.edges()
        return Digraph(self.n, e[:, 1], e[:, 0])

    def relabel(self, perm):
        """Return the digraph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        e = self.edges()
        return Digraph(self.n, perm[e[:, 0]], perm[e[:, 1]])

    def to_scipy(self):
        data = np.ones(self.m, dtype=np.int8)
        return sp.csr_matrix((data, self.out_idx, self.out_ptr), shape=(self.n, self.n))


def _split(ptr, idx):
    flat = idx.tolist()
    bounds = ptr.tolist()
    return [flat[bounds[i]:bounds[i + 1]] for i in range(len(bounds) - 1)]


def build_digraph(n, edges):
    """
    Build a :class:`Digraph` from a vertex count and an iterable of pairs.

    Raises ``ValueError`` naming the first edge with an endpoint outside
    ``[0, n)``.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                     dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of (u, v) pairs")
    bad = np.flatnonzero((arr < 0).any(axis=1) | (arr >= n).any(axis=1))
    if bad.size:
        u, v = arr[bad[0]]
        raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
    return Digraph(n, arr[:, 0], arr[:, 1])


class SccDecomposition:
    """
    Strongly connected components of a digraph.

    Component ids are a topological order of the condensation: every
    condensation edge ``a -> b`` has ``a < b``.

    Attributes
    ----------
    comp_of : int array, vertex -> component id
    comp_sizes : int array, component id -> size
    comp_order : component ids by size descending, ties by smallest vertex
    cond_ptr, cond_idx : CSR condensation (deduplicated, no self-loops)
    rcond_ptr, rcond_idx : CSR of the reversed condensation
    """

    def __init__(self, comp_of, n_comps, g):
        self.n = g.n
        self.n_comps = int(n_comps)
        self.comp_of = np.asarray(comp_of, dtype=np.int64)
        self.comp_of.setflags(write=False)
        self.comp_sizes = np.bincount(self.comp_of, minlength=self.n_comps)
        self.comp_sizes.setflags(write=False)

        min_vertex = np.full(self.n_comps, self.n, dtype=np.int64)
        np.minimum.at(min_vertex, self.comp_of, np.arange(self.n, dtype=np.int64))
        self.min_vertex = min_vertex
        self.comp_order = np.lexsort((min_vertex, -self.comp_sizes))

        e = g.edges()
        cu = self.comp_of[e[:, 0]]
        cv = self.comp_of[e[:, 1]]
        keep = cu != cv
        pairs = np.unique(np.column_stack([cu[keep], cv[keep]]), axis=0) \
            if keep.any() else np.zeros((0, 2), dtype=np.int64)
        self.cond_ptr, self.cond_idx = _csr(self.n_comps, pairs[:, 0], pairs[:, 1])
        self.rcond_ptr, self.rcond_idx = _csr(self.n_comps, pairs[:, 1], pairs[:, 0])

    @property
    def k_n(self):
        return self.n_comps

    @property
    def largest(self):
        """Id of the largest component (the deterministic tie-break winner)."""
        return int(self.comp_order[0]) if self.n_comps else -1

    def members(self, c):
        return np.flatnonzero(self.comp_of == c)

    def condensation_edges(self):
        tails = np.repeat(np.arange(self.n_comps), np.diff(self.cond_ptr))
        return np.column_stack([tails, self.cond_idx])

    def condensation_matrix(self, reverse=False):
        ptr, idx = (self.rcond_ptr, self.rcond_idx) if reverse else (self.cond_ptr, self.cond_idx)
        data = np.ones(len(idx), dtype=np.int8)
        return sp.csr_matrix((data, idx, ptr), shape=(self.n_comps, self.n_comps))


def scc_decompose(g):
    """
    Iterative Tarjan.  Vertices are started in increasing order and
    neighbours visited in sorted order, so the result is deterministic.
    """
    n = g.n
    adj = g.out_adj
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    emitted = 0
    for s in range(n):
        if index[s] != -1:
            continue
        index[s] = low[s] = counter
        counter += 1
        stack.append(s)
        on_stack[s] = True
        work = [(s, 0)]
        while work:
            v, i = work[-1]
            nbrs = adj[v]
            deg = len(nbrs)
            descended = False
            while i < deg:
                w = nbrs[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, i)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = emitted
                    if w == v:
                        break
                emitted += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    # Tarjan emits sinks first; flip to get a topological numbering.
    comp_of = (emitted - 1) - np.asarray(comp, dtype=np.int64)
    return SccDecomposition(comp_of, emitted, g)


def _capped_bfs(adj, n, v, cap):
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range [0, {n})")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                if len(seen) >= cap:
                    return len(seen), True
                queue.append(w)
    return len(seen), False


def forward_size_capped(g, v, cap):
    """
    Size of the out-component of ``v``, exploring at most until ``cap``
    vertices are found.

    Returns ``(size, saturated)``.  ``saturated`` is True when the search was
    cut off after discovering a new vertex that brought the count to ``cap``;
    then only ``size >= cap`` is known.  Otherwise ``size`` is exact.
    """
    return _capped_bfs(g.out_adj, g.n, v, cap)


def backward_size_capped(g, v, cap):
    """Mirror of :func:`forward_size_capped` on in-neighbours."""
    return _capped_bfs(g.in_adj, g.n, v, cap)


def components_reaching(scc, cap, direction="out"):
    """
    Boolean array over components: does the out- (or in-) component of the
    SCC contain at least ``cap`` vertices?

    Works on the condensation with component weights.  Cheap bounds settle
    most components: the own size plus the largest successor's bound from
    below, the own size plus the sum of successor bounds from above.  Only
    components left undecided are searched, and each search stops at
    ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if direction == "out":
        ptr, idx = scc.cond_ptr.tolist(), scc.cond_idx.tolist()
        order = range(scc.n_comps - 1, -1, -1)
    elif direction == "in":
        ptr, idx = scc.rcond_ptr.tolist(), scc.rcond_idx.tolist()
        order = range(scc.n_comps)
    else:
        raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")
    sizes = scc.comp_sizes.tolist()
    lower = [0] * scc.n_comps
    upper = [0] * scc.n_comps
    for c in order:
        succ = idx[ptr[c]:ptr[c + 1]]
        lo = sizes[c] + max((lower[d] for d in succ), default=0)
        hi = sizes[c] + sum(upper[d] for d in succ)
        if lo < cap <= hi:
            total = sizes[c]
            seen = {c}
            queue = deque([c])
            while queue and total < cap:
                a = queue.popleft()
                for b in idx[ptr[a]:ptr[a + 1]]:
                    if b not in seen:
                        seen.add(b)
                        total += sizes[b]
                        queue.append(b)
            lo = hi = total
        lower[c] = min(lo, cap)
        upper[c] = min(hi, cap)
    return np.asarray(lower, dtype=np.int64) >= cap


class ReachClosure:
    """
    Exact reachability between condensation nodes as packed bit rows.

    ``desc[c]`` holds every component reachable from ``c`` (``c`` included),
    ``anc[c]`` every component that reaches ``c``.
    """

    def __init__(self, scc, desc, anc):
        self.scc = scc
        self.n_comps = scc.n_comps
        self.desc = desc
        self.anc = anc
        self.out_mass = self._mass(desc)
        self.in_mass = self._mass(anc)

    def _mass(self, bits, chunk=2048):
        sizes = self.scc.comp_sizes.astype(np.int64)
        out = np.empty(self.n_comps, dtype=np.int64)
        for lo in range(0, self.n_comps, chunk):
            block = np.unpackbits(bits[lo:lo + chunk], axis=1, count=self.n_comps)
            out[lo:lo + chunk] = block.astype(np.int64) @ sizes
        return out

    def reaches(self, a, b):
        """True when component ``a`` reaches component ``b``."""
        return bool((self.desc[a, b >> 3] >> (7 - (b & 7))) & 1)

    def descendants(self, c):
        return np.flatnonzero(np.unpackbits(self.desc[c], count=self.n_comps))

    def ancestors(self, c):
        return np.flatnonzero(np.unpackbits(self.anc[c], count=self.n_comps))

    def out_size(self, v):
        """Exact ``|C+_v|``."""
        return int(self.out_mass[self.scc.comp_of[v]])

    def in_size(self, v):
        """Exact ``|C-_v|``."""
        return int(self.in_mass[self.scc.comp_of[v]])

    def vertex_out_sizes(self):
        return self.out_mass[self.scc.comp_of]

    def vertex_in_sizes(self):
        return self.in_mass[self.scc.comp_of]


def reach_closure(scc, limit=DEFAULT_CLOSURE_LIMIT):
    """
    Build the :class:`ReachClosure` of a decomposition.

    Memory is quadratic in the number of components, so construction is
    refused above ``limit`` nodes; use the capped estimates instead.
    """
    C = scc.n_comps
    if C > limit:
        raise ClosureLimitError(
            f"condensation has {C} nodes, above the closure limit of {limit}; "
            "use the capped component estimates or Monte Carlo pair sampling")
    width = (C + 7) // 8
    desc = np.zeros((C, width), dtype=np.uint8)
    anc = np.zeros((C, width), dtype=np.uint8)
    ptr, idx = scc.cond_ptr, scc.cond_idx
    rptr, ridx = scc.rcond_ptr, scc.rcond_idx
    for c in range(C - 1, -1, -1):
        desc[c, c >> 3] |= np.uint8(1 << (7 - (c & 7)))
        succ = idx[ptr[c]:ptr[c + 1]]
        if succ.size:
            desc[c] |= np.bitwise_or.reduce(desc[succ], axis=0)
    for c in range(C):
        anc[c, c >> 3] |= np.uint8(1 << (7 - (c & 7)))
        pred = ridx[rptr[c]:rptr[c + 1]]
        if pred.size:
            anc[c] |= np.bitwise_or.reduce(anc[pred], axis=0)
    return ReachClosure(scc, desc, anc)


def read_edgelist(path):
    """
    Read the project edge-list format: a header ``n m`` followed by ``m``
    lines ``u v``.  Lines starting with ``#`` and blank lines are skipped.
    """
    with open(path) as fh:
        rows = [line.split() for line in fh
                if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = [(int(a), int(b)) for a, b in rows[1:]]
    if len(edges) != m:
        raise ValueError(f"{path}: header announces {m} edges, found {len(edges)}")
    return build_digraph(n, edges)


def write_edgelist(g, path):
    """Write ``g`` in the edge-list format, edges sorted by ``(u, v)``."""
    e = g.edges()
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in e.tolist():
            fh.write(f"{u} {v}\n")
