"""
Seeded random and deterministic digraph generators.

Every random generator takes an integer seed and draws from its own
``numpy.random.Generator``; there is no module-level RNG.  Replicates of a
sweep get their seeds from :func:`derive_seed`, a SplitMix64 finaliser over
``(base_seed, replicate)``::

    z = base_seed + (replicate + 1) * 0x9E3779B97F4A7C15      (mod 2**64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9                  (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB                  (mod 2**64)
    z =  z ^ (z >> 31)
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import Digraph, build_digraph

__all__ = [
    "DegreeLaw",
    "GeneratorSpec",
    "derive_seed",
    "gen_directed_er",
    "gen_directed_cm",
    "simplify",
    "sample_degree_sequence",
    "fixture",
    "generate",
    "FIXTURES",
]

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
POISSON_TAIL = 1e-14


def derive_seed(base_seed, replicate):
    """64-bit seed for replicate ``replicate`` of a sweep seeded with ``base_seed``."""
    z = (int(base_seed) + (int(replicate) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class DegreeLaw:
    """
    Joint law of (in-degree, out-degree) of a uniform vertex.

    Build with :meth:`poisson`, :meth:`regular` or :meth:`explicit`.  For the
    Poisson law the in- and out-degree are independent Poisson(lam); its
    support is truncated where each marginal tail drops below 1e-14.
    """

    kind: str
    support: tuple = field(default=(), repr=False)
    lam: float = 0.0
    d: int = 0

    @classmethod
    def poisson(cls, lam):
        lam = float(lam)
        if not lam > 0:
            raise ValueError(f"poisson law needs lam > 0, got {lam}")
        top = poisson_truncation(lam)
        pmf = stats.poisson.pmf(np.arange(top + 1), lam)
        support = tuple(((j, k), float(pmf[j] * pmf[k]))
                        for j in range(top + 1) for k in range(top + 1))
        return cls("poisson", support, lam=lam)

    @classmethod
    def regular(cls, d):
        d = int(d)
        if d < 0:
            raise ValueError("regular degree must be nonnegative")
        return cls("regular", (((d, d), 1.0),), d=d)

    @classmethod
    def explicit(cls, masses):
        """
        ``masses`` maps ``(j, k)`` to probability, or is a sequence of
        ``(j, k, mass)`` triples.
        """
        items = masses.items() if isinstance(masses, dict) else \
            (((j, k), p) for j, k, p in masses)
        merged = {}
        for (j, k), p in items:
            j, k, p = int(j), int(k), float(p)
            if j < 0 or k < 0:
                raise ValueError(f"negative degree in ({j}, {k})")
            if p < 0:
                raise ValueError(f"negative mass {p} at ({j}, {k})")
            merged[(j, k)] = merged.get((j, k), 0.0) + p
        law = cls("explicit", tuple(sorted(merged.items())))
        law.validate()
        return law

    @classmethod
    def parse(cls, text):
        """Parse ``poisson:L``, ``regular:D`` or ``file:PATH`` (JSON [[j,k,mass],...])."""
        kind, _, arg = text.partition(":")
        if kind == "poisson":
            return cls.poisson(float(arg))
        if kind == "regular":
            return cls.regular(int(arg))
        if kind == "file":
            import json
            with open(arg) as fh:
                return cls.explicit(json.load(fh))
        raise ValueError(f"unknown degree law {text!r}")

    def describe(self):
        if self.kind == "poisson":
            return f"poisson:{self.lam:g}"
        if self.kind == "regular":
            return f"regular:{self.d}"
        return "explicit"

    def validate(self):
        total = sum(p for _, p in self.support)
        if self.kind != "poisson" and abs(total - 1.0) > 1e-12:
            raise ValueError(f"degree law masses sum to {total!r}, not 1")
        if abs(self.mean_in() - self.mean_out()) > 1e-9:
            raise ValueError(
                f"mean in-degree {self.mean_in()} differs from mean out-degree {self.mean_out()}")

    def grid(self):
        """Joint pmf as a 2-d array ``P[j, k]``."""
        jmax = max(j for (j, _), _ in self.support)
        kmax = max(k for (_, k), _ in self.support)
        P = np.zeros((jmax + 1, kmax + 1))
        for (j, k), p in self.support:
            P[j, k] += p
        return P

    def mass(self, j, k):
        if self.kind == "poisson":
            return float(stats.poisson.pmf(j, self.lam) * stats.poisson.pmf(k, self.lam))
        return sum(p for jk, p in self.support if jk == (j, k))

    def mean_in(self):
        if self.kind == "poisson":
            return self.lam
        return sum(j * p for (j, _), p in self.support)

    def mean_out(self):
        if self.kind == "poisson":
            return self.lam
        return sum(k * p for (_, k), p in self.support)

    def sample(self, size, rng):
        """Draw ``size`` i.i.d. (in, out) pairs; returns two int arrays."""
        if self.kind == "poisson":
            return rng.poisson(self.lam, size), rng.poisson(self.lam, size)
        if self.kind == "regular":
            return np.full(size, self.d), np.full(size, self.d)
        pairs = np.array([jk for jk, _ in self.support], dtype=np.int64)
        p = np.array([m for _, m in self.support])
        pick = rng.choice(len(pairs), size=size, p=p / p.sum())
        return pairs[pick, 0], pairs[pick, 1]


def poisson_truncation(lam, tail=POISSON_TAIL):
    """Smallest ``t`` with ``P(Poisson(lam) > t) < tail``."""
    return int(stats.poisson.isf(tail, lam)) + 1


@dataclass(frozen=True)
class GeneratorSpec:
    """
    What to generate.  ``model`` is ``"er"`` (params: ``lam``), ``"cm"``
    (params: ``law`` as a :class:`DegreeLaw` or its string form, optional
    ``simple``) or ``"fixture"`` (params: ``name`` plus fixture arguments).
    """

    model: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.model == "er" and self.params.get("lam", 0) < 0:
            raise ValueError("lambda must be >= 0")


def gen_directed_er(n, lam, seed):
    """
    Directed Erdos-Renyi digraph: each ordered pair ``(u, v)``, ``u != v``,
    is an edge independently with probability ``lam / n``.

    The ``n(n-1)`` ordered pairs are enumerated implicitly and skipped over
    with geometric gaps, so the cost is proportional to the edge count.
    """
    n = int(n)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    p = lam / n
    if p > 1:
        raise ValueError(f"edge probability lam/n = {p} exceeds 1")
    total = n * (n - 1)
    if p == 0 or total == 0:
        return build_digraph(n, np.zeros((0, 2), dtype=np.int64))
    rng = np.random.default_rng(seed)
    if p == 1:
        pos = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        last = -1
        batch = max(16, int(total * p * 1.1) + 64)
        while True:
            gaps = rng.geometric(p, size=batch).astype(np.int64)
            pos = last + np.cumsum(gaps)
            chunks.append(pos)
            last = int(pos[-1])
            if last >= total:
                break
            batch = max(16, int((total - last) * p * 1.1) + 64)
        pos = np.concatenate(chunks)
        pos = pos[pos < total]
    u = pos // (n - 1)
    w = pos % (n - 1)
    v = w + (w >= u)
    return Digraph(n, u, v)


def gen_directed_cm(in_degrees, out_degrees, seed):
    """
    Directed configuration model: out-stubs in vertex order are matched to a
    uniformly shuffled list of in-stubs.  Self-loops and multi-edges stay.
    """
    din = np.asarray(in_degrees, dtype=np.int64)
    dout = np.asarray(out_degrees, dtype=np.int64)
    if din.shape != dout.shape:
        raise ValueError("in- and out-degree sequences have different lengths")
    if (din < 0).any() or (dout < 0).any():
        raise ValueError("degrees must be nonnegative")
    if din.sum() != dout.sum():
        raise ValueError(
            f"stub counts differ: sum of in-degrees {din.sum()}, "
            f"sum of out-degrees {dout.sum()}")
    n = len(din)
    vertices = np.arange(n, dtype=np.int64)
    tails = np.repeat(vertices, dout)
    heads = np.random.default_rng(seed).permutation(np.repeat(vertices, din))
    return Digraph(n, tails, heads)


def simplify(g):
    """Erase self-loops and collapse multi-edges; returns ``(digraph, n_erased)``."""
    e = g.edges()
    e = e[e[:, 0] != e[:, 1]]
    e = np.unique(e, axis=0) if len(e) else e
    return Digraph(g.n, e[:, 0], e[:, 1]), g.m - len(e)


def sample_degree_sequence(law, n, seed):
    """
    Draw ``n`` i.i.d. degree pairs from ``law`` and make the stub totals
    agree by adding single units to the smaller side at uniformly chosen
    vertices.

    Returns ``(in_degrees, out_degrees, repairs)``.
    """
    rng = np.random.default_rng(seed)
    din, dout = law.sample(n, rng)
    din = np.asarray(din, dtype=np.int64).copy()
    dout = np.asarray(dout, dtype=np.int64).copy()
    gap = int(din.sum() - dout.sum())
    if gap:
        side = dout if gap > 0 else din
        np.add.at(side, rng.integers(0, n, abs(gap)), 1)
        log.debug("degree sequence repaired with %d unit increments", abs(gap))
    return din, dout, abs(gap)


def _cycle_edges(start, length):
    if length < 2:
        return []
    return [(start + i, start + (i + 1) % length) for i in range(length)]


def _scc_chain(k=3, blob=2):
    edges = []
    for i in range(k):
        edges += _cycle_edges(i * blob, blob)
        if i + 1 < k:
            edges.append((i * blob, (i + 1) * blob))
    return build_digraph(k * blob, edges)


def _directed_cycle(n):
    return build_digraph(n, _cycle_edges(0, n))


def _directed_path(n):
    return build_digraph(n, [(i, i + 1) for i in range(n - 1)])


def _dag_complete(n):
    return build_digraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def _bowtie_exemplar(a=2, b=3, c=2):
    # IN = 0..a-1, core cycle = a..a+b-1, OUT = a+b..a+b+c-1
    edges = [(i, a) for i in range(a)]
    edges += _cycle_edges(a, b)
    edges += [(a + b - 1, a + b + i) for i in range(c)]
    return build_digraph(a + b + c, edges)


FIXTURES = {
    "scc-chain": _scc_chain,
    "directed-cycle": _directed_cycle,
    "directed-path": _directed_path,
    "dag-complete": _dag_complete,
    "bowtie-exemplar": _bowtie_exemplar,
}


def fixture(name, **params):
    """
    Deterministic test digraphs.

    ``scc-chain(k, blob)``: ``k`` directed cycles of ``blob`` vertices, cycle
    ``i`` joined to cycle ``i+1`` by one edge.  ``bowtie-exemplar(a, b, c)``:
    ``a`` vertices pointing into a directed ``b``-cycle which points out to
    ``c`` vertices.  Also ``directed-cycle(n)``, ``directed-path(n)`` and
    ``dag-complete(n)``.
    """
    try:
        make = FIXTURES[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    return make(**params)


def generate(spec):
    """
    Realise a :class:`GeneratorSpec`.  Returns ``(digraph, info)`` where
    ``info`` records degree repairs and erased edges when relevant.
    """
    params = dict(spec.params)
    info = {}
    if spec.model == "er":
        g = gen_directed_er(spec.n, params["lam"], spec.seed)
    elif spec.model == "cm":
        law = params["law"]
        if isinstance(law, str):
            law = DegreeLaw.parse(law)
        ss = np.random.SeedSequence(spec.seed)
        deg_seed, match_seed = (int(s.generate_state(1, np.uint64)[0]) for s in ss.spawn(2))
        din, dout, repairs = sample_degree_sequence(law, spec.n, deg_seed)
        info["repairs"] = repairs
        g = gen_directed_cm(din, dout, match_seed)
        if params.get("simple"):
            g, erased = simplify(g)
            info["erased"] = erased
    elif spec.model == "fixture":
        name = params.pop("name")
        g = fixture(name, **params)
    else:
        raise ValueError(f"unknown model {spec.model!r}")
    return g, info

