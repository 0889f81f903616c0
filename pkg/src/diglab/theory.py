"""
Limit values for tree-like forward-backward local limits.

For a joint degree law ``p(j, k)`` with mean degree ``E = E[D-] = E[D+]``
the forward exploration is a Galton-Watson tree whose offspring law is the
out-degree of a vertex reached through one of its in-stubs,

    f+(k) = sum_j j p(j, k) / E,        G+(s) = sum_k f+(k) s^k,

and the backward exploration uses ``f-(j) = sum_k k p(j, k) / E``.  Given the
root's degrees the two trees are independent, so with ``q+``, ``q-`` the
extinction probabilities per stub,

    zeta = sum_{j,k} p(j, k) (1 - q-^j) (1 - q+^k).

See THEORY.md for the derivation.
"""
import math
from dataclasses import dataclass

import numpy as np

from .generators import DegreeLaw

__all__ = [
    "LimitValues",
    "solve_limits",
    "smallest_fixed_point",
    "giant_degree_mass",
    "giant_edge_density",
    "giant_internal_edge_density",
    "zeta_geq_k_proxy",
    "offspring_laws",
]

CRITICAL_SLACK = 1e-12


@dataclass(frozen=True)
class LimitValues:
    law: DegreeLaw
    q_minus: float
    q_plus: float
    eta_minus: float
    eta_plus: float
    zeta: float
    scc_density_treelike: float
    giant_edge_density: float
    solver_residual: float

    def as_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "law"}
        d["law"] = self.law.describe()
        return d


def offspring_laws(law):
    """Forward and backward offspring pmfs ``(f_plus, f_minus)`` as arrays."""
    P = law.grid()
    mean = law.mean_in()
    if mean <= 0:
        raise ValueError("degree law has zero mean degree; no exploration process exists")
    j = np.arange(P.shape[0])
    k = np.arange(P.shape[1])
    f_plus = (j[:, None] * P).sum(axis=0) / mean
    f_minus = (P * k[None, :]).sum(axis=1) / mean
    return f_plus, f_minus


def _pgf(pmf):
    coeffs = np.asarray(pmf, dtype=float)

    def G(s):
        return float(np.polynomial.polynomial.polyval(s, coeffs))

    def dG(s):
        return float(np.polynomial.polynomial.polyval(
            s, np.polynomial.polynomial.polyder(coeffs)))

    return G, dG


def smallest_fixed_point(G, dG, mean, tol=1e-12):
    """
    Smallest root of ``G(s) = s`` in ``[0, 1]`` for a probability generating
    function with offspring mean ``mean``.

    Critical and subcritical laws return 1.  Otherwise bisection on
    ``[0, 1 - tol]`` brackets the root, then Newton steps polish it.
    """
    if mean <= 1 + CRITICAL_SLACK:
        return 1.0
    h = lambda s: G(s) - s
    if h(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 1.0 - tol
    while h(hi) >= 0 and hi > 0.5:
        # very slightly supercritical: the root sits closer to 1
        hi = 1.0 - (1.0 - hi) / 16
        if 1.0 - hi < 1e-15:
            return 1.0
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    for _ in range(5):
        slope = dG(s) - 1
        if slope == 0:
            break
        step = h(s) / slope
        if not (lo - 1e-9 <= s - step <= hi + 1e-9):
            break
        s -= step
    return min(max(s, 0.0), 1.0)


def solve_limits(law, tol=1e-12):
    """Solve the survival fixed points of ``law`` and derive the limit values."""
    if not 0 < tol <= 1e-6:
        raise ValueError("tol must lie in (0, 1e-6]")
    law.validate()
    if law.kind == "poisson":
        lam = law.lam
        G = lambda s: math.exp(lam * (s - 1))
        dG = lambda s: lam * math.exp(lam * (s - 1))
        q = smallest_fixed_point(G, dG, lam, tol)
        q_plus = q_minus = q
        residual = abs(G(q) - q)
        eta_plus = eta_minus = 1.0 - G(q)
        zeta = eta_plus * eta_minus
    else:
        f_plus, f_minus = offspring_laws(law)
        Gp, dGp = _pgf(f_plus)
        Gm, dGm = _pgf(f_minus)
        mean_plus = float((np.arange(len(f_plus)) * f_plus).sum())
        mean_minus = float((np.arange(len(f_minus)) * f_minus).sum())
        q_plus = smallest_fixed_point(Gp, dGp, mean_plus, tol)
        q_minus = smallest_fixed_point(Gm, dGm, mean_minus, tol)
        residual = max(abs(Gp(q_plus) - q_plus), abs(Gm(q_minus) - q_minus))
        P = law.grid()
        j = np.arange(P.shape[0])
        k = np.arange(P.shape[1])
        eta_minus = 1.0 - float((P.sum(axis=1) * q_minus ** j).sum())
        eta_plus = 1.0 - float((P.sum(axis=0) * q_plus ** k).sum())
        zeta = float((P * np.outer(1 - q_minus ** j, 1 - q_plus ** k)).sum())
    partial = LimitValues(law, q_minus, q_plus, eta_minus, eta_plus, zeta,
                          1.0 - zeta, 0.0, residual)
    return LimitValues(law, q_minus, q_plus, eta_minus, eta_plus, zeta,
                       1.0 - zeta, giant_edge_density(partial), residual)


def giant_degree_mass(lim, l, m):
    """Limit mass of root degree ``(l, m)`` with both components infinite."""
    return lim.law.mass(l, m) * (1 - lim.q_minus ** l) * (1 - lim.q_plus ** m)


def giant_edge_density(lim):
    """
    ``(1/2) E[(D- + D+) 1{both components infinite}]``, the half degree sum
    of giant vertices per vertex.  Series truncated at the law's support.
    """
    P = lim.law.grid()
    j = np.arange(P.shape[0])
    k = np.arange(P.shape[1])
    weight = np.outer(1 - lim.q_minus ** j, 1 - lim.q_plus ** k)
    return 0.5 * float((P * (j[:, None] + k[None, :]) * weight).sum())


def giant_internal_edge_density(lim):
    """
    Limit of (edges with both ends in the strong giant) / n for tree-like
    limits: ``E[D] (1 - q-) (1 - q+)``.  An edge ``u -> v`` is internal
    exactly when ``u`` has an infinite in-component and ``v`` an infinite
    out-component, and both ends of a uniform edge see size-biased laws.
    """
    return lim.law.mean_in() * (1 - lim.q_minus) * (1 - lim.q_plus)


def _tree_sizes(root_children, offspring, cap, rng):
    """
    Vectorised truncated Galton-Watson growth.  Returns tree sizes (root
    counted); a tree is no longer grown once it has ``cap`` vertices, so
    sizes are exact below ``cap``.
    """
    size = 1 + root_children
    gen = root_children.copy()
    alive = (size < cap) & (gen > 0)
    while alive.any():
        idx = np.flatnonzero(alive)
        gen[idx] = offspring(gen[idx], rng)
        size[idx] += gen[idx]
        alive = (size < cap) & (gen > 0)
    return size


def _offspring_sampler(law, direction):
    if law.kind == "poisson":
        lam = law.lam
        return lambda counts, rng: rng.poisson(lam * counts)
    f_plus, f_minus = offspring_laws(law)
    pmf = f_plus if direction == "out" else f_minus
    values = np.arange(len(pmf))
    p = pmf / pmf.sum()

    def draw(counts, rng):
        total = int(counts.sum())
        draws = rng.choice(values, size=total, p=p)
        owner = np.repeat(np.arange(len(counts)), counts)
        return np.bincount(owner, weights=draws, minlength=len(counts)).astype(np.int64)

    return draw


def zeta_geq_k_proxy(law, k, replicates, seed):
    """
    Monte Carlo estimate of P(in- and out-trees of the root both reach ``k``
    vertices) under the forward-backward branching-process limit.

    ``k`` may be an int, giving ``(estimate, standard_error)``, or a list of
    ints, giving a list of such pairs.  For a list the same trees are used
    for every threshold, so the estimates are nonincreasing in ``k``.
    """
    ks = [k] if np.isscalar(k) else list(k)
    if not ks or min(ks) < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    din, dout = law.sample(replicates, rng)
    din = np.asarray(din, dtype=np.int64)
    dout = np.asarray(dout, dtype=np.int64)
    cap = max(ks)
    fwd = _tree_sizes(dout, _offspring_sampler(law, "out"), cap, rng)
    bwd = _tree_sizes(din, _offspring_sampler(law, "in"), cap, rng)
    both = np.minimum(fwd, bwd)
    out = []
    for kk in ks:
        p = float(np.count_nonzero(both >= kk)) / replicates
        out.append((p, math.sqrt(p * (1 - p) / replicates)))
    return out[0] if np.isscalar(k) else out
