import math

import numpy as np
import pytest

from diglab import (DegreeLaw, giant_degree_mass, giant_edge_density,
                    giant_internal_edge_density, solve_limits, zeta_geq_k_proxy)
from diglab.theory import offspring_laws, smallest_fixed_point


def bisect(f, lo, hi, tol=1e-13):
    """Plain bisection for a sign change of f on [lo, hi]."""
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def poisson_eta(lam):
    # positive root of eta = 1 - exp(-lam eta)
    return bisect(lambda e: 1 - math.exp(-lam * e) - e, 1e-9, 1.0)


def test_poisson_two_against_bisection():
    lim = solve_limits(DegreeLaw.poisson(2))
    eta = poisson_eta(2.0)
    assert abs(eta - 0.7968) < 1e-4
    assert lim.eta_plus == pytest.approx(eta, abs=1e-10)
    assert lim.eta_minus == pytest.approx(eta, abs=1e-10)
    assert lim.zeta == pytest.approx(eta ** 2, abs=1e-10)
    assert abs(lim.zeta - 0.6349) < 1e-4
    assert abs(lim.scc_density_treelike - 0.3651) < 1e-4


def test_subcritical_and_critical():
    for lam in (0.5, 1.0):
        lim = solve_limits(DegreeLaw.poisson(lam))
        assert lim.zeta == 0 and lim.q_plus == 1 and lim.scc_density_treelike == 1


def test_regular_two():
    lim = solve_limits(DegreeLaw.regular(2))
    assert lim.q_plus == 0 and lim.q_minus == 0 and lim.zeta == 1


def test_regular_one_is_critical():
    assert solve_limits(DegreeLaw.regular(1)).zeta == 0


def test_explicit_law_against_oracle():
    law = DegreeLaw.explicit({(0, 1): 0.2, (1, 0): 0.2, (2, 2): 0.2, (3, 1): 0.2, (1, 3): 0.2})
    lim = solve_limits(law)
    E = law.mean_in()
    support = dict(law.support)
    Gp = lambda s: sum(j * p * s ** k for (j, k), p in support.items()) / E - s
    Gm = lambda s: sum(k * p * s ** j for (j, k), p in support.items()) / E - s
    qp = bisect(Gp, 0.0, 1 - 1e-6)
    qm = bisect(Gm, 0.0, 1 - 1e-6)
    assert lim.q_plus == pytest.approx(qp, abs=1e-9)
    assert lim.q_minus == pytest.approx(qm, abs=1e-9)
    zeta = sum(p * (1 - qm ** j) * (1 - qp ** k) for (j, k), p in support.items())
    assert lim.zeta == pytest.approx(zeta, abs=1e-9)


@pytest.mark.parametrize("law", [
    DegreeLaw.poisson(1.1), DegreeLaw.poisson(3.0), DegreeLaw.regular(3),
    DegreeLaw.explicit({(1, 1): 0.5, (2, 2): 0.25, (0, 0): 0.25}),
    DegreeLaw.explicit({(0, 2): 0.5, (2, 0): 0.5}),
])
def test_residual_and_range(law):
    lim = solve_limits(law)
    assert lim.solver_residual <= 1e-10
    for q in (lim.q_plus, lim.q_minus):
        assert 0 <= q <= 1
    assert 0 <= lim.zeta <= 1
    f_plus, _ = offspring_laws(law)
    mean = float((np.arange(len(f_plus)) * f_plus).sum())
    assert (lim.zeta == 0) == (mean <= 1 + 1e-12)


def test_zeta_monotone_in_lambda():
    zetas = [solve_limits(DegreeLaw.poisson(lam)).zeta for lam in (1.1, 1.5, 2, 3)]
    assert zetas == sorted(zetas) and zetas[0] > 0


def test_two_routes_agree():
    for lam in (1.1, 1.5, 2.0, 3.0, 5.0):
        q = bisect(lambda s: math.exp(-lam * (1 - s)) - s, 0.0, 1 - 1e-9)
        assert solve_limits(DegreeLaw.poisson(lam)).zeta == pytest.approx((1 - q) ** 2, abs=1e-9)


def test_slightly_supercritical():
    lim = solve_limits(DegreeLaw.poisson(1.001))
    eta = poisson_eta(1.001)
    assert lim.zeta == pytest.approx(eta ** 2, rel=1e-6) and lim.zeta > 0


def test_fixed_point_edge_cases():
    # no zero-offspring mass: extinction impossible
    assert smallest_fixed_point(lambda s: s * s, lambda s: 2 * s, 2.0) == 0.0
    assert smallest_fixed_point(lambda s: 1.0, lambda s: 0.0, 0.0) == 1.0


def test_tol_validated():
    with pytest.raises(ValueError):
        solve_limits(DegreeLaw.poisson(2), tol=0.1)


def test_zero_mean_law_rejected():
    with pytest.raises(ValueError):
        offspring_laws(DegreeLaw.regular(0))


# giant degree law

def test_degree_mass_examples():
    lim = solve_limits(DegreeLaw.poisson(2))
    assert giant_degree_mass(lim, 0, 0) == 0
    eta = poisson_eta(2.0)
    assert giant_degree_mass(lim, 1, 1) == pytest.approx((2 * math.exp(-2)) ** 2 * eta ** 2,
                                                          abs=1e-6)
    assert abs(giant_degree_mass(lim, 1, 1) - 0.0465) < 1e-4


@pytest.mark.parametrize("law", [DegreeLaw.poisson(2), DegreeLaw.poisson(0.7),
                                 DegreeLaw.explicit({(1, 2): 0.5, (2, 1): 0.5})])
def test_degree_mass_sums_to_zeta(law):
    lim = solve_limits(law)
    P = law.grid()
    total = sum(giant_degree_mass(lim, l, m) for l in range(P.shape[0]) for m in range(P.shape[1]))
    assert total == pytest.approx(lim.zeta, abs=1e-10)


# edge densities

def test_edge_density_examples():
    assert giant_edge_density(solve_limits(DegreeLaw.poisson(0.5))) == 0
    assert giant_edge_density(solve_limits(DegreeLaw.regular(2))) == pytest.approx(2.0)


def test_edge_density_poisson_closed_form():
    lam = 2.0
    eta = poisson_eta(lam)
    q = 1 - eta
    closed = lam * (1 - q * math.exp(lam * (q - 1))) * eta
    lim = solve_limits(DegreeLaw.poisson(lam))
    assert lim.giant_edge_density == pytest.approx(closed, abs=1e-9)
    assert abs(lim.giant_edge_density - 1.528) < 1e-3


def test_edge_density_lower_bound():
    law = DegreeLaw.explicit({(1, 1): 0.3, (2, 2): 0.4, (1, 3): 0.15, (3, 1): 0.15})
    lim = solve_limits(law)
    assert lim.giant_edge_density >= lim.zeta * 2 / 2


def test_internal_edge_density():
    lim = solve_limits(DegreeLaw.poisson(2))
    eta = poisson_eta(2.0)
    assert giant_internal_edge_density(lim) == pytest.approx(2 * eta ** 2, abs=1e-9)
    assert giant_internal_edge_density(solve_limits(DegreeLaw.regular(2))) == 2


def test_as_dict():
    d = solve_limits(DegreeLaw.poisson(2)).as_dict()
    assert d["law"] == "poisson:2" and set(d) >= {"zeta", "q_plus", "giant_edge_density"}


# zeta_{>=k} proxy

def test_proxy_k_one():
    assert zeta_geq_k_proxy(DegreeLaw.poisson(0.3), 1, 1000, 0) == (1.0, 0.0)


def test_proxy_large_k_near_zeta():
    zeta = solve_limits(DegreeLaw.poisson(2)).zeta
    est, se = zeta_geq_k_proxy(DegreeLaw.poisson(2), 200, 100_000, 0)
    assert abs(est - zeta) <= 3 * se


def test_proxy_nonincreasing_and_above_zeta():
    law = DegreeLaw.poisson(2)
    zeta = solve_limits(law).zeta
    ks = [1, 2, 5, 10, 50]
    res = zeta_geq_k_proxy(law, ks, 20_000, 3)
    ests = [e for e, _ in res]
    assert ests == sorted(ests, reverse=True)
    for est, se in res:
        assert est >= zeta - 3 * max(se, 1e-12)
    assert res[-1] == zeta_geq_k_proxy(law, 50, 20_000, 3)


def test_proxy_explicit_law():
    law = DegreeLaw.regular(2)
    assert zeta_geq_k_proxy(law, [3, 30], 500, 0) == [(1.0, 0.0), (1.0, 0.0)]
    with pytest.raises(ValueError):
        zeta_geq_k_proxy(law, 0, 10, 0)
