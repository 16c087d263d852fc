import math

import numpy as np
import pytest

from gmamm.model import (
    ExtendedSecurityParams,
    Population,
    SecurityParams,
    chain_model,
    independent_model,
    two_security_model,
)
from gmamm.oracle import (
    MAX_ORACLE_SECURITIES,
    CapacityError,
    exact_metrics,
    exact_state_distribution,
    iter_atoms,
)


def test_example_state_distribution(example_market):
    model, params = example_market
    dist = exact_state_distribution(model, params)
    assert dist[(1, 1)] == pytest.approx(0.30, abs=1e-12)
    assert dist[(-1, -1)] == pytest.approx(0.30, abs=1e-12)
    assert dist[(1, -1)] == pytest.approx(0.20, abs=1e-12)
    assert dist[(-1, 1)] == pytest.approx(0.20, abs=1e-12)


@pytest.mark.parametrize("g1,g2,phi", [(0.3, 0.8, 0.2), (0.9, 0.1, 1.0), (0.5, 0.5, 0.0)])
def test_aligned_state_probability(g1, g2, phi):
    params = (SecurityParams(0, 1, g1, 0), SecurityParams(0, 1, g2, 1))
    dist = exact_state_distribution(two_security_model(phi), params)
    assert dist[(1, 1)] == pytest.approx((1 + (2 * phi - 1) * g1 * g2) / 4, abs=1e-12)


def test_independent_states_uniform():
    params = (SecurityParams(0, 1, 0.3, 0), SecurityParams(0, 1, 0.7, 1))
    dist = exact_state_distribution(two_security_model(0.5), params)
    assert all(v == pytest.approx(0.25, abs=1e-12) for v in dist.values())


def test_chain_state_distribution_marginals():
    model = chain_model([0.8, 0.3])
    params = [SecurityParams(0, 1, 0.2 + 0.3 * i, i) for i in range(3)]
    dist = exact_state_distribution(model, params)
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    for i in range(3):
        buy = math.fsum(p for o, p in dist.items() if o[i] == 1)
        assert buy == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("extended", [False, True])
def test_atoms_sum_to_one(extended):
    model = chain_model([0.9, 0.6])
    if extended:
        params = [ExtendedSecurityParams(0, 1, 0.3 + 0.1 * i, index=i) for i in range(3)]
        pop = Population.extended(params, [0.4, 0.5, 0.9])
    else:
        pop = Population.base([SecurityParams(0, 1, 0.4, i) for i in range(3)])
    total = math.fsum(w for *_, masses in iter_atoms(model, pop, extended) for w in masses.tolist())
    assert total == pytest.approx(1.0, abs=1e-12)


def test_example_metrics(example_market):
    model, params = example_market
    rep = exact_metrics(model, params)
    s = rep[0]
    assert rep.path == "oracle" and s.se is None
    assert s.spread == pytest.approx(1.0, abs=1e-12)
    assert s.spread_liquidity == pytest.approx(0.875, abs=1e-12)
    assert s.spread_informed == pytest.approx(1.125, abs=1e-12)
    assert s.mm_share == pytest.approx(0.30, abs=1e-12)
    assert s.inefficiency_no_amm == pytest.approx(0.75, abs=1e-12)
    assert s.inefficiency_amm == pytest.approx(0.65625, abs=1e-12)
    assert s.inefficiency_amm_type_avg == pytest.approx(0.71875, abs=1e-12)
    assert s.amm_profit == pytest.approx(0.0, abs=1e-12)
    assert s.mm_profit == pytest.approx(0.0, abs=1e-12)
    assert (s.mm_bid, s.mm_ask) == pytest.approx((49.25, 50.75), abs=1e-12)


@pytest.mark.parametrize("g", [0.2, 0.5, 0.85])
def test_independence_inefficiency(g):
    params = (SecurityParams(50, 3.0, g, 0), SecurityParams(50, 1.0, 0.4, 1))
    s = exact_metrics(two_security_model(0.5), params)[0]
    expected = (1 - g) * (1 + g) * 3.0
    assert s.inefficiency_amm == pytest.approx(expected, abs=1e-12)
    assert s.inefficiency_no_amm == pytest.approx(expected, abs=1e-12)


def test_without_amm(example_market):
    model, params = example_market
    s = exact_metrics(model, params, with_amm=False)[0]
    assert s.mm_share == 1.0 and s.amm_profit is None
    assert s.spread_informed == pytest.approx(1.0, abs=1e-12)
    # both inefficiency figures are reported regardless of which market ran
    assert s.inefficiency_no_amm == pytest.approx(0.75, abs=1e-12)
    assert s.inefficiency_amm == pytest.approx(0.65625, abs=1e-12)


def test_extended_transaction_probability():
    model = two_security_model(0.8)
    params = [ExtendedSecurityParams(50, 1, 0.3, index=0), ExtendedSecurityParams(50, 1, 0.6, index=1)]
    pis = [0.5, 0.25]
    rep = exact_metrics(model, params, "extended", pis=pis)
    for s, d, pi in zip(rep.securities, (0.3, 0.6), pis):
        assert s.p_transact == pytest.approx(d + (1 - d) * pi, abs=1e-12)


def test_extended_renormalized_is_zero_profit():
    model = chain_model([0.8, 0.7])
    params = [ExtendedSecurityParams(50, 1, 0.4, index=i) for i in range(3)]
    rep = exact_metrics(model, params, "extended", pis=[0.6, 0.7, 0.5], variant="renormalized")
    for s in rep.securities:
        assert s.amm_profit == pytest.approx(0.0, abs=1e-12)
        assert s.mm_profit == pytest.approx(0.0, abs=1e-12)


def test_capacity_error():
    n = MAX_ORACLE_SECURITIES + 1
    params = [SecurityParams(0, 1, 0.5, i) for i in range(n)]
    with pytest.raises(CapacityError, match="n <= 8"):
        exact_metrics(independent_model(n), params)
    with pytest.raises(CapacityError):
        exact_state_distribution(independent_model(n), params)


def test_metrics_shape_n3():
    model = chain_model([0.8, 0.7])
    params = [SecurityParams(0, 1, 0.5, i) for i in range(3)]
    rep = exact_metrics(model, params)
    assert len(rep.securities) == 3
    assert np.all([0 < s.mm_share < 0.5 for s in rep.securities])
