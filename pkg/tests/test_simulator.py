import math

import numpy as np
import pytest

from gmamm.metrics import METRIC_NAMES
from gmamm.model import (
    ExtendedSecurityParams,
    Population,
    SecurityParams,
    order_code,
    sample_rounds,
    two_security_model,
)
from gmamm.oracle import exact_metrics
from gmamm.pricing import PriceBook
from gmamm.simulator import BLOCK_ROUNDS, SimulationConfig, apply_point, grid_points, run, sweep

SIGMAS = 4.0


def within(sim, exact, names=None):
    """Names of metrics whose simulated estimate sits more than 4 SE from ``exact``."""
    bad = []
    for i, (s, e) in enumerate(zip(sim.securities, exact.securities)):
        for name in names or s.se:
            se = s.se.get(name)
            ev, sv = getattr(e, name), getattr(s, name)
            if se is None or ev is None:
                continue
            if se == 0:
                if abs(sv - ev) > 1e-12:
                    bad.append((i, name, sv, ev, se))
            elif abs(sv - ev) > SIGMAS * se:
                bad.append((i, name, sv, ev, se))
    return bad


@pytest.fixture(scope="module")
def example_config(example_market):
    model, params = example_market
    return SimulationConfig(model, params, rounds=400_000, master_seed=11)


@pytest.fixture(scope="module")
def example_run(example_config):
    return run(example_config)


def test_matches_oracle(example_config, example_run):
    exact = exact_metrics(example_config.model, example_config.params)
    assert within(example_run.metrics, exact) == []


def test_every_metric_has_count_and_se(example_run):
    for s in example_run.metrics.securities:
        assert s.counts["orders"] == 400_000
        for name in ("spread", "spread_informed", "spread_liquidity", "mm_share",
                     "inefficiency_amm", "inefficiency_no_amm", "p_transact"):
            assert s.se[name] is not None and s.se[name] >= 0


def test_worker_count_does_not_change_results(example_config):
    a = run(example_config)
    b = run(SimulationConfig(**{**example_config.__dict__, "workers": 4}))
    assert a.metrics.to_dict() == b.metrics.to_dict()
    for name in a.sums:
        assert np.array_equal(a.sums[name], b.sums[name])


def test_partial_last_block(example_market):
    model, params = example_market
    cfg = SimulationConfig(model, params, rounds=BLOCK_ROUNDS + 17, master_seed=3)
    assert run(cfg).metrics.securities[0].counts["orders"] == BLOCK_ROUNDS + 17


def test_seed_changes_sample(example_config):
    a = run(SimulationConfig(**{**example_config.__dict__, "rounds": 10_000}))
    b = run(SimulationConfig(**{**example_config.__dict__, "rounds": 10_000, "master_seed": 12}))
    assert a.metrics.to_dict() != b.metrics.to_dict()


def test_zero_rounds(example_market):
    model, params = example_market
    stats = run(SimulationConfig(model, params, rounds=0))
    assert stats.metrics.securities == [] and stats.rounds == 0


def test_without_amm(example_market):
    model, params = example_market
    stats = run(SimulationConfig(model, params, with_amm=False, rounds=200_000, master_seed=5))
    s = stats.metrics.securities[0]
    assert abs(s.spread - 1.0) <= SIGMAS * s.se["spread"]
    assert s.mm_share == 1.0
    assert s.amm_profit is None


def test_zero_profit(example_run):
    for s in example_run.metrics.securities:
        assert abs(s.amm_profit) <= SIGMAS * s.se["amm_profit"]
        assert abs(s.mm_profit) <= SIGMAS * s.se["mm_profit"]


def test_mixture_identity_on_raw_sums(example_run):
    sums = example_run.sums
    for side in ("buy", "sell"):
        split = sums[f"{side}_informed"][:, :2] + sums[f"{side}_liquidity"][:, :2]
        assert np.allclose(split, sums[side][:, :2], rtol=1e-15, atol=1e-9)


def test_calibration_per_state(example_market):
    # mean realized value among rounds sharing an order-flow state converges to the AMM price
    model, params = example_market
    n = 1_000_000
    batch = sample_rounds(model, Population.base(params), np.random.default_rng(21), n)
    book = PriceBook(model, params, True)
    amm = book.evaluate(batch.orders)["amm"]
    values = 50.0 + batch.values
    codes = order_code(batch.orders)
    for c in np.unique(codes):
        rows = codes == c
        for i in range(2):
            v = values[rows, i]
            se = v.std(ddof=1) / math.sqrt(len(v))
            assert abs(v.mean() - amm[rows, i][0]) <= SIGMAS * se


def test_extended_mode_matches_oracle():
    model = two_security_model(0.8)
    params = (ExtendedSecurityParams(50, 1, 0.5, index=0), ExtendedSecurityParams(50, 1, 0.4, index=1))
    for variant in ("paper", "renormalized"):
        cfg = SimulationConfig(model, params, "extended", rounds=300_000, master_seed=8,
                               variant=variant)
        stats = run(cfg)
        assert stats.equilibrium.converged
        exact = exact_metrics(model, params, "extended", pis=stats.equilibrium.pi, variant=variant)
        assert within(stats.metrics, exact) == []


def test_config_validation(example_market):
    model, params = example_market
    with pytest.raises(ValueError):
        SimulationConfig(model, params, rounds=-1)
    with pytest.raises(ValueError):
        SimulationConfig(model, params[:1])
    with pytest.raises(ValueError):
        SimulationConfig(model, params, mode="extended")
    with pytest.raises(ValueError):
        SimulationConfig(model, params, master_seed=2**64)


def test_sweep_empty_grid(example_config):
    assert sweep(example_config, {}) == []
    assert grid_points({}) == []


def test_sweep_mm_share_over_phi(example_market):
    model, params = example_market
    cfg = SimulationConfig(model, params, rounds=100_000, master_seed=2)
    phis = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    out = sweep(cfg, {"phi": phis})
    assert [pt["phi"] for pt, _ in out] == phis
    for (pt, stats), phi in zip(out, phis):
        s = stats.metrics.securities[0]
        target = 0.5 if phi == 0.5 else (1 + (2 * phi - 1) * 0.25) / 4
        assert abs(s.mm_share - target) <= SIGMAS * s.se["mm_share"] + 1e-12


def test_sweep_gamma_at_independence(example_market):
    _, params = example_market
    cfg = SimulationConfig(two_security_model(0.5), params, rounds=100_000, master_seed=4)
    for _, stats in sweep(cfg, {"gamma1": [0.2, 0.5, 0.8]}):
        s = stats.metrics.securities[0]
        for name in ("spread_informed", "spread_liquidity"):
            se = math.hypot(s.se[name], s.se["spread"])
            assert abs(getattr(s, name) - s.spread) <= SIGMAS * se


def test_sweep_points_use_distinct_streams(example_config):
    cfg = SimulationConfig(**{**example_config.__dict__, "rounds": 5000})
    (_, a), (_, b) = sweep(cfg, {"gamma": [0.5, 0.5]})
    assert a.metrics.to_dict() != b.metrics.to_dict()


def test_apply_point_errors(example_config):
    with pytest.raises(KeyError):
        apply_point(example_config, {"gamma3": 0.5})
    with pytest.raises(KeyError):
        apply_point(example_config, {"delta": 0.5})
    pc = apply_point(example_config, {"gamma2": 0.3, "phi": 0.7})
    assert pc.params[1].gamma == 0.3 and pc.model.phi == pytest.approx(0.7)


def test_metric_names_cover_report(example_run):
    d = example_run.metrics.securities[0].to_dict()
    assert set(METRIC_NAMES) <= set(d)


def test_sums_are_finite(example_run):
    for arr in example_run.sums.values():
        assert np.all(np.isfinite(arr))
