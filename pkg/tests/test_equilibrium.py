import numpy as np
import pytest
from scipy.optimize import bisect

from gmamm.analytics import liquidity_spread
from gmamm.equilibrium import SolverConfig, liquidity_costs, solve_equilibrium
from gmamm.model import (
    ExtendedSecurityParams,
    JointValueModel,
    ParticipationCurve,
    chain_model,
    effective_gamma,
    two_security_model,
)

LINEAR = ParticipationCurve("linear", slope=0.5)


def ext(delta, curve=LINEAR, r=1.0, index=0):
    return ExtendedSecurityParams(50.0, r, delta, curve, index)


def test_single_security_fixed_point_against_bisection():
    # pi = 1 - 0.5 * (1 - 0.5 pi)  =>  pi = 2/3
    root = bisect(lambda pi: 1 - 0.5 * effective_gamma(0.5, pi) - pi, 0.0, 1.0, xtol=1e-15)
    assert root == pytest.approx(2 / 3, abs=1e-12)
    model = JointValueModel(1, (0.5, 0.5))
    eq = solve_equilibrium([ext(0.5)], model, with_amm=False)
    assert eq.converged
    assert eq.pi[0] == pytest.approx(root, abs=1e-12)
    assert eq.gamma[0] == pytest.approx(2 / 3, abs=1e-12)
    assert eq.transaction_probability[0] == pytest.approx(5 / 6, abs=1e-12)


def test_independent_pair_reduces_to_single_security():
    eq = solve_equilibrium([ext(0.5), ext(0.5, index=1)], two_security_model(0.5), with_amm=True)
    assert np.allclose(eq.pi, 2 / 3, atol=1e-12, rtol=0)


def test_constant_curve_one_iteration():
    flat = ParticipationCurve("constant", level=0.37)
    eq = solve_equilibrium([ext(0.4, flat), ext(0.6, flat, index=1)], two_security_model(0.9))
    assert eq.iterations == 1 and eq.converged
    assert eq.pi == (0.37, 0.37)


@pytest.mark.parametrize("variant", ["paper", "renormalized"])
def test_symmetric_pair_with_amm_against_bisection(variant):
    phi = 0.9
    c2 = (2 * phi - 1) ** 2

    def gap(pi):
        g = effective_gamma(0.5, pi, variant)
        shrink = (1 - c2 * g**2) / (1 - c2 * g**4)
        return 1 - 0.5 * g * shrink - pi

    root = bisect(gap, 0.0, 1.0, xtol=1e-15)
    cfg = SolverConfig(variant=variant)
    params = [ext(0.5), ext(0.5, index=1)]
    eq = solve_equilibrium(params, two_security_model(phi), True, cfg)
    assert np.allclose(eq.pi, root, atol=1e-12, rtol=0)
    without = solve_equilibrium(params, two_security_model(phi), False, cfg)
    assert all(a > b for a, b in zip(eq.pi, without.pi))
    assert np.all(eq.spread(params) < without.spread(params))


def test_liquidity_costs_match_closed_form():
    model = two_security_model(0.8)
    params = [ext(0.5, r=2.0), ext(0.5, index=1)]
    cost = liquidity_costs(model, params, [0.3, 0.7], with_amm=True)
    assert cost[0] == pytest.approx(liquidity_spread(0.3, 0.7, 0.8, 2.0) / 2, abs=1e-12)
    assert cost[1] == pytest.approx(liquidity_spread(0.7, 0.3, 0.8, 1.0) / 2, abs=1e-12)
    assert np.allclose(liquidity_costs(model, params, [0.3, 0.7], False), [0.6, 0.7])


def test_three_securities_use_exact_costs():
    model = chain_model([0.8, 0.7])
    params = [ext(0.5, index=i) for i in range(3)]
    eq_with = solve_equilibrium(params, model, True)
    eq_without = solve_equilibrium(params, model, False)
    assert eq_with.converged and eq_without.converged
    assert all(a > b for a, b in zip(eq_with.transaction_probability,
                                     eq_without.transaction_probability))


def test_iteration_cap_reports_non_convergence():
    eq = solve_equilibrium([ext(0.5), ext(0.5, index=1)], two_security_model(0.9),
                           config=SolverConfig(max_iter=3))
    assert not eq.converged and eq.iterations == 3 and eq.residual > 1e-12


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(damping=0.0)
    with pytest.raises(ValueError):
        SolverConfig(variant="other")
    with pytest.raises(ValueError):
        solve_equilibrium([ext(0.5)], two_security_model(0.9))


def test_state_serializes():
    d = solve_equilibrium([ext(0.5)], JointValueModel(1, (0.5, 0.5)), False).to_dict()
    assert set(d) == {"pi", "gamma", "transaction_probability", "converged", "iterations",
                      "residual", "with_amm", "variant"}
