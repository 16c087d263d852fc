"""Multi-security dealership market with a cross-security automated market maker.

Closed-form analytics, exact enumeration and seeded Monte Carlo simulation of
a sequential-trade market in which a traditional per-security market maker
competes with an automated market maker who prices each order conditional on
the order flow in every security.
"""
from .analytics import (
    conditional_price,
    inefficiency_with_amm,
    inefficiency_with_amm_exact,
    inefficiency_without_amm,
    informed_spread,
    liquidity_spread,
    mm_volume_share,
    two_security_metrics,
    unconditional_spread,
    widest_quotes,
)
from .equilibrium import EquilibriumState, SolverConfig, solve_equilibrium
from .metrics import MetricsReport, SecurityMetrics
from .model import (
    ExtendedSecurityParams,
    JointValueModel,
    Order,
    ParticipationCurve,
    Population,
    SecurityParams,
    chain_model,
    effective_gamma,
    independent_model,
    sample_round,
    sample_rounds,
    two_security_model,
    validate,
)
from .oracle import exact_conditional_values, exact_metrics, exact_state_distribution
from .pricing import (
    QuotePair,
    amm_transaction_prices,
    attribute_execution,
    mm_quotes_standalone,
    mm_quotes_with_amm,
    posterior_over_values,
)
from .simulator import SimulationConfig, SimulationStats, run, sweep

__version__ = "0.1.0"
