"""Participation equilibrium of the extended model.

Liquidity traders submit an order with probability ``pi = curve(cost)``,
where ``cost`` is half their expected buy-sell spread.  That spread depends
on the informed fraction of order flow, which in turn depends on ``pi``.  The
solver finds the fixed point by damped iteration.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ExtendedSecurityParams, JointValueModel, Population, effective_gamma


@dataclass(frozen=True)
class SolverConfig:
    damping: float = 0.5
    tol: float = 1e-12
    max_iter: int = 10_000
    variant: str = "paper"

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.variant not in ("paper", "renormalized"):
            raise ValueError(f"unknown gamma variant {self.variant!r}")


@dataclass(frozen=True)
class EquilibriumState:
    pi: tuple
    gamma: tuple
    transaction_probability: tuple
    converged: bool
    iterations: int
    residual: float
    with_amm: bool
    variant: str

    def spread(self, params: Sequence[ExtendedSecurityParams]) -> np.ndarray:
        """Unconditional spreads 2 * gamma * r at the equilibrium."""
        return 2 * np.asarray(self.gamma) * np.array([s.r for s in params])

    def to_dict(self) -> dict:
        return {
            "pi": list(self.pi),
            "gamma": list(self.gamma),
            "transaction_probability": list(self.transaction_probability),
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "with_amm": self.with_amm,
            "variant": self.variant,
        }


def liquidity_costs(model: JointValueModel, params: Sequence[ExtendedSecurityParams],
                    gammas, with_amm: bool) -> np.ndarray:
    """Expected liquidity-trader cost per security: half the relevant spread.

    Without the AMM the spread is ``2 gamma r``.  With her it is the
    liquidity-trader spread; two-security markets use the closed form, larger
    ones the exact enumeration.
    """
    gammas = np.asarray(gammas, dtype=float)
    r = np.array([s.r for s in params])
    if not with_amm or model.n == 1:
        return gammas * r
    if model.n == 2:
        c2 = (2 * model.phi - 1) ** 2
        g1, g2 = gammas, gammas[::-1]
        den = 1 - c2 * g1**2 * g2**2
        with np.errstate(invalid="ignore", divide="ignore"):
            shrink = np.where(den > 0, (1 - c2 * g2**2) / np.where(den > 0, den, 1.0), 1.0)
        return gammas * r * shrink
    from .model import SecurityParams
    from .oracle import exact_metrics
    g = np.clip(gammas, 1e-15, 1 - 1e-15)
    base = [SecurityParams(s.p, s.r, float(gi), s.index) for s, gi in zip(params, g)]
    report = exact_metrics(model, base, mode="base", with_amm=True)
    return np.array([m.spread_liquidity / 2 for m in report.securities])


def solve_equilibrium(params: Sequence[ExtendedSecurityParams], model: JointValueModel,
                      with_amm: bool = True, config: SolverConfig | None = None) -> EquilibriumState:
    """Damped fixed-point iteration ``pi <- (1-l) pi + l curve(cost(gamma(pi)))``.

    Starts from the participation implied by full participation.  Stops when
    the undamped residual ``max |curve(...) - pi|`` drops to ``config.tol`` and
    returns that last undamped image; otherwise returns the last iterate with
    ``converged=False``.
    """
    config = config or SolverConfig()
    if len(params) != model.n:
        raise ValueError(f"{len(params)} securities given for an n={model.n} model")
    deltas = np.array([s.delta for s in params])

    def update(pi):
        gam = effective_gamma(deltas, pi, config.variant)
        cost = liquidity_costs(model, params, gam, with_amm)
        out = np.array([float(s.participation(c)) for s, c in zip(params, cost)])
        if not np.all(np.isfinite(out)) or np.any((out < 0) | (out > 1)):
            raise ValueError(f"participation curve produced {out}, outside [0, 1]")
        return out

    pi = update(np.ones(model.n))
    lam = config.damping
    residual = np.inf
    iterations = 0
    converged = False
    while iterations < config.max_iter:
        target = update(pi)
        iterations += 1
        residual = float(np.max(np.abs(target - pi)))
        if residual <= config.tol:
            # the undamped image sits closer to the fixed point than pi itself
            pi = target
            converged = True
            break
        pi = (1 - lam) * pi + lam * target
    gam = effective_gamma(deltas, pi, config.variant)
    return EquilibriumState(
        pi=tuple(float(x) for x in pi),
        gamma=tuple(float(x) for x in np.atleast_1d(gam)),
        transaction_probability=tuple(float(x) for x in deltas + (1 - deltas) * pi),
        converged=converged,
        iterations=iterations,
        residual=residual,
        with_amm=with_amm,
        variant=config.variant,
    )


def resolve_population(model: JointValueModel, params, mode: str = "base",
                       with_amm: bool = True, pis=None, variant: str = "paper"):
    """Population and pricing parameters for a base or extended configuration.

    Extended configurations without explicit ``pis`` use the participation
    equilibrium for the given AMM setting.
    """
    if mode == "base":
        return Population.base(params), list(params)
    if mode != "extended":
        raise ValueError(f"unknown mode {mode!r}")
    if pis is None:
        eq = solve_equilibrium(params, model, with_amm, SolverConfig(variant=variant))
        pis = eq.pi
    pop = Population.extended(params, pis, variant)
    pricing = [s.with_gamma(g) for s, g in zip(params, pop.pricing_gamma)]
    return pop, pricing
