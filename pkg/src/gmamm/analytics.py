"""Closed forms for the two-security market.

Throughout, ``c = 2*phi - 1`` measures the value correlation; ``phi`` is
P(V_1^+ | V_2^+).  All expressions depend on ``c`` only through ``c**2``
except the conditional prices and the MM's widest quotes.
"""
from __future__ import annotations

from typing import Sequence

from .metrics import MetricsReport, SecurityMetrics
from .model import JointValueModel, SecurityParams


def _check(gamma1, gamma2=0.5, phi=0.5, r1=1.0):
    if not (0 < gamma1 < 1 and 0 < gamma2 < 1):
        raise ValueError(f"gammas must lie in (0, 1), got ({gamma1}, {gamma2})")
    if not 0 <= phi <= 1:
        raise ValueError(f"phi must lie in [0, 1], got {phi}")
    if not r1 > 0:
        raise ValueError(f"r must be positive, got {r1}")


def _discount(gamma1, gamma2, phi):
    """[1 - c^2 g2^2] / [1 - c^2 g1^2 g2^2], the liquidity-spread shrink factor."""
    c2 = (2 * phi - 1) ** 2
    return (1 - c2 * gamma2**2) / (1 - c2 * gamma1**2 * gamma2**2)


def conditional_price(gamma1, gamma2, phi, p1, r1, order1: int, order2: int) -> float:
    """E[V_1 | order1, order2] for orders +1 (buy) / -1 (sell)."""
    _check(gamma1, gamma2, phi, r1)
    c = 2 * phi - 1
    same = order1 * order2
    shift = (gamma1 + same * c * gamma2) / (1 + same * c * gamma1 * gamma2)
    return p1 + order1 * shift * r1


def widest_quotes(gamma1, gamma2, phi, p1, r1) -> tuple[float, float]:
    """MM (bid, ask) in the presence of the AMM: her most extreme prices."""
    _check(gamma1, gamma2, phi, r1)
    a = abs(2 * phi - 1)
    shift = (gamma1 + a * gamma2) / (1 + a * gamma1 * gamma2) * r1
    return p1 - shift, p1 + shift


def informed_spread(gamma1, gamma2, phi, r1) -> float:
    _check(gamma1, gamma2, phi, r1)
    return 2 * gamma1 * r1 * (1 / gamma1 - (1 / gamma1 - 1) * _discount(gamma1, gamma2, phi))


def liquidity_spread(gamma1, gamma2, phi, r1) -> float:
    _check(gamma1, gamma2, phi, r1)
    return 2 * gamma1 * r1 * _discount(gamma1, gamma2, phi)


def unconditional_spread(gamma1, r1) -> float:
    _check(gamma1, r1=r1)
    return 2 * gamma1 * r1


def mm_volume_share(gamma1, gamma2, phi) -> float:
    """Fraction of security-1 order flow the MM fills when the AMM is present.

    Undefined at phi = 1/2: there every AMM price equals the MM quote, every
    order splits and the share is exactly 1/2.
    """
    _check(gamma1, gamma2, phi)
    if phi == 0.5:
        raise ValueError("phi = 1/2: all orders split between MM and AMM (share 1/2); "
                         "the widest-spread formula does not apply")
    return (1 + abs(2 * phi - 1) * gamma1 * gamma2) / 4


def inefficiency_with_amm(gamma1, gamma2, phi, r1) -> float:
    _check(gamma1, gamma2, phi, r1)
    return (1 - gamma1) * (1 + gamma1 * _discount(gamma1, gamma2, phi)) * r1


def inefficiency_with_amm_exact(gamma1, gamma2, phi, r1) -> float:
    """E|V_1 - T_1| with the AMM, keeping the price-value correlation of liquidity trades.

    :func:`inefficiency_with_amm` treats a liquidity trader's price gap as
    ``r1`` on average, i.e. it measures the gap to the side-and-type averaged
    price E[T_1 | side, type].  The AMM's price for a liquidity order still
    leans toward the value through the other security's order, which removes
    ``c^2 g2^2 (1 - g1^2) / (1 - c^2 g1^2 g2^2)`` of ``r1`` from that gap.
    """
    _check(gamma1, gamma2, phi, r1)
    c2 = (2 * phi - 1) ** 2
    lean = c2 * gamma2**2 * (1 - gamma1**2) / (1 - c2 * gamma1**2 * gamma2**2)
    return inefficiency_with_amm(gamma1, gamma2, phi, r1) - (1 - gamma1) * r1 * lean


def inefficiency_without_amm(gamma1, r1) -> float:
    _check(gamma1, r1=r1)
    return (1 - gamma1) * (1 + gamma1) * r1


def two_security_metrics(model: JointValueModel, params: Sequence[SecurityParams],
                         with_amm: bool = True, p_transact=(1.0, 1.0)) -> MetricsReport:
    """Closed-form metrics for both securities of a two-security model."""
    if model.n != 2 or len(params) != 2:
        raise ValueError("closed forms exist only for two securities")
    phi = model.phi
    out = []
    for i in (0, 1):
        s, other = params[i], params[1 - i]
        g1, g2 = s.gamma, other.gamma
        uncond = unconditional_spread(g1, s.r)
        no_amm_ineff = inefficiency_without_amm(g1, s.r)
        if with_amm:
            bid, ask = widest_quotes(g1, g2, phi, s.p, s.r)
            share = 0.5 if phi == 0.5 else mm_volume_share(g1, g2, phi)
            out.append(SecurityMetrics(
                spread=uncond,
                spread_informed=informed_spread(g1, g2, phi, s.r),
                spread_liquidity=liquidity_spread(g1, g2, phi, s.r),
                mm_share=share,
                inefficiency_amm=inefficiency_with_amm(g1, g2, phi, s.r),
                inefficiency_no_amm=no_amm_ineff,
                p_transact=float(p_transact[i]),
                amm_profit=0.0,
                inefficiency_amm_type_avg=inefficiency_with_amm(g1, g2, phi, s.r),
                mm_profit=0.0,
                mm_bid=bid,
                mm_ask=ask,
            ))
        else:
            out.append(SecurityMetrics(
                spread=uncond,
                spread_informed=uncond,
                spread_liquidity=uncond,
                mm_share=1.0,
                inefficiency_amm=inefficiency_with_amm(g1, g2, phi, s.r),
                inefficiency_no_amm=no_amm_ineff,
                p_transact=float(p_transact[i]),
                amm_profit=None,
                inefficiency_amm_type_avg=inefficiency_with_amm(g1, g2, phi, s.r),
                mm_profit=0.0,
                mm_bid=s.p - g1 * s.r,
                mm_ask=s.p + g1 * s.r,
            ))
    return MetricsReport("analytic", with_amm, out)
