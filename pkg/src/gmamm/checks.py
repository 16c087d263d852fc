"""Proposition checks and the worked-example assertions used in run reports."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .metrics import MetricsReport
from .model import JointValueModel

EXACT_TOL = 1e-12
SIGMAS = 4.0

# Two-security worked example: gamma1 = gamma2 = 0.5, phi = 0.9, p1 = 50, r1 = 1.
PAPER_EXAMPLE = {
    "mm_ask": 50.75,
    "mm_bid": 49.25,
    "mm_share": 0.30,
    "spread": 1.0,
    "spread_liquidity": 0.875,
    "spread_informed": 1.125,
    "inefficiency_amm": 0.71875,
    "inefficiency_no_amm": 0.75,
}


@dataclass
class Check:
    name: str
    inequality: str
    path: str
    security: int
    passed: bool
    margin: float | None
    observed: float | None = None
    expected: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def is_independent(model: JointValueModel) -> bool:
    """True when the table is the product of its (uniform) marginals."""
    return bool(np.all(np.abs(model.masses - 0.5**model.n) <= EXACT_TOL))


def _se(m, key):
    return (m.se or {}).get(key)


def _greater(path, a, b, se_a=None, se_b=None):
    """Margin and verdict for ``a > b``; simulated paths fail only on a 4-sigma contradiction."""
    diff = a - b
    if path == "simulated":
        se = math.hypot(se_a or 0.0, se_b or 0.0)
        if se == 0:
            return diff > 0, None
        return diff > -SIGMAS * se, diff / se
    return diff > 0, diff


def _equal(path, a, b, se_a=None, se_b=None):
    diff = a - b
    if path == "simulated":
        se = math.hypot(se_a or 0.0, se_b or 0.0)
        if se == 0:
            return abs(diff) <= EXACT_TOL * max(1.0, abs(b)), None
        return abs(diff) <= SIGMAS * se, diff / se
    return abs(diff) <= EXACT_TOL * max(1.0, abs(b)), diff


def proposition_checks(report: MetricsReport, model: JointValueModel) -> list[Check]:
    """Propositions 1-3 on one metrics path (needs the AMM to be present)."""
    if not report.with_amm or not report.securities:
        return []
    indep = is_independent(model)
    tag = " (equalities at independence)" if indep else ""
    path = report.path
    out = []
    for i, m in enumerate(report.securities):
        if indep:
            ok, margin = _equal(path, m.mm_share, 0.5, _se(m, "mm_share"))
            out.append(Check("mm_minority", "mm_share == 1/2" + tag, path, i, ok, margin))
            ok1, m1 = _equal(path, m.spread_informed, m.spread,
                             _se(m, "spread_informed"), _se(m, "spread"))
            ok2, m2 = _equal(path, m.spread, m.spread_liquidity,
                             _se(m, "spread"), _se(m, "spread_liquidity"))
            out.append(Check("spread_ordering",
                             "delta_informed == delta == delta_liquidity" + tag, path, i,
                             ok1 and ok2, _worst(m1, m2, key=abs, pick=max)))
            ok, margin = _equal(path, m.inefficiency_amm, m.inefficiency_no_amm,
                                _se(m, "inefficiency_amm"), _se(m, "inefficiency_no_amm"))
            out.append(Check("amm_efficiency", "inefficiency_amm == inefficiency_no_amm" + tag,
                             path, i, ok, margin))
        else:
            ok, margin = _greater(path, 0.5, m.mm_share, None, _se(m, "mm_share"))
            out.append(Check("mm_minority", "mm_share < 1/2", path, i, ok, margin))
            ok1, m1 = _greater(path, m.spread_informed, m.spread,
                               _se(m, "spread_informed"), _se(m, "spread"))
            ok2, m2 = _greater(path, m.spread, m.spread_liquidity,
                               _se(m, "spread"), _se(m, "spread_liquidity"))
            out.append(Check("spread_ordering", "delta_informed > delta > delta_liquidity",
                             path, i, ok1 and ok2, _worst(m1, m2)))
            ok, margin = _greater(path, m.inefficiency_no_amm, m.inefficiency_amm,
                                  _se(m, "inefficiency_no_amm"), _se(m, "inefficiency_amm"))
            out.append(Check("amm_efficiency", "inefficiency_amm < inefficiency_no_amm",
                             path, i, ok, margin))
    return out


def extended_checks(eq_with, eq_without, params) -> list[Check]:
    """Propositions 4-5 from the two participation equilibria."""
    out = []
    s_with = eq_with.spread(params)
    s_without = eq_without.spread(params)
    for i in range(len(params)):
        a, b = eq_with.transaction_probability[i], eq_without.transaction_probability[i]
        out.append(Check("amm_volume", "p_transact(with AMM) > p_transact(without)",
                         "analytic", i, a > b, a - b))
        out.append(Check("amm_equilibrium_spread", "2*gamma*r(with AMM) < 2*gamma*r(without)",
                         "analytic", i, bool(s_with[i] < s_without[i]),
                         float(s_without[i] - s_with[i])))
        for eq, label in ((eq_with, "with AMM"), (eq_without, "without AMM")):
            out.append(Check("equilibrium_converged", f"fixed point residual <= tol ({label})",
                             "analytic", i, eq.converged, eq.residual))
    return out


def example_checks(report: MetricsReport, security: int = 0) -> list[Check]:
    """Compare one path's metrics for a security with the worked-example values."""
    out = []
    if not report.securities:
        return out
    m = report.securities[security]
    for key, expected in PAPER_EXAMPLE.items():
        observed = getattr(m, key)
        if key in ("mm_ask", "mm_bid"):
            ok, margin = _equal("exact", observed, expected)
        else:
            ok, margin = _equal(report.path, observed, expected, _se(m, key))
        out.append(Check(f"example_{key}", f"{key} == {expected!r}", report.path, security,
                         ok, margin, observed, expected))
    return out


def _worst(*margins, key=None, pick=min):
    """Tightest margin: smallest for inequalities, largest deviation for equalities."""
    vals = [x for x in margins if x is not None]
    if not vals:
        return None
    return pick(vals, key=key)
