"""Per-order accounting terms and the ratio estimators built from them.

Every reported metric is a ratio ``sum(y) / sum(x)`` of per-round terms, or a
difference of two such ratios.  The oracle weights terms by atom
probability; the simulator weights every sampled round equally and also
keeps second moments for standard errors.
"""
from __future__ import annotations

import math

import numpy as np

from .metrics import MetricsReport, SecurityMetrics
from .model import TraderType

RATIOS = (
    "buy", "sell",
    "buy_informed", "sell_informed",
    "buy_liquidity", "sell_liquidity",
    "mm_share",
    "inefficiency_amm", "inefficiency_no_amm",
    "p_transact",
    "amm_profit", "mm_profit",
)


def order_terms(values: np.ndarray, trader_types: np.ndarray, orders: np.ndarray,
                execution: dict, p: np.ndarray, r: np.ndarray, with_amm: bool) -> dict:
    """Map each ratio name to its ``(y, x)`` term arrays, each shaped (m, n)."""
    side = orders.astype(float)
    buy = (orders > 0).astype(float)
    sell = (orders < 0).astype(float)
    present = buy + sell
    informed = (trader_types == TraderType.INFORMED).astype(float)
    liquidity = (trader_types == TraderType.LIQUIDITY).astype(float)
    v = p + r * values
    trade = np.nan_to_num(execution["trade"])
    amm = np.nan_to_num(execution["amm"])
    quote = np.nan_to_num(execution["mm_quote"])
    standalone = np.nan_to_num(execution["standalone"])
    mm_frac = execution["mm_frac"]
    amm_frac = present - mm_frac if with_amm else np.zeros_like(present)
    ones = np.ones_like(present)
    return {
        "buy": (buy * trade, buy),
        "sell": (sell * trade, sell),
        "buy_informed": (buy * informed * trade, buy * informed),
        "sell_informed": (sell * informed * trade, sell * informed),
        "buy_liquidity": (buy * liquidity * trade, buy * liquidity),
        "sell_liquidity": (sell * liquidity * trade, sell * liquidity),
        "mm_share": (mm_frac, present),
        "inefficiency_amm": (present * np.abs(v - amm), present),
        "inefficiency_no_amm": (present * np.abs(v - standalone), present),
        "p_transact": (present, ones),
        # provider profit: sells to buyers at T, buys from sellers at T
        "amm_profit": (amm_frac * side * (amm - v), amm_frac),
        "mm_profit": (mm_frac * side * (quote - v), mm_frac),
    }


def _ratio(sy, sx):
    return None if sx == 0 else float(sy / sx)


def ratio_se(sy, sx, syy, sxx, sxy):
    """Delta-method standard error of ``sum(y)/sum(x)`` from raw moment sums."""
    if sx == 0:
        return None
    q = sy / sx
    ss = syy - 2 * q * sxy + q * q * sxx
    return math.sqrt(max(ss, 0.0)) / sx


def _diff(a, b):
    return None if a is None or b is None else a - b


def build_report(path: str, with_amm: bool, first: dict, bid, ask,
                 second: dict | None = None, rounds: int | None = None) -> MetricsReport:
    """Assemble a MetricsReport from per-security ratio sums.

    ``first[name]`` is an (n, 2) array of ``(sum y, sum x)``; ``second[name]``
    (simulated path only) an (n, 3) array of ``(sum y^2, sum x^2, sum xy)``.
    """
    n = len(bid)
    out = []
    for i in range(n):
        val = {k: _ratio(*first[k][i]) for k in RATIOS}
        m = SecurityMetrics(
            spread=_diff(val["buy"], val["sell"]),
            spread_informed=_diff(val["buy_informed"], val["sell_informed"]),
            spread_liquidity=_diff(val["buy_liquidity"], val["sell_liquidity"]),
            mm_share=val["mm_share"],
            inefficiency_amm=val["inefficiency_amm"],
            inefficiency_no_amm=val["inefficiency_no_amm"],
            p_transact=val["p_transact"],
            amm_profit=val["amm_profit"] if with_amm else None,
            mm_profit=val["mm_profit"],
            mm_bid=float(bid[i]),
            mm_ask=float(ask[i]),
        )
        if second is not None:
            se = {k: ratio_se(*first[k][i], *second[k][i]) for k in RATIOS}

            def both(a, b):
                return None if se[a] is None or se[b] is None else math.hypot(se[a], se[b])

            m.se = {
                "spread": both("buy", "sell"),
                "spread_informed": both("buy_informed", "sell_informed"),
                "spread_liquidity": both("buy_liquidity", "sell_liquidity"),
                "mm_share": se["mm_share"],
                "inefficiency_amm": se["inefficiency_amm"],
                "inefficiency_no_amm": se["inefficiency_no_amm"],
                "p_transact": se["p_transact"],
                "amm_profit": se["amm_profit"] if with_amm else None,
                "mm_profit": se["mm_profit"],
            }
            m.counts = {k: float(first[k][i][1]) for k in
                        ("buy", "sell", "buy_informed", "sell_informed",
                         "buy_liquidity", "sell_liquidity")}
            m.counts["orders"] = float(first["mm_share"][i][1])
        out.append(m)
    return MetricsReport(path, with_amm, out, rounds)
