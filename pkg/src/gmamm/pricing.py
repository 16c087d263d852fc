"""Order-flow-conditional pricing for the automated and traditional market makers.

The automated market maker (AMM) prices every order at the posterior mean of
the security's value given the whole cross-security order vector.  The
traditional market maker (MM) sees only his own security's order: alone he
quotes ``p +/- gamma * r``; facing the AMM he retreats to her widest prices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Executor, JointValueModel, Order, SecurityParams, all_order_vectors, order_code

NORMALIZER_FLOOR = 1e-300
# Relative tolerance under which two prices count as the same quote.  Prices
# that agree mathematically can differ in the last ulp after summation.
PRICE_TIE_RTOL = 1e-12
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class QuotePair:
    bid: float
    ask: float

    def __post_init__(self):
        if self.ask < self.bid:
            raise ValueError(f"crossed quotes: bid {self.bid} > ask {self.ask}")

    @property
    def spread(self) -> float:
        return self.ask - self.bid


def _gammas(params: Sequence[SecurityParams]) -> np.ndarray:
    return np.array([s.gamma for s in params], dtype=float)


def _weights(model: JointValueModel, gammas: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Unnormalized posterior weights, shape (m, 2**n)."""
    signs = model.signs.astype(float)
    o = orders.astype(float)[:, None, :]
    # (1 + g*o*s)/2 is (1+g)/2 when order agrees with the value sign, (1-g)/2 otherwise;
    # absent orders (o=0) give the constant 1/2, which cancels on normalization.
    lik = 0.5 * (1.0 + gammas[None, None, :] * o * signs[None, :, :])
    return model.masses[None, :] * np.prod(lik, axis=2)


def posterior_over_values(model: JointValueModel, gammas, orders) -> np.ndarray:
    """Posterior probability of every sign vector given one order vector."""
    gammas = np.asarray(gammas, dtype=float)
    orders = np.asarray(orders, dtype=np.int8).reshape(1, -1)
    if orders.shape[1] != model.n or gammas.shape != (model.n,):
        raise ValueError("orders and gammas must have one entry per security")
    if np.any((gammas <= 0) | (gammas >= 1)):
        raise ValueError(f"gammas must lie in (0, 1), got {gammas}")
    w = _weights(model, gammas, orders)[0]
    z = w.sum()
    if z < NORMALIZER_FLOOR:
        raise ValueError("posterior normalizer vanished; order vector impossible under the model")
    return w / z


def amm_price_table(model: JointValueModel, params: Sequence[SecurityParams],
                    orders: np.ndarray) -> np.ndarray:
    """AMM transaction prices for many order vectors at once.

    Returns an (m, n) array; entries for absent orders are NaN.
    """
    orders = np.atleast_2d(np.asarray(orders, dtype=np.int8))
    m, n = orders.shape
    if n != model.n or len(params) != n:
        raise ValueError("params and order vectors must match the model size")
    gammas = _gammas(params)
    p = np.array([s.p for s in params])
    r = np.array([s.r for s in params])
    signs = model.signs.astype(float)
    out = np.empty((m, n))
    step = max(1, _CHUNK_ELEMENTS // (2**n * n))
    for lo in range(0, m, step):
        chunk = orders[lo:lo + step]
        w = _weights(model, gammas, chunk)
        z = w.sum(axis=1)
        if np.any(z < NORMALIZER_FLOOR):
            raise ValueError("posterior normalizer vanished for some order vector")
        # posterior mean of the sign is 2 * P(s_i = +) - 1
        mean_sign = (w @ signs) / z[:, None]
        out[lo:lo + step] = p + r * mean_sign
    out[orders == 0] = np.nan
    return out


def amm_transaction_prices(model: JointValueModel, params: Sequence[SecurityParams],
                           orders) -> tuple:
    """Per-security AMM price for one order vector (None where the order is absent)."""
    row = amm_price_table(model, params, np.asarray(orders, dtype=np.int8).reshape(1, -1))[0]
    return tuple(None if np.isnan(x) else float(x) for x in row)


def mm_quotes_standalone(params: SecurityParams) -> QuotePair:
    return QuotePair(params.p - params.gamma * params.r, params.p + params.gamma * params.r)


def mm_quote_table(model: JointValueModel, params: Sequence[SecurityParams]) -> tuple[np.ndarray, np.ndarray]:
    """MM (bid, ask) arrays for every security when competing with the AMM.

    Ask is the highest AMM price over all full order vectors with a buy in the
    security, bid the lowest over those with a sell.  Order vectors with absent
    entries are mixtures of full ones and never extend these extremes.
    """
    orders = all_order_vectors(model.n)
    prices = amm_price_table(model, params, orders)
    buys = orders == Order.BUY
    ask = np.where(buys, prices, -np.inf).max(axis=0)
    bid = np.where(~buys, prices, np.inf).min(axis=0)
    return bid, ask


def mm_quotes_with_amm(model: JointValueModel, params: Sequence[SecurityParams], i: int) -> QuotePair:
    bid, ask = mm_quote_table(model, params)
    return QuotePair(float(bid[i]), float(ask[i]))


def prices_tie(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1.0)
    return np.abs(a - b) <= PRICE_TIE_RTOL * scale


def attribute_execution(amm_price: float, mm_price: float, side) -> Executor:
    """Who fills an order: the better price for the submitter wins, ties split."""
    side = Order(int(side))
    if side == Order.ABSENT:
        raise ValueError("no execution for an absent order")
    if not (np.isfinite(amm_price) and np.isfinite(mm_price)):
        raise ValueError("prices must be finite")
    if prices_tie(amm_price, mm_price):
        return Executor.SPLIT
    amm_better = amm_price < mm_price if side == Order.BUY else amm_price > mm_price
    return Executor.AMM if amm_better else Executor.MM


def mm_volume_fraction(amm_price, mm_price, side) -> np.ndarray:
    """Vectorized MM share of each order: 1 (MM), 1/2 (split) or 0 (AMM)."""
    amm_price = np.asarray(amm_price, dtype=float)
    mm_price = np.asarray(mm_price, dtype=float)
    side = np.asarray(side)
    tie = prices_tie(amm_price, mm_price)
    amm_better = np.where(side > 0, amm_price < mm_price, amm_price > mm_price)
    frac = np.where(tie, 0.5, np.where(amm_better, 0.0, 1.0))
    return np.where(side == 0, 0.0, frac)


class PriceBook:
    """Cached execution outcome for every order vector seen in one market.

    For each order vector it stores, per security: the AMM price, the MM's
    side-relevant quote, the standalone MM quote, the realized transaction
    price and the MM's share of the fill.
    """

    def __init__(self, model: JointValueModel, params: Sequence[SecurityParams], with_amm: bool):
        self.model = model
        self.params = tuple(params)
        self.with_amm = with_amm
        self.n = model.n
        self.p = np.array([s.p for s in params])
        self.r = np.array([s.r for s in params])
        g = _gammas(params)
        self.standalone_bid = self.p - g * self.r
        self.standalone_ask = self.p + g * self.r
        if with_amm:
            self.bid, self.ask = mm_quote_table(model, params)
        else:
            self.bid, self.ask = self.standalone_bid, self.standalone_ask
        self._cache: dict[int, np.ndarray] = {}

    def evaluate(self, orders: np.ndarray) -> dict:
        """Execution arrays, each shaped like ``orders``."""
        orders = np.atleast_2d(np.asarray(orders, dtype=np.int8))
        codes = order_code(orders)
        uniq, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
        missing = [k for k, c in enumerate(uniq) if int(c) not in self._cache]
        if missing:
            rows = self._compute(orders[first[missing]])
            for k, row in zip(missing, rows):
                self._cache[int(uniq[k])] = row
        table = np.stack([self._cache[int(c)] for c in uniq])[inverse.reshape(-1)]
        return {name: table[:, k, :] for k, name in enumerate(_FIELDS)}

    def _compute(self, orders: np.ndarray) -> np.ndarray:
        side = orders.astype(float)
        mm_quote = np.where(side > 0, self.ask, np.where(side < 0, self.bid, np.nan))
        standalone = np.where(side > 0, self.standalone_ask,
                              np.where(side < 0, self.standalone_bid, np.nan))
        amm = amm_price_table(self.model, self.params, orders)
        if self.with_amm:
            mm_frac = mm_volume_fraction(np.nan_to_num(amm), np.nan_to_num(mm_quote), side)
            trade = np.where(mm_frac == 1.0, mm_quote, amm)
        else:
            mm_frac = np.where(side != 0, 1.0, 0.0)
            trade = mm_quote
        return np.stack([amm, mm_quote, standalone, trade, mm_frac], axis=1)


_FIELDS = ("amm", "mm_quote", "standalone", "trade", "mm_frac")

