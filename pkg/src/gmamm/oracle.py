"""Exact ground truth by exhaustive enumeration of trading-round outcomes.

An atom is one value sign vector together with one branch per security:
informed (trades the value's direction), liquidity buy, liquidity sell, or
(extended mode) liquidity abstention.  Branch probabilities do not depend on
the value, so an atom's mass is the table mass times a product of branch
masses.  Metrics are probability-weighted sums over all atoms.
"""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .accounting import RATIOS, build_report, order_terms
from .equilibrium import resolve_population as resolve
from .metrics import MetricsReport
from .model import (
    JointValueModel,
    Population,
    TraderType,
    all_order_vectors,
    order_code,
)
from .pricing import PriceBook

MAX_ORACLE_SECURITIES = 8

INFORMED, LIQ_BUY, LIQ_SELL, LIQ_ABSENT = range(4)


class CapacityError(ValueError):
    pass


def _check_capacity(n: int):
    if n > MAX_ORACLE_SECURITIES:
        raise CapacityError(f"enumeration oracle supports n <= {MAX_ORACLE_SECURITIES}, got n={n}")


def _branch_table(pop: Population, extended: bool) -> tuple[np.ndarray, np.ndarray]:
    """All branch combinations (B**n, n) and their masses (B**n,)."""
    n = pop.n
    k = 4 if extended else 3
    grid = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int8).reshape(-1, n)
    per = np.empty((n, k))
    for i in range(n):
        inf, part = pop.informed[i], pop.participate[i]
        liq = (1 - inf) * part / 2
        per[i, :3] = (inf, liq, liq)
        if extended:
            per[i, 3] = (1 - inf) * (1 - part)
    mass = np.prod(per[np.arange(n)[None, :], grid], axis=1)
    return grid, mass


def _orders_for(signs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.where(grid == INFORMED, signs[None, :],
                    np.where(grid == LIQ_BUY, 1,
                             np.where(grid == LIQ_SELL, -1, 0))).astype(np.int8)


def _types_for(grid: np.ndarray) -> np.ndarray:
    return np.where(grid == INFORMED, TraderType.INFORMED,
                    np.where(grid == LIQ_ABSENT, TraderType.ABSTAINING,
                             TraderType.LIQUIDITY)).astype(np.int8)


def iter_atoms(model: JointValueModel, pop: Population, extended: bool = False):
    """Yield ``(value_index, signs, orders, trader_types, masses)`` per value vector.

    Each yield covers every branch combination for one value vector, so the
    arrays have one row per atom.
    """
    _check_capacity(model.n)
    grid, mass = _branch_table(pop, extended)
    types = _types_for(grid)
    for k in range(2**model.n):
        prior = model.masses[k]
        if prior == 0:
            continue
        signs = model.signs[k]
        yield k, signs, _orders_for(signs, grid), types, prior * mass


def exact_metrics(model: JointValueModel, params, mode: str = "base", with_amm: bool = True,
                  *, pis=None, variant: str = "paper") -> MetricsReport:
    """Exact spreads, MM share, inefficiency and transaction probability."""
    _check_capacity(model.n)
    model.check()
    pop, pricing = resolve(model, params, mode, with_amm, pis, variant)
    book = PriceBook(model, pricing, with_amm)
    p, r = book.p, book.r
    parts = {name: [] for name in RATIOS}
    for _, signs, orders, types, w in iter_atoms(model, pop, mode == "extended"):
        values = np.broadcast_to(signs.astype(float), orders.shape)
        terms = order_terms(values, types, orders, book.evaluate(orders), p, r, with_amm)
        for name, (y, x) in terms.items():
            parts[name].append(np.stack([w @ y, w @ x], axis=1))
    first = {
        name: np.array([[math.fsum(b[i, j] for b in blocks) for j in (0, 1)]
                        for i in range(model.n)])
        for name, blocks in parts.items()
    }
    report = build_report("oracle", with_amm, first, book.bid, book.ask)
    for i, gap in enumerate(_type_averaged_gap(model, pop, book, mode == "extended")):
        report.securities[i].inefficiency_amm_type_avg = gap
    return report


def _type_averaged_gap(model, pop, book, extended) -> list[float]:
    """E|V_i - E[T_i | side_i, type_i]| using the AMM's prices."""
    n = model.n
    # groups: (side, informed?) -> index 0..3
    mass = [[[] for _ in range(4)] for _ in range(n)]
    price = [[[] for _ in range(4)] for _ in range(n)]
    atoms = list(iter_atoms(model, pop, extended))
    for _, _, orders, types, w in atoms:
        amm = book.evaluate(orders)["amm"]
        for i in range(n):
            for g, mask in enumerate(_groups(orders[:, i], types[:, i])):
                mass[i][g].append(w[mask].sum())
                price[i][g].append(w[mask] @ amm[mask, i])
    centre = [[math.fsum(price[i][g]) / z if (z := math.fsum(mass[i][g])) > 0 else 0.0
               for g in range(4)] for i in range(n)]
    num = [[] for _ in range(n)]
    den = [[] for _ in range(n)]
    for _, signs, orders, types, w in atoms:
        for i in range(n):
            v = book.p[i] + book.r[i] * signs[i]
            for g, mask in enumerate(_groups(orders[:, i], types[:, i])):
                num[i].append(w[mask].sum() * abs(v - centre[i][g]))
                den[i].append(w[mask].sum())
    return [math.fsum(num[i]) / math.fsum(den[i]) for i in range(n)]


def _groups(orders_i, types_i):
    informed = types_i == TraderType.INFORMED
    liquidity = types_i == TraderType.LIQUIDITY
    buy, sell = orders_i > 0, orders_i < 0
    return (buy & informed, sell & informed, buy & liquidity, sell & liquidity)


def exact_state_distribution(model: JointValueModel, params, mode: str = "base", *,
                             pis=None, variant: str = "paper") -> dict:
    """Exact probability of every order-flow state, keyed by tuple of +1/-1/0."""
    _check_capacity(model.n)
    pop, _ = resolve(model, params, mode, True, pis, variant)
    totals: dict[int, list] = {}
    for _, _, orders, _, w in iter_atoms(model, pop, mode == "extended"):
        codes = order_code(orders)
        for c, wi in zip(codes.tolist(), w.tolist()):
            totals.setdefault(c, []).append(wi)
    vectors = all_order_vectors(model.n, with_absent=(mode == "extended"))
    out = {}
    for row, c in zip(vectors, order_code(vectors).tolist()):
        if c in totals:
            out[tuple(int(x) for x in row)] = math.fsum(totals[c])
    return out


def exact_conditional_values(model: JointValueModel, params: Sequence, mode: str = "base", *,
                             pis=None, variant: str = "paper") -> dict:
    """E[V | order vector] for every reachable order vector, by direct conditioning.

    Sums atom masses that produce each order vector; no likelihood algebra.
    Returns a mapping to (n,) arrays of conditional expected values.
    """
    _check_capacity(model.n)
    pop, _ = resolve(model, params, mode, True, pis, variant)
    p = np.array([s.p for s in params])
    r = np.array([s.r for s in params])
    mass: dict[int, list] = {}
    moment: dict[int, list] = {}
    for _, signs, orders, _, w in iter_atoms(model, pop, mode == "extended"):
        v = p + r * signs
        for c, wi in zip(order_code(orders).tolist(), w.tolist()):
            mass.setdefault(c, []).append(wi)
            moment.setdefault(c, []).append(wi * v)
    vectors = all_order_vectors(model.n, with_absent=(mode == "extended"))
    out = {}
    for row, c in zip(vectors, order_code(vectors).tolist()):
        if c in mass:
            z = math.fsum(mass[c])
            if z > 0:
                m = np.array([math.fsum(col) for col in zip(*moment[c])])
                out[tuple(int(x) for x in row)] = m / z
    return out
