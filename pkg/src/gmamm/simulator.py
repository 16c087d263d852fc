"""Seeded Monte Carlo estimation of every market metric.

Rounds are simulated in fixed-size blocks.  Block ``b`` draws from its own
generator seeded by ``SeedSequence(master_seed, spawn_key=(*stream, b))``, so
the sample, and therefore every statistic, is the same however blocks are
spread over workers.  Block sums are combined in block order with exact
(``math.fsum``) summation.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .accounting import RATIOS, build_report, order_terms
from .equilibrium import EquilibriumState, SolverConfig, resolve_population, solve_equilibrium
from .metrics import MetricsReport
from .model import (
    ExtendedSecurityParams,
    JointValueModel,
    ParticipationCurve,
    SecurityParams,
    sample_rounds,
    two_security_model,
)
from .pricing import PriceBook

BLOCK_ROUNDS = 1 << 16


@dataclass(frozen=True)
class SimulationConfig:
    model: JointValueModel
    params: tuple
    mode: str = "base"
    with_amm: bool = True
    rounds: int = 1_000_000
    master_seed: int = 0
    workers: int = 1
    variant: str = "paper"

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if self.rounds < 0:
            raise ValueError(f"rounds must be non-negative, got {self.rounds}")
        if self.mode not in ("base", "extended"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.params) != self.model.n:
            raise ValueError(f"{len(self.params)} securities configured for an n={self.model.n} model")
        kind = SecurityParams if self.mode == "base" else ExtendedSecurityParams
        if not all(isinstance(s, kind) for s in self.params):
            raise ValueError(f"{self.mode} mode needs {kind.__name__} for every security")
        if self.variant not in ("paper", "renormalized"):
            raise ValueError(f"unknown gamma variant {self.variant!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass
class SimulationStats:
    metrics: MetricsReport
    sums: dict
    rounds: int
    equilibrium: EquilibriumState | None = None

    def __getitem__(self, i):
        return self.metrics.securities[i]


def block_rng(master_seed: int, block: int, stream: tuple = ()) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(*stream, block))
    return np.random.Generator(np.random.PCG64(seq))


def _block_sums(model, pop, book, with_amm, rng, size) -> dict:
    batch = sample_rounds(model, pop, rng, size)
    execution = book.evaluate(batch.orders)
    terms = order_terms(batch.values.astype(float), batch.trader_types, batch.orders,
                        execution, book.p, book.r, with_amm)
    # per ratio: (n, 5) = sum y, sum x, sum y^2, sum x^2, sum xy
    return {name: np.stack([y.sum(0), x.sum(0), (y * y).sum(0), (x * x).sum(0), (x * y).sum(0)],
                           axis=1)
            for name, (y, x) in terms.items()}


def run(config: SimulationConfig, *, stream: tuple = ()) -> SimulationStats:
    """Simulate ``config.rounds`` independent rounds and estimate all metrics."""
    model = config.model.check()
    eq = None
    pis = None
    if config.mode == "extended":
        eq = solve_equilibrium(config.params, model, config.with_amm,
                               SolverConfig(variant=config.variant))
        pis = eq.pi
    pop, pricing = resolve_population(model, config.params, config.mode, config.with_amm,
                                      pis, config.variant)
    book = PriceBook(model, pricing, config.with_amm)
    n_blocks = -(-config.rounds // BLOCK_ROUNDS)

    def work(b):
        size = min(BLOCK_ROUNDS, config.rounds - b * BLOCK_ROUNDS)
        return _block_sums(model, pop, book, config.with_amm,
                           block_rng(config.master_seed, b, stream), size)

    if config.workers > 1 and n_blocks > 1:
        # warm the price cache so worker threads only read it
        book.evaluate(_all_orders(model.n, config.mode))
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            blocks = list(pool.map(work, range(n_blocks)))
    else:
        blocks = [work(b) for b in range(n_blocks)]

    n = model.n
    sums = {
        name: np.array([[math.fsum(blk[name][i, j] for blk in blocks) for j in range(5)]
                        for i in range(n)]).reshape(n, 5)
        for name in RATIOS
    }
    first = {k: v[:, :2] for k, v in sums.items()}
    second = {k: v[:, 2:] for k, v in sums.items()}
    if config.rounds == 0:
        metrics = MetricsReport("simulated", config.with_amm, [], 0)
    else:
        metrics = build_report("simulated", config.with_amm, first, book.bid, book.ask,
                               second, config.rounds)
    return SimulationStats(metrics, sums, config.rounds, eq)


def _all_orders(n: int, mode: str) -> np.ndarray:
    from .model import all_order_vectors

    if n > 10:
        return np.zeros((0, n), dtype=np.int8)
    return all_order_vectors(n, with_absent=(mode == "extended"))


# --- parameter sweeps -------------------------------------------------------

_CURVE_KEYS = ("curve_slope", "curve_scale", "curve_level")


def _targets(name: str, n: int) -> tuple[str, list[int]]:
    """Split ``gamma2`` into (``gamma``, [1]); bare names hit every security."""
    stem = name.rstrip("0123456789")
    digits = name[len(stem):]
    if not digits:
        return stem, list(range(n))
    k = int(digits)
    if not 1 <= k <= n:
        raise KeyError(f"grid parameter {name!r}: security index out of range 1..{n}")
    return stem, [k - 1]


def apply_point(config: SimulationConfig, point: dict) -> SimulationConfig:
    """Copy of ``config`` with grid parameters substituted.

    Names: ``phi`` (two-security models), ``gamma``/``gammaK`` (base mode),
    ``delta``/``deltaK`` and ``curve_slope``/``curve_scale``/``curve_level``
    (optionally suffixed with a 1-based security index; extended mode).
    """
    model = config.model
    params = list(config.params)
    for name, value in point.items():
        if name == "phi":
            if model.n != 2:
                raise KeyError("grid parameter 'phi' needs a two-security model")
            model = two_security_model(float(value))
            continue
        stem, idx = _targets(name, model.n)
        for i in idx:
            s = params[i]
            if stem == "gamma" and config.mode == "base":
                params[i] = replace(s, gamma=float(value))
            elif stem == "delta" and config.mode == "extended":
                params[i] = replace(s, delta=float(value))
            elif stem in _CURVE_KEYS and config.mode == "extended":
                field = stem.split("_", 1)[1]
                curve: ParticipationCurve = s.participation
                params[i] = replace(s, participation=replace(curve, **{field: float(value)}))
            else:
                raise KeyError(f"grid parameter {name!r} not applicable in {config.mode} mode")
    return replace(config, model=model, params=tuple(params))


def grid_points(grid: dict) -> list[dict]:
    """Cartesian product of ``{name: values}`` in insertion order."""
    if not grid:
        return []
    names = list(grid)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid[k] for k in names))]


def sweep(config: SimulationConfig, grid: dict) -> list[tuple[dict, SimulationStats]]:
    """One simulation per grid point; point ``k`` draws from seed stream ``(k,)``."""
    out = []
    for k, point in enumerate(grid_points(grid)):
        out.append((point, run(apply_point(config, point), stream=(k,))))
    return out
