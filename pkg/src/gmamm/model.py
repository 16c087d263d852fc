"""Securities, joint value distributions, trader populations and round sampling.

End-of-period values are binary: security ``i`` ends at ``p_i + r_i`` or
``p_i - r_i``, each with marginal probability 1/2.  Dependence between
securities is carried by a probability table over all ``2**n`` sign vectors.
Sign vectors are ordered lexicographically with security 0 most significant
and ``+`` before ``-``, so index 0 is ``(+, +, ..., +)``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

MAX_TABLE_SECURITIES = 16
TABLE_TOL = 1e-12


class Order(enum.IntEnum):
    SELL = -1
    ABSENT = 0
    BUY = 1

    @property
    def symbol(self) -> str:
        return {Order.BUY: "B", Order.SELL: "S", Order.ABSENT: "-"}[self]


class TraderType(enum.IntEnum):
    INFORMED = 0
    LIQUIDITY = 1
    ABSTAINING = 2


class Executor(enum.Enum):
    MM = "MM"
    AMM = "AMM"
    SPLIT = "Split"


OrderVector = tuple  # tuple[Order, ...]


def sign_matrix(n: int) -> np.ndarray:
    """(2**n, n) array of +1/-1 in table order."""
    idx = np.arange(2**n)[:, None]
    bits = (idx >> (n - 1 - np.arange(n))[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


@dataclass(frozen=True)
class JointValueModel:
    """Probability mass over the sign vectors of ``n`` binary securities.

    Construction only checks the table length; use :func:`validate` (or
    :meth:`check`) for the normalization and uniform-marginal invariants.
    """

    n: int
    table: tuple

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.n > MAX_TABLE_SECURITIES:
            raise ValueError(f"n={self.n} exceeds the table cap of {MAX_TABLE_SECURITIES}")
        table = tuple(float(x) for x in self.table)
        if len(table) != 2**self.n:
            raise ValueError(f"table needs {2**self.n} masses for n={self.n}, got {len(table)}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "table", table)

    @cached_property
    def masses(self) -> np.ndarray:
        arr = np.array(self.table, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def signs(self) -> np.ndarray:
        arr = sign_matrix(self.n)
        arr.setflags(write=False)
        return arr

    def marginal_up(self, i: int) -> float:
        return math.fsum(m for m, s in zip(self.table, self.signs[:, i]) if s > 0)

    def conditional_up(self, i: int, j: int) -> float:
        """P(V_i = + | V_j = +)."""
        joint = math.fsum(
            m for m, row in zip(self.table, self.signs) if row[i] > 0 and row[j] > 0
        )
        return joint / self.marginal_up(j)

    def check(self) -> "JointValueModel":
        problems = validate(self)
        if problems:
            raise ValueError("invalid joint value model: " + "; ".join(problems))
        return self

    @property
    def phi(self) -> float | None:
        """P(V_0^+ | V_1^+) for two-security models, else None."""
        if self.n != 2:
            return None
        return 2.0 * self.table[0]


def two_security_model(phi: float) -> JointValueModel:
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [0, 1], got {phi}")
    return JointValueModel(2, (phi / 2, (1 - phi) / 2, (1 - phi) / 2, phi / 2))


def independent_model(n: int) -> JointValueModel:
    return JointValueModel(n, (0.5**n,) * 2**n)


def chain_model(phis: Sequence[float]) -> JointValueModel:
    """Markov chain over securities: P(s_{k+1} = s_k) = phis[k].

    Every marginal stays 1/2 because each link is a symmetric flip.
    """
    n = len(phis) + 1
    masses = []
    for signs in itertools.product((1, -1), repeat=n):
        m = 0.5
        for k, phi in enumerate(phis):
            if not 0.0 <= phi <= 1.0:
                raise ValueError(f"chain link {k} probability {phi} outside [0, 1]")
            m *= phi if signs[k] == signs[k + 1] else 1 - phi
        masses.append(m)
    return JointValueModel(n, tuple(masses))


def validate(model: JointValueModel) -> list[str]:
    """Return a list of invariant violations (empty when the model is valid)."""
    problems = []
    masses = model.masses
    if np.any(masses < 0):
        bad = [int(k) for k in np.flatnonzero(masses < 0)]
        problems.append(f"negative masses at table indices {bad}")
    total = math.fsum(model.table)
    if abs(total - 1.0) > TABLE_TOL:
        problems.append(f"normalization: masses sum to {total!r}, expected 1")
    for i in range(model.n):
        up = model.marginal_up(i)
        if abs(up - 0.5) > TABLE_TOL:
            problems.append(f"marginal: security {i} has P(V+)={up!r}, expected 1/2")
    return problems


@dataclass(frozen=True)
class SecurityParams:
    p: float
    r: float
    gamma: float
    index: int = 0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"security {self.index}: r must be positive, got {self.r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"security {self.index}: gamma must lie in (0, 1), got {self.gamma}")

    @property
    def v_up(self) -> float:
        return self.p + self.r

    @property
    def v_down(self) -> float:
        return self.p - self.r


@dataclass(frozen=True)
class ParticipationCurve:
    """Liquidity-trader participation probability as a function of expected cost.

    ``linear``: ``clip(level - slope * cost, 0, 1)``
    ``logistic``: ``level / (1 + exp(slope * (cost - scale)))``
    ``constant``: ``level``
    """

    kind: str = "linear"
    slope: float = 0.5
    scale: float = 0.0
    level: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "logistic", "constant"):
            raise ValueError(f"unknown participation curve kind {self.kind!r}")
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"curve level must lie in [0, 1], got {self.level}")
        if self.kind != "constant" and not self.slope > 0:
            raise ValueError(f"{self.kind} curve needs a positive slope, got {self.slope}")

    def __call__(self, cost):
        cost = np.asarray(cost, dtype=float)
        if self.kind == "linear":
            out = np.clip(self.level - self.slope * cost, 0.0, 1.0)
        elif self.kind == "logistic":
            # exp overflow at huge costs just drives the output to 0
            with np.errstate(over="ignore"):
                out = self.level / (1.0 + np.exp(self.slope * (cost - self.scale)))
        else:
            out = np.full_like(cost, self.level)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ExtendedSecurityParams:
    p: float
    r: float
    delta: float
    participation: ParticipationCurve = field(default_factory=ParticipationCurve)
    index: int = 0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"security {self.index}: r must be positive, got {self.r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"security {self.index}: delta must lie in (0, 1), got {self.delta}")

    def with_gamma(self, gamma: float) -> SecurityParams:
        return SecurityParams(self.p, self.r, gamma, self.index)


def effective_gamma(delta, pi, variant: str = "paper"):
    """Informed fraction of order flow given informed pool share and participation.

    ``paper``: ``1 - (1 - delta) * pi``.
    ``renormalized``: share of informed orders among realized orders,
    ``delta / (delta + (1 - delta) * pi)``.
    """
    delta = np.asarray(delta, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if variant == "paper":
        out = 1.0 - (1.0 - delta) * pi
    elif variant == "renormalized":
        out = delta / (delta + (1.0 - delta) * pi)
    else:
        raise ValueError(f"unknown gamma variant {variant!r}")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Population:
    """Resolved per-security trader probabilities for one market configuration.

    ``informed``: probability an arriving trader is informed (gamma in the
    base model, delta in the extended model).  ``participate``: probability a
    liquidity trader submits an order.  ``pricing_gamma``: the informed
    fraction liquidity providers use in their likelihoods.
    """

    informed: tuple
    participate: tuple
    pricing_gamma: tuple

    @classmethod
    def base(cls, params: Sequence[SecurityParams]) -> "Population":
        g = tuple(float(s.gamma) for s in params)
        return cls(g, (1.0,) * len(g), g)

    @classmethod
    def extended(cls, params: Sequence[ExtendedSecurityParams], pis, variant="paper") -> "Population":
        deltas = tuple(float(s.delta) for s in params)
        pis = tuple(float(x) for x in pis)
        gammas = tuple(float(effective_gamma(d, q, variant)) for d, q in zip(deltas, pis))
        return cls(deltas, pis, gammas)

    @property
    def n(self) -> int:
        return len(self.informed)

    def transaction_probability(self) -> np.ndarray:
        inf = np.asarray(self.informed)
        return inf + (1 - inf) * np.asarray(self.participate)


@dataclass
class RoundBatch:
    """Vectorized outcome of ``size`` trading rounds (values, types, orders).

    ``values``: (size, n) +1/-1; ``trader_types``: (size, n) TraderType codes;
    ``orders``: (size, n) +1 buy, -1 sell, 0 absent.
    """

    value_index: np.ndarray
    values: np.ndarray
    trader_types: np.ndarray
    orders: np.ndarray

    def __len__(self):
        return len(self.value_index)


@dataclass(frozen=True)
class RoundOutcome:
    values: tuple
    trader_types: tuple
    orders: OrderVector
    prices: tuple = ()
    executors: tuple = ()


def sample_rounds(model: JointValueModel, population: Population,
                  rng: np.random.Generator, size: int) -> RoundBatch:
    """Draw ``size`` independent rounds.

    Draw order is fixed: value vectors, then trader types security by
    security, then liquidity directions security by security.
    """
    n = model.n
    if population.n != n:
        raise ValueError(f"population has {population.n} securities, model has {n}")
    cdf = np.cumsum(model.masses)
    u = rng.random(size)
    vidx = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), 2**n - 1)
    values = model.signs[vidx]

    types = np.empty((size, n), dtype=np.int8)
    for i in range(n):
        inf = population.informed[i]
        part = inf + (1 - inf) * population.participate[i]
        ui = rng.random(size)
        types[:, i] = np.where(ui < inf, TraderType.INFORMED,
                               np.where(ui < part, TraderType.LIQUIDITY, TraderType.ABSTAINING))

    orders = np.zeros((size, n), dtype=np.int8)
    for i in range(n):
        coin = np.where(rng.random(size) < 0.5, 1, -1).astype(np.int8)
        t = types[:, i]
        orders[:, i] = np.where(t == TraderType.INFORMED, values[:, i],
                                np.where(t == TraderType.LIQUIDITY, coin, 0))
    return RoundBatch(vidx, values, types, orders)


def sample_round(model: JointValueModel, population: Population,
                 rng: np.random.Generator) -> RoundOutcome:
    b = sample_rounds(model, population, rng, 1)
    return RoundOutcome(
        values=tuple(int(v) for v in b.values[0]),
        trader_types=tuple(TraderType(int(t)) for t in b.trader_types[0]),
        orders=tuple(Order(int(o)) for o in b.orders[0]),
    )


def all_order_vectors(n: int, with_absent: bool = False) -> np.ndarray:
    """Every order vector as an (m, n) int8 array, buys before sells."""
    sides = (1, -1, 0) if with_absent else (1, -1)
    return np.array(list(itertools.product(sides, repeat=n)), dtype=np.int8).reshape(-1, n)


def order_code(orders: np.ndarray) -> np.ndarray:
    """Base-3 integer code of each order row (digits o + 1)."""
    orders = np.atleast_2d(orders)
    n = orders.shape[1]
    weights = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (orders.astype(np.int64) + 1) @ weights


def format_orders(orders) -> str:
    return "(" + ",".join(f"{Order(int(o)).symbol}{i + 1}" for i, o in enumerate(orders)) + ")"
