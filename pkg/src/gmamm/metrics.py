"""Metric containers shared by the analytic, oracle and simulated paths."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

METRIC_NAMES = (
    "spread",
    "spread_informed",
    "spread_liquidity",
    "mm_share",
    "inefficiency_amm",
    "inefficiency_no_amm",
    "inefficiency_amm_type_avg",
    "p_transact",
    "amm_profit",
    "mm_profit",
    "mm_bid",
    "mm_ask",
)

PATHS = ("analytic", "oracle", "simulated")


@dataclass
class SecurityMetrics:
    """Per-security metrics.

    Spreads are expected buy price minus expected sell price (overall, and
    conditional on the submitter being informed or a liquidity trader).
    ``mm_share`` counts split fills as half.  Inefficiencies are E|V - T| over
    realized orders with the AMM's prices and with standalone MM quotes.
    ``inefficiency_amm_type_avg`` is E|V - E[T | side, trader type]|, the gap
    to the AMM price averaged within each side and trader type (exact paths
    only).  Profits are per unit of volume the provider executed; ``amm_profit`` is
    None when the AMM is absent.
    """

    spread: float
    spread_informed: float
    spread_liquidity: float
    mm_share: float
    inefficiency_amm: float
    inefficiency_no_amm: float
    p_transact: float
    amm_profit: float | None
    mm_profit: float | None
    mm_bid: float
    mm_ask: float
    inefficiency_amm_type_avg: float | None = None
    se: dict | None = None
    counts: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["se"] is None:
            del d["se"]
        if d["counts"] is None:
            del d["counts"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SecurityMetrics":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass
class MetricsReport:
    path: str
    with_amm: bool
    securities: list = field(default_factory=list)
    rounds: int | None = None

    def __post_init__(self):
        if self.path not in PATHS:
            raise ValueError(f"unknown metrics path {self.path!r}")

    def __getitem__(self, i) -> SecurityMetrics:
        return self.securities[i]

    def to_dict(self) -> dict:
        d = {"path": self.path, "with_amm": self.with_amm,
             "securities": [s.to_dict() for s in self.securities]}
        if self.rounds is not None:
            d["rounds"] = self.rounds
        return d
