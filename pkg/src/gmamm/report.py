"""Run reports and their JSON, CSV and text renderings.

JSON field names and CSV column order are part of the output contract; see
the README for the schema.  Reports contain no timing or host data so equal
inputs give byte-identical JSON.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .checks import Check
from .metrics import MetricsReport
from .model import all_order_vectors, format_orders
from .pricing import amm_price_table

SCHEMA_VERSION = 1

CSV_METRICS = (
    ("delta_overall", "spread"),
    ("delta_informed", "spread_informed"),
    ("delta_liquidity", "spread_liquidity"),
    ("mm_share", "mm_share"),
    ("inefficiency_amm", "inefficiency_amm"),
    ("inefficiency_noamm", "inefficiency_no_amm"),
    ("p_transact", "p_transact"),
)


@dataclass
class RunReport:
    command: str
    config: dict | None = None
    metrics: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    equilibria: dict = field(default_factory=dict)
    price_tree: list | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def path(self, name: str) -> MetricsReport | None:
        for m in self.metrics:
            if m.path == name:
                return m
        return None

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "metrics": [m.to_dict() for m in self.metrics],
            "equilibria": {k: v.to_dict() for k, v in self.equilibria.items()},
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if self.price_tree is not None:
            d["price_tree"] = self.price_tree
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def price_tree(model, params, security: int = 0) -> list[dict]:
    """AMM price of one security in every full order-flow state."""
    orders = all_order_vectors(model.n)
    prices = amm_price_table(model, params, orders)[:, security]
    return [{"orders": format_orders(o), "price": float(p)} for o, p in zip(orders, prices)]


def fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if not np.isfinite(v):
        return str(v)
    s = f"{v:.10f}".rstrip("0")
    head, _, tail = s.partition(".")
    return f"{head}.{tail.ljust(2, '0')}"


def render_text(report: RunReport) -> str:
    lines = [f"gmamm {report.command}"]
    cfg = report.config
    if cfg:
        model = cfg["model"]
        desc = f"phi={fmt(model['phi'])}" if "phi" in model else f"table={model['table']}"
        lines.append(f"model: n={model['n']} {desc}  mode={cfg['run']['mode']} "
                     f"with_amm={fmt(cfg['run']['with_amm'])} variant={cfg['run']['variant']}")
        for i, s in enumerate(cfg["securities"]):
            lines.append(f"  security {i + 1}: " + " ".join(f"{k}={v}" for k, v in s.items()))
    if report.price_tree:
        lines.append("")
        lines.append("AMM transaction prices, security 1:")
        width = max(len(row["orders"]) for row in report.price_tree)
        for row in report.price_tree:
            lines.append(f"  {row['orders']:<{width}}  {fmt(row['price'])}")
    for label, eq in report.equilibria.items():
        lines.append("")
        lines.append(f"equilibrium ({label}): converged={fmt(eq.converged)} "
                     f"iterations={eq.iterations} residual={eq.residual:.3g}")
        for i, (pi, g, pt) in enumerate(zip(eq.pi, eq.gamma, eq.transaction_probability)):
            lines.append(f"  security {i + 1}: pi={fmt(pi)} gamma={fmt(g)} p_transact={fmt(pt)}")
    if report.metrics:
        lines.append("")
        lines.extend(_metric_table(report.metrics))
    if report.checks:
        lines.append("")
        lines.append("checks:")
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            extra = ""
            if c.expected is not None:
                extra = f" observed={fmt(c.observed)} expected={fmt(c.expected)}"
            margin = "-" if c.margin is None else f"{c.margin:.3g}"
            lines.append(f"  [{status}] {c.path} security {c.security + 1}: {c.name}: "
                         f"{c.inequality}{extra} margin={margin}")
    lines.append("")
    lines.append("result: " + ("PASS" if report.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _metric_table(metrics: list[MetricsReport]) -> list[str]:
    names = ("spread", "spread_informed", "spread_liquidity", "mm_share", "mm_bid", "mm_ask",
             "inefficiency_amm", "inefficiency_amm_type_avg", "inefficiency_no_amm",
             "p_transact", "amm_profit", "mm_profit")
    lines = []
    n = max(len(m.securities) for m in metrics)
    for i in range(n):
        lines.append(f"security {i + 1} metrics:")
        for name in names:
            cells = []
            for m in metrics:
                if i >= len(m.securities):
                    continue
                s = m.securities[i]
                v = getattr(s, name)
                cell = f"{m.path}={fmt(v)}"
                se = (s.se or {}).get(name)
                if se is not None:
                    cell += f"±{se:.2g}"
                cells.append(cell)
            lines.append(f"  {name:<26} " + " ".join(cells))
    return lines


def example_lines(report: RunReport) -> list[str]:
    """One line per worked-example number across all paths present."""
    by_key: dict[str, list[Check]] = {}
    for c in report.checks:
        if c.name.startswith("example_"):
            by_key.setdefault(c.name[len("example_"):], []).append(c)
    lines = []
    for key, checks in by_key.items():
        parts = [key]
        for c in checks:
            cell = f"{c.path}={fmt(c.observed)}"
            m = report.path(c.path)
            se = (m.securities[c.security].se or {}).get(key) if m else None
            if se is not None:
                cell += f"±{se:.2g}"
            parts.append(cell)
        parts.append(f"expected={fmt(checks[0].expected)}")
        parts.append("PASS" if all(c.passed for c in checks) else "FAIL")
        lines.append(" ".join(parts))
    return lines


def sweep_csv(rows: list[dict], n: int, extended: bool) -> str:
    """CSV text: parameters, then metrics, then path tag, then standard errors."""
    params = [f"gamma{k + 1}" for k in range(n)] + ["phi"]
    if extended:
        params += [f"delta{k + 1}" for k in range(n)]
    header = (["point", "security"] + params + [c for c, _ in CSV_METRICS] + ["path"]
              + [f"se_{c}" for c, _ in CSV_METRICS])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h)) for h in header])
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v
