"""Keyed-text run configuration (INI sections) and its dict form for report echoes.

Example::

    [model]
    phi = 0.9                  # or: table = [0.45, 0.05, 0.05, 0.45]

    [security.0]
    p = 50
    r = 1
    gamma = 0.5

    [security.1]
    p = 50
    r = 1
    gamma = 0.5

    [run]
    rounds = 1000000
    seed = 7
    with_amm = true

An ``[extended]`` section switches to the extended model.  Its keys
(``delta``, ``curve``, ``curve_slope``, ``curve_scale``, ``curve_level``,
``variant``) are defaults that ``[security.K]`` sections may override.
"""
from __future__ import annotations

import configparser
import io
import json
import math

from .model import (
    ExtendedSecurityParams,
    JointValueModel,
    ParticipationCurve,
    SecurityParams,
    two_security_model,
    validate,
)
from .simulator import SimulationConfig

_CURVE_FIELDS = {"curve_slope": "slope", "curve_scale": "scale", "curve_level": "level"}
_SECURITY_KEYS = {"p", "r", "gamma", "delta", "curve", *_CURVE_FIELDS}
_RUN_KEYS = {"rounds", "seed", "with_amm", "variant", "mode"}
_EXTENDED_KEYS = {"delta", "curve", "variant", *_CURVE_FIELDS}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


def _float(section: str, key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{section}.{key}", f"expected a finite number, got {raw!r}")
    return v


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected an integer, got {raw!r}") from None


def _bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key}", f"expected true/false, got {raw!r}")


def _table(raw: str) -> list[float]:
    text = raw.strip()
    if not text.startswith("["):
        text = f"[{text}]"
    try:
        vals = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError("model.table", f"expected a list of masses, got {raw!r}") from None
    if not all(isinstance(v, (int, float)) for v in vals):
        raise ConfigError("model.table", "masses must be numbers")
    return [float(v) for v in vals]


def _model(cp: configparser.ConfigParser) -> JointValueModel:
    if not cp.has_section("model"):
        raise ConfigError("model", "missing [model] section")
    sec = cp["model"]
    for key in sec:
        if key not in ("phi", "table", "n"):
            raise ConfigError(f"model.{key}", "unknown key")
    if "table" in sec:
        masses = _table(sec["table"])
        n = int(round(math.log2(len(masses)))) if masses else 0
        if len(masses) < 2 or 2**n != len(masses):
            raise ConfigError("model.table", f"length {len(masses)} is not a power of two")
        if "n" in sec and _int("model", "n", sec["n"]) != n:
            raise ConfigError("model.n", f"does not match table length {len(masses)}")
        model = JointValueModel(n, masses)
        if "phi" in sec:
            phi = _float("model", "phi", sec["phi"])
            if n != 2 or abs(model.phi - phi) > 1e-12:
                raise ConfigError("model.phi", "inconsistent with model.table")
    elif "phi" in sec:
        phi = _float("model", "phi", sec["phi"])
        if "n" in sec and _int("model", "n", sec["n"]) != 2:
            raise ConfigError("model.n", "phi describes a two-security model")
        try:
            model = two_security_model(phi)
        except ValueError as exc:
            raise ConfigError("model.phi", str(exc)) from None
    else:
        raise ConfigError("model", "needs either 'phi' or 'table'")
    problems = validate(model)
    if problems:
        raise ConfigError("model.table", "; ".join(problems))
    return model


def parse_config(text: str) -> SimulationConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    for name in cp.sections():
        if name not in ("model", "run", "extended") and not name.startswith("security."):
            raise ConfigError(name, "unknown section")
    model = _model(cp)

    run = cp["run"] if cp.has_section("run") else {}
    for key in run:
        if key not in _RUN_KEYS:
            raise ConfigError(f"run.{key}", "unknown key")
    ext = cp["extended"] if cp.has_section("extended") else None
    if ext is not None:
        for key in ext:
            if key not in _EXTENDED_KEYS:
                raise ConfigError(f"extended.{key}", "unknown key")
    mode = run.get("mode", "extended" if ext is not None else "base")
    if mode not in ("base", "extended"):
        raise ConfigError("run.mode", f"expected base or extended, got {mode!r}")
    variant = run.get("variant", ext.get("variant", "paper") if ext is not None else "paper")
    if variant not in ("paper", "renormalized"):
        raise ConfigError("run.variant", f"expected paper or renormalized, got {variant!r}")

    params = []
    for i in range(model.n):
        name = f"security.{i}"
        if not cp.has_section(name):
            raise ConfigError(name, f"missing section for security {i} of {model.n}")
        sec = cp[name]
        for key in sec:
            if key not in _SECURITY_KEYS:
                raise ConfigError(f"{name}.{key}", "unknown key")
        for key in ("p", "r"):
            if key not in sec:
                raise ConfigError(f"{name}.{key}", "required")
        p = _float(name, "p", sec["p"])
        r = _float(name, "r", sec["r"])
        try:
            if mode == "base":
                if "gamma" not in sec:
                    raise ConfigError(f"{name}.gamma", "required in base mode")
                params.append(SecurityParams(p, r, _float(name, "gamma", sec["gamma"]), i))
            else:
                def pick(key, _sec=sec, _name=name):
                    if key in _sec:
                        return _name, _sec[key]
                    if ext is not None and key in ext:
                        return "extended", ext[key]
                    return None, None

                where, raw = pick("delta")
                if raw is None:
                    raise ConfigError(f"{name}.delta", "required in extended mode")
                delta = _float(where, "delta", raw)
                kw = {}
                where, raw = pick("curve")
                if raw is not None:
                    kw["kind"] = raw.strip()
                for key, attr in _CURVE_FIELDS.items():
                    where, raw = pick(key)
                    if raw is not None:
                        kw[attr] = _float(where, key, raw)
                try:
                    curve = ParticipationCurve(**kw)
                except ValueError as exc:
                    raise ConfigError(f"{name}.curve", str(exc)) from None
                params.append(ExtendedSecurityParams(p, r, delta, curve, i))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(name, str(exc)) from None

    rounds = _int("run", "rounds", run["rounds"]) if "rounds" in run else 1_000_000
    seed = _int("run", "seed", run["seed"]) if "seed" in run else 0
    with_amm = _bool("run", "with_amm", run["with_amm"]) if "with_amm" in run else True
    try:
        return SimulationConfig(model, tuple(params), mode, with_amm, rounds, seed, 1, variant)
    except ValueError as exc:
        raise ConfigError("run", str(exc)) from None


def load_config(path) -> SimulationConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None


def config_to_dict(cfg: SimulationConfig) -> dict:
    """Resolved configuration echo.  Worker count is a partition hint and is left out."""
    d = {"model": {"n": cfg.model.n, "table": list(cfg.model.table)}}
    if cfg.model.n == 2:
        d["model"]["phi"] = cfg.model.phi
    secs = []
    for s in cfg.params:
        if cfg.mode == "base":
            secs.append({"p": s.p, "r": s.r, "gamma": s.gamma})
        else:
            c = s.participation
            secs.append({"p": s.p, "r": s.r, "delta": s.delta, "curve": c.kind,
                         "curve_slope": c.slope, "curve_scale": c.scale, "curve_level": c.level})
    d["securities"] = secs
    d["run"] = {"mode": cfg.mode, "with_amm": cfg.with_amm, "rounds": cfg.rounds,
                "seed": cfg.master_seed, "variant": cfg.variant}
    return d


def config_from_dict(d: dict) -> SimulationConfig:
    return parse_config(dump_config_dict(d))


def dump_config_dict(d: dict) -> str:
    cp = configparser.ConfigParser()
    cp["model"] = {"table": json.dumps(d["model"]["table"])}
    for i, s in enumerate(d["securities"]):
        cp[f"security.{i}"] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in s.items()}
    run = d["run"]
    cp["run"] = {"mode": run["mode"], "with_amm": str(run["with_amm"]).lower(),
                 "rounds": str(run["rounds"]), "seed": str(run["seed"]),
                 "variant": run["variant"]}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def dump_config(cfg: SimulationConfig) -> str:
    return dump_config_dict(config_to_dict(cfg))
