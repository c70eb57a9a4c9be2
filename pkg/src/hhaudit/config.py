"""Sweep configuration files.

INI-style text with sections ``[function]`` (or several ``[function:NAME]``),
``[grid]``, ``[quadrature]``, ``[report]`` and ``[certifier]``. Numeric lists are
comma-separated, function parameters are ``key=value`` pairs separated by commas,
and any unknown section or key is rejected with its dotted path.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .audit import AuditOptions, FunctionEntry, Grid
from .core import DomainError, Interval
from .funcmodel import DEFAULT_SEED, SamplingPlan, from_name, tabulated

_FUNCTION_KEYS = {"family", "params", "domain", "assert_valid", "nodes", "values"}
_GRID_KEYS = {"a", "b", "alpha", "m", "q", "mu", "mu1", "mu2"}
_QUAD_KEYS = {"rel_tol_1d", "rel_tol_2d"}
_REPORT_KEYS = {"format", "out_dir", "name", "strict_published", "lemma1"}
_CERT_KEYS = {"enabled", "grid_points", "t_points", "random_samples", "seed"}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class SweepConfig:
    functions: List[FunctionEntry]
    grid: Grid
    options: AuditOptions = field(default_factory=AuditOptions)
    format: str = "csv"
    out_dir: str = "audit_out"
    name: str = "audit_report"
    strict_published: bool = False


def parse_floats(text: str, path: str) -> List[float]:
    items = [s.strip() for s in text.split(",")]
    if items == [""]:
        return []
    try:
        return [float(s) for s in items]
    except ValueError:
        raise ConfigError(path, f"expected a comma-separated list of numbers, got {text!r}") from None


def parse_params(text: str, path: str) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(path, f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"{path}.{key.strip()}", f"not a number: {value!r}") from None
    return out


def parse_int(text: str, path: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(path, f"expected an integer, got {text!r}") from None


def _bool(section, key, path, default=False) -> bool:
    if key not in section:
        return default
    try:
        return section.getboolean(key)
    except ValueError:
        raise ConfigError(path, f"expected a boolean, got {section[key]!r}") from None


def _check_keys(section, allowed, name):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", f"unknown key (allowed: {sorted(allowed)})")


def _function(name: str, section) -> FunctionEntry:
    _check_keys(section, _FUNCTION_KEYS, name)
    if "family" not in section:
        raise ConfigError(f"{name}.family", "missing")
    family = section["family"].strip()
    domain: Optional[Interval] = None
    if "domain" in section:
        lohi = parse_floats(section["domain"], f"{name}.domain")
        if len(lohi) != 2:
            raise ConfigError(f"{name}.domain", "expected two numbers lo, hi")
        try:
            domain = Interval(*lohi)
        except DomainError as exc:
            raise ConfigError(f"{name}.domain", str(exc)) from None
    try:
        if family == "tabulated":
            for key in ("nodes", "values"):
                if key not in section:
                    raise ConfigError(f"{name}.{key}", "missing (required for tabulated)")
            spec = tabulated(parse_floats(section["nodes"], f"{name}.nodes"),
                             parse_floats(section["values"], f"{name}.values"))
        else:
            for key in ("nodes", "values"):
                if key in section:
                    raise ConfigError(f"{name}.{key}", "only valid for tabulated functions")
            params = parse_params(section.get("params", ""), f"{name}.params")
            spec = from_name(family, params, domain)
    except DomainError as exc:
        raise ConfigError(name, str(exc)) from None
    label = name.split(":", 1)[1] if ":" in name else family
    return FunctionEntry(label, spec, _bool(section, "assert_valid", f"{name}.assert_valid"))


def _grid(section) -> Grid:
    _check_keys(section, _GRID_KEYS, "grid")
    lists = {}
    for key in ("a", "b", "alpha", "m"):
        if key not in section:
            raise ConfigError(f"grid.{key}", "missing")
        lists[key] = parse_floats(section[key], f"grid.{key}")
    lists["q"] = parse_floats(section.get("q", "2"), "grid.q")
    if "mu" in section and ("mu1" in section or "mu2" in section):
        raise ConfigError("grid.mu", "give either mu or mu1/mu2, not both")
    lists["mu1"] = parse_floats(section.get("mu", section.get("mu1", "0.5")), "grid.mu1")
    mu2 = parse_floats(section["mu2"], "grid.mu2") if "mu2" in section else None
    for key in ("alpha", "m"):
        for v in lists[key]:
            if not 0.0 < v <= 1.0:
                raise ConfigError(f"grid.{key}", f"values must lie in (0, 1], got {v}")
    for v in lists["q"]:
        if not v >= 1.0:
            raise ConfigError("grid.q", f"values must be >= 1, got {v}")
    for key, vals in (("mu1", lists["mu1"]), ("mu2", mu2 or [])):
        for v in vals:
            if not 0.0 < v < 1.0:
                raise ConfigError(f"grid.{key}", f"values must lie in (0, 1), got {v}")
    for key in ("a", "b"):
        for v in lists[key]:
            if not v >= 0.0:
                raise ConfigError(f"grid.{key}", f"endpoints must be >= 0, got {v}")
    return Grid(lists["a"], lists["b"], lists["alpha"], lists["m"], lists["q"], lists["mu1"], mu2)


def load_config(path: str | Path) -> SweepConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def parse_config(text: str) -> SweepConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__",
                                   inline_comment_prefixes=(";",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None

    functions = []
    for name in cp.sections():
        if name == "function" or name.startswith("function:"):
            functions.append(_function(name, cp[name]))
        elif name not in ("grid", "quadrature", "report", "certifier"):
            raise ConfigError(name, "unknown section")
    if not functions:
        raise ConfigError("function", "at least one [function] section is required")
    if "grid" not in cp:
        raise ConfigError("grid", "missing section")
    grid = _grid(cp["grid"])

    quad = cp["quadrature"] if "quadrature" in cp else {}
    if quad:
        _check_keys(quad, _QUAD_KEYS, "quadrature")
    tols = {}
    for key, default in (("rel_tol_1d", 1e-10), ("rel_tol_2d", 1e-9)):
        vals = parse_floats(quad.get(key, str(default)), f"quadrature.{key}")
        if len(vals) != 1:
            raise ConfigError(f"quadrature.{key}", "expected a single number")
        floor = 1e-13 if key == "rel_tol_1d" else 1e-12
        if not vals[0] >= floor:
            raise ConfigError(f"quadrature.{key}", f"must be at least {floor:g}")
        tols[key] = vals[0]

    rep = cp["report"] if "report" in cp else None
    fmt, out_dir, name, strict, lemma1 = "csv", "audit_out", "audit_report", False, True
    if rep is not None:
        _check_keys(rep, _REPORT_KEYS, "report")
        fmt = rep.get("format", fmt).strip()
        if fmt not in ("csv", "json"):
            raise ConfigError("report.format", f"expected csv or json, got {fmt!r}")
        out_dir = rep.get("out_dir", out_dir).strip()
        name = rep.get("name", name).strip()
        strict = _bool(rep, "strict_published", "report.strict_published")
        lemma1 = _bool(rep, "lemma1", "report.lemma1", default=True)

    cert = cp["certifier"] if "certifier" in cp else None
    plan, enabled = SamplingPlan(), True
    if cert is not None:
        _check_keys(cert, _CERT_KEYS, "certifier")
        enabled = _bool(cert, "enabled", "certifier.enabled", default=True)
        plan = SamplingPlan(
            grid_points=parse_int(cert.get("grid_points", "41"), "certifier.grid_points"),
            t_points=parse_int(cert.get("t_points", "21"), "certifier.t_points"),
            random_samples=parse_int(cert.get("random_samples", "10000"),
                                     "certifier.random_samples"),
            seed=parse_int(cert.get("seed", hex(DEFAULT_SEED)), "certifier.seed"),
        )
    options = AuditOptions(tols["rel_tol_1d"], tols["rel_tol_2d"], plan, enabled, lemma1)
    return SweepConfig(functions, grid, options, fmt, out_dir, name, strict)
