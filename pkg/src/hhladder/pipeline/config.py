"""Run configuration: a YAML document with a fixed, nested key set.

Example::

    system: {Ne: 2, Z: 2.0}
    basis: {policy: full_to_Kmax, Kmax: 40}
    n_max: 3
    quadrature: {eta_nodes: 64, split_at_diagonal: true}
    output: {path: he.csv, format: csv}

``term`` defaults to the 1S term for Ne = 2; for Ne = 1 give ``term: {L: ell}``.
``basis.policy`` is one of full_to_Kmax, main_only, explicit (with
``indices: [[K, ell], ...]``). Unknown keys are errors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import yaml

from hhladder.errors import ConfigError, HHLadderError
from hhladder.hyperbasis import BasisSet, Explicit, FullToKmax, MainOnly, Policy, TermLabel, enumerate_basis
from hhladder.quadrature import QuadratureSpec

CACHE_ENV = "HHLADDER_CACHE_DIR"
FORMATS = ("csv", "structured")

_TOP_KEYS = {"system", "term", "basis", "n_max", "quadrature", "cache_dir", "output"}
_SYSTEM_KEYS = {"Ne", "Z"}
_TERM_KEYS = {"L", "M", "S", "Sz", "parity"}
_BASIS_KEYS = {"policy", "Kmax", "indices"}
_QUAD_KEYS = {"eta_nodes", "split_at_diagonal", "qmax_override"}
_OUTPUT_KEYS = {"path", "format"}


def _check_keys(section: str, data: Any, allowed: set[str]) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"'{section}' must be a mapping")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(unknown)}")
    return data


def _int(section: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{section}' must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class BasisConfig:
    policy: str = "full_to_Kmax"
    Kmax: int = 0
    indices: Optional[tuple[tuple[int, int], ...]] = None

    def to_policy(self) -> Policy:
        if self.policy == "full_to_Kmax":
            return FullToKmax(self.Kmax)
        if self.policy == "main_only":
            return MainOnly(self.Kmax)
        return Explicit(self.indices or ())


@dataclass(frozen=True)
class RunConfig:
    Ne: int
    Z: float
    term: dict
    basis: BasisConfig
    n_max: int = 0
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    cache_dir: Optional[str] = None
    output_path: Optional[str] = None
    output_format: str = "csv"

    def term_label(self) -> TermLabel:
        t = dict(self.term)
        try:
            if self.Ne == 1:
                L = t.get("L", 0)
                defaults = {"L": L, "M": 0, "S": 0.5, "Sz": 0.5, "parity": (-1) ** L}
            else:
                defaults = {"L": 0, "M": 0, "S": 0, "Sz": 0, "parity": 1}
            defaults.update(t)
            return TermLabel(Ne=self.Ne, Z=self.Z, **defaults)
        except HHLadderError as exc:
            raise ConfigError(str(exc)) from exc

    def build_basis(self) -> BasisSet:
        try:
            return enumerate_basis(self.term_label(), self.basis.to_policy())
        except HHLadderError as exc:
            raise ConfigError(str(exc)) from exc

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        if "Kmax" in kw:
            kw["basis"] = replace(self.basis, Kmax=kw.pop("Kmax"))
        cfg = replace(self, **kw)
        cfg.validate()
        return cfg

    def resolved_cache_dir(self) -> Optional[Path]:
        path = self.cache_dir or os.environ.get(CACHE_ENV)
        return Path(path) if path else None

    def validate(self) -> None:
        if self.n_max < 0:
            raise ConfigError("n_max must be non-negative")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output format must be one of {FORMATS}, got {self.output_format!r}")
        self.build_basis()

    def echo(self) -> dict:
        basis: dict = {"policy": self.basis.policy}
        if self.basis.policy == "explicit":
            basis["indices"] = [list(p) for p in self.basis.indices or ()]
        else:
            basis["Kmax"] = self.basis.Kmax
        return {
            "system": {"Ne": self.Ne, "Z": self.Z},
            "term": self.term_label().descriptor(),
            "basis": basis,
            "n_max": self.n_max,
            "quadrature": self.quadrature.descriptor(),
        }


def parse_config(data: Any) -> RunConfig:
    data = _check_keys("<root>", data, _TOP_KEYS)
    system = _check_keys("system", data.get("system"), _SYSTEM_KEYS)
    if "Ne" not in system or "Z" not in system:
        raise ConfigError("'system' needs both Ne and Z")
    Ne = _int("system.Ne", system["Ne"])
    Z = system["Z"]
    if isinstance(Z, bool) or not isinstance(Z, (int, float)):
        raise ConfigError(f"'system.Z' must be a number, got {Z!r}")

    term = _check_keys("term", data.get("term"), _TERM_KEYS)

    b = _check_keys("basis", data.get("basis"), _BASIS_KEYS)
    policy = b.get("policy", "full_to_Kmax")
    if policy not in ("full_to_Kmax", "main_only", "explicit"):
        raise ConfigError(f"unknown basis policy {policy!r}")
    indices = None
    if policy == "explicit":
        raw = b.get("indices")
        if not isinstance(raw, list):
            raise ConfigError("explicit basis needs 'indices: [[K, ell], ...]'")
        try:
            indices = tuple((_int("basis.indices", K), _int("basis.indices", l)) for K, l in raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed basis.indices: {exc}") from exc
        if "Kmax" in b:
            raise ConfigError("explicit basis takes no Kmax")
        basis = BasisConfig(policy, 0, indices)
    else:
        if "indices" in b:
            raise ConfigError(f"policy {policy} takes no indices")
        basis = BasisConfig(policy, _int("basis.Kmax", b.get("Kmax", 0)), None)

    q = _check_keys("quadrature", data.get("quadrature"), _QUAD_KEYS)
    try:
        quad = QuadratureSpec(**q)
    except (HHLadderError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    out = _check_keys("output", data.get("output"), _OUTPUT_KEYS)
    cfg = RunConfig(
        Ne=Ne,
        Z=float(Z),
        term=dict(term),
        basis=basis,
        n_max=_int("n_max", data.get("n_max", 0)),
        quadrature=quad,
        cache_dir=data.get("cache_dir"),
        output_path=out.get("path"),
        output_format=out.get("format", "csv"),
    )
    cfg.validate()
    return cfg


def load_config(path: str | os.PathLike) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return parse_config(data)
