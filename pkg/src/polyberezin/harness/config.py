"""Harness configuration: JSON file, environment variable, command-line flags.

Precedence, lowest to highest: built-in defaults, the file named by
``$POLYBEREZIN_CONFIG``, an explicit ``--config`` file, then flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace

from ..limits import DEFAULT_MAX_FLAT

ENV_VAR = "POLYBEREZIN_CONFIG"

DEFAULT_TOLERANCES = {
    "limit": 1e-3,
    "exact": 1e-8,
    "algebra": 1e-12,
    "dyadic_limit": 1e-2,
}


@dataclass(frozen=True)
class HarnessConfig:
    seed: int = 20240607
    workers: int = 1
    max_flat: int = DEFAULT_MAX_FLAT
    wall_time: float = 300.0
    eps: float = 1e-10
    radii_exponents: tuple[int, int] = (4, 12)
    tolerances: dict = field(default_factory=dict)
    out_dir: str | None = None

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES) - {k for k in self.tolerances if "." in k}
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")

    @property
    def radii(self) -> tuple[float, ...]:
        lo, hi = self.radii_exponents
        return tuple(1.0 - 2.0 ** -m for m in range(lo, hi + 1))

    def tolerance(self, name: str, check_id: str | None = None) -> float:
        if check_id and f"{check_id}.{name}" in self.tolerances:
            return float(self.tolerances[f"{check_id}.{name}"])
        if name in self.tolerances:
            return float(self.tolerances[name])
        return DEFAULT_TOLERANCES[name]

    def to_json(self) -> dict:
        d = asdict(self)
        d["radii_exponents"] = list(self.radii_exponents)
        return d


def _from_mapping(base: HarnessConfig, data: dict) -> HarnessConfig:
    names = {f.name for f in fields(HarnessConfig)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    data = dict(data)
    if "radii_exponents" in data:
        data["radii_exponents"] = tuple(data["radii_exponents"])
    if "tolerances" in data:
        data["tolerances"] = {**base.tolerances, **data["tolerances"]}
    return replace(base, **data)


def load_config(path: str | None = None, **overrides) -> HarnessConfig:
    cfg = HarnessConfig()
    env = os.environ.get(ENV_VAR)
    for p in (env, path):
        if p:
            with open(p) as fh:
                cfg = _from_mapping(cfg, json.load(fh))
    flags = {k: v for k, v in overrides.items() if v is not None}
    return _from_mapping(cfg, flags) if flags else cfg
