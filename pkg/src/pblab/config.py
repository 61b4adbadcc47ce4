"""Experiment configuration.

A config file is a flat JSON object. Complex values are ``[re, im]`` pairs.
Every key is optional; the defaults are the reference parameters, so an empty
object (or no file at all) reproduces the acceptance suite::

    {
      "k": 0.7,
      "alpha": [0.3, 0.2],
      "beta": [-0.5, 0.0],
      "M": 128,
      "n_max": 30,
      "quadrature_order": null,
      "tolerance": 1e-8,
      "M_list": [16, 32, 64, 128],
      "probe_seed": 0,
      "output_dir": "pblab-out"
    }

``quadrature_order`` of ``null`` means ``4 * M``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .errors import ConfigError
from .fock import Params

__all__ = ["ExperimentConfig", "load_config"]


def _real(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{key}: expected a finite number, got {v!r}")
    return float(v)


def _int(key, v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    return v


def _complex(key, v):
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ConfigError(f"{key}: expected [re, im], got {v!r}")
    return complex(_real(key, v[0]), _real(key, v[1]))


@dataclass(frozen=True)
class ExperimentConfig:
    k: float = 0.7
    alpha: complex = 0.3 + 0.2j
    beta: complex = -0.5 + 0j
    M: int = 128
    n_max: int = 30
    quadrature_order: Optional[int] = None
    tolerance: float = 1e-8
    M_list: List[int] = field(default_factory=lambda: [16, 32, 64, 128])
    probe_seed: int = 0
    output_dir: str = "pblab-out"

    def __post_init__(self):
        if self.M < 2:
            raise ConfigError(f"M must be >= 2, got {self.M}")
        if not (0 <= self.n_max and 2 * self.n_max < self.M):
            raise ConfigError(f"need 0 <= n_max < M/2, got n_max={self.n_max}, M={self.M}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance}")
        if self.quadrature_order is not None and self.quadrature_order < 2:
            raise ConfigError(f"quadrature_order must be >= 2, got {self.quadrature_order}")
        ml = list(self.M_list)
        if not ml or any(m < 2 for m in ml) or any(b <= a for a, b in zip(ml, ml[1:])):
            raise ConfigError(f"M_list must be strictly increasing with entries >= 2, got {ml}")
        if self.probe_seed < 0:
            raise ConfigError(f"probe_seed must be >= 0, got {self.probe_seed}")

    @property
    def params(self) -> Params:
        return Params(self.k, self.alpha, self.beta)

    @property
    def Q(self) -> int:
        return self.quadrature_order if self.quadrature_order is not None else 4 * self.M

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kw = {}
        for key, v in data.items():
            if key in ("alpha", "beta"):
                kw[key] = _complex(key, v)
            elif key in ("k", "tolerance"):
                kw[key] = _real(key, v)
            elif key in ("M", "n_max", "probe_seed"):
                kw[key] = _int(key, v)
            elif key == "quadrature_order":
                kw[key] = None if v is None else _int(key, v)
            elif key == "M_list":
                if not isinstance(v, list):
                    raise ConfigError(f"M_list: expected a list, got {v!r}")
                kw[key] = [_int(key, m) for m in v]
            elif key == "output_dir":
                if not isinstance(v, str):
                    raise ConfigError(f"output_dir: expected a string, got {v!r}")
                kw[key] = v
        return cls(**kw)

    def echo(self) -> dict:
        """Config values that affect results (the output location is excluded)."""
        return {
            "k": self.k,
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
            "M": self.M,
            "n_max": self.n_max,
            "quadrature_order": self.Q,
            "tolerance": self.tolerance,
            "M_list": list(self.M_list),
            "probe_seed": self.probe_seed,
        }


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return ExperimentConfig.from_mapping(data)
