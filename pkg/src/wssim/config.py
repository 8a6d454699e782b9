"""Experiment configuration: declarative description of one run.

Configs live in flat ``key = value`` text files (``#`` starts a comment).
Band statistics come either from a named case or from explicit per-band
transition vectors; explicit vectors win when both are present, so an
emitted manifest reloads to the exact same experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .learning import POLICY_MODES
from .spectrum import CASE_STATIONARY, BandStatistics

RS_MODES = ("oracle", "signal")


@dataclass
class ExperimentConfig:
    n_bands: int = 8
    k_branches: int = 4
    horizon: int = 10_000
    replications: int = 100
    seed: int = 0
    case: str = "case1"
    p01: tuple[float, ...] | None = None
    p10: tuple[float, ...] | None = None
    snr_db: float | None = None          # None means noiseless
    rs_mode: str = "oracle"
    policies: tuple[str, ...] = ("IMP", "LDM", "OLDM")
    exploration_coefficient: float = 10.0
    mu: float = 0.5
    delta: float = 0.1
    lambda_mixing: float = 0.5
    bins_per_band: int = 64
    energy_fa_rate: float = 0.05
    search_breadth: int = 5
    residual_threshold: float = 0.1

    def validate(self) -> None:
        if self.n_bands < 1:
            raise ValueError("n_bands must be at least 1")
        if not 1 <= self.k_branches <= self.n_bands:
            raise ValueError(
                f"k_branches must satisfy 1 <= k_branches <= n_bands "
                f"(got {self.k_branches} with n_bands={self.n_bands})")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.rs_mode not in RS_MODES:
            raise ValueError(f"rs_mode must be one of {RS_MODES}")
        if not self.policies:
            raise ValueError("policies must list at least one policy")
        for policy in self.policies:
            if policy not in POLICY_MODES:
                raise ValueError(f"policies entries must be among {POLICY_MODES}")
        if len(set(self.policies)) != len(self.policies):
            raise ValueError("policies must not repeat")
        if self.exploration_coefficient <= 0.0:
            raise ValueError("exploration_coefficient must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.lambda_mixing <= 1.0:
            raise ValueError("lambda_mixing must lie in (0, 1]")
        if self.bins_per_band < 1:
            raise ValueError("bins_per_band must be at least 1")
        if not 0.0 < self.energy_fa_rate < 1.0:
            raise ValueError("energy_fa_rate must lie in (0, 1)")
        if self.search_breadth < 1:
            raise ValueError("search_breadth must be at least 1")
        if self.residual_threshold <= 0.0:
            raise ValueError("residual_threshold must be positive")
        if (self.p01 is None) != (self.p10 is None):
            raise ValueError("p01 and p10 must be given together")
        if self.p01 is not None:
            if len(self.p01) != self.n_bands or len(self.p10) != self.n_bands:
                raise ValueError("p01 and p10 must have n_bands entries")
        elif self.case not in CASE_STATIONARY:
            raise ValueError(
                f"case must be one of {sorted(CASE_STATIONARY)} "
                "unless explicit p01/p10 vectors are given")
        self.band_statistics()  # surfaces probability-range errors

    def band_statistics(self) -> BandStatistics:
        """Resolve the configured statistics to explicit transition vectors."""
        if self.p01 is not None:
            return BandStatistics(p01=np.asarray(self.p01),
                                  p10=np.asarray(self.p10))
        base = np.asarray(CASE_STATIONARY[self.case])
        reps = -(-self.n_bands // base.size)
        p0 = np.tile(base, reps)[:self.n_bands]
        return BandStatistics.from_stationary(p0, mixing=self.lambda_mixing)

    def resolved(self) -> "ExperimentConfig":
        """Copy with the statistics pinned as explicit vectors."""
        stats = self.band_statistics()
        out = ExperimentConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        out.p01 = tuple(float(x) for x in stats.p01)
        out.p10 = tuple(float(x) for x in stats.p10)
        return out


_INT_KEYS = {"n_bands", "k_branches", "horizon", "replications", "seed",
             "bins_per_band", "search_breadth"}
_FLOAT_KEYS = {"exploration_coefficient", "mu", "delta", "lambda_mixing",
               "energy_fa_rate", "residual_threshold"}
_ALL_KEYS = {f.name for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key == "snr_db":
        return None if raw.lower() in ("noiseless", "none", "inf") else float(raw)
    if key == "policies":
        return tuple(part.strip().upper() for part in raw.split(",") if part.strip())
    if key in ("p01", "p10"):
        return tuple(float(part) for part in raw.split(",") if part.strip())
    if key in ("case", "rs_mode"):
        return raw.strip()
    raise ValueError(f"unknown configuration key: {key}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat key = value config file."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown configuration key: {key}")
        values[key] = _parse_value(key, raw)
    return ExperimentConfig(**values)


def _format_value(key: str, value) -> str:
    if key == "snr_db":
        return "noiseless" if value is None else repr(float(value))
    if key == "policies":
        return ", ".join(value)
    if key in ("p01", "p10"):
        return ", ".join(repr(float(x)) for x in value)
    if key in _FLOAT_KEYS:
        return repr(float(value))
    return str(value)


def dump_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Write a config (or manifest) back in the loadable flat format."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None and f.name in ("p01", "p10"):
            continue
        lines.append(f"{f.name} = {_format_value(f.name, value)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
