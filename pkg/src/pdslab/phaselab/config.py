"""Sweep configuration: a single JSON file, schema documented in the README.

No environment variables carry semantics; everything an experiment needs is
in the config plus the master seed, so a sweep is reproducible from the
file alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..errors import ConfigError
from ..graphmodels import PdsParams

_TESTS = ("lin", "scan", "combined")
_SCAN_MODES = ("exact", "heuristic")


@dataclass(frozen=True)
class SweepConfig:
    alpha_grid: tuple
    beta_grid: tuple
    N: int
    trials: int
    test: str
    scan_mode: str
    master_seed: int
    output_path: str
    c: float = 2.0
    restarts: int = 16
    workers: int = 1

    def __post_init__(self):
        if not self.alpha_grid or not self.beta_grid:
            raise ConfigError("alpha_grid and beta_grid must be nonempty")
        if self.N < 2:
            raise ConfigError("need N >= 2")
        if self.trials < 1:
            raise ConfigError("need trials >= 1")
        if self.test not in _TESTS:
            raise ConfigError(f"test must be one of {_TESTS}, got {self.test!r}")
        if self.scan_mode not in _SCAN_MODES:
            raise ConfigError(f"scan_mode must be one of {_SCAN_MODES}, got {self.scan_mode!r}")
        if self.c <= 1.0:
            raise ConfigError("need c > 1")
        if self.workers < 1 or self.restarts < 1:
            raise ConfigError("workers and restarts must be >= 1")
        for alpha in self.alpha_grid:
            for beta in self.beta_grid:
                self.point_params(alpha, beta)  # fail loudly, never clip

    def point_params(self, alpha: float, beta: float) -> PdsParams:
        """Derived (N, K, p, q) at one grid point; p > 1 is an error."""
        q = float(self.N) ** (-alpha)
        p = self.c * q
        if p > 1.0:
            raise ConfigError(
                f"grid point alpha={alpha} gives p = c*q = {p:g} > 1; "
                "shrink c or move the grid"
            )
        k = int(math.floor(float(self.N) ** beta + 0.5))
        if not (1 <= k <= self.N):
            raise ConfigError(f"grid point beta={beta} gives K = {k} outside [1, N]")
        return PdsParams(N=self.N, K=k, p=p, q=q)

    @property
    def points(self) -> list:
        """Grid points in deterministic row-major (alpha, beta) order."""
        return [(a, b) for a in self.alpha_grid for b in self.beta_grid]


def load_config(path) -> SweepConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    required = ["alpha_grid", "beta_grid", "N", "trials", "test", "master_seed", "output_path"]
    missing = [key for key in required if key not in raw]
    if missing:
        raise ConfigError(f"config is missing keys: {', '.join(missing)}")
    allowed = set(required) | {"c", "restarts", "workers", "scan_mode"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        n_vertices = int(raw["N"])
        # exact enumeration is infeasible past small N, so it must be opted
        # into explicitly there
        scan_mode = str(raw.get("scan_mode", "exact" if n_vertices <= 60 else "heuristic"))
        return SweepConfig(
            alpha_grid=tuple(float(a) for a in raw["alpha_grid"]),
            beta_grid=tuple(float(b) for b in raw["beta_grid"]),
            N=n_vertices,
            trials=int(raw["trials"]),
            test=str(raw["test"]),
            scan_mode=scan_mode,
            master_seed=int(raw["master_seed"]),
            output_path=str(raw["output_path"]),
            c=float(raw.get("c", 2.0)),
            restarts=int(raw.get("restarts", 16)),
            workers=int(raw.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed config value: {exc}") from exc
