"""Numerical tolerances and tunables shared by every module.

Values can be overridden by a JSON file named in ``REPVAR_CONFIG``.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Config:
    backend: str = "exact"
    det_tol: float = 1e-9
    relator_tol: float = 1e-9
    fiber_tol: float = 1e-9
    fixpoint_tol: float = 1e-9
    cluster_tol: float = 1e-8
    theta_singular_tol: float = 1e-10
    smallness_bound: float = 0.1
    central_ratio: float = 0.1
    detour_radius_cap: float = 0.1
    newton_max_iters: int = 25
    rank_threshold: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.backend!r}")
        for f in fields(self):
            if f.name.endswith("_tol") and not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    def updated(self, **changes) -> "Config":
        return replace(self, **changes)


def load_config(path: str | None = None) -> Config:
    path = path or os.environ.get("REPVAR_CONFIG")
    if not path:
        return Config()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return Config(**data)


DEFAULT_CONFIG = Config()
