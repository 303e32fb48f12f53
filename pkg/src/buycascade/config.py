"""Flat ``key=value`` run configuration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from typing import Any, Mapping


@dataclass
class CascadeConfig:
    # stage choices
    session_stage: str = "adaboost"  # adaboost | naive_bayes | forest | heuristic | always
    item_stage: str = "forest"  # forest | naive_bayes | heuristic | all
    session_mask: str = "selected"
    # session classifier
    resample: bool = True
    resample_fraction: float = 0.5
    resample_size: int = 0  # 0 -> min(n, 2_000_000)
    boost_rounds: int = 10
    stump_depth: int = 1
    session_cutoff: float = 0.5
    # item classifier
    n_trees: int = 100
    forest_max_depth: int = 0  # 0 -> unlimited
    forest_min_leaf: int = 1
    feature_subset_size: int = 0  # 0 -> floor(sqrt(F))
    item_cutoff: float = 0.5
    # features
    ratio_threshold: float = 3.6
    buy_count_threshold: float = 57.0
    recompute_thresholds: bool = False
    heuristic_threshold: float = 5.5
    ratio_direction: str = "clicks_per_buy"
    # run
    seed: int = 0
    threads: int = 1

    def to_mapping(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "CascadeConfig":
        return cls().updated(values)

    def updated(self, values: Mapping[str, Any]) -> "CascadeConfig":
        types = {f.name: f.type for f in fields(self)}
        changes = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in types:
                raise KeyError(f"unknown config key {key!r}")
            changes[key] = _coerce(raw, types[key])
        return dataclasses.replace(self, **changes)


def _coerce(raw, type_name: str):
    if not isinstance(raw, str):
        return raw
    if type_name == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if type_name == "int":
        return int(raw)
    if type_name == "float":
        return float(raw)
    return raw.strip()


def read_key_values(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{n}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def write_key_values(values: Mapping[str, Any], path) -> None:
    with open(path, "w") as fh:
        for k, v in values.items():
            fh.write(f"{k}={v}\n")
