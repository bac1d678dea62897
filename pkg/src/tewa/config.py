"""Tunable weights, normalization references and thresholds.

Every scoring term in both assignment stages is a fuzzy value in [0, 1] and
every combination of terms is a configurable weighted sum, so that parameter
influence can be explored offline without code changes.  Where a contract
requires the combined score to saturate at 1 the bundle's weights must sum
to one; the pair-scoring bundles have no sum constraint because assignment
outcomes are invariant under common positive scaling of their weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


def _check_unit_fields(obj, names):
    for n in names:
        v = getattr(obj, n)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and 0.0 <= v <= 1.0):
            raise ValueError(f"{type(obj).__name__}.{n} must be in [0,1], got {v}")


def _check_sum(obj, names, tol):
    total = sum(getattr(obj, n) for n in names)
    if abs(total - 1.0) > tol:
        raise ValueError(f"{type(obj).__name__} weights {names} must sum to 1, got {total}")


@dataclass(frozen=True)
class KillProbabilityWeights:
    """Weights of the intent/capability/load blend; must sum to one."""

    intent: float = 0.4
    capability: float = 0.4
    load: float = 0.2
    exponent: float = 1.0

    def __post_init__(self):
        _check_unit_fields(self, ("intent", "capability", "load"))
        _check_sum(self, ("intent", "capability", "load"), 1e-12)
        if self.exponent <= 0.0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")


@dataclass(frozen=True)
class CapabilityWeights:
    """Blend of type base capability and speed-within-envelope."""

    base: float = 0.7
    speed: float = 0.3

    def __post_init__(self):
        _check_unit_fields(self, ("base", "speed"))
        _check_sum(self, ("base", "speed"), 1e-9)


@dataclass(frozen=True)
class IntentWeights:
    """Blend of heading alignment, closing urgency and descent rate.

    ``closing_time_ref`` shapes the inverse-time normalizer
    ``ref / (ref + t)``; ``descent_rate_ref`` caps the descent normalizer.
    """

    alignment: float = 0.5
    closing: float = 0.3
    descent: float = 0.2
    closing_time_ref: float = 30.0
    descent_rate_ref: float = 50.0

    def __post_init__(self):
        _check_unit_fields(self, ("alignment", "closing", "descent"))
        _check_sum(self, ("alignment", "closing", "descent"), 1e-9)
        if self.closing_time_ref <= 0 or self.descent_rate_ref <= 0:
            raise ValueError("normalization references must be positive")


@dataclass(frozen=True)
class DaPairWeights:
    """Scoring of a threat/asset pair: kill capability, closing urgency,
    asset priority and remaining assignment headroom."""

    kill_capability: float = 0.25
    closing: float = 0.25
    priority: float = 0.25
    load: float = 0.25
    closing_time_ref: float = 30.0

    def __post_init__(self):
        _check_unit_fields(self, ("kill_capability", "closing", "priority", "load"))
        if self.closing_time_ref <= 0:
            raise ValueError("closing_time_ref must be positive")


@dataclass(frozen=True)
class RefineWeights:
    """Blend of opportunity (intent + capability) and proximity."""

    opportunity: float = 0.6
    proximity: float = 0.4

    def __post_init__(self):
        _check_unit_fields(self, ("opportunity", "proximity"))
        _check_sum(self, ("opportunity", "proximity"), 1e-9)


@dataclass(frozen=True)
class WsPairWeights:
    """Scoring of a threat/weapon pair over five fuzzy terms."""

    closing: float = 0.2
    elevation: float = 0.2
    lethality: float = 0.2
    stabilization: float = 0.2
    rate_of_fire: float = 0.2
    closing_time_ref: float = 10.0
    stabilization_ref: float = 3.0
    rate_of_fire_ref: float = 1.0

    def __post_init__(self):
        _check_unit_fields(self, ("closing", "elevation", "lethality",
                                  "stabilization", "rate_of_fire"))
        for n in ("closing_time_ref", "stabilization_ref", "rate_of_fire_ref"):
            if getattr(self, n) <= 0:
                raise ValueError(f"{n} must be positive")


@dataclass(frozen=True)
class Thresholds:
    """Triggering thresholds.

    ``initial_threat_trigger`` gates which tracks enter evaluation at all
    (default 0: process everything); ``min_capability`` is the minimum
    effectiveness / kill capability for a pairing to be proposed.
    """

    initial_threat_trigger: float = 0.0
    min_capability: float = 0.05

    def __post_init__(self):
        _check_unit_fields(self, ("initial_threat_trigger", "min_capability"))


@dataclass(frozen=True)
class ModeConfig:
    """Preferential-mode mechanics: priority weight boost and capacity
    rationing proportional to asset priority."""

    priority_boost: float = 2.0

    def __post_init__(self):
        if self.priority_boost < 1.0:
            raise ValueError(f"priority_boost must be >= 1, got {self.priority_boost}")


@dataclass(frozen=True)
class SimConfig:
    tick: float = 0.1
    horizon: float = 120.0
    seed: int = 0
    kill_probability: KillProbabilityWeights = field(default_factory=KillProbabilityWeights)
    capability: CapabilityWeights = field(default_factory=CapabilityWeights)
    intent: IntentWeights = field(default_factory=IntentWeights)
    da_pair: DaPairWeights = field(default_factory=DaPairWeights)
    refine: RefineWeights = field(default_factory=RefineWeights)
    ws_pair: WsPairWeights = field(default_factory=WsPairWeights)
    thresholds: Thresholds = field(default_factory=Thresholds)
    mode: ModeConfig = field(default_factory=ModeConfig)

    def __post_init__(self):
        if self.tick <= 0:
            raise ValueError(f"tick must be positive, got {self.tick}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")


_BUNDLES = {
    "kill_probability": KillProbabilityWeights,
    "capability": CapabilityWeights,
    "intent": IntentWeights,
    "da_pair": DaPairWeights,
    "refine": RefineWeights,
    "ws_pair": WsPairWeights,
    "thresholds": Thresholds,
    "mode": ModeConfig,
}


def config_from_doc(doc: dict | None) -> SimConfig:
    """Build a :class:`SimConfig` from the ``config`` section of a scenario
    document, applying defaults for anything omitted."""
    doc = doc or {}
    weights = doc.get("weights") or {}
    kwargs = {}
    for top in ("tick", "horizon", "seed"):
        if top in doc:
            kwargs[top] = doc[top]
    for key, cls in _BUNDLES.items():
        section = doc.get(key) if key == "thresholds" else weights.get(key)
        if section:
            valid = {f.name for f in fields(cls)}
            unknown = set(section) - valid
            if unknown:
                raise ValueError(f"unknown keys in config weights.{key}: {sorted(unknown)}")
            kwargs[key] = cls(**section)
    return SimConfig(**kwargs)


def config_to_doc(cfg: SimConfig) -> dict:
    """Document form of a config; inverse of :func:`config_from_doc`."""
    weights = {}
    for key, cls in _BUNDLES.items():
        if key == "thresholds":
            continue
        bundle = getattr(cfg, key)
        weights[key] = {f.name: getattr(bundle, f.name) for f in fields(cls)}
    return {
        "tick": cfg.tick,
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "weights": weights,
        "thresholds": {f.name: getattr(cfg.thresholds, f.name) for f in fields(Thresholds)},
    }
