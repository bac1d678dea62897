"""Stage one: threat indices, asset-level kill probability and the
threat-to-asset pairing.

Every track gets a capability index (what it could do) and an intent index
(what it appears to be doing), blended and sharpened with proximity into a
refined threat index that orders downstream processing.  Pairing threats to
defended assets is a weighted stable matching: threats propose to the assets
capable of countering them, assets accept up to their engagement headroom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .catalog import Catalog
from .config import SimConfig
from .geometry import DAFootprint, Point2, earliest_poi
from .matching import MatchInstance, Matching, deferred_acceptance


class FireStatus(str, Enum):
    FREE_TO_FIRE = "free_to_fire"
    ON_HOLD = "on_hold"
    TIGHT = "tight"


@dataclass(frozen=True)
class Waypoint:
    time: float
    position: Point2
    altitude: float

    def __post_init__(self):
        if self.altitude < 0:
            raise ValueError(f"altitude must be non-negative, got {self.altitude}")


@dataclass
class ThreatTrack:
    """A moving target: scripted waypoints plus evolving evaluation state.

    Kinematic fields (position, velocity, speed, heading, altitude and its
    rate) are refreshed from the waypoints every tick; indices live in [0, 1].
    """

    id: str
    threat_type: str
    waypoints: list[Waypoint]
    initial_threat_index: float = 0.5
    position: Point2 = field(default_factory=lambda: Point2(0.0, 0.0))
    velocity: tuple[float, float] = (0.0, 0.0)
    speed: float = 0.0
    heading: tuple[float, float] = (1.0, 0.0)
    altitude: float = 0.0
    altitude_rate: float = 0.0
    intent_index: float = 0.0
    capability_index: float = 0.0
    refined_threat_index: float = 0.0
    alive: bool = True

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError(f"track {self.id} needs at least one waypoint")
        times = [w.time for w in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"track {self.id} waypoint times must be strictly increasing")
        if not 0.0 <= self.initial_threat_index <= 1.0:
            raise ValueError(f"initial_threat_index must be in [0,1]")
        self.position = self.waypoints[0].position
        self.altitude = self.waypoints[0].altitude
        self.refined_threat_index = self.initial_threat_index

    @property
    def first_time(self) -> float:
        return self.waypoints[0].time

    @property
    def last_time(self) -> float:
        return self.waypoints[-1].time


@dataclass
class DefendedAsset:
    """A circular protected zone owning a set of weapon systems."""

    id: str
    footprint: DAFootprint
    priority: float
    vulnerability_index: float
    status: FireStatus = FireStatus.FREE_TO_FIRE
    kill_capability: dict[str, float] = field(default_factory=dict)
    weapon_ids: list[str] = field(default_factory=list)
    assigned_threats: set[str] = field(default_factory=set)

    def __post_init__(self):
        for name in ("priority", "vulnerability_index"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")
        for tid, v in self.kill_capability.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"kill_capability[{tid}] must be in [0,1], got {v}")


@dataclass(frozen=True)
class KillProbabilityTerm:
    """Per-threat inputs of the asset kill-probability product.

    The three weights must sum to one; every other operand lives in [0, 1]
    except ``exponent``, a positive shaping power (default 1).
    """

    w_intent: float
    w_capability: float
    w_load: float
    intent: float
    capability: float
    load: float
    effectiveness: float
    exponent: float = 1.0

    def __post_init__(self):
        for n in ("w_intent", "w_capability", "w_load", "intent", "capability",
                  "load", "effectiveness"):
            v = getattr(self, n)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{n} must be in [0,1], got {v}")
        if abs(self.w_intent + self.w_capability + self.w_load - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if not self.exponent > 0.0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")


def da_kill_probability(terms: Sequence[KillProbabilityTerm]) -> float:
    """Asset-level kill probability over the threats bearing on it.

    Computed as the product over threats of
    ``1 - ((w_i*intent + w_c*capability + w_l*load) * effectiveness)^exponent``.
    Note the product-of-complements shape: each additional threat can only
    lower the value.  See :func:`da_kill_probability_complement` for ``1 -``
    this quantity.
    """
    result = 1.0
    for term in terms:
        inner = (term.w_intent * term.intent
                 + term.w_capability * term.capability
                 + term.w_load * term.load) * term.effectiveness
        result *= 1.0 - inner ** term.exponent
    return result


def da_kill_probability_complement(terms: Sequence[KillProbabilityTerm]) -> float:
    """One minus :func:`da_kill_probability`."""
    return 1.0 - da_kill_probability(terms)


def _speed_in_envelope(speed: float, lo: float, hi: float) -> float:
    if hi > lo:
        return min(1.0, max(0.0, (speed - lo) / (hi - lo)))
    return 1.0 if speed >= hi else 0.0


def compute_capability_index(track: ThreatTrack, catalog: Catalog,
                             cfg: SimConfig) -> float:
    """What the track could do: type capability blended with how hard it is
    flying relative to its type's speed envelope."""
    tt = catalog.resolve_threat_type(track.threat_type)
    w = cfg.capability
    return w.base * tt.base_capability + w.speed * _speed_in_envelope(
        track.speed, tt.speed_min, tt.speed_max)


def _closing_norm(time_to_da: Optional[float], ref: float) -> float:
    if time_to_da is None:
        return 0.0
    return ref / (ref + time_to_da)


def _alignment(track: ThreatTrack, da: DefendedAsset) -> float:
    to_center = (da.footprint.center.x - track.position.x,
                 da.footprint.center.y - track.position.y)
    norm = math.hypot(*to_center)
    if norm == 0.0:
        return 1.0
    cos = (track.heading[0] * to_center[0] + track.heading[1] * to_center[1]) / norm
    return 0.5 * (1.0 + max(-1.0, min(1.0, cos)))


def time_to_asset(track: ThreatTrack, da: DefendedAsset) -> Optional[float]:
    """Travel time to the earliest forward footprint intersection, if any."""
    if track.speed <= 0.0:
        return None
    hit = earliest_poi(track.position, track.heading, track.speed, da.footprint)
    return None if hit is None else hit.time_to_da


def compute_intent_index(track: ThreatTrack, da: DefendedAsset,
                         cfg: SimConfig) -> float:
    """What the track appears to be doing about this asset.

    Blends heading alignment toward the asset center, closing urgency (an
    inverse-time normalizer of the time to the earliest forward footprint
    intersection) and descent rate.  A track whose extended path misses the
    footprint scores half its alignment term only.  Decreasing the time to
    the asset, all else equal, never decreases the result.
    """
    w = cfg.intent
    align = _alignment(track, da)
    tda = time_to_asset(track, da)
    if tda is None:
        return 0.5 * align
    closing = _closing_norm(tda, w.closing_time_ref)
    descent = min(1.0, max(0.0, -track.altitude_rate) / w.descent_rate_ref)
    return w.alignment * align + w.closing * closing + w.descent * descent


def refine_threat_index(track: ThreatTrack, da: DefendedAsset,
                        cfg: SimConfig) -> float:
    """Opportunity (intent + capability) sharpened by proximity.

    Strictly monotone in the intent, capability and closing terms; the
    result replaces the initial threat index for downstream ordering.
    """
    kp = cfg.kill_probability
    opportunity = (kp.intent * track.intent_index
                   + kp.capability * track.capability_index) / (kp.intent + kp.capability)
    proximity = _closing_norm(time_to_asset(track, da), cfg.da_pair.closing_time_ref)
    w = cfg.refine
    return w.opportunity * opportunity + w.proximity * proximity


class Mode(str, Enum):
    SUBTRACTIVE = "subtractive"
    PREFERENTIAL = "preferential"


def da_pair_weight(track: ThreatTrack, da: DefendedAsset, capacity: int,
                   cfg: SimConfig, mode: Mode = Mode.SUBTRACTIVE) -> Optional[float]:
    """Score of pairing a threat with a defended asset, or None if forbidden.

    A pairing is forbidden when the asset's kill capability against the
    track's type is below the minimum-capability threshold (no proposal is
    ever sent for it).  Otherwise the score is a weighted sum of kill
    capability, closing urgency, asset priority and remaining headroom; in
    preferential mode the priority weight is boosted so high-value assets
    are served first.
    """
    kc = da.kill_capability.get(track.threat_type, 0.0)
    if kc <= 0.0 or kc < cfg.thresholds.min_capability:
        return None
    w = cfg.da_pair
    closing = _closing_norm(time_to_asset(track, da), w.closing_time_ref)
    headroom = 1.0 - min(1.0, len(da.assigned_threats) / capacity) if capacity > 0 else 0.0
    priority_weight = w.priority
    if mode is Mode.PREFERENTIAL:
        priority_weight *= cfg.mode.priority_boost
    return (w.kill_capability * kc + w.closing * closing
            + priority_weight * da.priority + w.load * headroom)


@dataclass(frozen=True)
class TeResult:
    """Outcome of one threat-to-asset assignment round."""

    assignment: dict[str, str]
    unmatched: tuple[str, ...]
    instance: MatchInstance
    matching: Matching


def asset_capacity(da: DefendedAsset, weapons: Mapping[str, "object"],
                   mode: Mode, cfg: SimConfig) -> int:
    """Concurrent-threat headroom of an asset: two slots (one locked, one
    queued) per operational weapon, rationed by priority in preferential
    mode."""
    operational = sum(1 for wid in da.weapon_ids
                      if wid in weapons and weapons[wid].condition == "up")
    cap = 2 * operational
    if cap and mode is Mode.PREFERENTIAL:
        cap = max(1, math.ceil(cap * da.priority))
    return cap


def te_assign(threats: Sequence[ThreatTrack], das: Sequence[DefendedAsset],
              weapons: Mapping[str, "object"], cfg: SimConfig,
              mode: Mode = Mode.SUBTRACTIVE) -> TeResult:
    """Pair each threat with a defended asset by weighted stable matching.

    Proposers are the given (alive, unassigned) threats in descending
    refined-threat order; acceptors are free-to-fire assets with spare
    headroom.  Pairs below the kill-capability gate are forbidden.  Threats
    with no allowed asset end up unmatched and should be flagged as leak
    risks by the caller.
    """
    proposers = tuple(t.id for t in sorted(
        threats, key=lambda t: (-t.refined_threat_index, t.id)))
    track_by_id = {t.id: t for t in threats}

    acceptors = []
    capacities: dict[str, int] = {}
    full_capacity: dict[str, int] = {}
    da_by_id: dict[str, DefendedAsset] = {}
    for da in sorted(das, key=lambda d: d.id):
        if da.status is not FireStatus.FREE_TO_FIRE:
            continue
        cap = asset_capacity(da, weapons, mode, cfg)
        remaining = cap - len(da.assigned_threats)
        if remaining < 1:
            continue
        acceptors.append(da.id)
        capacities[da.id] = remaining
        full_capacity[da.id] = cap
        da_by_id[da.id] = da

    weights: dict[tuple[str, str], float] = {}
    for tid in proposers:
        track = track_by_id[tid]
        for aid in acceptors:
            w = da_pair_weight(track, da_by_id[aid], full_capacity[aid], cfg, mode)
            if w is not None:
                weights[(tid, aid)] = w

    instance = MatchInstance(proposers, tuple(acceptors), weights, capacities)
    matching = deferred_acceptance(instance)
    assignment = {p: a for p, a in sorted(matching.pairs)}
    unmatched = tuple(sorted(matching.unmatched))
    return TeResult(assignment, unmatched, instance, matching)
