"""Stage two: weapon selection and scheduling for asset-paired threats.

For each threat, in descending refined-threat order, the stage builds the
set of weapons of its paired asset that can actually reach it, forms a
temporary engagement plan per candidate (sector crossing window, lead
solution, elevation), scores the plans, and sends proposals best-first.
A weapon locks the threat if its lock slot is free, enqueues it if only the
queue is free, and rejects otherwise.  The hard scheduling rules are: at
most two threats scheduled per weapon (one locked, one queued), and every
locked threat locked by exactly one weapon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .catalog import Catalog
from .config import SimConfig
from .geometry import (Point2, WSSector, euclidean_distance, lead_and_launch,
                       required_elevation, sector_entry_exit)
from .threat_eval import DefendedAsset, FireStatus, Mode, ThreatTrack

__all__ = [
    "Condition", "Mode", "WeaponSystem", "EngagementPlan", "AssignmentState",
    "select_mode", "candidate_ws_set", "build_engagement_plan",
    "ws_pair_weight", "wa_assign",
]


class Condition(str, Enum):
    UP = "up"
    DOWN = "down"
    DESTROYED = "destroyed"


@dataclass
class WeaponSystem:
    """A firing unit: sector of fire, weapon-type performance numbers and a
    one-locked-one-queued target schedule."""

    id: str
    da_id: str
    position: Point2
    sector: WSSector
    weapon_type: str
    lethality_index: float
    rof: float
    stabilization_time: float
    condition: Condition = Condition.UP
    status: FireStatus = FireStatus.FREE_TO_FIRE
    locked_target: Optional[str] = None
    queued_target: Optional[str] = None
    load: float = 0.0
    lock_time: Optional[float] = None
    last_fire_time: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.lethality_index <= 1.0:
            raise ValueError(f"lethality_index must be in [0,1], got {self.lethality_index}")
        if not 0.0 <= self.load <= 1.0:
            raise ValueError(f"load must be in [0,1], got {self.load}")
        if self.rof <= 0 or self.stabilization_time <= 0:
            raise ValueError("rof and stabilization_time must be positive")

    @property
    def scheduled_targets(self) -> tuple[str, ...]:
        return tuple(t for t in (self.locked_target, self.queued_target) if t is not None)

    @property
    def scheduled_count(self) -> int:
        return len(self.scheduled_targets)

    def check(self) -> None:
        if self.locked_target is not None and self.locked_target == self.queued_target:
            raise AssertionError(f"{self.id}: same target locked and queued")
        if self.condition is not Condition.UP and self.scheduled_count:
            raise AssertionError(f"{self.id}: non-operational weapon holds targets")


@dataclass(frozen=True)
class EngagementPlan:
    """Geometry and score of one (threat, weapon) temporary pairing."""

    threat_id: str
    ws_id: str
    entry: Point2
    exit: Point2
    entry_time: float
    exit_time: float
    tof: float
    required_elevation: float
    launch_point: Point2
    pair_weight: float = 0.0


@dataclass
class AssignmentState:
    """The scheduling matrices: proposals issued, locks and queue slots held.

    Kept as sets of (weapon id, threat id) pairs; ``scheduled`` is the union
    of ``locked`` and ``queued``.  ``verify`` asserts the hard rules against
    the live weapon fields after every decision cycle.
    """

    proposals: set[tuple[str, str]] = field(default_factory=set)
    locked: set[tuple[str, str]] = field(default_factory=set)
    queued: set[tuple[str, str]] = field(default_factory=set)

    @property
    def scheduled(self) -> set[tuple[str, str]]:
        return self.locked | self.queued

    def verify(self, weapons: Mapping[str, WeaponSystem]) -> None:
        per_ws: dict[str, int] = {}
        for wid, _ in self.scheduled:
            per_ws[wid] = per_ws.get(wid, 0) + 1
        for wid, n in per_ws.items():
            if n > 2:
                raise AssertionError(f"{wid}: {n} threats scheduled, limit is 2")
        locks_per_threat: dict[str, int] = {}
        for _, tid in self.locked:
            locks_per_threat[tid] = locks_per_threat.get(tid, 0) + 1
        for tid, n in locks_per_threat.items():
            if n != 1:
                raise AssertionError(f"threat {tid} locked by {n} weapons")
        expect_locked = {(w.id, w.locked_target) for w in weapons.values()
                         if w.locked_target is not None}
        expect_queued = {(w.id, w.queued_target) for w in weapons.values()
                         if w.queued_target is not None}
        if expect_locked != self.locked or expect_queued != self.queued:
            raise AssertionError("assignment matrices out of sync with weapon slots")
        for w in weapons.values():
            w.check()


def select_mode(total_threats: int, total_lock_capacity: int) -> Mode:
    """Defense strategy for this cycle.

    Subtractive while the threat count does not exceed the total lock
    capacity (one lock per operational weapon), including the boundary case;
    preferential beyond it.
    """
    if total_threats < 0 or total_lock_capacity < 0:
        raise ValueError("counts must be non-negative")
    if total_threats <= total_lock_capacity:
        return Mode.SUBTRACTIVE
    return Mode.PREFERENTIAL


def _predicted_altitude(track: ThreatTrack, dt: float) -> float:
    return max(0.0, track.altitude + track.altitude_rate * dt)


def build_engagement_plan(track: ThreatTrack, ws: WeaponSystem,
                          catalog: Catalog) -> Optional[EngagementPlan]:
    """Full engagement geometry for a temporary (threat, weapon) pairing.

    Requires a positive-length crossing of the weapon sector ahead of the
    track and a feasible elevation at the entry point.  The launch solution
    is the lead-pursuit intercept of the current kinematics; when it does
    not exist yet (the intercept is still outside the sector) the plan
    falls back to meeting the threat at its sector entry point.
    """
    if track.speed <= 0.0:
        return None
    crossing = sector_entry_exit(track.position, track.heading, track.speed, ws.sector)
    if crossing is None:
        return None
    horizontal = euclidean_distance(crossing.entry, ws.position)
    if horizontal <= 0.0:
        return None
    elev = required_elevation(horizontal, _predicted_altitude(track, crossing.entry_time))
    if elev > ws.sector.max_elevation:
        return None
    projectile_speed = catalog.weapon_types[ws.weapon_type].projectile_speed
    lead = lead_and_launch(track.position, track.velocity, ws.sector, projectile_speed)
    if lead is None:
        lead_point = crossing.entry
        tof = euclidean_distance(crossing.entry, ws.position) / projectile_speed
    else:
        lead_point, tof = lead.launch_point, lead.tof
    return EngagementPlan(
        threat_id=track.id,
        ws_id=ws.id,
        entry=crossing.entry,
        exit=crossing.exit,
        entry_time=crossing.entry_time,
        exit_time=crossing.exit_time,
        tof=tof,
        required_elevation=elev,
        launch_point=lead_point,
    )


def _candidate_plans(track: ThreatTrack, da: DefendedAsset,
                     weapons: Mapping[str, WeaponSystem], catalog: Catalog,
                     cfg: SimConfig) -> list[tuple[float, WeaponSystem, EngagementPlan]]:
    ttype = catalog.resolve_threat_type(track.threat_type).id
    out: list[tuple[float, WeaponSystem, EngagementPlan]] = []
    for wid in sorted(da.weapon_ids):
        ws = weapons.get(wid)
        if ws is None or ws.condition is not Condition.UP:
            continue
        if ws.status is not FireStatus.FREE_TO_FIRE:
            continue
        if ws.scheduled_count >= 2:
            continue
        eff = catalog.effectiveness(ws.weapon_type, ttype)
        if eff < cfg.thresholds.min_capability:
            continue
        plan = build_engagement_plan(track, ws, catalog)
        if plan is None:
            continue
        out.append((eff, ws, plan))
    return out


def candidate_ws_set(track: ThreatTrack, da: DefendedAsset,
                     weapons: Mapping[str, WeaponSystem], catalog: Catalog,
                     cfg: SimConfig) -> list[WeaponSystem]:
    """Weapons of an asset that could take this threat right now.

    Gates: weapon type effective enough against the track's type, condition
    up, free to fire, fewer than two scheduled threats, a forward crossing of
    the sector, and feasible elevation.  Ordered by effectiveness descending
    then weapon id; an empty result is a leak risk for the caller to flag.
    """
    entries = _candidate_plans(track, da, weapons, catalog, cfg)
    entries.sort(key=lambda e: (-e[0], e[1].id))
    return [ws for _, ws, _ in entries]


def ws_pair_weight(plan: EngagementPlan, ws: WeaponSystem, cfg: SimConfig) -> float:
    """Score of a temporary pairing over five fuzzy terms: closing urgency,
    elevation margin, lethality, stabilization quickness and rate of fire."""
    w = cfg.ws_pair
    closing = w.closing_time_ref / (w.closing_time_ref + max(0.0, plan.entry_time))
    elevation = 1.0 - plan.required_elevation / ws.sector.max_elevation
    stab = w.stabilization_ref / (w.stabilization_ref + ws.stabilization_time)
    rof = ws.rof / (ws.rof + w.rate_of_fire_ref)
    return (w.closing * closing + w.elevation * elevation
            + w.lethality * ws.lethality_index + w.stabilization * stab
            + w.rate_of_fire * rof)


EmitFn = Callable[..., None]


def _no_emit(*args, **kwargs) -> None:
    pass


@dataclass(frozen=True)
class WaResult:
    plans: dict[str, EngagementPlan]
    unassigned: tuple[str, ...]


def wa_assign(threats_ordered: Sequence[ThreatTrack],
              assignment: Mapping[str, str],
              das: Mapping[str, DefendedAsset],
              weapons: Mapping[str, WeaponSystem],
              catalog: Catalog, state: AssignmentState, cfg: SimConfig,
              emit: EmitFn = _no_emit) -> WaResult:
    """Schedule asset-paired threats onto weapons by best-first proposals.

    ``threats_ordered`` must already be sorted by descending refined threat
    index.  For each threat, candidate weapons of its paired asset are
    planned and scored, then proposals go out best-first: an empty lock slot
    locks the threat, an empty queue slot enqueues it, otherwise the proposal
    is rejected and the next pairing is tried.  Threats rejected everywhere
    are reported unassigned.  Scheduling invariants are asserted, never
    silently violated.
    """
    plans: dict[str, EngagementPlan] = {}
    unassigned: list[str] = []
    for track in threats_ordered:
        da_id = assignment.get(track.id)
        if da_id is None:
            unassigned.append(track.id)
            continue
        da = das[da_id]
        scored = [replace(plan, pair_weight=ws_pair_weight(plan, ws, cfg))
                  for _, ws, plan in _candidate_plans(track, da, weapons, catalog, cfg)]
        scored.sort(key=lambda p: (-p.pair_weight, p.ws_id))
        placed = False
        for plan in scored:
            ws = weapons[plan.ws_id]
            state.proposals.add((ws.id, track.id))
            emit("PROPOSE", src=track.id, dst=ws.id, weight=plan.pair_weight)
            if ws.locked_target is None:
                ws.locked_target = track.id
                state.locked.add((ws.id, track.id))
                emit("ACCEPT", src=ws.id, dst=track.id)
                emit("LOCK", src=ws.id, dst=track.id)
                plans[track.id] = plan
                placed = True
                break
            if ws.queued_target is None:
                ws.queued_target = track.id
                state.queued.add((ws.id, track.id))
                emit("ACCEPT", src=ws.id, dst=track.id)
                emit("QUEUE", src=ws.id, dst=track.id)
                plans[track.id] = plan
                placed = True
                break
            emit("REJECT", src=ws.id, dst=track.id)
        if not placed:
            unassigned.append(track.id)
    return WaResult(plans, tuple(unassigned))
