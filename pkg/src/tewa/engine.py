"""Deterministic discrete-time scenario engine.

The engine advances a scenario in fixed ticks.  Every tick runs one
observe-orient-decide-act cycle: refresh track kinematics and resolve
projectiles due to land, detect new tracks and catch leakers; recompute
threat indices and pick the defense mode; run the configured assignment
policy (two-stage by default, greedy for comparison); fire every weapon
whose lock has stabilized and whose launch window is open.  Shots resolve
stochastically at impact time from a seeded PCG64 generator, so a run is a
pure function of (scenario, seed) and identical runs produce byte-identical
event logs.

Shot outcomes follow a shoot-look-shoot discipline: a weapon keeps its lock
while a projectile is in flight, re-engages the same target after a miss,
and promotes its queued target (re-validating the geometry) after a kill.
"""

from __future__ import annotations

import bisect
import math
import time as _time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .baseline import greedy_assign
from .catalog import Catalog
from .config import SimConfig
from .events import Event, format_log
from .geometry import Point2, euclidean_distance, lead_and_launch, required_elevation
from .threat_eval import (DefendedAsset, FireStatus, Mode, ThreatTrack,
                          KillProbabilityTerm, compute_capability_index,
                          compute_intent_index, da_kill_probability,
                          refine_threat_index, te_assign)
from .weapon_assign import (AssignmentState, Condition, EngagementPlan,
                            WeaponSystem, build_engagement_plan, select_mode,
                            wa_assign)


class Outcome(str, Enum):
    DESTROYED = "destroyed"
    LEAKER = "leaker"
    ACTIVE = "active"


class ShotResult(str, Enum):
    KILL = "kill"
    MISS = "miss"


@dataclass
class Scenario:
    name: str
    config: SimConfig
    catalog: Catalog
    das: list[DefendedAsset]
    weapons: list[WeaponSystem]
    tracks: list[ThreatTrack]

    def validate(self) -> list[str]:
        """Object-level cross-reference checks; document-level validation
        lives in :mod:`tewa.scenario`."""
        problems = []
        da_ids = {d.id for d in self.das}
        for ws in self.weapons:
            if ws.da_id not in da_ids:
                problems.append(f"weapon {ws.id} references missing asset {ws.da_id}")
            if ws.weapon_type not in self.catalog.weapon_types:
                problems.append(f"weapon {ws.id} has unknown weapon type {ws.weapon_type}")
        for tr in self.tracks:
            if (tr.threat_type not in self.catalog.threat_types
                    and self.catalog.fallback_threat_type is None):
                problems.append(
                    f"track {tr.id} has unknown threat type {tr.threat_type} and the "
                    "catalog declares no fallback type")
        return problems


@dataclass
class SimReport:
    """Aggregated outcome of one run.

    ``cycle_wall_times`` are measurement, not simulation state: they are
    excluded from the serialized report so reports stay reproducible.
    """

    scenario: str
    seed: int
    policy: str
    outcomes: dict[str, Outcome]
    da_survival: dict[str, float]
    shots_fired: int
    mode_timeline: list[tuple[float, str]]
    cycle_wall_times: list[float] = field(default_factory=list)
    ever_assigned: dict[str, bool] = field(default_factory=dict)
    ws_shots: dict[str, int] = field(default_factory=dict)

    @property
    def counts(self) -> dict[str, int]:
        c = {o.value: 0 for o in Outcome}
        for o in self.outcomes.values():
            c[o.value] += 1
        return c

    @property
    def idle_weapons(self) -> list[str]:
        return sorted(wid for wid, n in self.ws_shots.items() if n == 0)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "scenario": self.scenario,
            "seed": self.seed,
            "policy": self.policy,
            "outcomes": {k: v.value for k, v in sorted(self.outcomes.items())},
            "da_survival": dict(sorted(self.da_survival.items())),
            "shots_fired": self.shots_fired,
            "mode_timeline": [[t, m] for t, m in self.mode_timeline],
            "ever_assigned": dict(sorted(self.ever_assigned.items())),
            "ws_shots": dict(sorted(self.ws_shots.items())),
            "idle_weapons": self.idle_weapons,
            "counts": self.counts,
        }
        if include_timing:
            d["cycle_wall_times"] = self.cycle_wall_times
        return d


def step_kinematics(track: ThreatTrack, t: float) -> ThreatTrack:
    """Refresh a track's kinematic state from its waypoints at time ``t``.

    Position and altitude interpolate linearly between the bracketing
    waypoints; velocity and the altitude rate are the segment's finite
    differences (velocity changes discontinuously at waypoints, taking the
    outgoing segment).  A single-waypoint track is stationary.

    Raises:
        ValueError: if ``t`` lies outside the waypoint span.
    """
    wps = track.waypoints
    if t < wps[0].time or t > wps[-1].time:
        raise ValueError(f"t={t} outside waypoint span [{wps[0].time}, {wps[-1].time}]")
    if len(wps) == 1:
        track.position = wps[0].position
        track.altitude = wps[0].altitude
        track.velocity = (0.0, 0.0)
        track.speed = 0.0
        track.altitude_rate = 0.0
        return track
    times = [w.time for w in wps]
    idx = min(max(bisect.bisect_right(times, t) - 1, 0), len(wps) - 2)
    a, b = wps[idx], wps[idx + 1]
    dt = b.time - a.time
    frac = (t - a.time) / dt
    track.position = Point2(a.position.x + frac * (b.position.x - a.position.x),
                            a.position.y + frac * (b.position.y - a.position.y))
    track.altitude = a.altitude + frac * (b.altitude - a.altitude)
    vx = (b.position.x - a.position.x) / dt
    vy = (b.position.y - a.position.y) / dt
    track.velocity = (vx, vy)
    track.speed = math.hypot(vx, vy)
    if track.speed > 0.0:
        track.heading = (vx / track.speed, vy / track.speed)
    track.altitude_rate = (b.altitude - a.altitude) / dt
    return track


def adjudicate_shot(plan: EngagementPlan, ws: WeaponSystem, threat: ThreatTrack,
                    catalog: Catalog, rng: np.random.Generator) -> ShotResult:
    """Bernoulli kill adjudication for one resolved shot.

    The per-shot kill probability is the weapon's lethality index times the
    catalog effectiveness of its weapon type against the threat's type.
    """
    ttype = catalog.resolve_threat_type(threat.threat_type).id
    p = ws.lethality_index * catalog.effectiveness(ws.weapon_type, ttype)
    return ShotResult.KILL if rng.random() < p else ShotResult.MISS


@dataclass
class PendingShot:
    impact_time: float
    ws_id: str
    threat_id: str
    plan: EngagementPlan


PolicyFn = Callable[["Simulation", float], None]


def two_stage_policy(sim: "Simulation", t: float) -> None:
    """Threat evaluation pairing followed by constrained weapon scheduling."""
    cfg = sim.scenario.config
    engaged = {tid for ws in sim.weapons.values() for tid in ws.scheduled_targets}
    pool = [tr for tr in sim._active_tracks() if tr.id not in engaged]

    # keep pairings of engaged threats, re-solve everyone else
    for tid in list(sim.te_pairs):
        if tid not in engaged:
            del sim.te_pairs[tid]
    for da in sim.das.values():
        da.assigned_threats = {tid for tid, did in sim.te_pairs.items() if did == da.id}

    previous_pairs = dict(sim._te_pairs_prev)
    result = te_assign(pool, list(sim.das.values()), sim.weapons, cfg, sim.mode)
    for tid, did in sorted(result.assignment.items()):
        sim.te_pairs[tid] = did
        sim.das[did].assigned_threats.add(tid)
        sim.ever_assigned.add(tid)
        if previous_pairs.get(tid) != did:
            sim.emit("ACCEPT", src=did, dst=tid, stage="te")
    sim._te_pairs_prev = dict(sim.te_pairs)

    unmatched = set(result.unmatched)
    for tid in sorted(unmatched - sim._unmatched_prev):
        sim.emit("LEAK", src=tid, dst="-", reason="unmatched", stage="te")
    sim._unmatched_prev = unmatched

    for tid, did in sim.te_pairs.items():
        tr = sim.tracks[tid]
        tr.refined_threat_index = refine_threat_index(tr, sim.das[did], cfg)

    ordered = sorted((sim.tracks[tid] for tid in sim.te_pairs if tid not in engaged),
                     key=lambda tr: (-tr.refined_threat_index, tr.id))
    wa = wa_assign(ordered, sim.te_pairs, sim.das, sim.weapons, sim.catalog,
                   sim.state, cfg, emit=sim.emit)
    for tid, plan in wa.plans.items():
        sim.plans[tid] = plan
        ws = sim.weapons[plan.ws_id]
        if ws.locked_target == tid:
            ws.lock_time = t
    for tid in sorted(set(wa.unassigned) - sim._wa_unassigned_prev):
        sim.emit("LEAK", src=tid, dst="-", reason="unassigned", stage="wa")
    sim._wa_unassigned_prev = set(wa.unassigned)


def greedy_policy(sim: "Simulation", t: float) -> None:
    """Detection-order greedy scheduling, no asset pairing stage."""
    engaged = {tid for ws in sim.weapons.values() for tid in ws.scheduled_targets}
    pool = sorted((tr for tr in sim._active_tracks() if tr.id not in engaged),
                  key=lambda tr: (sim.detect_time[tr.id], tr.id))
    res = greedy_assign(pool, sim.das, sim.weapons, sim.catalog, sim.state,
                        sim.scenario.config, emit=sim.emit)
    for tid, plan in res.plans.items():
        sim.plans[tid] = plan
        ws = sim.weapons[plan.ws_id]
        if ws.locked_target == tid:
            ws.lock_time = t


POLICIES: dict[str, PolicyFn] = {
    "two-stage": two_stage_policy,
    "greedy": greedy_policy,
}


class Simulation:
    """One deterministic run of a scenario under a policy.

    A ``Simulation`` owns its scenario objects and mutates them; build a
    fresh one (e.g. via :func:`tewa.scenario.load_scenario`) per run.
    """

    def __init__(self, scenario: Scenario, policy: str | PolicyFn = "two-stage",
                 seed: Optional[int] = None, horizon: Optional[float] = None,
                 on_cycle: Optional[Callable[["Simulation", float], None]] = None):
        problems = scenario.validate()
        if problems:
            raise ValueError("invalid scenario: " + "; ".join(problems))
        kernels.warmup()
        self.scenario = scenario
        self.catalog = scenario.catalog
        self.policy_name = policy if isinstance(policy, str) else getattr(policy, "__name__", "custom")
        self.policy = POLICIES[policy] if isinstance(policy, str) else policy
        self.seed = scenario.config.seed if seed is None else seed
        self.horizon = scenario.config.horizon if horizon is None else horizon
        self.rng = np.random.Generator(np.random.PCG64(self.seed))
        self.on_cycle = on_cycle

        self.tracks = {tr.id: tr for tr in sorted(scenario.tracks, key=lambda x: x.id)}
        self.das = {da.id: da for da in sorted(scenario.das, key=lambda x: x.id)}
        self.weapons = {ws.id: ws for ws in sorted(scenario.weapons, key=lambda x: x.id)}

        self.t = 0.0
        self.events: list[Event] = []
        self.state = AssignmentState()
        self.pending_shots: list[PendingShot] = []
        self.plans: dict[str, EngagementPlan] = {}
        self.te_pairs: dict[str, str] = {}
        self.mode: Mode = Mode.SUBTRACTIVE
        self.mode_timeline: list[tuple[float, str]] = []
        self.outcomes: dict[str, Outcome] = {}
        self.detected: set[str] = set()
        self.detect_time: dict[str, float] = {}
        self.ever_assigned: set[str] = set()
        self.breaches: dict[str, int] = {da_id: 0 for da_id in self.das}
        self.shots_fired = 0
        self.ws_shots: dict[str, int] = {wid: 0 for wid in self.weapons}
        self.da_kill_prob: dict[str, float] = {}
        self.cycle_wall_times: list[float] = []
        self._unmatched_prev: set[str] = set()
        self._wa_unassigned_prev: set[str] = set()
        self._te_pairs_prev: dict[str, str] = {}
        self._mode_emitted = False

    # -- event plumbing ----------------------------------------------------

    def emit(self, kind: str, src: str, dst: str = "-", **data) -> None:
        self.events.append(Event(self.t, kind, src, dst, data))

    # -- track bookkeeping -------------------------------------------------

    def _present(self, tr: ThreatTrack, t: float) -> bool:
        return tr.first_time <= t <= tr.last_time

    def _active_tracks(self) -> list[ThreatTrack]:
        """Detected, unresolved tracks currently inside their waypoint span."""
        return [tr for tr in self.tracks.values()
                if tr.id in self.detected and tr.id not in self.outcomes
                and self._present(tr, self.t)]

    def _resolve(self, tid: str, outcome: Outcome) -> None:
        self.outcomes[tid] = outcome
        self.tracks[tid].alive = False
        self.te_pairs.pop(tid, None)
        self.plans.pop(tid, None)
        for da in self.das.values():
            da.assigned_threats.discard(tid)
        self.pending_shots = [s for s in self.pending_shots if s.threat_id != tid]
        for ws in self.weapons.values():
            if ws.locked_target == tid:
                ws.locked_target = None
                ws.lock_time = None
                self.state.locked.discard((ws.id, tid))
                self._promote(ws)
            if ws.queued_target == tid:
                ws.queued_target = None
                self.state.queued.discard((ws.id, tid))

    def _promote(self, ws: WeaponSystem) -> None:
        """Move the queued target into the freed lock slot, re-validating the
        engagement geometry first."""
        tid = ws.queued_target
        if tid is None:
            return
        ws.queued_target = None
        self.state.queued.discard((ws.id, tid))
        tr = self.tracks[tid]
        plan = build_engagement_plan(tr, ws, self.catalog)
        if plan is None or tid in self.outcomes:
            self.emit("REJECT", src=ws.id, dst=tid, stage="promote")
            return
        ws.locked_target = tid
        ws.lock_time = self.t
        self.state.locked.add((ws.id, tid))
        self.plans[tid] = plan
        self.emit("PROMOTE", src=ws.id, dst=tid)

    # -- cycle phases --------------------------------------------------------

    def _observe(self, t: float) -> None:
        for tr in self.tracks.values():
            if tr.id in self.outcomes:
                continue
            if self._present(tr, t):
                step_kinematics(tr, t)
            elif t > tr.last_time:
                # ran out of waypoints: the track leaves the simulated area
                self._resolve(tr.id, Outcome.LEAKER)
                self.emit("LEAK", src=tr.id, dst="-", reason="exit")
        self._resolve_impacts(t)
        trigger = self.scenario.config.thresholds.initial_threat_trigger
        for tr in self.tracks.values():
            if (tr.id not in self.detected and tr.id not in self.outcomes
                    and self._present(tr, t)
                    and tr.initial_threat_index >= trigger):
                self.detected.add(tr.id)
                self.detect_time[tr.id] = t
                self.emit("DETECT", src=tr.id, dst="-",
                          threat_type=tr.threat_type, index=tr.initial_threat_index)
        for tr in self._active_tracks():
            for da_id, da in self.das.items():
                if da.footprint.contains(tr.position):
                    self.breaches[da_id] += 1
                    self._resolve(tr.id, Outcome.LEAKER)
                    self.emit("LEAK", src=tr.id, dst=da_id, reason="breach")
                    break

    def _resolve_impacts(self, t: float) -> None:
        due = sorted((s for s in self.pending_shots if s.impact_time <= t),
                     key=lambda s: (s.impact_time, s.ws_id))
        if not due:
            return
        self.pending_shots = [s for s in self.pending_shots if s.impact_time > t]
        for shot in due:
            if shot.threat_id in self.outcomes:
                continue
            ws = self.weapons[shot.ws_id]
            tr = self.tracks[shot.threat_id]
            result = adjudicate_shot(shot.plan, ws, tr, self.catalog, self.rng)
            if result is ShotResult.KILL:
                self.emit("KILL", src=ws.id, dst=tr.id)
                self._resolve(tr.id, Outcome.DESTROYED)
            else:
                self.emit("MISS", src=ws.id, dst=tr.id)

    def _orient(self, t: float) -> None:
        cfg = self.scenario.config
        active = self._active_tracks()
        free_das = [da for da in self.das.values()
                    if da.status is FireStatus.FREE_TO_FIRE]
        for tr in active:
            tr.capability_index = compute_capability_index(tr, self.catalog, cfg)
            best_intent = 0.0
            for da in free_das:
                best_intent = max(best_intent, compute_intent_index(tr, da, cfg))
            tr.intent_index = best_intent
        lock_capacity = sum(1 for ws in self.weapons.values()
                            if ws.condition is Condition.UP)
        mode = select_mode(len(active), lock_capacity)
        if active and (mode is not self.mode or not self._mode_emitted):
            self.mode = mode
            self._mode_emitted = True
            self.mode_timeline.append((t, mode.value))
            self.emit("MODE", src="engine", dst="-", mode=mode.value)
        self._evaluate_da_kill_prob(active, cfg)

    def _evaluate_da_kill_prob(self, active: list[ThreatTrack], cfg: SimConfig) -> None:
        kp = cfg.kill_probability
        for da_id, da in self.das.items():
            up_ws = [self.weapons[wid] for wid in da.weapon_ids
                     if wid in self.weapons and self.weapons[wid].condition is Condition.UP]
            terms = []
            for tid in sorted(da.assigned_threats):
                tr = self.tracks.get(tid)
                if tr is None or tid in self.outcomes:
                    continue
                ttype = self.catalog.resolve_threat_type(tr.threat_type).id
                eff = max((self.catalog.effectiveness(w.weapon_type, ttype)
                           for w in up_ws), default=0.0)
                load = (sum(w.load for w in up_ws) / len(up_ws)) if up_ws else 0.0
                terms.append(KillProbabilityTerm(
                    w_intent=kp.intent, w_capability=kp.capability, w_load=kp.load,
                    intent=compute_intent_index(tr, da, cfg),
                    capability=tr.capability_index, load=load,
                    effectiveness=eff, exponent=kp.exponent))
            self.da_kill_prob[da_id] = da_kill_probability(terms)

    def _act(self, t: float) -> None:
        in_flight = {s.ws_id for s in self.pending_shots}
        for ws_id in sorted(self.weapons):
            ws = self.weapons[ws_id]
            if (ws.condition is not Condition.UP or ws.locked_target is None
                    or ws_id in in_flight):
                continue
            if ws.lock_time is None or t - ws.lock_time < ws.stabilization_time:
                continue
            if ws.last_fire_time is not None and t - ws.last_fire_time < 1.0 / ws.rof:
                continue
            tr = self.tracks[ws.locked_target]
            projectile_speed = self.catalog.weapon_types[ws.weapon_type].projectile_speed
            lead = lead_and_launch(tr.position, tr.velocity, ws.sector, projectile_speed)
            if lead is None:
                continue
            horizontal = euclidean_distance(lead.launch_point, ws.position)
            if horizontal <= 0.0:
                continue
            alt = max(0.0, tr.altitude + tr.altitude_rate * lead.tof)
            if required_elevation(horizontal, alt) > ws.sector.max_elevation:
                continue
            plan = self.plans.get(tr.id)
            if plan is None:
                continue
            self.shots_fired += 1
            self.ws_shots[ws_id] += 1
            ws.last_fire_time = t
            self.emit("FIRE", src=ws.id, dst=tr.id, tof=lead.tof,
                      x=lead.launch_point.x, y=lead.launch_point.y)
            self.pending_shots.append(PendingShot(t + lead.tof, ws.id, tr.id, plan))

    def decision_cycle(self, t: float) -> None:
        """One observe-orient-decide-act pass; asserts the scheduling
        invariants on exit."""
        started = _time.perf_counter()
        self.t = t
        self._observe(t)
        self._orient(t)
        self.policy(self, t)
        self._act(t)
        self.state.verify(self.weapons)
        self.cycle_wall_times.append(_time.perf_counter() - started)
        if self.on_cycle is not None:
            self.on_cycle(self, t)

    def run(self) -> SimReport:
        """Iterate decision cycles until the horizon or all tracks resolve."""
        cfg = self.scenario.config
        n_steps = int(round(self.horizon / cfg.tick))
        for k in range(n_steps + 1):
            t = k * cfg.tick
            self.decision_cycle(t)
            if len(self.outcomes) == len(self.tracks):
                break
        for tid in self.tracks:
            self.outcomes.setdefault(tid, Outcome.ACTIVE)
        return self._report()

    def _report(self) -> SimReport:
        survival = {}
        for da_id, da in self.das.items():
            value = da.priority
            for _ in range(self.breaches[da_id]):
                value *= 1.0 - da.vulnerability_index
            survival[da_id] = value
        return SimReport(
            scenario=self.scenario.name,
            seed=self.seed,
            policy=self.policy_name,
            outcomes=dict(self.outcomes),
            da_survival=survival,
            shots_fired=self.shots_fired,
            mode_timeline=list(self.mode_timeline),
            cycle_wall_times=list(self.cycle_wall_times),
            ever_assigned={tid: tid in self.ever_assigned for tid in self.tracks},
            ws_shots=dict(self.ws_shots),
        )

    def event_log(self) -> str:
        return format_log(self.events)


def run(scenario: Scenario, policy: str | PolicyFn = "two-stage",
        seed: Optional[int] = None, horizon: Optional[float] = None) -> tuple[SimReport, str]:
    """Run a scenario and return its report and formatted event log."""
    sim = Simulation(scenario, policy=policy, seed=seed, horizon=horizon)
    report = sim.run()
    return report, sim.event_log()
