from __future__ import annotations

import math
from itertools import product
from pathlib import Path

import pytest

from tewa import kernels
from tewa.catalog import Catalog, load_catalogs
from tewa.config import SimConfig
from tewa.geometry import DAFootprint, Point2, WSSector
from tewa.matching import MatchInstance, Matching
from tewa.threat_eval import DefendedAsset, ThreatTrack, Waypoint
from tewa.weapon_assign import WeaponSystem

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # keep JIT compilation out of any timed assertion
    kernels.warmup()


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS


def rotate(p: tuple[float, float], angle: float) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


# ---------------------------------------------------------------------------
# Independent matching oracles (kept free of tewa.matching internals).

def independent_blocking_pairs(instance: MatchInstance,
                               pairs: set[tuple[str, str]]) -> list[tuple[str, str]]:
    """Blocking pairs under the same preference order as the implementation,
    computed from scratch."""

    def p_key(p, a):
        return (-instance.weights[(p, a)], a)

    def a_key(p, a):
        return (-instance.weights[(p, a)], p)

    match_of = {p: a for p, a in pairs}
    held: dict[str, list[str]] = {a: [] for a in instance.acceptors}
    for p, a in pairs:
        held[a].append(p)
    blocking = []
    for (p, a) in instance.weights:
        if p in match_of and p_key(p, a) >= p_key(p, match_of[p]):
            continue
        if len(held[a]) < instance.capacities[a]:
            blocking.append((p, a))
            continue
        worst = max(held[a], key=lambda q: a_key(q, a))
        if a_key(p, a) < a_key(worst, a):
            blocking.append((p, a))
    return sorted(blocking)


def enumerate_feasible_matchings(instance: MatchInstance):
    """Every capacity-respecting assignment of proposers to allowed acceptors
    (or to nothing), as sets of pairs."""
    options = []
    for p in instance.proposers:
        allowed = [a for a in instance.acceptors if (p, a) in instance.weights]
        options.append([None] + allowed)
    for combo in product(*options):
        load: dict[str, int] = {}
        ok = True
        for a in combo:
            if a is None:
                continue
            load[a] = load.get(a, 0) + 1
            if load[a] > instance.capacities[a]:
                ok = False
                break
        if ok:
            yield {(p, a) for p, a in zip(instance.proposers, combo) if a is not None}


def enumerate_stable_matchings(instance: MatchInstance) -> list[frozenset]:
    return [frozenset(pairs) for pairs in enumerate_feasible_matchings(instance)
            if not independent_blocking_pairs(instance, pairs)]


# ---------------------------------------------------------------------------
# Geometry sampling oracle.

def sample_sector_window(origin: Point2, heading: tuple[float, float], speed: float,
                         sector: WSSector, ray_length: float, step_frac: float = 1e-3):
    """Dense forward-ray sampling of sector membership; returns the first and
    last inside sample times, or None."""
    n = int(1.0 / step_frac)
    first = last = None
    for i in range(n + 1):
        t = ray_length * i * step_frac
        p = Point2(origin.x + t * heading[0], origin.y + t * heading[1])
        if sector.contains(p):
            if first is None:
                first = t
            last = t
    if first is None:
        return None
    return first / speed, last / speed


# ---------------------------------------------------------------------------
# Small entity builders for stage-level unit tests.

def make_catalog(correlations: dict[tuple[str, str], float],
                 weapon_overrides: dict[str, dict] | None = None,
                 threat_overrides: dict[str, dict] | None = None) -> Catalog:
    weapon_ids = sorted({w for w, _ in correlations})
    threat_ids = sorted({t for _, t in correlations})
    wo = weapon_overrides or {}
    to = threat_overrides or {}
    doc = {
        "threat_types": [
            {"id": t, "base_capability": 0.8, "speed_min": 50.0, "speed_max": 300.0,
             **to.get(t, {})}
            for t in threat_ids
        ],
        "weapon_types": [
            {"id": w, "lethality_index": 0.9, "projectile_speed": 800.0, "rof": 1.0,
             "stabilization_time": 1.0, **wo.get(w, {})}
            for w in weapon_ids
        ],
        "correlation": [
            {"weapon": w, "threat": t, "effectiveness": c}
            for (w, t), c in sorted(correlations.items())
        ],
    }
    _, _, catalog = load_catalogs(doc)
    return catalog


def make_track(tid: str, pos: tuple[float, float], velocity: tuple[float, float],
               threat_type: str = "jet", alt: float = 300.0,
               alt_rate: float = 0.0, refined: float = 0.5) -> ThreatTrack:
    speed = math.hypot(*velocity)
    track = ThreatTrack(
        id=tid, threat_type=threat_type,
        waypoints=[Waypoint(0.0, Point2(*pos), alt)],
        initial_threat_index=refined)
    track.position = Point2(*pos)
    track.velocity = velocity
    track.speed = speed
    if speed > 0:
        track.heading = (velocity[0] / speed, velocity[1] / speed)
    track.altitude = alt
    track.altitude_rate = alt_rate
    track.refined_threat_index = refined
    return track


def make_da(did: str, center: tuple[float, float], radius: float = 300.0,
            priority: float = 0.8, kill_capability: dict[str, float] | None = None,
            weapon_ids: list[str] | None = None, **kwargs) -> DefendedAsset:
    return DefendedAsset(
        id=did, footprint=DAFootprint(Point2(*center), radius), priority=priority,
        vulnerability_index=0.5, kill_capability=kill_capability or {"jet": 0.8},
        weapon_ids=weapon_ids or [], **kwargs)


def make_ws(wid: str, da_id: str, pos: tuple[float, float],
            weapon_type: str = "sam", max_range: float = 5000.0,
            min_range: float = 10.0, sweep: float = 2 * math.pi,
            start: float = 0.0, max_elev: float = math.radians(85.0),
            **kwargs) -> WeaponSystem:
    return WeaponSystem(
        id=wid, da_id=da_id, position=Point2(*pos),
        sector=WSSector(Point2(*pos), min_range, max_range, start, sweep, max_elev),
        weapon_type=weapon_type, lethality_index=kwargs.pop("lethality_index", 0.9),
        rof=kwargs.pop("rof", 1.0),
        stabilization_time=kwargs.pop("stabilization_time", 1.0), **kwargs)
