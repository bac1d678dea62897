"""Scenario documents: a whole battlefield in one human-readable YAML file.

A document carries the catalogs, the defended assets with their weapon
systems, the threat tracks (as timed waypoints) and optional configuration
overrides.  ``validate_document`` returns a full list of diagnostics, each
with a path into the document; ``load_scenario`` builds live objects only
from documents that validate.  ``generate_document`` produces seeded
scenarios for the four stock profiles.

Angles are degrees in documents and radians in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import yaml

from .catalog import Catalog, CatalogError, load_catalogs
from .config import SimConfig, config_from_doc, config_to_doc
from .engine import Scenario
from .geometry import DAFootprint, Point2, WSSector
from .threat_eval import DefendedAsset, FireStatus, ThreatTrack, Waypoint
from .weapon_assign import Condition, WeaponSystem

PROFILES = ("relaxed", "stress", "starvation", "overutilization")


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class ScenarioError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


def _num(entry, key, path, errors, lo=None, hi=None, default=None, positive=False):
    v = entry.get(key, default)
    if v is None:
        errors.append(Diagnostic(f"{path}.{key}", "missing required field"))
        return None
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        errors.append(Diagnostic(f"{path}.{key}", f"expected a finite number, got {v!r}"))
        return None
    if positive and v <= 0:
        errors.append(Diagnostic(f"{path}.{key}", f"must be positive, got {v}"))
        return None
    if lo is not None and v < lo or hi is not None and v > hi:
        errors.append(Diagnostic(f"{path}.{key}", f"must be in [{lo}, {hi}], got {v}"))
        return None
    return float(v)


def _point(entry, key, path, errors) -> Optional[Point2]:
    v = entry.get(key)
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(c, (int, float)) and math.isfinite(c) for c in v)):
        errors.append(Diagnostic(f"{path}.{key}", f"expected [x, y], got {v!r}"))
        return None
    return Point2(float(v[0]), float(v[1]))


def _enum(entry, key, path, errors, enum_cls, default):
    raw = entry.get(key, default)
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        errors.append(Diagnostic(f"{path}.{key}", f"expected one of {allowed}, got {raw!r}"))
        return None


def _parse_document(source) -> dict:
    if isinstance(source, Mapping):
        return dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    doc = yaml.safe_load(text)
    if not isinstance(doc, Mapping):
        raise ScenarioError([Diagnostic("", "scenario document must be a mapping")])
    return dict(doc)


def validate_document(source) -> list[Diagnostic]:
    """Validate a scenario document; returns all diagnostics (empty = valid)."""
    try:
        doc = _parse_document(source)
    except ScenarioError as exc:
        return exc.diagnostics
    except yaml.YAMLError as exc:
        return [Diagnostic("", f"not parseable as YAML: {exc}")]
    errors: list[Diagnostic] = []
    try:
        _build(doc, errors)
    except ScenarioError:
        pass
    return errors


def load_scenario(source) -> Scenario:
    """Parse, validate and build a scenario.

    Raises:
        ScenarioError: carrying every diagnostic when the document is invalid.
    """
    doc = _parse_document(source)
    errors: list[Diagnostic] = []
    scenario = _build(doc, errors)
    if errors or scenario is None:
        raise ScenarioError(errors)
    return scenario


def _build(doc: dict, errors: list[Diagnostic]) -> Optional[Scenario]:
    name = doc.get("name", "scenario")

    try:
        cfg = config_from_doc(doc.get("config"))
    except (ValueError, TypeError) as exc:
        errors.append(Diagnostic("config", str(exc)))
        cfg = SimConfig()

    catalog: Optional[Catalog] = None
    cat_doc = doc.get("catalogs")
    if not isinstance(cat_doc, Mapping):
        errors.append(Diagnostic("catalogs", "missing or not a mapping"))
    else:
        try:
            _, _, catalog = load_catalogs(cat_doc)
        except CatalogError as exc:
            errors.extend(Diagnostic(f"catalogs.{p}" if p else "catalogs", m)
                          for p, m in exc.diagnostics)
    if catalog is None:
        return None

    das: list[DefendedAsset] = []
    da_ids: set[str] = set()
    for i, entry in enumerate(doc.get("defended_assets") or []):
        path = f"defended_assets[{i}]"
        if not isinstance(entry, Mapping) or "id" not in entry:
            errors.append(Diagnostic(path, "missing required field 'id'"))
            continue
        did = str(entry["id"])
        if did in da_ids:
            errors.append(Diagnostic(path, f"duplicate asset id {did!r}"))
            continue
        da_ids.add(did)
        center = _point(entry, "center", path, errors)
        radius = _num(entry, "radius", path, errors, positive=True)
        priority = _num(entry, "priority", path, errors, lo=0, hi=1)
        vuln = _num(entry, "vulnerability_index", path, errors, lo=0, hi=1)
        status = _enum(entry, "status", path, errors, FireStatus, "free_to_fire")
        kc_doc = entry.get("kill_capability") or {}
        kc: dict[str, float] = {}
        for tid, v in kc_doc.items():
            if tid not in catalog.threat_types:
                errors.append(Diagnostic(f"{path}.kill_capability.{tid}",
                                         f"unknown threat type {tid!r}"))
            elif not isinstance(v, (int, float)) or not 0 <= v <= 1:
                errors.append(Diagnostic(f"{path}.kill_capability.{tid}",
                                         f"must be in [0, 1], got {v!r}"))
            else:
                kc[tid] = float(v)
        if None in (center, radius, priority, vuln, status):
            continue
        das.append(DefendedAsset(
            id=did, footprint=DAFootprint(center, radius), priority=priority,
            vulnerability_index=vuln, status=status, kill_capability=kc))
    da_by_id = {d.id: d for d in das}

    weapons: list[WeaponSystem] = []
    ws_ids: set[str] = set()
    for i, entry in enumerate(doc.get("weapon_systems") or []):
        path = f"weapon_systems[{i}]"
        if not isinstance(entry, Mapping) or "id" not in entry:
            errors.append(Diagnostic(path, "missing required field 'id'"))
            continue
        wid = str(entry["id"])
        if wid in ws_ids:
            errors.append(Diagnostic(path, f"duplicate weapon id {wid!r}"))
            continue
        ws_ids.add(wid)
        da_id = entry.get("da")
        if da_id not in da_by_id:
            errors.append(Diagnostic(f"{path}.da", f"unknown defended asset {da_id!r}"))
            continue
        wtype = entry.get("weapon_type")
        if wtype not in catalog.weapon_types:
            errors.append(Diagnostic(f"{path}.weapon_type", f"unknown weapon type {wtype!r}"))
            continue
        position = _point(entry, "position", path, errors)
        min_range = _num(entry, "min_range", path, errors, positive=True)
        max_range = _num(entry, "max_range", path, errors, positive=True)
        start = _num(entry, "start_angle_deg", path, errors, default=0.0)
        sweep = _num(entry, "sweep_angle_deg", path, errors, default=360.0)
        elev = _num(entry, "max_elevation_deg", path, errors, default=85.0)
        condition = _enum(entry, "condition", path, errors, Condition, "up")
        status = _enum(entry, "status", path, errors, FireStatus, "free_to_fire")
        load = _num(entry, "load", path, errors, lo=0, hi=1, default=0.0)
        if None in (position, min_range, max_range, start, sweep, elev,
                    condition, status, load):
            continue
        if not min_range < max_range:
            errors.append(Diagnostic(f"{path}.min_range",
                                     f"min_range {min_range} must be below max_range {max_range}"))
            continue
        if not 0 < sweep <= 360:
            errors.append(Diagnostic(f"{path}.sweep_angle_deg",
                                     f"must be in (0, 360], got {sweep}"))
            continue
        if not 0 < elev <= 90:
            errors.append(Diagnostic(f"{path}.max_elevation_deg",
                                     f"must be in (0, 90], got {elev}"))
            continue
        wt = catalog.weapon_types[wtype]
        sector = WSSector(position, min_range, max_range,
                          math.radians(start), math.radians(sweep), math.radians(elev))
        weapons.append(WeaponSystem(
            id=wid, da_id=da_id, position=position, sector=sector, weapon_type=wtype,
            lethality_index=wt.lethality_index, rof=wt.rof,
            stabilization_time=wt.stabilization_time,
            condition=condition, status=status, load=load))
        da_by_id[da_id].weapon_ids.append(wid)

    tracks: list[ThreatTrack] = []
    tr_ids: set[str] = set()
    for i, entry in enumerate(doc.get("tracks") or []):
        path = f"tracks[{i}]"
        if not isinstance(entry, Mapping) or "id" not in entry:
            errors.append(Diagnostic(path, "missing required field 'id'"))
            continue
        tid = str(entry["id"])
        if tid in tr_ids:
            errors.append(Diagnostic(path, f"duplicate track id {tid!r}"))
            continue
        tr_ids.add(tid)
        ttype = entry.get("threat_type")
        if ttype not in catalog.threat_types and catalog.fallback_threat_type is None:
            errors.append(Diagnostic(
                f"{path}.threat_type",
                f"unknown threat type {ttype!r} and the catalog has no fallback"))
            continue
        index = _num(entry, "initial_threat_index", path, errors, lo=0, hi=1, default=0.5)
        wps_doc = entry.get("waypoints")
        if not isinstance(wps_doc, list) or not wps_doc:
            errors.append(Diagnostic(f"{path}.waypoints", "at least one waypoint required"))
            continue
        waypoints: list[Waypoint] = []
        ok = True
        for j, w in enumerate(wps_doc):
            wpath = f"{path}.waypoints[{j}]"
            t = _num(w, "t", wpath, errors, default=None)
            pos = _point(w, "pos", wpath, errors)
            alt = _num(w, "alt", wpath, errors, lo=0, default=0.0)
            if None in (t, pos, alt):
                ok = False
                continue
            waypoints.append(Waypoint(t, pos, alt))
        if not ok or index is None:
            continue
        times = [w.time for w in waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            errors.append(Diagnostic(f"{path}.waypoints", "times must be strictly increasing"))
            continue
        tracks.append(ThreatTrack(id=tid, threat_type=str(ttype), waypoints=waypoints,
                                  initial_threat_index=index))

    if errors:
        return None
    scenario = Scenario(name=str(name), config=cfg, catalog=catalog, das=das,
                        weapons=weapons, tracks=tracks)
    for problem in scenario.validate():
        errors.append(Diagnostic("", problem))
    if errors:
        return None
    return scenario


# ---------------------------------------------------------------------------
# Scenario generation

_THREAT_LIBRARY = [
    # id, base capability, speed envelope (m/s)
    ("ground_attack", 0.80, 80.0, 300.0),
    ("fighter", 0.90, 150.0, 600.0),
    ("helicopter", 0.60, 20.0, 90.0),
    ("interceptor", 0.85, 200.0, 700.0),
    ("reconnaissance", 0.40, 100.0, 250.0),
    ("trainer", 0.30, 60.0, 180.0),
    ("transport", 0.35, 80.0, 220.0),
]

_WEAPON_LIBRARY = [
    # id, lethality, projectile speed, rof, stabilization
    ("cannon", 0.75, 1100.0, 10.0, 2.0),
    ("rocket", 0.80, 700.0, 0.5, 1.5),
    ("ground_missile", 0.95, 900.0, 0.5, 1.0),
    ("smart_bomb", 0.90, 400.0, 0.2, 4.0),
    ("free_fall_bomb", 0.70, 300.0, 0.2, 4.0),
    ("low_level_attack_bomb", 0.80, 350.0, 0.3, 3.0),
]

_CORRELATION = {
    "cannon": {"ground_attack": 0.70, "fighter": 0.55, "helicopter": 0.90,
               "interceptor": 0.30, "reconnaissance": 0.60, "trainer": 0.80,
               "transport": 0.75},
    "rocket": {"ground_attack": 0.75, "fighter": 0.60, "helicopter": 0.85,
               "interceptor": 0.45, "reconnaissance": 0.65, "trainer": 0.70,
               "transport": 0.70},
    "ground_missile": {"ground_attack": 0.90, "fighter": 0.85, "helicopter": 0.70,
                       "interceptor": 0.80, "reconnaissance": 0.80, "trainer": 0.75,
                       "transport": 0.85},
    "smart_bomb": {"ground_attack": 0.60, "fighter": 0.30, "helicopter": 0.50,
                   "interceptor": 0.20, "reconnaissance": 0.55, "trainer": 0.60,
                   "transport": 0.65},
    "free_fall_bomb": {"ground_attack": 0.40, "fighter": 0.15, "helicopter": 0.45,
                       "interceptor": 0.10, "reconnaissance": 0.50, "trainer": 0.55,
                       "transport": 0.60},
    "low_level_attack_bomb": {"ground_attack": 0.55, "fighter": 0.25, "helicopter": 0.60,
                              "interceptor": 0.15, "reconnaissance": 0.50, "trainer": 0.60,
                              "transport": 0.65},
}

# types used for generated deployments and raids
_DEPLOYABLE_WEAPONS = ("ground_missile", "cannon", "rocket")
_RAID_TYPES = ("ground_attack", "fighter", "helicopter", "transport")


def base_catalog_doc(extra_threat_types: list[dict] | None = None) -> dict:
    """The stock seven-threat / six-weapon catalog document."""
    threat_types = [
        {"id": tid, "name": tid.replace("_", " "), "base_capability": cap,
         "speed_min": lo, "speed_max": hi}
        for tid, cap, lo, hi in _THREAT_LIBRARY
    ]
    extra = list(extra_threat_types or [])
    correlation = []
    for wid, _, _, _, _ in _WEAPON_LIBRARY:
        for tid, _, _, _ in _THREAT_LIBRARY:
            correlation.append({"weapon": wid, "threat": tid,
                                "effectiveness": _CORRELATION[wid][tid]})
        for t in extra:
            correlation.append({"weapon": wid, "threat": t["id"],
                                "effectiveness": t.get("_effectiveness", 0.0)})
    extra_clean = [{k: v for k, v in t.items() if not k.startswith("_")} for t in extra]
    return {
        "threat_types": threat_types + extra_clean,
        "weapon_types": [
            {"id": wid, "name": wid.replace("_", " "), "lethality_index": leth,
             "projectile_speed": speed, "rof": rof, "stabilization_time": stab}
            for wid, leth, speed, rof, stab in _WEAPON_LIBRARY
        ],
        "correlation": correlation,
    }


def _ring_positions(n: int, radius: float) -> list[tuple[float, float]]:
    return [(round(radius * math.cos(2 * math.pi * k / n), 1),
             round(radius * math.sin(2 * math.pi * k / n), 1))
            for k in range(n)]


def generate_document(profile: str, seed: int) -> dict:
    """Deterministically generate a scenario document for a stock profile.

    Shapes: relaxed K=5 threats / I=10 assets / J=10 weapons; stress K=50 /
    I=10 / J=10; starvation guarantees at least one threat no weapon can
    engage; overutilization floods K=20 threats onto J=3 weapons.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    rng = np.random.Generator(np.random.PCG64(seed))

    extra_types: list[dict] = []
    if profile == "relaxed":
        n_threats, n_das, horizon = 5, 10, 150.0
    elif profile == "stress":
        n_threats, n_das, horizon = 50, 10, 200.0
    elif profile == "overutilization":
        n_threats, n_das, horizon = 20, 3, 200.0
    else:  # starvation
        n_threats, n_das, horizon = 6, 2, 150.0
        extra_types = [{"id": "stealth_prototype", "name": "stealth prototype",
                        "base_capability": 0.9, "speed_min": 150.0,
                        "speed_max": 400.0, "_effectiveness": 0.0}]

    catalog = base_catalog_doc(extra_types)

    das = []
    weapons = []
    ring = _ring_positions(n_das, 3000.0) if n_das > 1 else [(0.0, 0.0)]
    for k in range(n_das):
        da_id = f"da{k:02d}"
        priority = round(float(rng.uniform(0.4, 1.0)), 3)
        kill_capability = {
            tid: round(float(rng.uniform(0.55, 0.95)), 3) for tid, _, _, _ in _THREAT_LIBRARY
        }
        for t in extra_types:
            kill_capability[t["id"]] = 0.0
        das.append({
            "id": da_id,
            "center": list(ring[k]),
            "radius": 400.0,
            "priority": priority,
            "vulnerability_index": round(float(rng.uniform(0.2, 0.8)), 3),
            "status": "free_to_fire",
            "kill_capability": kill_capability,
        })
        wtype = _DEPLOYABLE_WEAPONS[int(rng.integers(len(_DEPLOYABLE_WEAPONS)))]
        if profile == "starvation":
            sweep, start = 90.0, round(float(rng.uniform(0.0, 360.0)), 1)
        else:
            sweep, start = 360.0, 0.0
        weapons.append({
            "id": f"ws{k:02d}",
            "da": da_id,
            "position": list(ring[k]),
            "weapon_type": wtype,
            "min_range": 50.0,
            "max_range": 9000.0,
            "start_angle_deg": start,
            "sweep_angle_deg": sweep,
            "max_elevation_deg": 85.0,
            "condition": "up",
            "status": "free_to_fire",
            "load": round(float(rng.uniform(0.1, 0.9)), 3),
        })

    tracks = []
    for k in range(n_threats):
        if profile == "starvation" and k == 0:
            ttype = "stealth_prototype"
            lo, hi = 150.0, 400.0
        else:
            ttype = _RAID_TYPES[int(rng.integers(len(_RAID_TYPES)))]
            lo, hi = next((l, h) for tid, _, l, h in _THREAT_LIBRARY if tid == ttype)
        speed = float(rng.uniform(lo + 0.25 * (hi - lo), hi))
        # stagger arrival by spawn distance so raids resolve in waves
        spawn_r = 10000.0 + 250.0 * k + float(rng.uniform(0.0, 200.0))
        angle = float(rng.uniform(0.0, 2.0 * math.pi))
        target = das[int(rng.integers(len(das)))]
        cx, cy = target["center"]
        sx = cx + spawn_r * math.cos(angle)
        sy = cy + spawn_r * math.sin(angle)
        # fly through the asset center and 4 km beyond
        ux, uy = (cx - sx) / spawn_r, (cy - sy) / spawn_r
        ex, ey = cx + 4000.0 * ux, cy + 4000.0 * uy
        t1 = spawn_r / speed
        t2 = t1 + 4000.0 / speed
        alt0 = float(rng.uniform(800.0, 2500.0))
        tracks.append({
            "id": f"t{k:02d}",
            "threat_type": ttype,
            "initial_threat_index": round(float(rng.uniform(0.4, 0.9)), 3),
            "waypoints": [
                {"t": 0.0, "pos": [round(sx, 1), round(sy, 1)], "alt": round(alt0, 1)},
                {"t": round(t1, 2), "pos": [round(cx, 1), round(cy, 1)], "alt": 150.0},
                {"t": round(t2, 2), "pos": [round(ex, 1), round(ey, 1)], "alt": 150.0},
            ],
        })

    return {
        "name": f"{profile}-{seed}",
        "config": {"tick": 0.1, "horizon": horizon, "seed": int(seed)},
        "catalogs": catalog,
        "defended_assets": das,
        "weapon_systems": weapons,
        "tracks": tracks,
    }


def document_to_yaml(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=100)
