"""Threat and weapon type libraries and their effectiveness correlation.

The correlation table is the two-way link between the libraries: one
effectiveness value in [0, 1] for every (weapon type, threat type) pair.  It
seeds the weapon preference lists and the per-engagement kill probability.
A catalog may flag one threat type as the fallback for unidentified tracks;
the flag is opt-in so that minimal catalogs stay minimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import yaml


class CatalogError(ValueError):
    """A catalog document failed validation.

    Carries one ``(path, message)`` diagnostic per problem, where ``path``
    points into the offending entry of the source document.
    """

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{p}: {m}" for p, m in diagnostics))


def _in_unit(v) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v) and 0.0 <= v <= 1.0


@dataclass(frozen=True)
class ThreatType:
    id: str
    name: str
    base_capability: float
    speed_min: float
    speed_max: float
    unknown: bool = False

    def __post_init__(self):
        if not _in_unit(self.base_capability):
            raise ValueError(f"base_capability must be in [0,1], got {self.base_capability}")
        if not 0.0 <= self.speed_min <= self.speed_max:
            raise ValueError(
                f"speed envelope must satisfy 0 <= min <= max, got ({self.speed_min}, {self.speed_max})")


@dataclass(frozen=True)
class WeaponType:
    id: str
    name: str
    lethality_index: float
    projectile_speed: float
    rof: float
    stabilization_time: float

    def __post_init__(self):
        if not _in_unit(self.lethality_index):
            raise ValueError(f"lethality_index must be in [0,1], got {self.lethality_index}")
        for fname in ("projectile_speed", "rof", "stabilization_time"):
            v = getattr(self, fname)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{fname} must be positive, got {v}")


@dataclass(frozen=True)
class Catalog:
    """Validated, immutable libraries plus the full correlation table."""

    threat_types: dict[str, ThreatType]
    weapon_types: dict[str, WeaponType]
    correlation: dict[tuple[str, str], float]
    fallback_threat_type: Optional[str] = None

    def effectiveness(self, weapon_type: str, threat_type: str) -> float:
        return self.correlation[(weapon_type, threat_type)]

    def resolve_threat_type(self, type_id: str) -> ThreatType:
        """Look up a threat type, falling back to the unknown-type row."""
        tt = self.threat_types.get(type_id)
        if tt is not None:
            return tt
        if self.fallback_threat_type is not None:
            return self.threat_types[self.fallback_threat_type]
        raise KeyError(f"unknown threat type {type_id!r} and no fallback type in catalog")


def preference_list(threat_type: str, table: Catalog, min_capability: float) -> list[str]:
    """Weapon types able to counter a threat type, most effective first.

    Filters to effectiveness >= ``min_capability`` and sorts by effectiveness
    descending with ties broken by weapon id; an empty list is a valid result.
    """
    resolved = table.resolve_threat_type(threat_type).id
    rows = [(wid, table.correlation[(wid, resolved)]) for wid in table.weapon_types]
    eligible = [(wid, c) for wid, c in rows if c >= min_capability]
    eligible.sort(key=lambda wc: (-wc[1], wc[0]))
    return [wid for wid, _ in eligible]


def _require(entry, key, path, errors, types=None):
    if not isinstance(entry, Mapping) or key not in entry:
        errors.append((path, f"missing required field {key!r}"))
        return None
    v = entry[key]
    if types is not None and not isinstance(v, types):
        errors.append((f"{path}.{key}", f"expected {types}, got {type(v).__name__}"))
        return None
    return v


def load_catalogs(source) -> tuple[dict[str, ThreatType], dict[str, WeaponType], Catalog]:
    """Parse and validate a catalog document.

    ``source`` may be a parsed mapping, a YAML string, or a path to a YAML
    file with sections ``threat_types``, ``weapon_types`` and ``correlation``.
    Every (weapon, threat) pair must have a correlation entry.  Returns the
    two libraries and the combined :class:`Catalog` (which also holds them).

    Raises:
        CatalogError: with one diagnostic per schema violation, out-of-range
            value or missing correlation pair.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith((".yaml", ".yml"))):
        source = Path(source).read_text()
    if isinstance(source, str):
        source = yaml.safe_load(source)
    if not isinstance(source, Mapping):
        raise CatalogError([("", "catalog document must be a mapping")])

    errors: list[tuple[str, str]] = []
    threat_types: dict[str, ThreatType] = {}
    weapon_types: dict[str, WeaponType] = {}
    fallback: Optional[str] = None

    for i, entry in enumerate(source.get("threat_types") or []):
        path = f"threat_types[{i}]"
        tid = _require(entry, "id", path, errors, str)
        if tid is None:
            continue
        if tid in threat_types:
            errors.append((path, f"duplicate threat type id {tid!r}"))
            continue
        try:
            tt = ThreatType(
                id=tid,
                name=entry.get("name", tid),
                base_capability=entry.get("base_capability", 0.5),
                speed_min=entry.get("speed_min", 0.0),
                speed_max=entry.get("speed_max", 0.0),
                unknown=bool(entry.get("unknown", False)),
            )
        except (ValueError, TypeError) as exc:
            errors.append((path, str(exc)))
            continue
        threat_types[tid] = tt
        if tt.unknown:
            if fallback is not None:
                errors.append((path, "more than one threat type flagged unknown"))
            else:
                fallback = tid
    if not threat_types:
        errors.append(("threat_types", "at least one threat type is required"))

    for i, entry in enumerate(source.get("weapon_types") or []):
        path = f"weapon_types[{i}]"
        wid = _require(entry, "id", path, errors, str)
        if wid is None:
            continue
        if wid in weapon_types:
            errors.append((path, f"duplicate weapon type id {wid!r}"))
            continue
        try:
            weapon_types[wid] = WeaponType(
                id=wid,
                name=entry.get("name", wid),
                lethality_index=entry.get("lethality_index", 0.5),
                projectile_speed=entry.get("projectile_speed", 0.0),
                rof=entry.get("rof", 0.0),
                stabilization_time=entry.get("stabilization_time", 0.0),
            )
        except (ValueError, TypeError) as exc:
            errors.append((path, str(exc)))
    if not weapon_types:
        errors.append(("weapon_types", "at least one weapon type is required"))

    correlation: dict[tuple[str, str], float] = {}
    for i, entry in enumerate(source.get("correlation") or []):
        path = f"correlation[{i}]"
        wid = _require(entry, "weapon", path, errors, str)
        tid = _require(entry, "threat", path, errors, str)
        eff = _require(entry, "effectiveness", path, errors, (int, float))
        if wid is None or tid is None or eff is None:
            continue
        if wid not in weapon_types:
            errors.append((f"{path}.weapon", f"unknown weapon type {wid!r}"))
            continue
        if tid not in threat_types:
            errors.append((f"{path}.threat", f"unknown threat type {tid!r}"))
            continue
        if not _in_unit(eff):
            errors.append((f"{path}.effectiveness", f"must be in [0,1], got {eff}"))
            continue
        if (wid, tid) in correlation:
            errors.append((path, f"duplicate correlation entry for ({wid}, {tid})"))
            continue
        correlation[(wid, tid)] = float(eff)

    for wid in weapon_types:
        for tid in threat_types:
            if (wid, tid) not in correlation:
                errors.append(("correlation", f"missing entry for pair ({wid}, {tid})"))

    if errors:
        raise CatalogError(errors)
    cat = Catalog(threat_types, weapon_types, correlation, fallback)
    return threat_types, weapon_types, cat


def serialize_catalogs(catalog: Catalog) -> dict:
    """Document form of a catalog; ``load_catalogs`` round-trips it."""
    return {
        "threat_types": [
            {
                "id": t.id,
                "name": t.name,
                "base_capability": t.base_capability,
                "speed_min": t.speed_min,
                "speed_max": t.speed_max,
                **({"unknown": True} if t.unknown else {}),
            }
            for t in catalog.threat_types.values()
        ],
        "weapon_types": [
            {
                "id": w.id,
                "name": w.name,
                "lethality_index": w.lethality_index,
                "projectile_speed": w.projectile_speed,
                "rof": w.rof,
                "stabilization_time": w.stabilization_time,
            }
            for w in catalog.weapon_types.values()
        ],
        "correlation": [
            {"weapon": wid, "threat": tid, "effectiveness": eff}
            for (wid, tid), eff in sorted(catalog.correlation.items())
        ],
    }
