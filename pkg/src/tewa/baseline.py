"""Target-by-target greedy scheduling, for comparison.

The greedy policy processes threats in detection order and hands each one to
the single highest-scoring weapon that currently has a free slot, across all
assets.  No asset pairing, no proposals, no eviction, no global view: the
first pick can consume the only weapon able to cover a later threat.  The
hard scheduling limits (two per weapon, one lock per threat) still hold.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Mapping, Sequence

from .catalog import Catalog
from .config import SimConfig
from .threat_eval import DefendedAsset, ThreatTrack
from .weapon_assign import (AssignmentState, EngagementPlan, WaResult,
                            WeaponSystem, _candidate_plans, _no_emit,
                            ws_pair_weight)


def greedy_assign(threats_ordered: Sequence[ThreatTrack],
                  das: Mapping[str, DefendedAsset],
                  weapons: Mapping[str, WeaponSystem],
                  catalog: Catalog, state: AssignmentState, cfg: SimConfig,
                  emit=_no_emit) -> WaResult:
    """Assign each threat to its best currently-free weapon, first come
    first served.  ``threats_ordered`` is detection order."""
    plans: dict[str, EngagementPlan] = {}
    unassigned: list[str] = []
    for track in threats_ordered:
        best: EngagementPlan | None = None
        for da in sorted(das.values(), key=lambda d: d.id):
            for _, ws, plan in _candidate_plans(track, da, weapons, catalog, cfg):
                scored = replace(plan, pair_weight=ws_pair_weight(plan, ws, cfg))
                if best is None or (-scored.pair_weight, scored.ws_id) < (-best.pair_weight, best.ws_id):
                    best = scored
        if best is None:
            unassigned.append(track.id)
            continue
        ws = weapons[best.ws_id]
        if ws.locked_target is None:
            ws.locked_target = track.id
            state.locked.add((ws.id, track.id))
            emit("LOCK", src=ws.id, dst=track.id)
        else:
            ws.queued_target = track.id
            state.queued.add((ws.id, track.id))
            emit("QUEUE", src=ws.id, dst=track.id)
        plans[track.id] = best
    return WaResult(plans, tuple(unassigned))
