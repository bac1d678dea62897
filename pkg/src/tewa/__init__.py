"""Two-stage threat evaluation and weapon assignment simulator.

A library and CLI that pairs air threats with defended assets by weighted
stable matching, schedules weapons under hard lock/queue constraints, and
replays whole engagements deterministically in a discrete-time engine, with
a target-by-target greedy policy for comparison.
"""

from .catalog import Catalog, CatalogError, ThreatType, WeaponType, load_catalogs, preference_list
from .config import SimConfig
from .engine import Outcome, Scenario, SimReport, Simulation, run, step_kinematics
from .events import Event, format_event
from .geometry import (DAFootprint, IntersectionSolution, Point2, ThreatLine,
                       WSSector, circle_line_intersections, earliest_poi,
                       euclidean_distance, lead_and_launch, required_elevation,
                       sector_entry_exit, time_to_point)
from .matching import MatchInstance, Matching, deferred_acceptance, is_stable
from .scenario import (PROFILES, Diagnostic, ScenarioError, generate_document,
                       load_scenario, validate_document)
from .threat_eval import (DefendedAsset, FireStatus, KillProbabilityTerm, Mode,
                          ThreatTrack, Waypoint, compute_capability_index,
                          compute_intent_index, da_kill_probability,
                          da_kill_probability_complement, da_pair_weight,
                          refine_threat_index, te_assign)
from .weapon_assign import (AssignmentState, Condition, EngagementPlan,
                            WeaponSystem, candidate_ws_set, select_mode,
                            wa_assign, ws_pair_weight)
from .baseline import greedy_assign

__version__ = "0.1.0"
