from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tewa.config import SimConfig, DaPairWeights
from tewa.matching import Matching
from tewa.matching import is_stable
from tewa.threat_eval import (FireStatus, KillProbabilityTerm, Mode,
                              compute_capability_index, compute_intent_index,
                              da_kill_probability, da_kill_probability_complement,
                              da_pair_weight, refine_threat_index, te_assign)

from conftest import make_catalog, make_da, make_track, make_ws

CFG = SimConfig()


def track_head_on(distance: float, speed: float = 10.0, alt_rate: float = 0.0,
                  refined: float = 0.5, tid: str = "t"):
    """A track approaching the origin from the west, aimed at the center."""
    return make_track(tid, (-distance, 0.0), (speed, 0.0), alt_rate=alt_rate,
                      refined=refined)


class TestCapabilityIndex:
    def catalog_for(self, base, lo, hi):
        return make_catalog({("sam", "jet"): 0.9},
                            threat_overrides={"jet": {"base_capability": base,
                                                      "speed_min": lo, "speed_max": hi}})

    def test_saturated(self):
        cat = self.catalog_for(1.0, 100.0, 300.0)
        tr = make_track("t", (0, 0), (300.0, 0.0))
        assert compute_capability_index(tr, cat, CFG) == pytest.approx(1.0, rel=1e-12)

    def test_floor(self):
        cat = self.catalog_for(0.0, 100.0, 300.0)
        tr = make_track("t", (0, 0), (100.0, 0.0))
        assert compute_capability_index(tr, cat, CFG) == pytest.approx(0.0, abs=1e-12)

    def test_hand_case(self):
        # 0.7 * 0.6 + 0.3 * 0.5 = 0.57
        cat = self.catalog_for(0.6, 100.0, 300.0)
        tr = make_track("t", (0, 0), (200.0, 0.0))
        assert compute_capability_index(tr, cat, CFG) == pytest.approx(0.57, rel=1e-12)

    def test_unknown_type_uses_fallback_row(self):
        doc_cat = make_catalog({("sam", "jet"): 0.9, ("sam", "mystery"): 0.5},
                               threat_overrides={"mystery": {"unknown": True,
                                                             "base_capability": 0.5,
                                                             "speed_min": 0.0,
                                                             "speed_max": 700.0}})
        tr = make_track("t", (0, 0), (100.0, 0.0), threat_type="never_catalogued")
        got = compute_capability_index(tr, doc_cat, CFG)
        assert 0.0 <= got <= 1.0


class TestIntentIndex:
    def test_saturated(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        tr = track_head_on(300.0, alt_rate=-60.0)  # on the boundary, diving
        assert compute_intent_index(tr, da, CFG) == pytest.approx(1.0, rel=1e-9)

    def test_headed_directly_away(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        tr = make_track("t", (-400.0, 0.0), (-10.0, 0.0))
        assert compute_intent_index(tr, da, CFG) == 0.0

    def test_closer_arrival_ranks_higher(self):
        # same geometry except the time to the asset: 9 s vs 90 s
        da = make_da("da", (0.0, 0.0), radius=300.0)
        near = track_head_on(390.0)   # (390 - 300) / 10
        far = track_head_on(1200.0)   # (1200 - 300) / 10
        assert compute_intent_index(near, da, CFG) > compute_intent_index(far, da, CFG)

    def test_no_forward_poi_halves_alignment(self):
        # heading tangentially: aligned at 90 degrees, path misses the circle
        da = make_da("da", (0.0, 0.0), radius=100.0)
        tr = make_track("t", (-400.0, 0.0), (0.0, 10.0))
        expected = 0.5 * 0.5  # alignment is 1/2 for a perpendicular heading
        assert compute_intent_index(tr, da, CFG) == pytest.approx(expected, rel=1e-9)

    def test_monotone_in_time_to_asset(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(50):
            d1, d2 = sorted(rng.uniform(301.0, 5000.0, 2))
            ii_near = compute_intent_index(track_head_on(float(d1)), da, CFG)
            ii_far = compute_intent_index(track_head_on(float(d2)), da, CFG)
            assert ii_near >= ii_far


class TestDaKillProbability:
    def term(self, **kw):
        base = dict(w_intent=0.4, w_capability=0.4, w_load=0.2,
                    intent=0.5, capability=0.5, load=0.5, effectiveness=1.0)
        base.update(kw)
        return KillProbabilityTerm(**base)

    def test_zero_effectiveness_gives_one(self):
        assert da_kill_probability([self.term(effectiveness=0.0)]) == 1.0

    def test_single_threat_hand_case(self):
        # inner term (0.4*0.5 + 0.4*0.5 + 0.2*0.5) * 1 = 0.5 -> product 0.5
        assert da_kill_probability([self.term()]) == pytest.approx(0.5, abs=1e-12)

    def test_two_identical_threats(self):
        assert da_kill_probability([self.term(), self.term()]) == pytest.approx(0.25, abs=1e-12)

    def test_complement(self):
        assert da_kill_probability_complement([self.term()]) == pytest.approx(0.5, abs=1e-12)

    def test_empty_product_is_one(self):
        assert da_kill_probability([]) == 1.0

    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
                              st.floats(0, 1)), min_size=1, max_size=6))
    def test_bounded_and_monotone_in_threat_count(self, rows):
        terms = [self.term(intent=a, capability=b, load=c, effectiveness=d)
                 for a, b, c, d in rows]
        full = da_kill_probability(terms)
        assert 0.0 <= full <= 1.0
        # each additional factor can only lower the product
        assert full <= da_kill_probability(terms[:-1]) + 1e-15

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            self.term(w_intent=0.5)  # weights no longer sum to one
        with pytest.raises(ValueError):
            self.term(intent=1.5)
        with pytest.raises(ValueError):
            KillProbabilityTerm(0.4, 0.4, 0.2, 0.5, 0.5, 0.5, 1.0, exponent=0.0)


class TestDaPairWeight:
    def test_saturated(self):
        da = make_da("da", (0.0, 0.0), radius=300.0, priority=1.0,
                     kill_capability={"jet": 1.0})
        tr = track_head_on(300.0)  # on the boundary: closing term is 1
        got = da_pair_weight(tr, da, capacity=4, cfg=CFG)
        assert got == pytest.approx(1.0, rel=1e-12)

    def test_zero_kill_capability_forbids_pair(self):
        da = make_da("da", (0.0, 0.0), kill_capability={"jet": 0.0})
        assert da_pair_weight(track_head_on(500.0), da, 4, CFG) is None

    def test_below_threshold_forbids_pair(self):
        da = make_da("da", (0.0, 0.0), kill_capability={"jet": 0.03})
        assert da_pair_weight(track_head_on(500.0), da, 4, CFG) is None

    def test_hand_case(self):
        # terms: kc 0.8, closing 0.5 (time equals the 30 s reference),
        # priority 1.0, headroom 0.75 -> equal 0.25 weights give 0.7625
        da = make_da("da", (0.0, 0.0), radius=300.0, priority=1.0,
                     kill_capability={"jet": 0.8})
        da.assigned_threats.add("other")
        tr = track_head_on(600.0, speed=10.0)  # (600 - 300) / 10 = 30 s
        got = da_pair_weight(tr, da, capacity=4, cfg=CFG)
        assert got == pytest.approx(0.7625, rel=1e-12)

    def test_preferential_mode_boosts_priority(self):
        da = make_da("da", (0.0, 0.0), priority=0.5, kill_capability={"jet": 0.8})
        tr = track_head_on(600.0)
        sub = da_pair_weight(tr, da, 4, CFG, Mode.SUBTRACTIVE)
        pref = da_pair_weight(tr, da, 4, CFG, Mode.PREFERENTIAL)
        boost = CFG.mode.priority_boost
        assert pref == pytest.approx(sub + (boost - 1) * CFG.da_pair.priority * 0.5, rel=1e-9)


def build_te_fixture(n_threats, n_das, seed=0, status=FireStatus.FREE_TO_FIRE):
    rng = np.random.Generator(np.random.PCG64(seed))
    weapons = {}
    das = []
    for j in range(n_das):
        center = (float(rng.uniform(-2000, 2000)), float(rng.uniform(-2000, 2000)))
        wid = f"ws{j}"
        weapons[wid] = make_ws(wid, f"da{j}", center)
        das.append(make_da(f"da{j}", center, priority=float(rng.uniform(0.3, 1.0)),
                           kill_capability={"jet": float(rng.uniform(0.3, 1.0))},
                           weapon_ids=[wid], status=status))
    threats = []
    for i in range(n_threats):
        pos = (float(rng.uniform(-9000, 9000)), float(rng.uniform(-9000, 9000)))
        speed = float(rng.uniform(80, 250))
        angle = float(rng.uniform(0, 2 * math.pi))
        threats.append(make_track(f"t{i}", pos,
                                  (speed * math.cos(angle), speed * math.sin(angle)),
                                  refined=float(rng.uniform(0, 1))))
    return threats, das, weapons


class TestTeAssign:
    def test_single_pair(self):
        threats, das, weapons = build_te_fixture(1, 1, seed=4)
        got = te_assign(threats, das, weapons, CFG)
        assert got.assignment == {"t0": "da0"}
        assert not got.unmatched

    def test_status_gate(self):
        for status in (FireStatus.ON_HOLD, FireStatus.TIGHT):
            threats, das, weapons = build_te_fixture(1, 2, seed=4, status=status)
            got = te_assign(threats, das, weapons, CFG)
            assert got.assignment == {}
            assert got.unmatched == ("t0",)

    def test_five_threats_ten_assets_all_assigned_and_stable(self):
        threats, das, weapons = build_te_fixture(5, 10, seed=8)
        got = te_assign(threats, das, weapons, CFG)
        assert len(got.assignment) == 5
        assert not got.unmatched
        ok, blocking = is_stable(got.instance, got.matching)
        assert ok, blocking

    def test_never_pairs_with_non_free_asset(self):
        threats, das, weapons = build_te_fixture(6, 6, seed=9)
        das[0].status = FireStatus.ON_HOLD
        das[3].status = FireStatus.TIGHT
        got = te_assign(threats, das, weapons, CFG)
        assert all(did not in ("da0", "da3") for did in got.assignment.values())

    def test_scale_invariance(self):
        threats, das, weapons = build_te_fixture(6, 4, seed=10)
        base = te_assign(threats, das, weapons, CFG)
        scaled_cfg = SimConfig(da_pair=DaPairWeights(
            kill_capability=0.25 * 3.7, closing=0.25 * 3.7,
            priority=0.25 * 3.7, load=0.25 * 3.7))
        scaled = te_assign(threats, das, weapons, scaled_cfg)
        assert base.assignment == scaled.assignment

    def test_capacity_respected(self):
        # one asset with one weapon: at most two concurrent pairings
        threats, das, weapons = build_te_fixture(5, 1, seed=11)
        got = te_assign(threats, das, weapons, CFG)
        assert len(got.assignment) == 2
        assert len(got.unmatched) == 3


class TestRefineThreatIndex:
    def test_saturated(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        tr = track_head_on(300.0)
        tr.intent_index = 1.0
        tr.capability_index = 1.0
        assert refine_threat_index(tr, da, CFG) == pytest.approx(1.0, rel=1e-9)

    def test_floor(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        tr = make_track("t", (-400.0, 0.0), (-10.0, 0.0))  # headed away, no poi
        tr.intent_index = 0.0
        tr.capability_index = 0.0
        assert refine_threat_index(tr, da, CFG) == 0.0

    def test_opportunity_ordering(self):
        da = make_da("da", (0.0, 0.0), radius=300.0)
        a = track_head_on(400.0)
        a.intent_index, a.capability_index = 0.9, 0.9
        b = track_head_on(400.0)
        b.intent_index, b.capability_index = 0.2, 0.2
        assert refine_threat_index(a, da, CFG) > refine_threat_index(b, da, CFG)
