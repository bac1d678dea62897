from __future__ import annotations

import pytest

from tewa.catalog import CatalogError, load_catalogs, preference_list, serialize_catalogs
from tewa.scenario import base_catalog_doc

MINIMAL = {
    "threat_types": [
        {"id": "jet", "base_capability": 0.8, "speed_min": 100.0, "speed_max": 400.0},
    ],
    "weapon_types": [
        {"id": "sam", "lethality_index": 0.9, "projectile_speed": 800.0,
         "rof": 1.0, "stabilization_time": 1.0},
    ],
    "correlation": [
        {"weapon": "sam", "threat": "jet", "effectiveness": 0.7},
    ],
}


class TestLoadCatalogs:
    def test_minimal_document(self):
        threats, weapons, catalog = load_catalogs(MINIMAL)
        assert set(threats) == {"jet"}
        assert set(weapons) == {"sam"}
        assert catalog.effectiveness("sam", "jet") == 0.7
        assert catalog.fallback_threat_type is None

    def test_missing_pair_is_named(self):
        doc = {
            **MINIMAL,
            "threat_types": MINIMAL["threat_types"] + [
                {"id": "helo", "base_capability": 0.5, "speed_min": 10.0, "speed_max": 80.0}],
        }
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any("missing entry for pair (sam, helo)" in m
                   for _, m in exc.value.diagnostics)

    def test_stock_library_is_complete(self):
        # seven threat types crossed with six weapon types
        doc = base_catalog_doc()
        threats, weapons, catalog = load_catalogs(doc)
        assert len(threats) == 7
        assert len(weapons) == 6
        assert len(catalog.correlation) == 42

    def test_out_of_range_effectiveness(self):
        doc = {**MINIMAL, "correlation": [
            {"weapon": "sam", "threat": "jet", "effectiveness": 1.3}]}
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any("correlation[0].effectiveness" == p for p, _ in exc.value.diagnostics)

    def test_duplicate_entry_rejected(self):
        doc = {**MINIMAL, "correlation": MINIMAL["correlation"] * 2}
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any("duplicate correlation" in m for _, m in exc.value.diagnostics)

    def test_unknown_reference_rejected(self):
        doc = {**MINIMAL, "correlation": MINIMAL["correlation"] + [
            {"weapon": "laser", "threat": "jet", "effectiveness": 0.5}]}
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any("unknown weapon type 'laser'" in m for _, m in exc.value.diagnostics)

    def test_bad_scalar_carries_path(self):
        doc = {**MINIMAL, "threat_types": [
            {"id": "jet", "base_capability": 1.5, "speed_min": 0.0, "speed_max": 1.0}]}
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any(p.startswith("threat_types[0]") for p, _ in exc.value.diagnostics)

    def test_fallback_threat_type(self):
        doc = {
            "threat_types": MINIMAL["threat_types"] + [
                {"id": "mystery", "base_capability": 0.5, "speed_min": 0.0,
                 "speed_max": 700.0, "unknown": True}],
            "weapon_types": MINIMAL["weapon_types"],
            "correlation": MINIMAL["correlation"] + [
                {"weapon": "sam", "threat": "mystery", "effectiveness": 0.4}],
        }
        _, _, catalog = load_catalogs(doc)
        assert catalog.fallback_threat_type == "mystery"
        assert catalog.resolve_threat_type("never-seen-before").id == "mystery"
        assert catalog.resolve_threat_type("jet").id == "jet"

    def test_without_fallback_unknown_type_raises(self):
        _, _, catalog = load_catalogs(MINIMAL)
        with pytest.raises(KeyError):
            catalog.resolve_threat_type("never-seen-before")

    def test_two_fallbacks_rejected(self):
        doc = {
            "threat_types": [
                {"id": "a", "unknown": True, "speed_min": 0.0, "speed_max": 1.0},
                {"id": "b", "unknown": True, "speed_min": 0.0, "speed_max": 1.0},
            ],
            "weapon_types": MINIMAL["weapon_types"],
            "correlation": [
                {"weapon": "sam", "threat": "a", "effectiveness": 0.5},
                {"weapon": "sam", "threat": "b", "effectiveness": 0.5},
            ],
        }
        with pytest.raises(CatalogError) as exc:
            load_catalogs(doc)
        assert any("more than one" in m for _, m in exc.value.diagnostics)

    def test_round_trip(self):
        _, _, catalog = load_catalogs(base_catalog_doc())
        doc = serialize_catalogs(catalog)
        _, _, again = load_catalogs(doc)
        assert again.correlation == catalog.correlation
        assert again.threat_types == catalog.threat_types
        assert again.weapon_types == catalog.weapon_types


class TestPreferenceList:
    @pytest.fixture
    def catalog(self):
        doc = {
            "threat_types": [{"id": "jet", "speed_min": 0.0, "speed_max": 1.0}],
            "weapon_types": [
                {"id": w, "lethality_index": 0.5, "projectile_speed": 1.0, "rof": 1.0,
                 "stabilization_time": 1.0}
                for w in ("cannon", "missile", "rocket")
            ],
            "correlation": [
                {"weapon": "cannon", "threat": "jet", "effectiveness": 0.3},
                {"weapon": "missile", "threat": "jet", "effectiveness": 0.9},
                {"weapon": "rocket", "threat": "jet", "effectiveness": 0.9},
            ],
        }
        return load_catalogs(doc)[2]

    def test_zero_threshold_returns_all_sorted(self, catalog):
        assert preference_list("jet", catalog, 0.0) == ["missile", "rocket", "cannon"]

    def test_unsatisfiable_threshold(self, catalog):
        assert preference_list("jet", catalog, 1.01) == []

    def test_threshold_and_tie_break(self, catalog):
        # equal 0.9 entries tie-break lexicographically by weapon id
        assert preference_list("jet", catalog, 0.5) == ["missile", "rocket"]

    def test_deterministic(self, catalog):
        runs = {tuple(preference_list("jet", catalog, 0.0)) for _ in range(10)}
        assert len(runs) == 1
