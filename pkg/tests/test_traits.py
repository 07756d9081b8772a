"""Taxon search, unit conversion, and parameter derivation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecoforge.model import BIOTIC_FIELDS, ComponentKind, default_properties
from ecoforge.traits import (
    EmptyQuery,
    TraitRecord,
    UnknownTaxon,
    UnsupportedUnit,
    bundled_backend,
    derive_parameters,
    estimate_carbon_biomass,
    normalize_unit,
    trait_tables,
)


@pytest.fixture(scope="module")
def backend():
    return bundled_backend()


def test_search_scientific_name(backend):
    matches = backend.search_taxa("Pueraria montana")
    assert matches
    assert matches[0].taxon_id == "pueraria-montana"


def test_search_common_name(backend):
    matches = backend.search_taxa("red tailed hawk")
    assert matches[0].taxon_id == "buteo-jamaicensis"


def test_search_no_match(backend):
    assert backend.search_taxa("zzzz") == []


def test_search_ranking_prefers_exact(backend):
    # "kudzu" is an exact common name of the vine and a prefix/substring of
    # "kudzu bug"; the exact common-name hit ranks first.
    matches = backend.search_taxa("kudzu")
    ids = [m.taxon_id for m in matches]
    assert ids[0] == "pueraria-montana"
    assert "megacopta-cribraria" in ids


def test_search_empty_query(backend):
    with pytest.raises(EmptyQuery):
        backend.search_taxa("   ")


def test_fetch_traits_ordering(backend):
    records = backend.fetch_traits("buteo-jamaicensis")
    assert any(r.predicate == "life span" for r in records)
    keys = [(r.predicate, r.source) for r in records]
    assert keys == sorted(keys)


def test_fetch_unknown_taxon(backend):
    with pytest.raises(UnknownTaxon):
        backend.fetch_traits("no-such-taxon")


def test_ancestry_nonempty_for_all_fixtures(backend):
    for name in ("pueraria-montana", "carpinus-caroliniana", "megacopta-cribraria",
                 "buteo-jamaicensis", "ondatra-zibethicus", "alligator-mississippiensis"):
        assert backend.get_taxon(name).ancestry


# -- unit conversion -----------------------------------------------------------


def test_years_to_months():
    assert normalize_unit(2, "years", "months") == 24


def test_grams_to_kilograms():
    assert normalize_unit(500, "g", "kg") == 0.5


def test_days_to_months():
    assert normalize_unit(30.44, "days", "months") == 1.0


def test_identity():
    assert normalize_unit(7.5, "months", "months") == 7.5


def test_unsupported_unit():
    with pytest.raises(UnsupportedUnit):
        normalize_unit(1, "fortnights", "months")


# -- carbon estimation -----------------------------------------------------------


def test_carbon_constants_exact():
    assert estimate_carbon_biomass(10, ["Animalia", "Chordata", "Mammalia"]) == 1.6
    assert estimate_carbon_biomass(10, ["Animalia", "Chordata", "Reptilia"]) == 1.22
    assert estimate_carbon_biomass(10, ["Plantae"]) == 1.0


def test_carbon_first_hit_wins():
    # Scanning is root-to-leaf; the first constant-table hit selects.
    assert estimate_carbon_biomass(10, ["Mammalia", "Reptilia"]) == 1.6
    assert estimate_carbon_biomass(10, ["Reptilia", "Mammalia"]) == 1.22


# -- derivation -------------------------------------------------------------------


def _record(predicate, value, unit, source="test"):
    return TraitRecord(
        taxon_id="x", predicate=predicate, value=value, unit=unit, source=source
    )


def test_lifespan_records_averaged():
    records = [
        _record("life span", 10, "years", "a"),
        _record("total life span", 14, "years", "b"),
    ]
    props, report = derive_parameters(records, [])
    assert props.lifespan == 144.0
    assert report.entry("lifespan").method == "Direct"
    assert len(report.entry("lifespan").inputs) == 2


def test_carbon_from_mammal_ancestry():
    records = [_record("body mass", 10, "kg")]
    props, report = derive_parameters(records, ["Animalia", "Mammalia"])
    assert props.carbon_biomass == 1.6
    assert report.entry("carbon_biomass").method == "AncestryEstimate"


def test_empty_records_full_default():
    props, report = derive_parameters([], [])
    assert props == default_properties(ComponentKind.BIOTIC)
    assert all(entry.method == "Default" for entry in report.entries)
    assert len(report.entries) == 13


def test_every_parameter_has_exactly_one_entry():
    records = [_record("life span", 3, "years")]
    _, report = derive_parameters(records, ["Insecta"])
    assert tuple(e.parameter for e in report.entries) == BIOTIC_FIELDS


def test_bmr_fallback_uses_documented_constant():
    tables = trait_tables()
    records = [
        _record("body mass", 2.0, "kg"),
        _record("basal metabolic rate", 3.0, "W"),
    ]
    props, report = derive_parameters(records, [])
    expected = 3.0 * tables["seconds_per_month"] / tables["joules_per_kg_carbon"]
    assert props.respiratory_rate == expected
    assert report.entry("respiratory_rate").method == "AncestryEstimate"


def test_bmr_mass_specific_scaled_by_body_mass():
    tables = trait_tables()
    records = [
        _record("body mass", 2.0, "kg"),
        _record("basal metabolic rate", 1.5, "W/kg"),
    ]
    props, _ = derive_parameters(records, [])
    expected = 1.5 * 2.0 * tables["seconds_per_month"] / tables["joules_per_kg_carbon"]
    assert props.respiratory_rate == expected


def test_photosynthesis_fallback_predicate():
    records = [_record("net carbon fixation rate", 0.07, "kg/month/m^2")]
    props, report = derive_parameters(records, ["Plantae"])
    assert props.photosynthesis_rate == 0.07
    assert report.entry("photosynthesis_rate").method == "AncestryEstimate"


def test_assimilation_class_table():
    _, report = derive_parameters([], ["Animalia", "Arthropoda", "Insecta"])
    entry = report.entry("assimilation_efficiency")
    assert entry.method == "AncestryEstimate"
    assert entry.value == 0.4
    _, report = derive_parameters([], ["Animalia", "Chordata", "Mammalia", "Carnivora"])
    assert report.entry("assimilation_efficiency").value == 0.8


def test_maturity_clamped_below_lifespan():
    records = [
        _record("life span", 10, "months"),
        _record("age at maturity", 30, "months"),
    ]
    props, report = derive_parameters(records, [])
    assert props.reproductive_maturity < props.lifespan
    assert "clamped" in report.entry("reproductive_maturity").formula


def test_report_faithfulness_direct_entries(backend):
    taxon = backend.get_taxon("ondatra-zibethicus")
    records = backend.fetch_traits("ondatra-zibethicus")
    _, report = derive_parameters(records, taxon.ancestry)
    tables = trait_tables()
    units = tables["parameter_units"]
    for entry in report.entries:
        if entry.method != "Direct" or "clamped" in entry.formula:
            continue
        values = [normalize_unit(r.value, r.unit, units[entry.parameter]) for r in entry.inputs]
        assert sum(values) / len(values) == entry.value, entry.parameter


def test_fixture_derivation_deterministic(backend):
    taxon = backend.get_taxon("buteo-jamaicensis")
    records = backend.fetch_traits("buteo-jamaicensis")
    _, first = derive_parameters(records, taxon.ancestry)
    _, second = derive_parameters(records, taxon.ancestry)
    assert first.to_bytes() == second.to_bytes()


def test_alligator_uses_reptile_constant(backend):
    taxon = backend.get_taxon("alligator-mississippiensis")
    records = backend.fetch_traits("alligator-mississippiensis")
    props, report = derive_parameters(records, taxon.ancestry)
    assert report.entry("carbon_biomass").method == "AncestryEstimate"
    assert props.carbon_biomass == pytest.approx(0.122 * 240.0)


@settings(max_examples=40, deadline=None)
@given(
    values=st.lists(
        st.floats(min_value=0.1, max_value=80.0, allow_nan=False), min_size=1, max_size=6
    )
)
def test_mean_invariant_under_duplication(values):
    records = [_record("life span", v, "years", f"s{i}") for i, v in enumerate(values)]
    doubled = records + [
        _record("life span", v, "years", f"t{i}") for i, v in enumerate(values)
    ]
    props_once, _ = derive_parameters(records, [])
    props_twice, _ = derive_parameters(doubled, [])
    assert props_once.lifespan == pytest.approx(props_twice.lifespan, rel=1e-12)


def test_derivation_always_valid(backend):
    from ecoforge.model import Component, ConceptualModel, validate_model

    for name in ("pueraria-montana", "megacopta-cribraria", "buteo-jamaicensis",
                 "ondatra-zibethicus", "alligator-mississippiensis", "carpinus-caroliniana"):
        taxon = backend.get_taxon(name)
        props, _ = derive_parameters(backend.fetch_traits(name), taxon.ancestry)
        model = ConceptualModel(
            id="t", name="t",
            components=(Component(id="c", kind=ComponentKind.BIOTIC, label="c",
                                  properties=props),),
            relationships=(),
        )
        assert not validate_model(model).errors, name
