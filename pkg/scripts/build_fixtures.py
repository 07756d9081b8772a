#!/usr/bin/env python3
"""Regenerate the bundled model fixtures in canonical serialized form.

Run from the repo root after changing model defaults or scenario
calibration:  python scripts/build_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ecoforge.model import (
    AbioticProperties,
    BioticProperties,
    Component,
    ComponentKind,
    ConceptualModel,
    Relationship,
    RelationshipKind,
    serialize_model,
    validate_model,
)

OUT = Path(__file__).resolve().parent.parent / "src" / "ecoforge" / "data" / "models"


def biotic(id, label, taxon=None, **props):
    base = dict(
        lifespan=24.0,
        reproductive_maturity=6.0,
        reproductive_interval=6.0,
        offspring_count=2.0,
        starting_population=20.0,
        minimum_population=0.0,
        body_mass=1.0,
        carbon_biomass=0.1,
        respiratory_rate=0.005,
        photosynthesis_rate=0.0,
        assimilation_efficiency=0.1,
        move_direction=0.0,
        move_velocity=1.0,
    )
    base.update(props)
    return Component(
        id=id,
        kind=ComponentKind.BIOTIC,
        label=label,
        taxon_ref=taxon,
        properties=BioticProperties(**base),
    )


def abiotic(id, label, amount=100.0, minimum_amount=0.0, growth_rate=0.0):
    return Component(
        id=id,
        kind=ComponentKind.ABIOTIC,
        label=label,
        properties=AbioticProperties(
            amount=amount, minimum_amount=minimum_amount, growth_rate=growth_rate
        ),
    )


def rel(id, source, target, kind, **params):
    from ecoforge.model import RelationshipParams

    return Relationship(
        id=id, source=source, target=target, kind=kind, params=RelationshipParams(**params)
    )


def kudzu_model(name_suffix: str, bug_population: float) -> ConceptualModel:
    # Calibrated so the three bug levels (2 / 100 / 800) produce the three
    # scenario regimes on a 21x21 grid over 120 months; see
    # data/models/kudzu_scenario.json and `python -m ecoforge.calibrate`.
    return ConceptualModel(
        id=f"kudzu-invasion-{name_suffix}",
        name=f"Kudzu invasion ({name_suffix} bug)",
        components=(
            abiotic("light", "light", amount=100.0),
            biotic(
                "kudzu",
                "kudzu",
                taxon="pueraria-montana",
                lifespan=18.0,
                reproductive_maturity=2.0,
                reproductive_interval=1.0,
                offspring_count=3.0,
                starting_population=16.0,
                body_mass=4.0,
                carbon_biomass=0.4,
                respiratory_rate=0.01,
                photosynthesis_rate=0.06,
                move_velocity=0.0,
            ),
            biotic(
                "hornbeam",
                "American hornbeam",
                taxon="carpinus-caroliniana",
                lifespan=54.0,
                reproductive_maturity=4.0,
                reproductive_interval=1.0,
                offspring_count=2.0,
                starting_population=16.0,
                body_mass=30.0,
                carbon_biomass=0.4,
                respiratory_rate=0.02,
                photosynthesis_rate=0.08,
                move_velocity=0.0,
            ),
            biotic(
                "kudzu-bug",
                "kudzu bug",
                taxon="megacopta-cribraria",
                lifespan=12.0,
                reproductive_maturity=1.0,
                reproductive_interval=1.0,
                offspring_count=0.0,
                starting_population=bug_population,
                body_mass=0.5,
                carbon_biomass=0.2,
                respiratory_rate=0.04,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
        ),
        relationships=(
            rel(
                "bug-eats-kudzu",
                "kudzu-bug",
                "kudzu",
                RelationshipKind.CONSUMES,
                consumption_rate=1.0,
                interaction_probability=0.8,
            ),
            rel(
                "bug-eats-hornbeam",
                "kudzu-bug",
                "hornbeam",
                RelationshipKind.CONSUMES,
                consumption_rate=1.0,
                interaction_probability=0.2,
            ),
            rel(
                "light-feeds-kudzu",
                "light",
                "kudzu",
                RelationshipKind.AFFECTS,
                growth_rate_modifier=0.0,
                interaction_probability=1.0,
            ),
            rel(
                "light-feeds-hornbeam",
                "light",
                "hornbeam",
                RelationshipKind.AFFECTS,
                growth_rate_modifier=0.0,
                interaction_probability=1.0,
            ),
        ),
        metadata={
            "author": "ecoforge fixtures",
            "grid_width": 21,
            "grid_height": 21,
            "notes": "three-regime scenario; bug level set by starting_population",
        },
    )


def fixtures() -> dict[str, ConceptualModel]:
    models: dict[str, ConceptualModel] = {}

    models["kudzu"] = kudzu_model("medium", 100.0)
    models["kudzu_low"] = kudzu_model("low", 2.0)
    models["kudzu_high"] = kudzu_model("high", 800.0)

    models["empty"] = ConceptualModel(
        id="empty", name="Empty model", components=(), relationships=(), metadata={}
    )

    models["lone_agent"] = ConceptualModel(
        id="lone-agent",
        name="Lone wanderer",
        components=(
            biotic(
                "walker",
                "walker",
                lifespan=12.0,
                reproductive_maturity=0.0,
                reproductive_interval=1.0,
                offspring_count=0.0,
                starting_population=1.0,
                carbon_biomass=0.5,
                respiratory_rate=0.0,
                move_velocity=1.0,
            ),
        ),
        relationships=(),
        metadata={"grid_width": 9, "grid_height": 9},
    )

    models["predator_prey"] = ConceptualModel(
        id="predator-prey",
        name="Closed consumption chain",
        components=(
            biotic(
                "fox",
                "fox",
                lifespan=1000.0,
                reproductive_maturity=1.0,
                reproductive_interval=1.0,
                offspring_count=0.0,
                starting_population=10.0,
                body_mass=5.0,
                carbon_biomass=0.8,
                respiratory_rate=0.0,
                assimilation_efficiency=0.3,
                move_velocity=1.0,
            ),
            biotic(
                "rabbit",
                "rabbit",
                lifespan=1000.0,
                reproductive_maturity=1.0,
                reproductive_interval=1.0,
                offspring_count=0.0,
                starting_population=30.0,
                body_mass=2.0,
                carbon_biomass=0.3,
                respiratory_rate=0.0,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
        ),
        relationships=(
            rel(
                "fox-eats-rabbit",
                "fox",
                "rabbit",
                RelationshipKind.CONSUMES,
                consumption_rate=0.6,
                interaction_probability=0.8,
            ),
        ),
        metadata={"grid_width": 9, "grid_height": 9},
    )

    models["pollinator_garden"] = ConceptualModel(
        id="pollinator-garden",
        name="Pollinator garden",
        components=(
            biotic(
                "bee",
                "bee",
                lifespan=8.0,
                reproductive_maturity=1.0,
                reproductive_interval=2.0,
                offspring_count=1.0,
                starting_population=8.0,
                body_mass=0.0001,
                carbon_biomass=0.01,
                respiratory_rate=0.001,
                assimilation_efficiency=0.4,
                move_velocity=2.0,
            ),
            biotic(
                "clover",
                "clover",
                lifespan=14.0,
                reproductive_maturity=3.0,
                reproductive_interval=2.0,
                offspring_count=1.0,
                starting_population=10.0,
                body_mass=0.5,
                carbon_biomass=0.05,
                respiratory_rate=0.002,
                photosynthesis_rate=0.01,
                move_velocity=0.0,
            ),
        ),
        relationships=(
            rel(
                "bee-pollinates-clover",
                "bee",
                "clover",
                RelationshipKind.PRODUCES,
                production_rate=0.3,
            ),
            rel(
                "bee-sips-clover",
                "bee",
                "clover",
                RelationshipKind.CONSUMES,
                consumption_rate=0.05,
                interaction_probability=0.6,
            ),
        ),
        metadata={"grid_width": 11, "grid_height": 11},
    )

    models["detritus_chain"] = ConceptualModel(
        id="detritus-chain",
        name="Detritus chain",
        components=(
            biotic(
                "shrub",
                "shrub",
                lifespan=6.0,
                reproductive_maturity=2.0,
                reproductive_interval=2.0,
                offspring_count=1.0,
                starting_population=14.0,
                body_mass=1.5,
                carbon_biomass=0.2,
                respiratory_rate=0.001,
                photosynthesis_rate=0.02,
                move_velocity=0.0,
            ),
            biotic(
                "worm",
                "worm",
                lifespan=9.0,
                reproductive_maturity=2.0,
                reproductive_interval=3.0,
                offspring_count=1.0,
                starting_population=6.0,
                body_mass=0.002,
                carbon_biomass=0.02,
                respiratory_rate=0.002,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
            abiotic("detritus", "detritus", amount=0.0),
        ),
        relationships=(
            rel(
                "shrub-becomes-detritus",
                "shrub",
                "detritus",
                RelationshipKind.BECOMES_ON_DEATH,
                percent_body_mass=0.5,
            ),
            rel(
                "worm-eats-shrub",
                "worm",
                "shrub",
                RelationshipKind.CONSUMES,
                consumption_rate=1.0,
                interaction_probability=0.4,
            ),
        ),
        metadata={"grid_width": 11, "grid_height": 11},
    )

    models["parasite_pair"] = ConceptualModel(
        id="parasite-pair",
        name="Wasp, caterpillar, shrub",
        components=(
            biotic(
                "wasp",
                "wasp",
                lifespan=7.0,
                reproductive_maturity=1.0,
                reproductive_interval=2.0,
                offspring_count=1.0,
                starting_population=5.0,
                body_mass=0.0002,
                carbon_biomass=0.01,
                respiratory_rate=0.001,
                assimilation_efficiency=0.8,
                move_velocity=2.0,
            ),
            biotic(
                "caterpillar",
                "caterpillar",
                lifespan=11.0,
                reproductive_maturity=2.0,
                reproductive_interval=2.0,
                offspring_count=2.0,
                starting_population=12.0,
                body_mass=0.001,
                carbon_biomass=0.02,
                respiratory_rate=0.001,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
            biotic(
                "shrub",
                "shrub",
                lifespan=30.0,
                reproductive_maturity=4.0,
                reproductive_interval=3.0,
                offspring_count=1.0,
                starting_population=10.0,
                body_mass=1.5,
                carbon_biomass=0.3,
                respiratory_rate=0.002,
                photosynthesis_rate=0.03,
                move_velocity=0.0,
            ),
        ),
        relationships=(
            rel(
                "wasp-kills-caterpillar",
                "wasp",
                "caterpillar",
                RelationshipKind.DESTROYS,
                destruction_rate=1.0,
                interaction_probability=0.5,
            ),
            rel(
                "caterpillar-stresses-shrub",
                "caterpillar",
                "shrub",
                RelationshipKind.AFFECTS,
                growth_rate_modifier=-0.1,
                interaction_probability=0.5,
            ),
        ),
        metadata={"grid_width": 11, "grid_height": 11},
    )

    models["mixed_pools"] = ConceptualModel(
        id="mixed-pools",
        name="Grazing under a heat field",
        components=(
            biotic(
                "goat",
                "goat",
                lifespan=60.0,
                reproductive_maturity=12.0,
                reproductive_interval=6.0,
                offspring_count=1.0,
                starting_population=6.0,
                body_mass=40.0,
                carbon_biomass=3.0,
                respiratory_rate=0.05,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
            abiotic("grass", "grass pool", amount=50.0, minimum_amount=5.0, growth_rate=2.0),
            abiotic("heat", "heat", amount=80.0, minimum_amount=0.0, growth_rate=0.0),
        ),
        relationships=(
            rel(
                "goat-grazes-grass",
                "goat",
                "grass",
                RelationshipKind.CONSUMES,
                consumption_rate=0.1,
                interaction_probability=0.9,
            ),
            rel(
                "heat-stresses-goat",
                "heat",
                "goat",
                RelationshipKind.AFFECTS,
                growth_rate_modifier=-0.02,
                interaction_probability=0.3,
            ),
            rel(
                "heat-dries-grass",
                "heat",
                "grass",
                RelationshipKind.AFFECTS,
                growth_rate_modifier=-0.01,
                interaction_probability=0.5,
            ),
        ),
        metadata={"grid_width": 9, "grid_height": 9},
    )

    models["producer_pool"] = ConceptualModel(
        id="producer-pool",
        name="Oxygen producers",
        components=(
            biotic(
                "algae",
                "algae",
                lifespan=20.0,
                reproductive_maturity=5.0,
                reproductive_interval=5.0,
                offspring_count=1.0,
                starting_population=15.0,
                body_mass=0.01,
                carbon_biomass=0.05,
                respiratory_rate=0.001,
                photosynthesis_rate=0.02,
                move_velocity=1.0,
            ),
            abiotic("oxygen", "oxygen", amount=20.0, minimum_amount=0.0, growth_rate=-1.0),
        ),
        relationships=(
            rel(
                "algae-produces-oxygen",
                "algae",
                "oxygen",
                RelationshipKind.PRODUCES,
                production_rate=0.8,
            ),
        ),
        metadata={"grid_width": 9, "grid_height": 9},
    )

    models["becomes_biotic"] = ConceptualModel(
        id="becomes-biotic",
        name="Metamorphosis",
        components=(
            biotic(
                "caterpillar",
                "caterpillar",
                lifespan=3.0,
                reproductive_maturity=1.0,
                reproductive_interval=1.0,
                offspring_count=2.0,
                starting_population=10.0,
                body_mass=0.001,
                carbon_biomass=0.02,
                respiratory_rate=0.001,
                assimilation_efficiency=0.4,
                move_velocity=1.0,
            ),
            biotic(
                "butterfly",
                "butterfly",
                lifespan=6.0,
                reproductive_maturity=1.0,
                reproductive_interval=2.0,
                offspring_count=0.0,
                starting_population=0.0,
                body_mass=0.0005,
                carbon_biomass=0.01,
                respiratory_rate=0.001,
                assimilation_efficiency=0.4,
                move_velocity=2.0,
            ),
        ),
        relationships=(
            rel(
                "caterpillar-becomes-butterfly",
                "caterpillar",
                "butterfly",
                RelationshipKind.BECOMES_ON_DEATH,
                percent_body_mass=0.8,
            ),
        ),
        metadata={"grid_width": 9, "grid_height": 9},
    )

    return models


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, model in fixtures().items():
        report = validate_model(model)
        if report.errors:
            raise SystemExit(f"{name}: fixture fails validation: {report.errors}")
        path = OUT / f"{name}.json"
        path.write_bytes(serialize_model(model))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
