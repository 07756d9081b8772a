"""Derive the thirteen biotic simulation parameters from trait records.

Rules, in order, per parameter:

1. Direct: records under the parameter's predicate aliases are unit
   normalized and arithmetically averaged (no outlier rejection).
2. AncestryEstimate: a documented estimation formula fed by ancestry
   (carbon constant x body mass; basal-metabolic-rate conversion;
   fallback photosynthesis predicate; assimilation class table).
3. Default: the shipped default table.

Derivation is total: it always yields a complete, bound-satisfying
parameter set, and records per-parameter provenance in a
DerivationReport whose canonical bytes are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Iterable, Optional

from ..model import BIOTIC_FIELDS, BioticProperties, ComponentKind, canonical_json, default_properties
from .backend import TraitRecord


class UnsupportedUnit(Exception):
    def __init__(self, unit: str, target: str):
        super().__init__(f"no conversion from {unit!r} to {target!r}")
        self.unit = unit
        self.target = target


_TABLES: Optional[dict[str, Any]] = None


def trait_tables() -> dict[str, Any]:
    """The shipped derivation constants (conversions, carbon table, aliases)."""
    global _TABLES
    if _TABLES is None:
        text = resources.files("ecoforge.data").joinpath("trait_tables.json").read_text()
        _TABLES = json.loads(text)
    return _TABLES


def normalize_unit(value: float, unit: str, target: str) -> float:
    """Convert a record value between documented units (exact factors)."""
    if unit == target:
        return value
    tables = trait_tables()
    key = f"{unit}->{target}"
    conversions = tables["unit_conversions"]
    if key in conversions:
        return value * conversions[key]
    if unit == "days" and target == "months":
        return value / tables["days_per_month"]
    if unit == "months" and target == "years":
        return value / 12.0
    raise UnsupportedUnit(unit, target)


def estimate_carbon_biomass(body_mass: float, ancestry: Iterable[str]) -> float:
    """Carbon mass from body mass via the first ancestry constant hit."""
    constant, _ = _carbon_constant(ancestry)
    return constant * body_mass


def _carbon_constant(ancestry: Iterable[str]) -> tuple[float, Optional[str]]:
    constants = trait_tables()["carbon_constants"]
    for name in ancestry:
        if name in constants:
            return constants[name], name
    return constants["default"], None


@dataclass(frozen=True)
class DerivationEntry:
    parameter: str
    method: str  # Direct | AncestryEstimate | Default
    inputs: tuple[TraitRecord, ...]
    formula: str
    value: float

    def as_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "method": self.method,
            "inputs": [rec.as_dict() for rec in self.inputs],
            "formula": self.formula,
            "value": self.value,
        }


@dataclass(frozen=True)
class DerivationReport:
    taxon_id: str
    entries: tuple[DerivationEntry, ...]

    def entry(self, parameter: str) -> DerivationEntry:
        for e in self.entries:
            if e.parameter == parameter:
                return e
        raise KeyError(parameter)

    def as_dict(self) -> dict:
        return {"taxon_id": self.taxon_id, "entries": [e.as_dict() for e in self.entries]}

    def to_bytes(self) -> bytes:
        return canonical_json(self.as_dict())


def _mean_of(records: list[TraitRecord], target: str) -> float:
    values = [normalize_unit(rec.value, rec.unit, target) for rec in records]
    return sum(values) / len(values)


def _records_for(records: list[TraitRecord], predicates: list[str]) -> list[TraitRecord]:
    wanted = {p.lower() for p in predicates}
    hits = [rec for rec in records if rec.predicate.lower() in wanted]
    hits.sort(key=lambda r: (r.predicate, r.source))
    return hits


def derive_parameters(
    records: list[TraitRecord],
    ancestry: Iterable[str],
    defaults: Optional[BioticProperties] = None,
) -> tuple[BioticProperties, DerivationReport]:
    """Derive all thirteen biotic parameters from one taxon's records."""
    tables = trait_tables()
    aliases = tables["predicate_aliases"]
    fallbacks = tables["fallback_predicates"]
    units = tables["parameter_units"]
    ancestry = tuple(ancestry)
    if defaults is None:
        defaults = default_properties(ComponentKind.BIOTIC)
    taxon_id = records[0].taxon_id if records else ""

    values: dict[str, float] = {}
    entries: dict[str, DerivationEntry] = {}

    def direct_or(parameter: str) -> Optional[list[TraitRecord]]:
        hits = _records_for(records, aliases.get(parameter, []))
        return hits or None

    def set_entry(parameter, method, inputs, formula, value):
        values[parameter] = value
        entries[parameter] = DerivationEntry(parameter, method, tuple(inputs), formula, value)

    def set_default(parameter):
        value = getattr(defaults, parameter)
        set_entry(parameter, "Default", (), "default table", value)

    # Plain averaged parameters.
    for parameter in (
        "lifespan",
        "reproductive_maturity",
        "reproductive_interval",
        "offspring_count",
        "body_mass",
    ):
        target = units[parameter]
        hits = direct_or(parameter)
        if hits:
            value = _mean_of(hits, target)
            set_entry(
                parameter,
                "Direct",
                hits,
                f"mean of {len(hits)} record(s) normalized to {target}",
                value,
            )
        else:
            set_default(parameter)

    body_mass = values["body_mass"]

    # Carbon biomass: record, else constant x body mass.
    hits = direct_or("carbon_biomass")
    if hits:
        value = _mean_of(hits, "kg")
        set_entry("carbon_biomass", "Direct", hits, f"mean of {len(hits)} record(s) normalized to kg", value)
    else:
        constant, hit = _carbon_constant(ancestry)
        method = "AncestryEstimate" if hit else "Default"
        label = hit if hit else "default constant"
        body_inputs = entries["body_mass"].inputs
        set_entry(
            "carbon_biomass",
            method,
            body_inputs,
            f"{constant} ({label}) x body_mass {body_mass!r}",
            constant * body_mass,
        )

    # Respiration: direct records, else basal metabolic rate conversion.
    hits = direct_or("respiratory_rate")
    if hits:
        value = _mean_of(hits, "kg/month")
        set_entry("respiratory_rate", "Direct", hits, f"mean of {len(hits)} record(s)", value)
    else:
        bmr = _records_for(records, fallbacks["respiratory_rate"])
        if bmr:
            joules = tables["joules_per_kg_carbon"]
            seconds = tables["seconds_per_month"]
            converted = []
            for rec in bmr:
                if rec.unit == "W":
                    watts = rec.value
                elif rec.unit == "W/kg":
                    watts = rec.value * body_mass
                else:
                    raise UnsupportedUnit(rec.unit, "W")
                converted.append(watts * seconds / joules)
            value = sum(converted) / len(converted)
            set_entry(
                "respiratory_rate",
                "AncestryEstimate",
                bmr,
                f"mean basal metabolic rate x {seconds!r} s/month / {joules!r} J/kg carbon",
                value,
            )
        else:
            set_default("respiratory_rate")

    # Photosynthesis: direct records, else the carbon-fixation fallback predicate.
    hits = direct_or("photosynthesis_rate")
    if hits:
        value = _mean_of(hits, "kg/month/m^2")
        set_entry("photosynthesis_rate", "Direct", hits, f"mean of {len(hits)} record(s)", value)
    else:
        alt = _records_for(records, fallbacks["photosynthesis_rate"])
        if alt:
            value = _mean_of(alt, "kg/month/m^2")
            set_entry(
                "photosynthesis_rate",
                "AncestryEstimate",
                alt,
                f"mean of {len(alt)} carbon-fixation record(s)",
                value,
            )
        else:
            set_default("photosynthesis_rate")

    # Assimilation efficiency: coarse ancestry class table.
    class_table = tables["assimilation_by_ancestry"]
    hit_name = next((name for name in ancestry if name in class_table), None)
    if hit_name:
        set_entry(
            "assimilation_efficiency",
            "AncestryEstimate",
            (),
            f"ancestry class {hit_name} -> {class_table[hit_name]!r}",
            class_table[hit_name],
        )
    else:
        set_default("assimilation_efficiency")

    # No trait evidence exists for these; always defaults.
    for parameter in ("starting_population", "minimum_population", "move_direction", "move_velocity"):
        set_default(parameter)

    _clamp_into_bounds(values, entries, defaults)

    props = BioticProperties(**{name: values[name] for name in BIOTIC_FIELDS})
    report = DerivationReport(
        taxon_id=taxon_id, entries=tuple(entries[name] for name in BIOTIC_FIELDS)
    )
    return props, report


def _clamp_into_bounds(values, entries, defaults) -> None:
    """Repair rare record-driven bound violations so derivation stays total."""

    def reset(parameter, value, note):
        old = entries[parameter]
        entries[parameter] = DerivationEntry(
            parameter, old.method, old.inputs, f"{old.formula}; {note}", value
        )
        values[parameter] = value

    for parameter in ("lifespan", "reproductive_interval", "body_mass", "carbon_biomass"):
        if values[parameter] <= 0:
            reset(parameter, getattr(defaults, parameter), "non-positive, reset to default")
    for parameter in (
        "reproductive_maturity",
        "offspring_count",
        "starting_population",
        "minimum_population",
        "respiratory_rate",
        "photosynthesis_rate",
        "move_velocity",
    ):
        if values[parameter] < 0:
            reset(parameter, 0.0, "negative, clamped to 0")
    eff = values["assimilation_efficiency"]
    if not (0.0 <= eff <= 1.0):
        reset("assimilation_efficiency", min(max(eff, 0.0), 1.0), "clamped into [0, 1]")
    if not (0.0 <= values["move_direction"] < 360.0):
        reset("move_direction", values["move_direction"] % 360.0, "wrapped into [0, 360)")
    if values["reproductive_maturity"] >= values["lifespan"]:
        reset(
            "reproductive_maturity",
            values["lifespan"] / 2.0,
            "maturity >= lifespan, clamped to lifespan/2",
        )
