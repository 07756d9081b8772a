"""Conceptual ecology models: typed components, relationships, validation.

A model is a directed graph. Nodes are biotic populations or abiotic
substance pools; edges are one of five interaction kinds. Models are
immutable after parsing; editing builds a new model.

The on-disk format is JSON (version 1). Canonical serialization is
UTF-8, sorted object keys, two-space indent, LF line endings, one
trailing newline, and floats rendered with Python's shortest
round-trip repr. Fixtures are generated with :func:`serialize_model`,
so byte equality is meaningful in tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Any, Optional, Union


class ComponentKind(str, Enum):
    BIOTIC = "biotic"
    ABIOTIC = "abiotic"


class RelationshipKind(str, Enum):
    CONSUMES = "consumes"
    DESTROYS = "destroys"
    PRODUCES = "produces"
    AFFECTS = "affects"
    BECOMES_ON_DEATH = "becomes_on_death"


#: Fields of BioticProperties, in canonical order. There are exactly 13.
BIOTIC_FIELDS = (
    "lifespan",
    "reproductive_maturity",
    "reproductive_interval",
    "offspring_count",
    "starting_population",
    "minimum_population",
    "body_mass",
    "carbon_biomass",
    "respiratory_rate",
    "photosynthesis_rate",
    "assimilation_efficiency",
    "move_direction",
    "move_velocity",
)

#: Fields of AbioticProperties. There are exactly 3.
ABIOTIC_FIELDS = ("amount", "minimum_amount", "growth_rate")

#: Param fields legal per relationship kind.
PARAMS_BY_KIND = {
    RelationshipKind.CONSUMES: ("consumption_rate", "interaction_probability"),
    RelationshipKind.DESTROYS: ("destruction_rate", "interaction_probability"),
    RelationshipKind.PRODUCES: ("production_rate",),
    RelationshipKind.AFFECTS: ("growth_rate_modifier", "interaction_probability"),
    RelationshipKind.BECOMES_ON_DEATH: ("percent_body_mass",),
}

ALL_PARAM_FIELDS = (
    "consumption_rate",
    "destruction_rate",
    "production_rate",
    "growth_rate_modifier",
    "percent_body_mass",
    "interaction_probability",
)

#: Legal (source kind, target kind) pairs per relationship kind.
#: The underlying taxonomy gives only prose examples, so this matrix is a
#: documented project decision; see validate_model docs.
ENDPOINT_MATRIX = {
    RelationshipKind.CONSUMES: {
        (ComponentKind.BIOTIC, ComponentKind.BIOTIC),
        (ComponentKind.BIOTIC, ComponentKind.ABIOTIC),
    },
    RelationshipKind.DESTROYS: {
        (ComponentKind.BIOTIC, ComponentKind.BIOTIC),
        (ComponentKind.ABIOTIC, ComponentKind.BIOTIC),
        (ComponentKind.BIOTIC, ComponentKind.ABIOTIC),
    },
    RelationshipKind.PRODUCES: {
        (ComponentKind.BIOTIC, ComponentKind.ABIOTIC),
        (ComponentKind.BIOTIC, ComponentKind.BIOTIC),
    },
    RelationshipKind.AFFECTS: {
        (ComponentKind.BIOTIC, ComponentKind.BIOTIC),
        (ComponentKind.BIOTIC, ComponentKind.ABIOTIC),
        (ComponentKind.ABIOTIC, ComponentKind.BIOTIC),
        (ComponentKind.ABIOTIC, ComponentKind.ABIOTIC),
    },
    RelationshipKind.BECOMES_ON_DEATH: {
        (ComponentKind.BIOTIC, ComponentKind.ABIOTIC),
        (ComponentKind.BIOTIC, ComponentKind.BIOTIC),
    },
}


class ModelError(Exception):
    """Base class for model document errors."""


class ModelSyntaxError(ModelError):
    """The document is not valid JSON. Carries line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(ModelError):
    """The document is JSON but violates the model schema. Carries a field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class BioticProperties:
    lifespan: float
    reproductive_maturity: float
    reproductive_interval: float
    offspring_count: float
    starting_population: float
    minimum_population: float
    body_mass: float
    carbon_biomass: float
    respiratory_rate: float
    photosynthesis_rate: float
    assimilation_efficiency: float
    move_direction: float
    move_velocity: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in BIOTIC_FIELDS}


@dataclass(frozen=True)
class AbioticProperties:
    amount: float
    minimum_amount: float
    growth_rate: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in ABIOTIC_FIELDS}


Properties = Union[BioticProperties, AbioticProperties]


@dataclass(frozen=True)
class Component:
    id: str
    kind: ComponentKind
    label: str
    properties: Properties
    taxon_ref: Optional[str] = None


@dataclass(frozen=True)
class RelationshipParams:
    consumption_rate: Optional[float] = None
    destruction_rate: Optional[float] = None
    production_rate: Optional[float] = None
    growth_rate_modifier: Optional[float] = None
    percent_body_mass: Optional[float] = None
    interaction_probability: Optional[float] = None

    def as_dict(self) -> dict[str, float]:
        return {
            name: getattr(self, name)
            for name in ALL_PARAM_FIELDS
            if getattr(self, name) is not None
        }


@dataclass(frozen=True)
class Relationship:
    id: str
    source: str
    target: str
    kind: RelationshipKind
    params: RelationshipParams


@dataclass(frozen=True)
class ConceptualModel:
    id: str
    name: str
    components: tuple[Component, ...]
    relationships: tuple[Relationship, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def component(self, component_id: str) -> Component:
        for comp in self.components:
            if comp.id == component_id:
                return comp
        raise KeyError(component_id)

    def with_components(self, components: tuple[Component, ...]) -> "ConceptualModel":
        return replace(self, components=components)


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    subject: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Finding, ...]
    warnings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict[str, Any]:
        return {
            "errors": [vars(f) for f in self.errors],
            "warnings": [vars(f) for f in self.warnings],
        }


# ---------------------------------------------------------------------------
# Parsing


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected number, got {type(value).__name__}")
    out = float(value)
    if not math.isfinite(out):
        raise SchemaError(path, "number must be finite")
    return out


def _as_str(value: Any, path: str) -> str:
    _expect(isinstance(value, str), path, f"expected string, got {type(value).__name__}")
    return value


def _parse_properties(kind: ComponentKind, raw: Any, path: str) -> Properties:
    _expect(isinstance(raw, dict), path, "expected object")
    fields = BIOTIC_FIELDS if kind is ComponentKind.BIOTIC else ABIOTIC_FIELDS
    unknown = sorted(set(raw) - set(fields))
    _expect(not unknown, path, f"unknown property fields: {unknown}")
    missing = sorted(set(fields) - set(raw))
    _expect(not missing, path, f"missing property fields: {missing}")
    values = {name: _as_number(raw[name], f"{path}.{name}") for name in fields}
    cls = BioticProperties if kind is ComponentKind.BIOTIC else AbioticProperties
    return cls(**values)


def _parse_component(raw: Any, path: str) -> Component:
    _expect(isinstance(raw, dict), path, "expected object")
    for req in ("id", "kind", "label", "properties"):
        _expect(req in raw, path, f"missing field '{req}'")
    unknown = sorted(set(raw) - {"id", "kind", "label", "properties", "taxon_ref"})
    _expect(not unknown, path, f"unknown component fields: {unknown}")
    kind_raw = _as_str(raw["kind"], f"{path}.kind")
    try:
        kind = ComponentKind(kind_raw)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown component kind {kind_raw!r}")
    taxon_ref = raw.get("taxon_ref")
    if taxon_ref is not None:
        taxon_ref = _as_str(taxon_ref, f"{path}.taxon_ref")
    return Component(
        id=_as_str(raw["id"], f"{path}.id"),
        kind=kind,
        label=_as_str(raw["label"], f"{path}.label"),
        properties=_parse_properties(kind, raw["properties"], f"{path}.properties"),
        taxon_ref=taxon_ref,
    )


def _parse_relationship(raw: Any, path: str) -> Relationship:
    _expect(isinstance(raw, dict), path, "expected object")
    for req in ("id", "source", "target", "kind", "params"):
        _expect(req in raw, path, f"missing field '{req}'")
    unknown = sorted(set(raw) - {"id", "source", "target", "kind", "params"})
    _expect(not unknown, path, f"unknown relationship fields: {unknown}")
    kind_raw = _as_str(raw["kind"], f"{path}.kind")
    try:
        kind = RelationshipKind(kind_raw)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown relationship kind {kind_raw!r}")
    params_raw = raw["params"]
    _expect(isinstance(params_raw, dict), f"{path}.params", "expected object")
    unknown = sorted(set(params_raw) - set(ALL_PARAM_FIELDS))
    _expect(not unknown, f"{path}.params", f"unknown param fields: {unknown}")
    params = RelationshipParams(
        **{
            name: _as_number(value, f"{path}.params.{name}")
            for name, value in params_raw.items()
        }
    )
    return Relationship(
        id=_as_str(raw["id"], f"{path}.id"),
        source=_as_str(raw["source"], f"{path}.source"),
        target=_as_str(raw["target"], f"{path}.target"),
        kind=kind,
        params=params,
    )


def parse_model(data: Union[bytes, str], *, check_refs: bool = True) -> ConceptualModel:
    """Parse a version-1 model document.

    Unknown top-level fields are preserved under ``metadata``. With
    ``check_refs`` (the default) a relationship endpoint that names a
    missing component id raises :class:`SchemaError`; pass
    ``check_refs=False`` to defer referential errors to
    :func:`validate_model` (code REL_ENDPOINT), which is what the
    service and ``ecoforge validate`` do so they can report them.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    _expect(isinstance(doc, dict), "$", "top level must be an object")
    _expect("version" in doc, "$.version", "missing field 'version'")
    _expect(doc["version"] == 1, "$.version", f"unsupported version {doc['version']!r}")

    components_raw = doc.get("components", [])
    relationships_raw = doc.get("relationships", [])
    _expect(isinstance(components_raw, list), "$.components", "expected array")
    _expect(isinstance(relationships_raw, list), "$.relationships", "expected array")

    components = tuple(
        _parse_component(raw, f"$.components[{i}]") for i, raw in enumerate(components_raw)
    )
    relationships = tuple(
        _parse_relationship(raw, f"$.relationships[{i}]")
        for i, raw in enumerate(relationships_raw)
    )

    metadata: dict[str, Any] = {}
    meta_raw = doc.get("metadata", {})
    _expect(isinstance(meta_raw, dict), "$.metadata", "expected object")
    metadata.update(meta_raw)
    known = {"version", "id", "name", "components", "relationships", "metadata"}
    for key in doc:
        if key not in known:
            metadata[key] = doc[key]

    if check_refs:
        ids = {comp.id for comp in components}
        for i, rel in enumerate(relationships):
            for end in ("source", "target"):
                ref = getattr(rel, end)
                if ref not in ids:
                    raise SchemaError(
                        f"$.relationships[{i}].{end}",
                        f"relationship {rel.id!r} references missing component id {ref!r}",
                    )

    return ConceptualModel(
        id=_as_str(doc.get("id", ""), "$.id"),
        name=_as_str(doc.get("name", ""), "$.name"),
        components=components,
        relationships=relationships,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Serialization


def model_to_doc(model: ConceptualModel) -> dict[str, Any]:
    """The plain-dict document form of a model (version 1)."""
    return {
        "version": 1,
        "id": model.id,
        "name": model.name,
        "metadata": model.metadata,
        "components": [
            {
                "id": comp.id,
                "kind": comp.kind.value,
                "label": comp.label,
                "taxon_ref": comp.taxon_ref,
                "properties": comp.properties.as_dict(),
            }
            for comp in model.components
        ],
        "relationships": [
            {
                "id": rel.id,
                "source": rel.source,
                "target": rel.target,
                "kind": rel.kind.value,
                "params": rel.params.as_dict(),
            }
            for rel in model.relationships
        ],
    }


def canonical_json(doc: Any) -> bytes:
    """Canonical JSON bytes: sorted keys, indent 2, LF, trailing newline."""
    return (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode(
        "utf-8"
    )


def serialize_model(model: ConceptualModel) -> bytes:
    """Canonical bytes of a model; inverse of :func:`parse_model` for valid models."""
    return canonical_json(model_to_doc(model))


# ---------------------------------------------------------------------------
# Validation


def _range_findings(comp: Component) -> list[Finding]:
    out: list[Finding] = []

    def bad(name: str, why: str) -> None:
        out.append(Finding("PROP_RANGE", f"{name} {why}", comp.id))

    p = comp.properties
    if isinstance(p, BioticProperties):
        if p.lifespan <= 0:
            bad("lifespan", "must be > 0 months")
        if p.reproductive_maturity < 0:
            bad("reproductive_maturity", "must be >= 0 months")
        if p.reproductive_interval <= 0:
            bad("reproductive_interval", "must be > 0 months")
        if p.offspring_count < 0:
            bad("offspring_count", "must be >= 0")
        if p.starting_population < 0:
            bad("starting_population", "must be >= 0")
        if p.minimum_population < 0:
            bad("minimum_population", "must be >= 0")
        if p.body_mass <= 0:
            bad("body_mass", "must be > 0 kg")
        if p.carbon_biomass <= 0:
            bad("carbon_biomass", "must be > 0 kg")
        if p.respiratory_rate < 0:
            bad("respiratory_rate", "must be >= 0 kg carbon/month")
        if p.photosynthesis_rate < 0:
            bad("photosynthesis_rate", "must be >= 0 kg carbon/month/m^2")
        if not (0.0 <= p.assimilation_efficiency <= 1.0):
            bad("assimilation_efficiency", "must be within [0, 1]")
        if not (0.0 <= p.move_direction < 360.0):
            bad("move_direction", "must be within [0, 360) degrees")
        if p.move_velocity < 0:
            bad("move_velocity", "must be >= 0 cells/month")
        if p.lifespan > 0 and p.reproductive_maturity >= p.lifespan:
            bad("reproductive_maturity", "must be < lifespan")
    else:
        if p.amount < 0:
            bad("amount", "must be >= 0")
        if p.minimum_amount < 0:
            bad("minimum_amount", "must be >= 0")
        if p.amount < p.minimum_amount:
            bad("amount", "must be >= minimum_amount")
    return out


def _param_findings(rel: Relationship) -> list[Finding]:
    out: list[Finding] = []
    required = PARAMS_BY_KIND[rel.kind]
    present = rel.params.as_dict()
    for name in required:
        if name not in present:
            out.append(
                Finding("REL_PARAM_MISSING", f"{rel.kind.value} requires param {name}", rel.id)
            )
    for name in present:
        if name not in required:
            out.append(
                Finding(
                    "REL_PARAM_EXTRA",
                    f"param {name} is not applicable to {rel.kind.value}",
                    rel.id,
                )
            )
    bounded01 = ("destruction_rate", "percent_body_mass", "interaction_probability")
    for name in bounded01:
        value = present.get(name)
        if value is not None and not (0.0 <= value <= 1.0):
            out.append(Finding("REL_PARAM_RANGE", f"{name} must be within [0, 1]", rel.id))
    cr = present.get("consumption_rate")
    if cr is not None and not (0.0 <= cr <= 1.0):
        out.append(
            Finding(
                "REL_PARAM_RANGE",
                "consumption_rate must be within [0, 1] (fraction of prey carbon)",
                rel.id,
            )
        )
    pr = present.get("production_rate")
    if pr is not None and pr < 0:
        out.append(Finding("REL_PARAM_RANGE", "production_rate must be >= 0", rel.id))
    gm = present.get("growth_rate_modifier")
    if gm is not None and not (-1.0 <= gm <= 1.0):
        out.append(
            Finding("REL_PARAM_RANGE", "growth_rate_modifier must be within [-1, 1]", rel.id)
        )
    return out


def validate_model(model: ConceptualModel) -> ValidationReport:
    """Check every model invariant and report all findings.

    Never raises; a model is compilable iff the report has no errors.
    Findings are ordered by (subject id, code, message).
    """
    errors: list[Finding] = []
    warnings: list[Finding] = []

    seen: set[str] = set()
    for comp in model.components:
        if comp.id in seen:
            errors.append(Finding("DUP_ID", f"duplicate component id {comp.id!r}", comp.id))
        seen.add(comp.id)
    rel_seen: set[str] = set()
    for rel in model.relationships:
        if rel.id in rel_seen:
            errors.append(Finding("DUP_ID", f"duplicate relationship id {rel.id!r}", rel.id))
        rel_seen.add(rel.id)

    by_id = {comp.id: comp for comp in model.components}

    for comp in model.components:
        expected = BioticProperties if comp.kind is ComponentKind.BIOTIC else AbioticProperties
        if not isinstance(comp.properties, expected):
            errors.append(
                Finding(
                    "KIND_MISMATCH",
                    f"{comp.kind.value} component carries {type(comp.properties).__name__}",
                    comp.id,
                )
            )
            continue
        errors.extend(_range_findings(comp))
        if (
            comp.kind is ComponentKind.BIOTIC
            and isinstance(comp.properties, BioticProperties)
            and comp.properties.starting_population == 0
        ):
            warnings.append(
                Finding("ZERO_POPULATION", "starting_population is 0; never spawns", comp.id)
            )

    touched: set[str] = set()
    for rel in model.relationships:
        touched.add(rel.source)
        touched.add(rel.target)
        for end in ("source", "target"):
            ref = getattr(rel, end)
            if ref not in by_id:
                errors.append(
                    Finding("REL_ENDPOINT", f"{end} references missing id {ref!r}", rel.id)
                )
        if rel.source == rel.target:
            errors.append(
                Finding("REL_SELF_LOOP", f"{rel.kind.value} may not target its source", rel.id)
            )
        if rel.source in by_id and rel.target in by_id:
            pair = (by_id[rel.source].kind, by_id[rel.target].kind)
            if pair not in ENDPOINT_MATRIX[rel.kind]:
                errors.append(
                    Finding(
                        "REL_ENDPOINT_KIND",
                        f"{rel.kind.value} does not allow "
                        f"{pair[0].value} -> {pair[1].value}",
                        rel.id,
                    )
                )
        errors.extend(_param_findings(rel))

    for comp in model.components:
        if model.relationships and comp.id not in touched:
            warnings.append(Finding("ISOLATED_COMPONENT", "no relationships touch it", comp.id))

    key = lambda f: (f.subject, f.code, f.message)
    return ValidationReport(tuple(sorted(errors, key=key)), tuple(sorted(warnings, key=key)))


# ---------------------------------------------------------------------------
# Defaults

_DEFAULTS_CACHE: Optional[dict[str, Any]] = None


def _defaults_table() -> dict[str, Any]:
    global _DEFAULTS_CACHE
    if _DEFAULTS_CACHE is None:
        text = resources.files("ecoforge.data").joinpath("default_properties.json").read_text()
        _DEFAULTS_CACHE = json.loads(text)
    return _DEFAULTS_CACHE


def default_properties(kind: ComponentKind) -> Properties:
    """The shipped default property set for a fresh component.

    Defaults live in data/default_properties.json so species-specific
    derivations can override them without code changes.
    """
    table = _defaults_table()
    if kind is ComponentKind.BIOTIC:
        return BioticProperties(**table["biotic"])
    return AbioticProperties(**table["abiotic"])


def default_params(kind: RelationshipKind) -> RelationshipParams:
    """Default params for a freshly suggested relationship of the given kind."""
    table = _defaults_table()["relationship_params"][kind.value]
    return RelationshipParams(**table)
