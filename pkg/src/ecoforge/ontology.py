"""Interaction-vocabulary mapping onto the five primitive relationship kinds.

The shipped table reduces the GloBI interaction vocabulary to consumes /
destroys / produces / affects / becomes-on-death. Some vocabulary names
("interacts with", "related to") are generic and carry a +/- sign that
selects the growth-modifier direction; the parasitism family is lethal
("destroys") when unqualified and a negative growth modifier when asked
for with an explicit negative sign. Becomes-on-death has no vocabulary
aliases; it is only authorable directly.

Lookups are pure reads of an immutable table; safe under any concurrency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from typing import Optional

from .model import (
    ComponentKind,
    ENDPOINT_MATRIX,
    Relationship,
    RelationshipKind,
    default_params,
)


class Sign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Direction(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


class OntologyError(Exception):
    pass


class UnknownInteraction(OntologyError):
    def __init__(self, name: str):
        super().__init__(f"unknown interaction name {name!r}")
        self.name = name


class MissingSign(OntologyError):
    def __init__(self, name: str):
        super().__init__(f"interaction {name!r} requires a +/- sign")
        self.name = name


class EndpointKindMismatch(OntologyError):
    def __init__(self, kind: RelationshipKind, source: ComponentKind, target: ComponentKind):
        super().__init__(
            f"{kind.value} does not allow {source.value} -> {target.value}"
        )
        self.kind = kind


@dataclass(frozen=True)
class GlobiAlias:
    name: str
    sign: Optional[Sign]
    primitive: RelationshipKind
    direction: Direction


@dataclass(frozen=True)
class Mapping:
    kind: RelationshipKind
    direction: Direction
    sign: Optional[Sign] = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind.value.capitalize(), "direction": self.direction.value.capitalize()}
        if self.kind is RelationshipKind.BECOMES_ON_DEATH:
            out["kind"] = "BecomesOnDeath"
        if self.sign is not None:
            out["sign"] = "+" if self.sign is Sign.POSITIVE else "-"
        return out


def normalize_name(name: str) -> str:
    """Lowercase, strip, collapse whitespace, drop hyphens and trailing periods.

    Hyphens are dropped because the source table prints some names broken
    across lines ("parasi-tize").
    """
    name = name.replace("-", "").lower().strip().rstrip(".")
    return " ".join(name.split())


_TABLE: Optional[tuple[GlobiAlias, ...]] = None


def list_aliases() -> tuple[GlobiAlias, ...]:
    """The full shipped alias table in its shipped (deterministic) order."""
    global _TABLE
    if _TABLE is None:
        text = resources.files("ecoforge.data").joinpath("globi_aliases.json").read_text()
        raw = json.loads(text)
        _TABLE = tuple(
            GlobiAlias(
                name=entry["name"],
                sign=Sign(entry["sign"]) if entry["sign"] else None,
                primitive=RelationshipKind(entry["primitive"]),
                direction=Direction(entry["direction"]),
            )
            for entry in raw["aliases"]
        )
    return _TABLE


def map_interaction(name: str, sign: Optional[Sign] = None) -> Mapping:
    """Map a vocabulary name (plus optional sign) to (kind, direction).

    Raises UnknownInteraction for out-of-table names and MissingSign for
    sign-dependent names looked up without a sign.
    """
    norm = normalize_name(name)
    table = list_aliases()
    for alias in table:
        if alias.name == norm and alias.sign == sign:
            return Mapping(alias.primitive, alias.direction, sign)
    if sign is None and any(alias.name == norm for alias in table):
        raise MissingSign(norm)
    raise UnknownInteraction(norm)


def suggest_relationship(
    source_kind: ComponentKind,
    target_kind: ComponentKind,
    name: str,
    sign: Optional[Sign] = None,
    *,
    rel_id: str = "suggested",
    source_id: str = "source",
    target_id: str = "target",
) -> Relationship:
    """Build a relationship skeleton from a vocabulary name.

    Inverse aliases swap the endpoints; params come from the default
    table; a negative sign flips the default growth modifier for the
    generic affects kind.
    """
    mapping = map_interaction(name, sign)
    if mapping.direction is Direction.INVERSE:
        source_kind, target_kind = target_kind, source_kind
        source_id, target_id = target_id, source_id
    if (source_kind, target_kind) not in ENDPOINT_MATRIX[mapping.kind]:
        raise EndpointKindMismatch(mapping.kind, source_kind, target_kind)
    params = default_params(mapping.kind)
    if mapping.kind is RelationshipKind.AFFECTS:
        modifier = -0.05 if sign is Sign.NEGATIVE else 0.05
        params = replace(params, growth_rate_modifier=modifier)
    return Relationship(
        id=rel_id, source=source_id, target=target_id, kind=mapping.kind, params=params
    )
