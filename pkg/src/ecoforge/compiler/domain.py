"""Stage 1: conceptual model -> domain model (roles resolved)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..model import (
    AbioticProperties,
    BioticProperties,
    Component,
    ComponentKind,
    ConceptualModel,
    Relationship,
    validate_model,
)


class CompileError(Exception):
    def __init__(self, message: str, findings=()):
        super().__init__(message)
        self.findings = tuple(findings)


class Role(str, Enum):
    MOBILE_AGENT = "mobile"
    DENSITY_POOL = "density"
    SUBSTANCE_POOL = "pool"


@dataclass(frozen=True)
class Population:
    component: Component
    role: Role


@dataclass(frozen=True)
class DomainModel:
    model: ConceptualModel
    populations: tuple[Population, ...]  # one per component, in model order
    interactions: tuple[Relationship, ...]  # one per relationship, in model order

    def population(self, component_id: str) -> Population:
        for pop in self.populations:
            if pop.component.id == component_id:
                return pop
        raise KeyError(component_id)


def role_for(component: Component) -> Role:
    """Stationary photosynthesizers are per-square-meter density populations."""
    if component.kind is ComponentKind.ABIOTIC:
        return Role.SUBSTANCE_POOL
    props = component.properties
    assert isinstance(props, BioticProperties)
    if props.photosynthesis_rate > 0 and props.move_velocity == 0:
        return Role.DENSITY_POOL
    return Role.MOBILE_AGENT


def build_domain_model(model: ConceptualModel) -> DomainModel:
    """Resolve roles and interaction specs; rejects invalid models."""
    report = validate_model(model)
    if report.errors:
        summary = "; ".join(f"{f.code}({f.subject})" for f in report.errors[:5])
        raise CompileError(f"model fails validation: {summary}", report.errors)
    for comp in model.components:
        if comp.kind is ComponentKind.BIOTIC and not isinstance(
            comp.properties, BioticProperties
        ):
            raise CompileError(f"component {comp.id} has unresolved properties")
        if comp.kind is ComponentKind.ABIOTIC and not isinstance(
            comp.properties, AbioticProperties
        ):
            raise CompileError(f"component {comp.id} has unresolved properties")
    populations = tuple(Population(comp, role_for(comp)) for comp in model.components)
    return DomainModel(model=model, populations=populations, interactions=model.relationships)
