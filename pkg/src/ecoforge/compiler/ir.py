"""Stage 2: domain model -> simulation IR.

The IR is a tree of primitive simulation operations bucketed into tick
phases (the AST) plus a cross-reference graph recording which
populations and pools each operation reads and writes (the ASG). Each
model relationship decomposes into a small op group:

  consumes   -> encounter_test, carbon_transfer, remove_prey
  destroys   -> encounter_test, remove_target
  produces   -> stochastic_emit
  affects    -> encounter_test, growth_modifier
                (substance-pool source onto a photosynthesizer becomes a
                 couple_photosynthesis op in the metabolize phase instead)
  becomes-on-death -> on_death_hook, convert_mass (die phase)

The schedule is fixed: move, metabolize, interact, reproduce, die,
regrow — so consumption always sees post-metabolism carbon and death
conversions land after interactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..model import BioticProperties, RelationshipKind
from .domain import DomainModel, Role

SCHEDULE = ("move", "metabolize", "interact", "reproduce", "die", "regrow")


@dataclass(frozen=True)
class SimOp:
    id: str
    op: str
    subject: str  # acting component id
    target: Optional[str] = None
    params: dict = field(default_factory=dict)
    relationship_id: Optional[str] = None


@dataclass(frozen=True)
class AsgEntry:
    reads: tuple[str, ...]
    writes: tuple[str, ...]


@dataclass(frozen=True)
class SimulationProgram:
    domain: DomainModel
    init: tuple[SimOp, ...]
    phases: dict[str, tuple[SimOp, ...]]
    schedule: tuple[str, ...]
    asg: dict[str, AsgEntry]

    def all_ops(self) -> list[SimOp]:
        return list(self.init) + [op for phase in self.schedule for op in self.phases[phase]]

    def check(self) -> None:
        """Structural invariants: resolvable ASG, exactly-once scheduling, phase order."""
        ids = {comp.id for comp in self.domain.model.components}
        seen: set[str] = set()
        for op in self.all_ops():
            if op.id in seen:
                raise ValueError(f"op {op.id} scheduled more than once")
            seen.add(op.id)
            entry = self.asg.get(op.id)
            if entry is None:
                raise ValueError(f"op {op.id} missing from ASG")
            for ref in entry.reads + entry.writes:
                if ref not in ids:
                    raise ValueError(f"op {op.id} references unknown component {ref}")
        if set(self.schedule) != set(SCHEDULE) or self.schedule != SCHEDULE:
            raise ValueError("schedule must be the fixed phase order")
        if self.schedule.index("interact") < self.schedule.index("metabolize"):
            raise ValueError("interaction ops may not precede the metabolize phase")


def lower_to_ir(domain: DomainModel) -> SimulationProgram:
    init: list[SimOp] = []
    phases: dict[str, list[SimOp]] = {phase: [] for phase in SCHEDULE}
    asg: dict[str, AsgEntry] = {}
    counter = 0

    def add(phase: Optional[str], op: str, subject: str, *, target=None, params=None,
            relationship_id=None, reads=(), writes=()) -> SimOp:
        nonlocal counter
        bucket = "init" if phase is None else phase
        sim_op = SimOp(
            id=f"{bucket}.{counter}.{op}",
            op=op,
            subject=subject,
            target=target,
            params=dict(params or {}),
            relationship_id=relationship_id,
        )
        counter += 1
        if phase is None:
            init.append(sim_op)
        else:
            phases[phase].append(sim_op)
        asg[sim_op.id] = AsgEntry(tuple(reads), tuple(writes))
        return sim_op

    # Couplings: affects edges from substance pools onto photosynthesizers.
    couplings: dict[str, list[str]] = {}
    coupled_rels: set[str] = set()
    for rel in domain.interactions:
        if rel.kind is not RelationshipKind.AFFECTS:
            continue
        source = domain.population(rel.source)
        target = domain.population(rel.target)
        if source.role is Role.SUBSTANCE_POOL and target.role is not Role.SUBSTANCE_POOL:
            props = target.component.properties
            if isinstance(props, BioticProperties) and props.photosynthesis_rate > 0:
                couplings.setdefault(rel.target, []).append(rel.source)
                coupled_rels.add(rel.id)

    # Init: spawns and pool initialization.
    for pop in domain.populations:
        cid = pop.component.id
        if pop.role is Role.SUBSTANCE_POOL:
            add(None, "init_pool", cid, params=pop.component.properties.as_dict(), writes=[cid])
        else:
            props = pop.component.properties.as_dict()
            add(None, "spawn", cid, params=props, writes=[cid])

    # Move phase.
    for pop in domain.populations:
        if pop.role is Role.MOBILE_AGENT:
            props = pop.component.properties
            if props.move_velocity > 0:
                add(
                    "move",
                    "move",
                    pop.component.id,
                    params={"move_velocity": props.move_velocity},
                    reads=[pop.component.id],
                    writes=[pop.component.id],
                )

    # Metabolize phase: per population, coupling markers then photosynthesize
    # then respire, in model order.
    for pop in domain.populations:
        if pop.role is Role.SUBSTANCE_POOL:
            continue
        cid = pop.component.id
        props = pop.component.properties
        pools = couplings.get(cid, [])
        for rel in domain.interactions:
            if rel.id in coupled_rels and rel.target == cid:
                add(
                    "metabolize",
                    "couple_photosynthesis",
                    rel.source,
                    target=cid,
                    params={"growth_rate_modifier": rel.params.growth_rate_modifier or 0.0},
                    relationship_id=rel.id,
                    reads=[rel.source],
                )
        if props.photosynthesis_rate > 0:
            add(
                "metabolize",
                "photosynthesize",
                cid,
                params={"photosynthesis_rate": props.photosynthesis_rate},
                reads=list(pools),
                writes=[cid],
            )
        if props.respiratory_rate > 0:
            add(
                "metabolize",
                "respire",
                cid,
                params={"respiratory_rate": props.respiratory_rate},
                writes=[cid],
            )

    # Interact phase: one op group per non-coupled relationship.
    for rel in domain.interactions:
        if rel.id in coupled_rels or rel.kind is RelationshipKind.BECOMES_ON_DEATH:
            continue
        params = rel.params
        if rel.kind is RelationshipKind.CONSUMES:
            add("interact", "encounter_test", rel.source, target=rel.target,
                params={"interaction_probability": params.interaction_probability},
                relationship_id=rel.id, reads=[rel.source, rel.target])
            source_props = domain.population(rel.source).component.properties
            efficiency = (
                source_props.assimilation_efficiency
                if isinstance(source_props, BioticProperties)
                else 0.0
            )
            add("interact", "carbon_transfer", rel.source, target=rel.target,
                params={
                    "consumption_rate": params.consumption_rate,
                    "assimilation_efficiency": efficiency,
                },
                relationship_id=rel.id, reads=[rel.target], writes=[rel.source, rel.target])
            add("interact", "remove_prey", rel.source, target=rel.target,
                relationship_id=rel.id, writes=[rel.target])
        elif rel.kind is RelationshipKind.DESTROYS:
            add("interact", "encounter_test", rel.source, target=rel.target,
                params={"interaction_probability": params.interaction_probability},
                relationship_id=rel.id, reads=[rel.source, rel.target])
            add("interact", "remove_target", rel.source, target=rel.target,
                params={"destruction_rate": params.destruction_rate},
                relationship_id=rel.id, writes=[rel.target])
        elif rel.kind is RelationshipKind.PRODUCES:
            add("interact", "stochastic_emit", rel.source, target=rel.target,
                params={"production_rate": params.production_rate},
                relationship_id=rel.id, reads=[rel.source], writes=[rel.target])
        elif rel.kind is RelationshipKind.AFFECTS:
            add("interact", "encounter_test", rel.source, target=rel.target,
                params={"interaction_probability": params.interaction_probability},
                relationship_id=rel.id, reads=[rel.source, rel.target])
            add("interact", "growth_modifier", rel.source, target=rel.target,
                params={"growth_rate_modifier": params.growth_rate_modifier},
                relationship_id=rel.id, writes=[rel.target])

    # Reproduce phase.
    for pop in domain.populations:
        if pop.role is Role.SUBSTANCE_POOL:
            continue
        props = pop.component.properties
        if props.offspring_count > 0:
            add(
                "reproduce",
                "reproduce",
                pop.component.id,
                params={
                    "reproductive_maturity": props.reproductive_maturity,
                    "reproductive_interval": props.reproductive_interval,
                    "offspring_count": props.offspring_count,
                },
                reads=[pop.component.id],
                writes=[pop.component.id],
            )

    # Die phase: aging/death plus on-death conversions.
    for pop in domain.populations:
        if pop.role is Role.SUBSTANCE_POOL:
            continue
        cid = pop.component.id
        add("die", "age_and_die", cid, params={"lifespan": pop.component.properties.lifespan},
            writes=[cid])
        for rel in domain.interactions:
            if rel.kind is RelationshipKind.BECOMES_ON_DEATH and rel.source == cid:
                add("die", "on_death_hook", cid, target=rel.target,
                    relationship_id=rel.id, reads=[cid])
                add("die", "convert_mass", cid, target=rel.target,
                    params={"percent_body_mass": rel.params.percent_body_mass},
                    relationship_id=rel.id, reads=[cid], writes=[rel.target])

    # Regrow phase.
    for pop in domain.populations:
        if pop.role is Role.SUBSTANCE_POOL:
            props = pop.component.properties
            add(
                "regrow",
                "regrow",
                pop.component.id,
                params={"growth_rate": props.growth_rate, "minimum_amount": props.minimum_amount},
                writes=[pop.component.id],
            )

    program = SimulationProgram(
        domain=domain,
        init=tuple(init),
        phases={phase: tuple(ops) for phase, ops in phases.items()},
        schedule=SCHEDULE,
        asg=asg,
    )
    program.check()
    return program
