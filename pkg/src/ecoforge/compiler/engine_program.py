"""Stage 3b: simulation IR -> flat engine program (indices and constants)."""

from __future__ import annotations

from ..model import BioticProperties
from ..program import (
    EngineProgram,
    Instr,
    PoolSpec,
    PopulationSpec,
    count_of,
    interval_ticks,
    lifespan_ticks,
    maturity_ticks,
)
from .domain import Role
from .ir import SimulationProgram


def compile_for_engine(program: SimulationProgram) -> EngineProgram:
    """Resolve every symbolic reference to an index and every constant to a number."""
    domain = program.domain
    pop_index: dict[str, int] = {}
    pool_index: dict[str, int] = {}
    populations: list[PopulationSpec] = []
    pools: list[PoolSpec] = []

    for pop in domain.populations:
        comp = pop.component
        if pop.role is Role.SUBSTANCE_POOL:
            index = len(pools)
            pool_index[comp.id] = index
            props = comp.properties
            pools.append(
                PoolSpec(
                    index=index,
                    component_id=comp.id,
                    label=comp.label,
                    amount=props.amount,
                    minimum_amount=props.minimum_amount,
                    growth_rate=props.growth_rate,
                )
            )
        else:
            index = len(populations)
            pop_index[comp.id] = index
            props = comp.properties
            assert isinstance(props, BioticProperties)
            populations.append(
                PopulationSpec(
                    index=index,
                    component_id=comp.id,
                    label=comp.label,
                    role=pop.role.value,
                    starting=count_of(props.starting_population),
                    minimum=count_of(props.minimum_population),
                    lifespan=lifespan_ticks(props.lifespan),
                    maturity=maturity_ticks(props.reproductive_maturity),
                    interval=interval_ticks(props.reproductive_interval),
                    brood=count_of(props.offspring_count),
                    body_mass=props.body_mass,
                    carbon_biomass=props.carbon_biomass,
                    respiratory_rate=props.respiratory_rate,
                    photosynthesis_rate=props.photosynthesis_rate,
                    assimilation_efficiency=props.assimilation_efficiency,
                    move_direction=props.move_direction,
                    move_velocity=props.move_velocity,
                )
            )

    groups = {rel.id: i for i, rel in enumerate(domain.interactions)}

    def whereis(component_id: str) -> tuple[int, bool]:
        if component_id in pool_index:
            return pool_index[component_id], True
        return pop_index[component_id], False

    phases: dict[str, list[Instr]] = {phase: [] for phase in program.schedule}
    for phase in program.schedule:
        for op in program.phases[phase]:
            source, source_pool = whereis(op.subject)
            target, target_pool = (None, False)
            if op.target is not None:
                target, target_pool = whereis(op.target)
            group = groups.get(op.relationship_id) if op.relationship_id else None
            name = op.op
            constants = dict(op.params)
            if name == "convert_mass":
                name = "become_on_death"
                body_mass = populations[source].body_mass
                constants = {
                    "converted_carbon": op.params["percent_body_mass"] * body_mass
                }
            elif name == "couple_photosynthesis":
                constants = {}
            elif name in ("move", "reproduce", "age_and_die", "on_death_hook", "remove_prey"):
                constants = {}
            elif name == "regrow":
                constants = {"growth_rate": op.params["growth_rate"]}
            phases[phase].append(
                Instr(
                    op=name,
                    source=source,
                    target=target,
                    source_pool=source_pool,
                    target_pool=target_pool,
                    group=group,
                    relationship_id=op.relationship_id,
                    constants=constants,
                )
            )

    engine_program = EngineProgram(
        populations=tuple(populations),
        pools=tuple(pools),
        phases={phase: tuple(instrs) for phase, instrs in phases.items()},
    )
    engine_program.validate()
    return engine_program
