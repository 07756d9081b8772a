"""Engine semantics: determinism, carbon accounting, lifecycle, control."""

import json
from dataclasses import replace

import pytest

from conftest import MODELS, load_model
from ecoforge.compiler import build_domain_model, compile_for_engine, lower_to_ir
from ecoforge.engine import (
    CapacityExceeded,
    Command,
    IllegalTransition,
    SimConfig,
    Status,
    control,
    init_run,
    run,
    step,
)
from ecoforge.model import (
    BioticProperties,
    Component,
    ComponentKind,
    ConceptualModel,
    Relationship,
    RelationshipKind,
    RelationshipParams,
    default_properties,
    parse_model,
)


def program_for(name: str):
    return compile_for_engine(lower_to_ir(build_domain_model(load_model(name))))


def grid_of(name: str) -> tuple[int, int]:
    meta = load_model(name).metadata
    return int(meta.get("grid_width", 9)), int(meta.get("grid_height", 9))


def make_biotic(cid, **overrides):
    props = replace(default_properties(ComponentKind.BIOTIC), **overrides)
    return Component(id=cid, kind=ComponentKind.BIOTIC, label=cid, properties=props)


def tiny_consume_model(efficiency=1.0, rate=1.0, probability=1.0, prey_min=0.0):
    predator = make_biotic(
        "predator", lifespan=1000.0, offspring_count=0.0, starting_population=1.0,
        carbon_biomass=0.5, respiratory_rate=0.0, assimilation_efficiency=efficiency,
        move_velocity=0.0,
    )
    prey = make_biotic(
        "prey", lifespan=1000.0, offspring_count=0.0, starting_population=1.0,
        carbon_biomass=0.3, respiratory_rate=0.0, minimum_population=prey_min,
        move_velocity=0.0,
    )
    rel = Relationship(
        id="hunt", source="predator", target="prey", kind=RelationshipKind.CONSUMES,
        params=RelationshipParams(consumption_rate=rate, interaction_probability=probability),
    )
    return ConceptualModel(
        id="tiny", name="tiny", components=(predator, prey), relationships=(rel,)
    )


def test_init_same_seed_identical_digest(kudzu_model):
    program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    cfg = SimConfig(seed=42, max_ticks=10, grid_width=21, grid_height=21)
    assert init_run(program, cfg).digest() == init_run(program, cfg).digest()


def test_init_seed_changes_digest(kudzu_model):
    program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    a = init_run(program, SimConfig(seed=1, max_ticks=10, grid_width=21, grid_height=21))
    b = init_run(program, SimConfig(seed=2, max_ticks=10, grid_width=21, grid_height=21))
    assert a.digest() != b.digest()


def test_initial_frame_counts_match_starting_population(kudzu_model):
    program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    cfg = SimConfig(seed=42, max_ticks=10, grid_width=21, grid_height=21)
    frame = init_run(program, cfg).frame()
    assert frame.counts == (16, 16, 100)


@pytest.mark.parametrize("seed", [0, 7, 99])
def test_lone_agent_hand_trace(seed):
    # One agent, lifespan 12, no reproduction: alive through tick 11,
    # gone at tick 12, regardless of seed (ages start at zero here).
    program = program_for("lone_agent")
    cfg = SimConfig(
        seed=seed, max_ticks=20, grid_width=9, grid_height=9, start_age_mode="zero"
    )
    series = run(program, cfg)
    counts = {frame.tick: frame.counts[0] for frame in series.frames}
    for tick in range(12):
        assert counts[tick] == 1
    assert counts[12] == 0
    assert series.frames[-1].tick == 12  # run stops at extinction


def test_zero_starting_population_extinct_at_zero():
    doc = json.loads((MODELS / "lone_agent.json").read_text())
    doc["components"][0]["properties"]["starting_population"] = 0.0
    program = compile_for_engine(lower_to_ir(build_domain_model(parse_model(json.dumps(doc)))))
    series = run(program, SimConfig(seed=1, max_ticks=10, grid_width=9, grid_height=9))
    assert len(series.frames) == 1
    assert series.frames[0].counts == (0,)
    assert series.final_status is Status.FINISHED


def test_max_ticks_zero_single_frame(kudzu_model):
    program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    series = run(program, SimConfig(seed=3, max_ticks=0, grid_width=21, grid_height=21))
    assert len(series.frames) == 1
    assert series.frames[0].tick == 0


def test_full_efficiency_transfers_prey_carbon_exactly():
    program = compile_for_engine(lower_to_ir(build_domain_model(tiny_consume_model())))
    cfg = SimConfig(seed=5, max_ticks=1, grid_width=1, grid_height=1, start_age_mode="zero")
    state = init_run(program, cfg)
    predator_before = state.pops[0].carbon[0]
    prey_carbon = state.pops[1].carbon[0]
    step(state)
    assert state.pops[1].live == 0
    assert state.pops[0].carbon[0] == predator_before + prey_carbon


def test_partial_bite_leaves_prey_alive():
    program = compile_for_engine(
        lower_to_ir(build_domain_model(tiny_consume_model(efficiency=0.5, rate=0.5)))
    )
    cfg = SimConfig(seed=5, max_ticks=1, grid_width=1, grid_height=1, start_age_mode="zero")
    state = init_run(program, cfg)
    step(state)
    assert state.pops[1].live == 1
    assert state.pops[1].carbon[0] == pytest.approx(0.15)
    assert state.pops[0].carbon[0] == pytest.approx(0.5 + 0.5 * 0.15)


def test_refuge_floor_blocks_removal():
    model = tiny_consume_model(prey_min=1.0)
    program = compile_for_engine(lower_to_ir(build_domain_model(model)))
    cfg = SimConfig(seed=5, max_ticks=30, grid_width=1, grid_height=1, start_age_mode="zero")
    series = run(program, cfg)
    prey_counts = [frame.counts[1] for frame in series.frames]
    assert all(count == 1 for count in prey_counts)


def test_closed_chain_carbon_ledger():
    # start_age_mode zero keeps the chain closed: no age deaths within the
    # window, so consumption is the only carbon flow.
    program = program_for("predator_prey")
    for seed in range(3):
        cfg = SimConfig(
            seed=seed, max_ticks=50, grid_width=9, grid_height=9, start_age_mode="zero"
        )
        state = init_run(program, cfg)
        while state.status is not Status.FINISHED:
            before = state.total_biotic_carbon()
            step(state)
            flows = state.flows
            delta = state.total_biotic_carbon() - before
            expected = flows["assimilated"] - flows["consumed"]
            assert delta == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_general_flow_ledger_balances():
    # All carbon movements are accounted: the per-tick biotic-carbon delta
    # equals the signed sum of the recorded flows.
    for name in ("parasite_pair", "pollinator_garden", "detritus_chain", "mixed_pools"):
        program = program_for(name)
        width, height = grid_of(name)
        cfg = SimConfig(seed=11, max_ticks=30, grid_width=width, grid_height=height)
        state = init_run(program, cfg)
        while state.status is not Status.FINISHED:
            step(state)
            f = state.flows
            expected = (
                f["photosynthesis"]
                - f["respiration"]
                - f["consumed"]
                + f["assimilated"]
                - f["destroyed"]
                + f["affects_delta"]
                + f["produced_carbon"]
                - f["death_loss"]
                + f["converted_to_biotic"]
                + f["pool_consumed_gain"]
            )
            assert f["carbon_delta"] == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_pool_amount_respects_minimum():
    program = program_for("mixed_pools")
    cfg = SimConfig(seed=2, max_ticks=60, grid_width=9, grid_height=9)
    series = run(program, cfg)
    grass_minimum = program.pools[0].minimum_amount
    for frame in series.frames:
        assert frame.amounts[0] >= grass_minimum - 1e-12
        assert frame.amounts[1] >= 0.0


def test_no_agent_outlives_lifespan():
    program = program_for("detritus_chain")
    cfg = SimConfig(seed=9, max_ticks=30, grid_width=11, grid_height=11)
    state = init_run(program, cfg)
    while state.status is not Status.FINISHED:
        step(state)
        for pop in state.pops:
            for slot in range(len(pop.ages)):
                if pop.alive[slot]:
                    assert pop.ages[slot] < pop.spec.lifespan + 1


def test_monotone_extinction():
    # Once a population hits zero it stays zero (neither model routes
    # production or death-conversion into a biotic population).
    for name in ("predator_prey", "parasite_pair"):
        program = program_for(name)
        width, height = grid_of(name)
        series = run(program, SimConfig(seed=4, max_ticks=80, grid_width=width, grid_height=height))
        for index in range(len(program.populations)):
            counts = [frame.counts[index] for frame in series.frames]
            if 0 in counts:
                first_zero = counts.index(0)
                assert all(c == 0 for c in counts[first_zero:])


def test_becomes_on_death_feeds_pool():
    program = program_for("detritus_chain")
    cfg = SimConfig(seed=8, max_ticks=20, grid_width=11, grid_height=11)
    series = run(program, cfg)
    assert series.frames[0].amounts[0] == 0.0
    assert series.frames[-1].amounts[0] > 0.0


def test_produced_spawns_target_population():
    program = program_for("becomes_biotic")
    cfg = SimConfig(seed=3, max_ticks=10, grid_width=9, grid_height=9)
    series = run(program, cfg)
    butterfly_counts = [frame.counts[1] for frame in series.frames]
    assert butterfly_counts[0] == 0
    assert max(butterfly_counts) > 0


def test_pause_resume_trace_equals_uninterrupted():
    program = program_for("predator_prey")
    cfg = SimConfig(seed=13, max_ticks=40, grid_width=9, grid_height=9)

    uninterrupted = run(program, cfg)

    state = init_run(program, cfg)
    frames = [state.frame()]
    state = control(state, Command.START)
    for _ in range(10):
        if state.status is Status.FINISHED:
            break
        _, frame = step(state)
        frames.append(frame)
    if state.status is Status.RUNNING:
        state = control(state, Command.STOP)
        assert state.status is Status.PAUSED
        state = control(state, Command.START)
    while state.status is not Status.FINISHED:
        _, frame = step(state)
        frames.append(frame)
    assert tuple(frames) == uninterrupted.frames


def test_run_twice_identical_series(kudzu_model):
    program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    cfg = SimConfig(seed=42, max_ticks=60, grid_width=21, grid_height=21)
    assert run(program, cfg).to_csv_bytes() == run(program, cfg).to_csv_bytes()


def test_control_transitions():
    program = program_for("lone_agent")
    cfg = SimConfig(seed=1, max_ticks=5, grid_width=9, grid_height=9)
    state = init_run(program, cfg)
    with pytest.raises(IllegalTransition):
        control(state, Command.STOP)  # stop only from running
    state = control(state, Command.START)
    tick_before = state.tick
    state = control(state, Command.STOP)
    assert state.status is Status.PAUSED
    assert state.tick == tick_before
    state = control(state, Command.START)
    while state.status is not Status.FINISHED:
        step(state)
    with pytest.raises(IllegalTransition):
        control(state, Command.START)


def test_reset_derives_fresh_deterministic_seed():
    program = program_for("lone_agent")
    cfg = SimConfig(seed=1, max_ticks=5, grid_width=9, grid_height=9)
    state = init_run(program, cfg)
    first = control(state, Command.RESET)
    assert first.tick == 0
    assert first.status in (Status.READY, Status.FINISHED)
    assert first.config.seed != cfg.seed
    again = control(init_run(program, cfg), Command.RESET)
    assert first.digest() == again.digest()
    second = control(first, Command.RESET)
    assert second.config.seed != first.config.seed


def test_capacity_cap_enforced():
    model = tiny_consume_model()
    huge = replace(
        model.components[0],
        properties=replace(model.components[0].properties, starting_population=2_000_000.0),
    )
    model = ConceptualModel(
        id="huge", name="huge", components=(huge, model.components[1]),
        relationships=model.relationships,
    )
    program = compile_for_engine(lower_to_ir(build_domain_model(model)))
    with pytest.raises(CapacityExceeded):
        init_run(program, SimConfig(seed=1, max_ticks=1, grid_width=9, grid_height=9))


def test_snapshot_cadence():
    program = program_for("predator_prey")
    cfg = SimConfig(seed=6, max_ticks=40, grid_width=9, grid_height=9, snapshot_every=5)
    series = run(program, cfg)
    ticks = [frame.tick for frame in series.frames]
    assert ticks == list(range(0, 41, 5))


def test_csv_header_and_layout():
    program = program_for("mixed_pools")
    cfg = SimConfig(seed=2, max_ticks=3, grid_width=9, grid_height=9)
    text = run(program, cfg).to_csv_bytes().decode("utf-8")
    lines = text.strip().split("\n")
    assert lines[0] == "tick,goat_count,goat_carbon,grass_pool_amount,heat_amount"
    assert len(lines) == 5


def test_kudzu_qualitative_ordering(kudzu_scenario):
    # Final hornbeam population is highest at the medium bug level for a
    # majority of seeds.
    finals = {}
    for level in ("low", "medium", "high"):
        name = kudzu_scenario["levels"][level]["model"].removesuffix(".json")
        program = program_for(name)
        finals[level] = []
        for seed in range(5):
            cfg = SimConfig(
                seed=seed,
                max_ticks=kudzu_scenario["months"],
                grid_width=kudzu_scenario["grid_width"],
                grid_height=kudzu_scenario["grid_height"],
            )
            finals[level].append(run(program, cfg).frames[-1].counts[1])
    wins = sum(
        1
        for low, med, high in zip(finals["low"], finals["medium"], finals["high"])
        if med > low and med > high
    )
    assert wins >= 3
