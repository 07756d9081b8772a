"""Pipeline stages: role assignment, IR shape, semantic graph, engine lowering."""

import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import MODELS, load_model
from ecoforge.compiler import (
    CompileError,
    Role,
    build_domain_model,
    compile_for_engine,
    lower_to_ir,
)
from ecoforge.compiler.ir import SCHEDULE
from ecoforge.engine import SimConfig, run
from ecoforge.model import parse_model
from ecoforge.program import EngineProgram
from ir_oracle import oracle_trace


def test_kudzu_role_assignment(kudzu_model):
    domain = build_domain_model(kudzu_model)
    roles = {pop.component.id: pop.role for pop in domain.populations}
    assert roles["kudzu"] is Role.DENSITY_POOL
    assert roles["hornbeam"] is Role.DENSITY_POOL
    assert roles["kudzu-bug"] is Role.MOBILE_AGENT
    assert roles["light"] is Role.SUBSTANCE_POOL


def test_single_mobile_population():
    domain = build_domain_model(load_model("lone_agent"))
    assert [pop.role for pop in domain.populations] == [Role.MOBILE_AGENT]


def test_invalid_model_rejected(kudzu_bytes):
    import json

    doc = json.loads(kudzu_bytes)
    doc["components"][1]["properties"]["assimilation_efficiency"] = 5.0
    model = parse_model(json.dumps(doc))
    with pytest.raises(CompileError):
        build_domain_model(model)


def test_every_component_maps_to_one_population(kudzu_model):
    domain = build_domain_model(kudzu_model)
    assert len(domain.populations) == len(kudzu_model.components)
    assert len(domain.interactions) == len(kudzu_model.relationships)


def test_consumes_decomposition(kudzu_model):
    program = lower_to_ir(build_domain_model(kudzu_model))
    for rel_id in ("bug-eats-kudzu", "bug-eats-hornbeam"):
        ops = [op.op for op in program.phases["interact"] if op.relationship_id == rel_id]
        assert ops == ["encounter_test", "carbon_transfer", "remove_prey"]


def test_destroys_and_affects_decomposition():
    program = lower_to_ir(build_domain_model(load_model("parasite_pair")))
    groups = defaultdict(list)
    for op in program.phases["interact"]:
        groups[op.relationship_id].append(op.op)
    assert groups["wasp-kills-caterpillar"] == ["encounter_test", "remove_target"]
    assert groups["caterpillar-stresses-shrub"] == ["encounter_test", "growth_modifier"]


def test_produces_decomposition():
    program = lower_to_ir(build_domain_model(load_model("pollinator_garden")))
    ops = [op.op for op in program.phases["interact"]
           if op.relationship_id == "bee-pollinates-clover"]
    assert ops == ["stochastic_emit"]


def test_becomes_lowered_into_die_phase():
    program = lower_to_ir(build_domain_model(load_model("detritus_chain")))
    die_ops = [op.op for op in program.phases["die"]
               if op.relationship_id == "shrub-becomes-detritus"]
    assert die_ops == ["on_death_hook", "convert_mass"]


def test_empty_model_valid_ir():
    program = lower_to_ir(build_domain_model(load_model("empty")))
    assert program.schedule == SCHEDULE
    assert all(program.phases[phase] == () for phase in SCHEDULE)
    program.check()
    engine_program = compile_for_engine(program)
    series = run(engine_program, SimConfig(seed=1, max_ticks=3, grid_width=5, grid_height=5))
    assert [frame.tick for frame in series.frames] == [0, 1, 2, 3]


def test_asg_light_coupling(kudzu_model):
    program = lower_to_ir(build_domain_model(kudzu_model))
    photo_ops = [op for op in program.phases["metabolize"] if op.op == "photosynthesize"]
    assert {op.subject for op in photo_ops} == {"kudzu", "hornbeam"}
    for op in photo_ops:
        assert "light" in program.asg[op.id].reads
    regrow_ops = [op for op in program.phases["regrow"]]
    assert len(regrow_ops) == 1
    assert "light" in program.asg[regrow_ops[0].id].writes


def test_light_coupling_replaces_generic_affects(kudzu_model):
    program = lower_to_ir(build_domain_model(kudzu_model))
    couple_rels = {
        op.relationship_id
        for op in program.phases["metabolize"]
        if op.op == "couple_photosynthesis"
    }
    assert couple_rels == {"light-feeds-kudzu", "light-feeds-hornbeam"}
    interact_rels = {op.relationship_id for op in program.phases["interact"]}
    assert couple_rels.isdisjoint(interact_rels)


def test_op_groups_cover_every_relationship():
    for name in ("kudzu", "parasite_pair", "pollinator_garden", "detritus_chain",
                 "mixed_pools", "producer_pool", "becomes_biotic"):
        model = load_model(name)
        program = lower_to_ir(build_domain_model(model))
        rel_ids = set()
        for phase in SCHEDULE:
            for op in program.phases[phase]:
                if op.relationship_id:
                    rel_ids.add(op.relationship_id)
        assert rel_ids == {rel.id for rel in model.relationships}, name


def test_schedule_order_fixed(kudzu_model):
    program = lower_to_ir(build_domain_model(kudzu_model))
    assert program.schedule == ("move", "metabolize", "interact", "reproduce", "die", "regrow")
    assert program.schedule.index("interact") > program.schedule.index("metabolize")
    program.check()


def test_every_op_scheduled_exactly_once(kudzu_model):
    program = lower_to_ir(build_domain_model(kudzu_model))
    ids = [op.id for op in program.all_ops()]
    assert len(ids) == len(set(ids))


def test_engine_lowering_counts(kudzu_model):
    ir = lower_to_ir(build_domain_model(kudzu_model))
    engine_program = compile_for_engine(ir)
    assert len(engine_program.populations) + len(engine_program.pools) == 4
    assert len(engine_program.phases["interact"]) == len(ir.phases["interact"])


def test_engine_program_fully_resolved(kudzu_model):
    engine_program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    engine_program.validate()
    for instr in engine_program.instructions():
        assert isinstance(instr.source, int)
        assert instr.target is None or isinstance(instr.target, int)


def test_engine_program_json_round_trip(kudzu_model):
    engine_program = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    doc = engine_program.as_dict()
    assert EngineProgram.from_dict(doc) == engine_program


def test_pipeline_deterministic(kudzu_model):
    first = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    second = compile_for_engine(lower_to_ir(build_domain_model(kudzu_model)))
    assert first.as_dict() == second.as_dict()


def test_compile_accepts_exactly_the_valid_models():
    # Validation soundness: the compiler accepts any model whose report is
    # clean and rejects any model with errors.
    from hypothesis import given, settings

    from test_model import _valid_models

    @settings(max_examples=25, deadline=None)
    @given(model=_valid_models())
    def check(model):
        from ecoforge.model import validate_model

        assert not validate_model(model).errors
        build_domain_model(model)

    check()


@pytest.mark.parametrize(
    "name",
    ["lone_agent", "predator_prey", "pollinator_garden", "detritus_chain",
     "parasite_pair", "mixed_pools", "producer_pool", "becomes_biotic"],
)
def test_dual_path_equivalence(name):
    model = load_model(name)
    ir = lower_to_ir(build_domain_model(model))
    engine_program = compile_for_engine(ir)
    width = int(model.metadata.get("grid_width", 9))
    height = int(model.metadata.get("grid_height", 9))
    for seed in (3, 17):
        cfg = SimConfig(seed=seed, max_ticks=30, grid_width=width, grid_height=height)
        series = run(engine_program, cfg)
        engine_frames = [(f.tick, f.counts, f.carbons, f.amounts) for f in series.frames]
        assert engine_frames == oracle_trace(ir, seed, 30, width, height), (name, seed)
