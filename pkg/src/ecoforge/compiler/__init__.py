"""Four-stage pipeline from conceptual model to executable backends.

model -> DomainModel -> SimulationProgram (AST + semantic graph) ->
EngineProgram (internal engine) or NetLogo source text.
All stages are pure; compiling concurrently is safe.
"""

from .domain import CompileError, DomainModel, Population, Role, build_domain_model
from .engine_program import compile_for_engine
from .ir import AsgEntry, SimOp, SimulationProgram, lower_to_ir
from .netlogo import check_netlogo, emit_netlogo

__all__ = [
    "AsgEntry",
    "CompileError",
    "DomainModel",
    "Population",
    "Role",
    "SimOp",
    "SimulationProgram",
    "build_domain_model",
    "check_netlogo",
    "compile_for_engine",
    "emit_netlogo",
    "lower_to_ir",
]


def compile_model(model, target: str):
    """One-call convenience: conceptual model to 'engine' or 'netlogo' output."""
    program = lower_to_ir(build_domain_model(model))
    if target == "engine":
        return compile_for_engine(program)
    if target == "netlogo":
        return emit_netlogo(program)
    raise ValueError(f"unknown target {target!r}")
