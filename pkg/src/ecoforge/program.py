"""Flat, fully resolved instruction set executed by the simulation engine.

An EngineProgram has no symbolic references: populations and pools are
index-addressed, every constant is a finite number, and schedule-relevant
integers (lifespan in ticks, brood size, ...) are already quantized.
It has a documented JSON form for debugging and golden tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

PHASES = ("move", "metabolize", "interact", "reproduce", "die", "regrow")

#: Quantization applied when lowering month-valued properties to integer ticks.
#: Any executor of the simulation IR must apply the same rules.


def lifespan_ticks(months: float) -> int:
    return max(1, int(round(months)))


def maturity_ticks(months: float) -> int:
    return max(0, math.ceil(months))


def interval_ticks(months: float) -> int:
    return max(1, int(round(months)))


def count_of(value: float) -> int:
    return max(0, int(round(value)))


@dataclass(frozen=True)
class PopulationSpec:
    index: int
    component_id: str
    label: str
    role: str  # "mobile" | "density"
    starting: int
    minimum: int
    lifespan: int  # ticks
    maturity: int  # ticks
    interval: int  # ticks
    brood: int  # offspring per reproduction event
    body_mass: float
    carbon_biomass: float
    respiratory_rate: float
    photosynthesis_rate: float
    assimilation_efficiency: float
    move_direction: float
    move_velocity: float

    def as_dict(self) -> dict[str, Any]:
        return dict(vars(self))


@dataclass(frozen=True)
class PoolSpec:
    index: int
    component_id: str
    label: str
    amount: float
    minimum_amount: float
    growth_rate: float

    def as_dict(self) -> dict[str, Any]:
        return dict(vars(self))


@dataclass(frozen=True)
class Instr:
    """One micro-operation; interaction groups share a `group` ordinal."""

    op: str
    source: int  # population index, or pool index when source_pool
    target: Optional[int] = None
    source_pool: bool = False
    target_pool: bool = False
    group: Optional[int] = None
    relationship_id: Optional[str] = None
    constants: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "op": self.op,
            "source": self.source,
            "target": self.target,
            "source_pool": self.source_pool,
            "target_pool": self.target_pool,
            "group": self.group,
            "relationship_id": self.relationship_id,
            "constants": dict(self.constants),
        }


@dataclass(frozen=True)
class EngineProgram:
    populations: tuple[PopulationSpec, ...]
    pools: tuple[PoolSpec, ...]
    phases: dict[str, tuple[Instr, ...]]

    def instructions(self) -> list[Instr]:
        return [instr for phase in PHASES for instr in self.phases.get(phase, ())]

    def validate(self) -> None:
        npop, npool = len(self.populations), len(self.pools)
        for instr in self.instructions():
            limit = npool if instr.source_pool else npop
            if not (0 <= instr.source < limit):
                raise ValueError(f"instruction {instr.op} has dangling source {instr.source}")
            if instr.target is not None:
                limit = npool if instr.target_pool else npop
                if not (0 <= instr.target < limit):
                    raise ValueError(f"instruction {instr.op} has dangling target {instr.target}")
            for name, value in instr.constants.items():
                if not math.isfinite(value):
                    raise ValueError(f"instruction {instr.op} constant {name} is not finite")

    def as_dict(self) -> dict[str, Any]:
        return {
            "populations": [p.as_dict() for p in self.populations],
            "pools": [p.as_dict() for p in self.pools],
            "phases": {
                phase: [i.as_dict() for i in self.phases.get(phase, ())] for phase in PHASES
            },
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "EngineProgram":
        populations = tuple(PopulationSpec(**raw) for raw in doc["populations"])
        pools = tuple(PoolSpec(**raw) for raw in doc["pools"])
        phases = {
            phase: tuple(Instr(**raw) for raw in doc["phases"].get(phase, []))
            for phase in PHASES
        }
        return cls(populations=populations, pools=pools, phases=phases)
