"""Deterministic agent-based interpreter for EngineProgram on a toroidal grid.

One tick is one month. The trace is a pure function of
(EngineProgram, SimConfig); every random draw below is specified so that
an independent interpreter of the simulation IR reproduces the trace
bit-for-bit.

Execution semantics (normative)
-------------------------------

Substreams: population ``p`` draws from substream index ``p``; pool ``j``
from index ``len(populations) + j``. All draws for an action come from
the acting (source) group's substream.

init:
  Populations spawn in program order, ``starting`` agents each. Per agent:
  draw ``x = below(W)``, ``y = below(H)``; density-role agents probe
  forward row-major (packed index ``y*W + x``) to the first cell without
  a density occupant (one density agent per cell across populations) and
  are skipped if the grid is full. Age: with ``start_age_mode="uniform"``
  draw ``below(lifespan)``; with ``"zero"`` no draw, age 0. Heading is the
  population's ``move_direction``; carbon is ``carbon_biomass``. Pools
  start at ``amount`` (availability scaling uses this initial value).

tick (phases in order: move, metabolize, interact, reproduce, die, regrow):
  0. Every live agent's age increments by one (no draws).
  1. move: per population with velocity > 0, per live agent in slot
     order: draw ``u``; heading += (2u-1) * max_turn, wrapped to
     [0, 360); dx = round(v*cos), dy = round(v*sin) (Python half-even
     round); position wraps toroidally. Mobile cell maps are rebuilt
     after the whole phase (slot-ascending within a cell) and then
     maintained incrementally by spawns/removals.
  2. metabolize: instruction order (per population: photosynthesize then
     respire). Photosynthesis gain = rate * product of coupled-pool
     availability, availability = clamp(amount/initial, 0, 2) (1.0 when
     the initial amount is 0). Respiration is clamped at the agent's
     carbon so carbon never goes negative. No draws.
  3. interact: interaction groups run in program order. Per live source
     agent (slots existing at group start, in order):
       candidates: target agents within Chebyshev radius 1 (9 cells in
       (dx, dy) order (-1,-1),(-1,0),...,(1,1), deduplicated on small
       grids; within a cell, ascending slot), or the pool itself (for
       pool targets; consumes/destroys require amount > minimum).
       No candidates: no draws. Else draw ``u1``; fires iff
       u1 < probability. On fire with agent candidates, always draw
       ``u2``; pick index ``min(int(u2*n), n-1)``. Pool targets draw no
       ``u2``. Effects apply immediately:
         consumes agent: bite = rate * prey_carbon; blocked (no effect)
           if the bite would kill and the target population is at its
           minimum; otherwise prey loses the bite, source gains
           efficiency * bite, prey dies at carbon <= 0.
         consumes pool: take = rate * (amount - minimum); source gains
           efficiency * take.
         destroys agent: like consumes but no gain anywhere.
         destroys pool: amount -= rate * (amount - minimum).
         affects agent: carbon *= (1 + modifier).
         affects pool: amount = max(minimum, amount * (1 + modifier)).
       produces: per source agent draw ``poisson(rate)`` = k; pool
       target gains k units; biotic targets spawn k agents (carbon =
       target carbon_biomass, age 0): mobile at the source cell with
       heading = 360 * draw; density into a free cell among the 9 around
       the source (draw picks among free; stop when none remain).
       Pool-source affects ("ambient"): per live target agent in slot
       order, draw ``u1`` from the pool's substream; on fire carbon *=
       (1 + modifier * availability). Pool-to-pool: single ``u1``.
  4. reproduce: per population in program order with brood >= 1, over
     slots existing at phase start: an agent with age >= maturity and
     (age - maturity) % interval == 0 spawns its brood. Brood carbon =
     fraction (0.2) of the parent's carbon at eligibility, split evenly;
     a deducted share happens only for each offspring actually born.
     Each born offspring consumes exactly one draw: mobile, heading =
     360 * u (born at parent cell); density, free-cell pick among the 9
     around the parent (recomputed per offspring; brood stops when no
     cell is free).
  5. die: per population, per live slot: death iff age >= lifespan or
     carbon <= 0. On death, each becomes-on-death edge from the
     population (program order) converts percent*body_mass: pools gain
     it; biotic targets spawn one agent (no draws: mobile at the dead
     agent's cell with the target's move_direction; density probes
     row-major from the dead cell, skipped when no cell is free).
  6. regrow: pool amount = max(minimum, amount + growth_rate).

  Then tick += 1; the run finishes at max_ticks, or when the program has
  biotic populations and all are extinct.

Interactions cannot reduce a population below its minimum (refuge
floor); aging and starvation can. A single run is sequential; distinct
runs may execute concurrently (no shared mutable state).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Any, Iterator, Optional

from ..program import EngineProgram, Instr, PopulationSpec
from .rng import Xoshiro256StarStar, reset_seed, substream_seed

_CONSTANTS = json.loads(
    resources.files("ecoforge.data").joinpath("engine_constants.json").read_text()
)
OFFSPRING_FRACTION = _CONSTANTS["offspring_carbon_fraction"]
MAX_TURN = _CONSTANTS["max_turn_degrees"]
SCALE_MIN = _CONSTANTS["light_scale_min"]
SCALE_MAX = _CONSTANTS["light_scale_max"]
AGENT_CAPACITY = _CONSTANTS["agent_capacity"]

OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1))


class EngineError(Exception):
    pass


class CapacityExceeded(EngineError):
    pass


class IllegalTransition(EngineError):
    def __init__(self, command: str, status: "Status"):
        super().__init__(f"cannot {command} while {status.value}")


class Status(str, Enum):
    READY = "ready"
    RUNNING = "running"
    PAUSED = "paused"
    FINISHED = "finished"


class Command(str, Enum):
    START = "start"
    STOP = "stop"
    RESET = "reset"


@dataclass(frozen=True)
class SimConfig:
    seed: int
    max_ticks: int
    grid_width: int = 51
    grid_height: int = 51
    snapshot_every: int = 1
    start_age_mode: str = "uniform"  # "uniform" | "zero"

    def __post_init__(self):
        if self.grid_width < 1 or self.grid_height < 1:
            raise ValueError("grid dimensions must be >= 1")
        if self.max_ticks < 0:
            raise ValueError("max_ticks must be >= 0")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if self.start_age_mode not in ("uniform", "zero"):
            raise ValueError("start_age_mode must be 'uniform' or 'zero'")

    def as_dict(self) -> dict[str, Any]:
        return dict(vars(self))


@dataclass(frozen=True)
class SimFrame:
    tick: int
    counts: tuple[int, ...]
    carbons: tuple[float, ...]
    amounts: tuple[float, ...]


@dataclass(frozen=True)
class TimeSeries:
    frames: tuple[SimFrame, ...]
    config: SimConfig
    final_status: Status
    population_names: tuple[str, ...]
    pool_names: tuple[str, ...]

    def to_csv_bytes(self) -> bytes:
        header = ["tick"]
        for name in self.population_names:
            header.append(f"{name}_count")
            header.append(f"{name}_carbon")
        for name in self.pool_names:
            header.append(f"{name}_amount")
        lines = [",".join(header)]
        for frame in self.frames:
            row = [str(frame.tick)]
            for count, carbon in zip(frame.counts, frame.carbons):
                row.append(str(count))
                row.append(repr(carbon))
            for amount in frame.amounts:
                row.append(repr(amount))
            lines.append(",".join(row))
        return ("\n".join(lines) + "\n").encode("utf-8")

    def as_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.as_dict(),
            "final_status": self.final_status.value,
            "population_names": list(self.population_names),
            "pool_names": list(self.pool_names),
            "frames": [
                {
                    "tick": f.tick,
                    "counts": list(f.counts),
                    "carbons": list(f.carbons),
                    "amounts": list(f.amounts),
                }
                for f in self.frames
            ],
        }


def sanitize_name(label: str) -> str:
    out = []
    for ch in label.lower():
        out.append(ch if ch.isalnum() else "_")
    name = "".join(out).strip("_")
    while "__" in name:
        name = name.replace("__", "_")
    return name or "component"


def series_names(program: EngineProgram) -> tuple[tuple[str, ...], tuple[str, ...]]:
    seen: dict[str, int] = {}

    def unique(label: str) -> str:
        name = sanitize_name(label)
        seen[name] = seen.get(name, 0) + 1
        return name if seen[name] == 1 else f"{name}_{seen[name]}"

    pops = tuple(unique(p.label) for p in program.populations)
    pools = tuple(unique(p.label) for p in program.pools)
    return pops, pools


class _Pop:
    """Columnar per-population agent store."""

    __slots__ = (
        "spec", "ages", "carbon", "xs", "ys", "headings", "alive", "live", "cells",
    )

    def __init__(self, spec: PopulationSpec):
        self.spec = spec
        self.ages: list[int] = []
        self.carbon: list[float] = []
        self.xs: list[int] = []
        self.ys: list[int] = []
        self.headings: list[float] = []
        self.alive: list[bool] = []
        self.live = 0
        self.cells: dict[int, list[int]] = {}  # packed cell -> slots (mobile only)

    def total_carbon(self) -> float:
        alive = self.alive
        carbon = self.carbon
        return sum(carbon[i] for i in range(len(carbon)) if alive[i])


@dataclass
class _Action:
    """An interaction group folded into one executable action."""

    kind: str  # consumes | destroys | affects | produces | ambient
    source: int
    target: int
    target_pool: bool
    probability: float = 0.0
    rate: float = 0.0
    efficiency: float = 0.0
    modifier: float = 0.0


class SimState:
    def __init__(self, program: EngineProgram, config: SimConfig):
        self.program = program
        self.config = config
        self.tick = 0
        self.status = Status.READY
        self.reset_count = 0
        self.pops: list[_Pop] = []
        self.pool_amounts: list[float] = []
        self.pool_initial: list[float] = []
        self.ground: dict[int, tuple[int, int]] = {}  # packed cell -> (pop, slot)
        self.streams: list[Xoshiro256StarStar] = []
        self.flows: dict[str, float] = {}
        self.flow_history: list[dict[str, float]] = []
        # Derived, immutable per program:
        self.actions: list[_Action] = []
        self.couplings: dict[int, list[int]] = {}  # pop index -> pool indices
        self.becomes: dict[int, list[tuple[int, bool, float]]] = {}

    # -- digests ------------------------------------------------------------

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.tick, self.status.value, self.reset_count)).encode())
        for pop in self.pops:
            h.update(
                repr((pop.ages, pop.carbon, pop.xs, pop.ys, pop.headings, pop.alive)).encode()
            )
        h.update(repr(self.pool_amounts).encode())
        for stream in self.streams:
            h.update(repr(stream.getstate()).encode())
        return h.hexdigest()

    def frame(self) -> SimFrame:
        return SimFrame(
            tick=self.tick,
            counts=tuple(pop.live for pop in self.pops),
            carbons=tuple(pop.total_carbon() for pop in self.pops),
            amounts=tuple(self.pool_amounts),
        )

    def total_biotic_carbon(self) -> float:
        return sum(pop.total_carbon() for pop in self.pops)


def _fold_actions(program: EngineProgram) -> list[_Action]:
    groups: dict[int, list[Instr]] = {}
    order: list[int] = []
    for instr in program.phases.get("interact", ()):
        if instr.group is None:
            continue
        if instr.group not in groups:
            groups[instr.group] = []
            order.append(instr.group)
        groups[instr.group].append(instr)
    actions = []
    for gid in order:
        instrs = groups[gid]
        ops = {i.op for i in instrs}
        head = instrs[0]
        action = _Action(
            kind="",
            source=head.source,
            target=head.target if head.target is not None else -1,
            target_pool=head.target_pool,
        )
        if "carbon_transfer" in ops:
            action.kind = "consumes"
        elif "remove_target" in ops:
            action.kind = "destroys"
        elif "stochastic_emit" in ops:
            action.kind = "produces"
        elif "growth_modifier" in ops:
            action.kind = "ambient" if head.source_pool else "affects"
        else:
            raise ValueError(f"unrecognized interaction group: {sorted(ops)}")
        for instr in instrs:
            c = instr.constants
            action.probability = c.get("interaction_probability", action.probability)
            if instr.op == "carbon_transfer":
                action.rate = c.get("consumption_rate", 0.0)
                action.efficiency = c.get("assimilation_efficiency", 0.0)
            elif instr.op == "remove_target":
                action.rate = c.get("destruction_rate", 0.0)
            elif instr.op == "stochastic_emit":
                action.rate = c.get("production_rate", 0.0)
            elif instr.op == "growth_modifier":
                action.modifier = c.get("growth_rate_modifier", 0.0)
        actions.append(action)
    return actions


def init_run(program: EngineProgram, config: SimConfig) -> SimState:
    """Spawn the initial world; see the module docstring for draw order."""
    program.validate()
    state = SimState(program, config)
    state.actions = _fold_actions(program)
    for instr in program.phases.get("metabolize", ()):
        if instr.op == "couple_photosynthesis":
            state.couplings.setdefault(instr.target, []).append(instr.source)
    for instr in program.phases.get("die", ()):
        if instr.op == "become_on_death":
            state.becomes.setdefault(instr.source, []).append(
                (instr.target, instr.target_pool, instr.constants["converted_carbon"])
            )

    total = sum(pop.starting for pop in program.populations)
    if total > AGENT_CAPACITY:
        raise CapacityExceeded(f"{total} starting agents exceed the {AGENT_CAPACITY} cap")

    n_streams = len(program.populations) + len(program.pools)
    state.streams = [
        Xoshiro256StarStar(substream_seed(config.seed, i)) for i in range(n_streams)
    ]

    width, height = config.grid_width, config.grid_height
    for spec in program.populations:
        pop = _Pop(spec)
        state.pops.append(pop)
        stream = state.streams[spec.index]
        for _ in range(spec.starting):
            x = stream.below(width)
            y = stream.below(height)
            if spec.role == "density":
                cell = _probe_free(state.ground, y * width + x, width * height)
                if cell is None:
                    continue
            else:
                cell = y * width + x
            if config.start_age_mode == "uniform":
                age = stream.below(spec.lifespan)
            else:
                age = 0
            _spawn(state, pop, cell, age, spec.carbon_biomass, spec.move_direction)

    for pool in program.pools:
        state.pool_amounts.append(pool.amount)
        state.pool_initial.append(pool.amount)

    if config.max_ticks == 0 or _all_biotic_extinct(state):
        state.status = Status.FINISHED
    return state


def _all_biotic_extinct(state: SimState) -> bool:
    return bool(state.pops) and all(pop.live == 0 for pop in state.pops)


def _probe_free(ground: dict, start: int, n_cells: int) -> Optional[int]:
    """First density-free cell scanning forward (wrapping) from `start`."""
    if len(ground) >= n_cells:
        return None
    cell = start
    while cell in ground:
        cell = (cell + 1) % n_cells
    return cell


def _spawn(state: SimState, pop: _Pop, cell: int, age: int, carbon: float, heading: float) -> int:
    width = state.config.grid_width
    slot = len(pop.ages)
    pop.ages.append(age)
    pop.carbon.append(carbon)
    pop.xs.append(cell % width)
    pop.ys.append(cell // width)
    pop.headings.append(heading)
    pop.alive.append(True)
    pop.live += 1
    if pop.spec.role == "density":
        state.ground[cell] = (pop.spec.index, slot)
    else:
        pop.cells.setdefault(cell, []).append(slot)
    return slot


def _remove(state: SimState, pop: _Pop, slot: int) -> None:
    pop.alive[slot] = False
    pop.live -= 1
    cell = pop.ys[slot] * state.config.grid_width + pop.xs[slot]
    if pop.spec.role == "density":
        occupant = state.ground.get(cell)
        if occupant == (pop.spec.index, slot):
            del state.ground[cell]
    else:
        slots = pop.cells.get(cell)
        if slots is not None:
            slots.remove(slot)
            if not slots:
                del pop.cells[cell]


def _neighbor_cells(x: int, y: int, width: int, height: int) -> Iterator[int]:
    dedup = width <= 2 or height <= 2
    seen = set() if dedup else None
    for dx, dy in OFFSETS:
        cell = ((y + dy) % height) * width + (x + dx) % width
        if seen is not None:
            if cell in seen:
                continue
            seen.add(cell)
        yield cell


def _availability(state: SimState, pool_index: int) -> float:
    initial = state.pool_initial[pool_index]
    if initial == 0:
        return 1.0
    scale = state.pool_amounts[pool_index] / initial
    return SCALE_MIN if scale < SCALE_MIN else (SCALE_MAX if scale > SCALE_MAX else scale)


def step(state: SimState) -> tuple[SimState, SimFrame]:
    """Advance one tick (one month)."""
    if state.status is Status.FINISHED:
        raise IllegalTransition("step", state.status)
    program = state.program
    config = state.config
    width, height = config.grid_width, config.grid_height
    n_cells = width * height
    flows = {
        "photosynthesis": 0.0,
        "respiration": 0.0,
        "consumed": 0.0,
        "assimilated": 0.0,
        "destroyed": 0.0,
        "affects_delta": 0.0,
        "produced_carbon": 0.0,
        "death_loss": 0.0,
        "converted_to_pools": 0.0,
        "converted_to_biotic": 0.0,
        "pool_consumed_gain": 0.0,
    }
    carbon_before = state.total_biotic_carbon()

    # Age increment.
    for pop in state.pops:
        ages, alive = pop.ages, pop.alive
        for slot in range(len(ages)):
            if alive[slot]:
                ages[slot] += 1

    # Phase 1: move.
    for pop in state.pops:
        spec = pop.spec
        velocity = spec.move_velocity
        if velocity <= 0 or spec.role == "density":
            continue
        stream = state.streams[spec.index]
        xs, ys, headings, alive = pop.xs, pop.ys, pop.headings, pop.alive
        radians, cos, sin, rnd = math.radians, math.cos, math.sin, stream.random
        for slot in range(len(xs)):
            if not alive[slot]:
                continue
            heading = (headings[slot] + (rnd() * 2.0 - 1.0) * MAX_TURN) % 360.0
            headings[slot] = heading
            angle = radians(heading)
            xs[slot] = (xs[slot] + round(velocity * cos(angle))) % width
            ys[slot] = (ys[slot] + round(velocity * sin(angle))) % height
    for pop in state.pops:
        if pop.spec.role == "density" or pop.spec.move_velocity <= 0:
            continue
        cells: dict[int, list[int]] = {}
        xs, ys, alive = pop.xs, pop.ys, pop.alive
        for slot in range(len(xs)):
            if alive[slot]:
                cells.setdefault(ys[slot] * width + xs[slot], []).append(slot)
        pop.cells = cells

    # Phase 2: metabolize.
    for instr in program.phases.get("metabolize", ()):
        if instr.op == "photosynthesize":
            pop = state.pops[instr.source]
            rate = instr.constants["photosynthesis_rate"]
            scale = 1.0
            for pool_index in state.couplings.get(instr.source, ()):
                scale *= _availability(state, pool_index)
            gain = rate * scale
            if gain != 0.0:
                carbon, alive = pop.carbon, pop.alive
                for slot in range(len(carbon)):
                    if alive[slot]:
                        carbon[slot] += gain
                flows["photosynthesis"] += gain * pop.live
        elif instr.op == "respire":
            pop = state.pops[instr.source]
            rate = instr.constants["respiratory_rate"]
            if rate > 0.0:
                carbon, alive = pop.carbon, pop.alive
                total_loss = 0.0
                for slot in range(len(carbon)):
                    if alive[slot]:
                        loss = rate if carbon[slot] > rate else carbon[slot]
                        carbon[slot] -= loss
                        total_loss += loss
                flows["respiration"] += total_loss

    # Phase 3: interact.
    for action in state.actions:
        kind = action.kind
        if kind == "ambient":
            _run_ambient(state, action, flows)
            continue
        src_pop = state.pops[action.source]
        spec = src_pop.spec
        stream = state.streams[spec.index]
        probability = action.probability
        src_alive = src_pop.alive
        src_carbon = src_pop.carbon
        xs, ys = src_pop.xs, src_pop.ys
        n_slots = len(src_alive)
        if kind == "produces":
            target_pool = action.target_pool
            tgt_pop = None if target_pool else state.pops[action.target]
            for slot in range(n_slots):
                if not src_alive[slot]:
                    continue
                emitted = stream.poisson(action.rate)
                if emitted == 0:
                    continue
                if target_pool:
                    state.pool_amounts[action.target] += emitted
                else:
                    _spawn_produced(state, tgt_pop, xs[slot], ys[slot], emitted, stream, flows)
            continue
        target_pool = action.target_pool
        if target_pool:
            t_index = action.target
            minimum = program.pools[t_index].minimum_amount
            for slot in range(n_slots):
                if not src_alive[slot]:
                    continue
                amount = state.pool_amounts[t_index]
                if kind != "affects" and amount <= minimum:
                    continue
                if stream.random() >= probability:
                    continue
                if kind == "consumes":
                    take = action.rate * (amount - minimum)
                    state.pool_amounts[t_index] = amount - take
                    gain = action.efficiency * take
                    src_carbon[slot] += gain
                    flows["pool_consumed_gain"] += gain
                elif kind == "destroys":
                    state.pool_amounts[t_index] = amount - action.rate * (amount - minimum)
                else:  # affects
                    scaled = amount * (1.0 + action.modifier)
                    state.pool_amounts[t_index] = scaled if scaled > minimum else minimum
            continue
        tgt_pop = state.pops[action.target]
        tgt_spec = tgt_pop.spec
        density_target = tgt_spec.role == "density"
        tgt_index = tgt_spec.index
        ground = state.ground
        tgt_cells = tgt_pop.cells
        tgt_alive = tgt_pop.alive
        tgt_carbon = tgt_pop.carbon
        minimum_n = tgt_spec.minimum
        for slot in range(n_slots):
            if not src_alive[slot]:
                continue
            candidates: list[int] = []
            if density_target:
                for cell in _neighbor_cells(xs[slot], ys[slot], width, height):
                    occupant = ground.get(cell)
                    if occupant is not None and occupant[0] == tgt_index:
                        candidates.append(occupant[1])
            else:
                for cell in _neighbor_cells(xs[slot], ys[slot], width, height):
                    found = tgt_cells.get(cell)
                    if found:
                        candidates.extend(found)
            if not candidates:
                continue
            if stream.random() >= probability:
                continue
            pick = int(stream.random() * len(candidates))
            if pick >= len(candidates):
                pick = len(candidates) - 1
            victim = candidates[pick]
            if not tgt_alive[victim]:
                continue
            old = tgt_carbon[victim]
            if kind == "consumes":
                bite = action.rate * old
                if old - bite <= 0.0 and tgt_pop.live <= minimum_n:
                    continue
                tgt_carbon[victim] = old - bite
                gain = action.efficiency * bite
                src_carbon[slot] += gain
                flows["consumed"] += bite
                flows["assimilated"] += gain
                if tgt_carbon[victim] <= 0.0:
                    _remove(state, tgt_pop, victim)
            elif kind == "destroys":
                lost = action.rate * old
                if old - lost <= 0.0 and tgt_pop.live <= minimum_n:
                    continue
                tgt_carbon[victim] = old - lost
                flows["destroyed"] += lost
                if tgt_carbon[victim] <= 0.0:
                    _remove(state, tgt_pop, victim)
            else:  # affects
                tgt_carbon[victim] = old * (1.0 + action.modifier)
                flows["affects_delta"] += tgt_carbon[victim] - old

    # Phase 4: reproduce.
    for instr in program.phases.get("reproduce", ()):
        pop = state.pops[instr.source]
        spec = pop.spec
        brood = spec.brood
        if brood < 1:
            continue
        stream = state.streams[spec.index]
        maturity, interval = spec.maturity, spec.interval
        density = spec.role == "density"
        ages, alive, carbon = pop.ages, pop.alive, pop.carbon
        xs, ys = pop.xs, pop.ys
        for slot in range(len(ages)):
            if not alive[slot]:
                continue
            age = ages[slot]
            if age < maturity or (age - maturity) % interval != 0:
                continue
            share = OFFSPRING_FRACTION * carbon[slot] / brood
            for _ in range(brood):
                if density:
                    free = [
                        cell
                        for cell in _neighbor_cells(xs[slot], ys[slot], width, height)
                        if cell not in state.ground
                    ]
                    if not free:
                        break
                    pick = int(stream.random() * len(free))
                    if pick >= len(free):
                        pick = len(free) - 1
                    cell = free[pick]
                    heading = spec.move_direction
                else:
                    heading = stream.random() * 360.0
                    cell = ys[slot] * width + xs[slot]
                carbon[slot] -= share
                _spawn(state, pop, cell, 0, share, heading)

    # Phase 5: die (with becomes-on-death conversions).
    for pop in state.pops:
        spec = pop.spec
        lifespan = spec.lifespan
        conversions = state.becomes.get(spec.index, ())
        ages, alive, carbon = pop.ages, pop.alive, pop.carbon
        for slot in range(len(ages)):
            if not alive[slot]:
                continue
            if ages[slot] >= lifespan or carbon[slot] <= 0.0:
                flows["death_loss"] += carbon[slot] if carbon[slot] > 0.0 else 0.0
                _remove(state, pop, slot)
                for t_index, to_pool, converted in conversions:
                    if to_pool:
                        state.pool_amounts[t_index] += converted
                        flows["converted_to_pools"] += converted
                    else:
                        tgt_pop = state.pops[t_index]
                        cell = pop.ys[slot] * width + pop.xs[slot]
                        if tgt_pop.spec.role == "density":
                            found = _probe_free(state.ground, cell, n_cells)
                            if found is None:
                                continue
                            cell = found
                        _spawn(
                            state, tgt_pop, cell, 0, converted, tgt_pop.spec.move_direction
                        )
                        flows["converted_to_biotic"] += converted

    # Phase 6: regrow.
    for instr in program.phases.get("regrow", ()):
        index = instr.source
        amount = state.pool_amounts[index] + instr.constants["growth_rate"]
        minimum = program.pools[index].minimum_amount
        state.pool_amounts[index] = amount if amount > minimum else minimum

    state.tick += 1
    state.flows = flows
    state.flow_history.append(flows)
    flows["carbon_delta"] = state.total_biotic_carbon() - carbon_before

    if state.tick >= config.max_ticks or _all_biotic_extinct(state):
        state.status = Status.FINISHED

    _maybe_compact(state)
    return state, state.frame()


def _run_ambient(state: SimState, action: _Action, flows: dict[str, float]) -> None:
    pool_index = action.source
    stream = state.streams[len(state.program.populations) + pool_index]
    probability = action.probability
    if action.target_pool:
        if stream.random() < probability:
            t = action.target
            minimum = state.program.pools[t].minimum_amount
            scaled = state.pool_amounts[t] * (1.0 + action.modifier)
            state.pool_amounts[t] = scaled if scaled > minimum else minimum
        return
    availability = _availability(state, pool_index)
    pop = state.pops[action.target]
    carbon, alive = pop.carbon, pop.alive
    factor = 1.0 + action.modifier * availability
    for slot in range(len(carbon)):
        if not alive[slot]:
            continue
        if stream.random() < probability:
            old = carbon[slot]
            carbon[slot] = old * factor
            flows["affects_delta"] += carbon[slot] - old


def _spawn_produced(state, tgt_pop, x, y, count, stream, flows) -> None:
    width, height = state.config.grid_width, state.config.grid_height
    spec = tgt_pop.spec
    if spec.role == "density":
        for _ in range(count):
            free = [
                cell
                for cell in _neighbor_cells(x, y, width, height)
                if cell not in state.ground
            ]
            if not free:
                break
            pick = int(stream.random() * len(free))
            if pick >= len(free):
                pick = len(free) - 1
            _spawn(state, tgt_pop, free[pick], 0, spec.carbon_biomass, spec.move_direction)
            flows["produced_carbon"] += spec.carbon_biomass
    else:
        cell = y * width + x
        for _ in range(count):
            heading = stream.random() * 360.0
            _spawn(state, tgt_pop, cell, 0, spec.carbon_biomass, heading)
            flows["produced_carbon"] += spec.carbon_biomass


def _maybe_compact(state: SimState) -> None:
    """Drop dead slots when they dominate; preserves live order and draws."""
    width = state.config.grid_width
    for pop in state.pops:
        size = len(pop.ages)
        if size < 4096 or pop.live * 2 > size:
            continue
        keep = [slot for slot in range(size) if pop.alive[slot]]
        remap = {old: new for new, old in enumerate(keep)}
        pop.ages = [pop.ages[i] for i in keep]
        pop.carbon = [pop.carbon[i] for i in keep]
        pop.xs = [pop.xs[i] for i in keep]
        pop.ys = [pop.ys[i] for i in keep]
        pop.headings = [pop.headings[i] for i in keep]
        pop.alive = [True] * len(keep)
        if pop.spec.role == "density":
            index = pop.spec.index
            for cell, (p, slot) in list(state.ground.items()):
                if p == index:
                    state.ground[cell] = (p, remap[slot])
        else:
            cells: dict[int, list[int]] = {}
            for slot in range(len(pop.ages)):
                cells.setdefault(pop.ys[slot] * width + pop.xs[slot], []).append(slot)
            pop.cells = cells


def run(program: EngineProgram, config: SimConfig) -> TimeSeries:
    """Run to completion, emitting a frame every snapshot_every ticks."""
    state = init_run(program, config)
    frames = [state.frame()]
    while state.status is not Status.FINISHED:
        state.status = Status.RUNNING
        _, frame = step(state)
        if state.tick % config.snapshot_every == 0:
            frames.append(frame)
    pop_names, pool_names = series_names(program)
    return TimeSeries(
        frames=tuple(frames),
        config=config,
        final_status=state.status,
        population_names=pop_names,
        pool_names=pool_names,
    )


def control(state: SimState, command: Command) -> SimState:
    """Start/Stop/Reset transitions; Reset derives a fresh seed from the config."""
    if command is Command.RESET:
        count = state.reset_count + 1
        config = state.config
        fresh = SimConfig(
            seed=reset_seed(config.seed, count),
            max_ticks=config.max_ticks,
            grid_width=config.grid_width,
            grid_height=config.grid_height,
            snapshot_every=config.snapshot_every,
            start_age_mode=config.start_age_mode,
        )
        new_state = init_run(state.program, fresh)
        new_state.reset_count = count
        return new_state
    if command is Command.START:
        if state.status not in (Status.READY, Status.PAUSED):
            raise IllegalTransition("start", state.status)
        state.status = Status.RUNNING
        return state
    if command is Command.STOP:
        if state.status is not Status.RUNNING:
            raise IllegalTransition("stop", state.status)
        state.status = Status.PAUSED
        return state
    raise ValueError(f"unknown command {command!r}")
