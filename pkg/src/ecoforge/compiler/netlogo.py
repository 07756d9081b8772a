"""Stage 3a: simulation IR -> NetLogo 6.x source text (code tab only).

Emission is text-only and deterministic; the generated source is never
executed here. Each mobile or density population becomes a breed (density
populations are emitted as stationary turtles so the breed-per-component
mapping stays uniform); substance pools become globals; carbon becomes the
turtle variable ``energy``; movement uses heading/forward. A shipped
subset grammar checker (bracket balance plus a known-primitive lexicon)
guards the output shape in tests.
"""

from __future__ import annotations

import re
from importlib import resources

from ..model import BioticProperties, RelationshipKind
from ..program import count_of, interval_ticks, lifespan_ticks, maturity_ticks
from .domain import DomainModel, Role
from .ir import SimulationProgram

_LEXICON = frozenset(
    line.strip()
    for line in resources.files("ecoforge.data")
    .joinpath("netlogo_lexicon.txt")
    .read_text()
    .splitlines()
    if line.strip()
)

_OPERATORS = frozenset("+ - * / = < > <= >= != ( ) [ ]".split())
_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?([eE][-+]?\d+)?$")


def slug(label: str) -> str:
    out = []
    for ch in label.lower():
        out.append(ch if ch.isalnum() else "-")
    name = "-".join(part for part in "".join(out).split("-") if part)
    return name or "agent"


def plural(name: str) -> str:
    return name + ("es" if name.endswith("s") else "s")


def _fmt(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return f"{int(value)}"
    return repr(value)


class _Writer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str = "") -> None:
        self.lines.append(("  " * self.depth + text) if text else "")

    def open(self, text: str) -> None:
        self.line(text)
        self.depth += 1

    def close(self, text: str = "end") -> None:
        self.depth -= 1
        self.line(text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def emit_netlogo(program: SimulationProgram) -> str:
    domain = program.domain
    biotic = [pop for pop in domain.populations if pop.role is not Role.SUBSTANCE_POOL]
    pools = [pop for pop in domain.populations if pop.role is Role.SUBSTANCE_POOL]

    names: dict[str, str] = {}
    used: set[str] = set()
    for pop in domain.populations:
        base = slug(pop.component.label)
        name = base
        ordinal = 2
        while name in used:
            name = f"{base}-{ordinal}"
            ordinal += 1
        used.add(name)
        names[pop.component.id] = name

    couplings: dict[str, list[str]] = {}
    for op in program.phases["metabolize"]:
        if op.op == "couple_photosynthesis":
            couplings.setdefault(op.target, []).append(op.subject)

    w = _Writer()
    title = domain.model.name or "ecology model"
    w.line(f";; {title} - generated agent-based simulation")
    w.line(";; code tab only; one breed per biotic component")
    w.line()

    global_names = []
    for pool in pools:
        global_names.append(names[pool.component.id])
        global_names.append(f"{names[pool.component.id]}-initial")
    w.line("globals [month " + " ".join(global_names) + "]" if global_names else "globals [month]")
    for pop in biotic:
        name = names[pop.component.id]
        w.line(f"breed [{plural(name)} {name}]")
    w.line("turtles-own [energy age]")
    w.line()

    # setup
    w.open("to setup")
    w.line("clear-all")
    w.line("set month 0")
    for pool in pools:
        name = names[pool.component.id]
        amount = _fmt(pool.component.properties.amount)
        w.line(f"set {name} {amount}")
        w.line(f"set {name}-initial {amount}")
    for pop in biotic:
        props = pop.component.properties
        assert isinstance(props, BioticProperties)
        name = names[pop.component.id]
        w.open(f"create-{plural(name)} {count_of(props.starting_population)} [")
        w.line("setxy random-xcor random-ycor")
        w.line(f"set heading {_fmt(props.move_direction)}")
        w.line(f"set energy {_fmt(props.carbon_biomass)}")
        w.line(f"set age random {lifespan_ticks(props.lifespan)}")
        w.close("]")
    w.line("reset-ticks")
    w.close()
    w.line()

    # go
    procedures: list[str] = []
    move_pops = [op.subject for op in program.phases["move"]]
    if move_pops:
        procedures.append("move-agents")
    if program.phases["metabolize"]:
        procedures.append("metabolize")
    eat_names: dict[str, str] = {}
    for rel in domain.interactions:
        if rel.kind is RelationshipKind.CONSUMES:
            base = f"eat-{names[rel.target]}"
            name = base
            ordinal = 2
            while name in eat_names.values():
                name = f"{base}-{ordinal}"
                ordinal += 1
            eat_names[rel.id] = name
    interact_procs: list[tuple[str, object]] = []
    for op in program.phases["interact"]:
        if op.op == "encounter_test" or op.op == "stochastic_emit":
            rel = next(r for r in domain.interactions if r.id == op.relationship_id)
            if rel.kind is RelationshipKind.CONSUMES:
                interact_procs.append((eat_names[rel.id], rel))
            elif rel.kind is RelationshipKind.DESTROYS:
                interact_procs.append((f"destroy-{names[rel.target]}-{rel.id}", rel))
            elif rel.kind is RelationshipKind.PRODUCES:
                interact_procs.append((f"produce-{names[rel.target]}-{rel.id}", rel))
            elif rel.kind is RelationshipKind.AFFECTS:
                interact_procs.append((f"affect-{names[rel.target]}-{rel.id}", rel))
    procedures.extend(slug(name) for name, _ in interact_procs)
    if any(
        isinstance(pop.component.properties, BioticProperties)
        and pop.component.properties.offspring_count > 0
        for pop in biotic
    ):
        procedures.append("reproduce-agents")
    if biotic:
        procedures.append("check-death")
    if pools:
        procedures.append("regrow-pools")

    w.open("to go")
    if biotic:
        w.line("if count turtles = 0 [ stop ]")
    for proc in procedures:
        w.line(proc)
    w.line("set month month + 1")
    w.line("tick")
    w.close()
    w.line()

    if move_pops:
        w.open("to move-agents")
        for cid in move_pops:
            pop = domain.population(cid)
            props = pop.component.properties
            w.open(f"ask {plural(names[cid])} [")
            w.line("rt ((random-float 90) - 45)")
            w.line(f"fd {_fmt(props.move_velocity)}")
            w.close("]")
        w.close()
        w.line()

    if program.phases["metabolize"]:
        for pool in pools:
            name = names[pool.component.id]
            w.open(f"to-report {name}-availability")
            w.line(f"if {name}-initial = 0 [ report 1 ]")
            w.line(f"report max (list 0 (min (list 2 ({name} / {name}-initial))))")
            w.close()
            w.line()
        w.open("to metabolize")
        for op in program.phases["metabolize"]:
            if op.op == "photosynthesize":
                name = names[op.subject]
                rate = _fmt(op.params["photosynthesis_rate"])
                scale = " * ".join(
                    f"{names[pool]}-availability" for pool in couplings.get(op.subject, [])
                )
                expr = f"{rate} * {scale}" if scale else rate
                w.line(f"ask {plural(name)} [ set energy energy + {expr} ]")
            elif op.op == "respire":
                name = names[op.subject]
                rate = _fmt(op.params["respiratory_rate"])
                w.line(f"ask {plural(name)} [ set energy energy - {rate} ]")
        w.close()
        w.line()

    for proc_name, rel in interact_procs:
        source = plural(names[rel.source])
        params = rel.params
        w.open(f"to {slug(proc_name)}")
        if rel.kind is RelationshipKind.CONSUMES:
            target_pop = domain.population(rel.target)
            efficiency = domain.population(rel.source).component.properties
            eff = (
                efficiency.assimilation_efficiency
                if isinstance(efficiency, BioticProperties)
                else 0.0
            )
            if target_pop.role is Role.SUBSTANCE_POOL:
                pool_name = names[rel.target]
                minimum = _fmt(target_pop.component.properties.minimum_amount)
                w.open(f"ask {source} [")
                w.open(f"if (random-float 1) < {_fmt(params.interaction_probability)} [")
                w.open(f"if {pool_name} > {minimum} [")
                w.line(
                    f"let take ({_fmt(params.consumption_rate)} * ({pool_name} - {minimum}))"
                )
                w.line(f"set {pool_name} {pool_name} - take")
                w.line(f"set energy energy + ({_fmt(eff)} * take)")
                w.close("]")
                w.close("]")
                w.close("]")
            else:
                target = plural(names[rel.target])
                w.open(f"ask {source} [")
                w.open(f"if (random-float 1) < {_fmt(params.interaction_probability)} [")
                w.line(f"let prey one-of {target} in-radius 1.5")
                w.open("if prey != nobody [")
                w.line(
                    f"set energy energy + ({_fmt(eff)} * {_fmt(params.consumption_rate)}"
                    " * ([energy] of prey))"
                )
                w.line("ask prey [ die ]")
                w.close("]")
                w.close("]")
                w.close("]")
        elif rel.kind is RelationshipKind.DESTROYS:
            target_pop = domain.population(rel.target)
            if target_pop.role is Role.SUBSTANCE_POOL:
                pool_name = names[rel.target]
                minimum = _fmt(target_pop.component.properties.minimum_amount)
                w.open(f"ask {source} [")
                w.open(f"if (random-float 1) < {_fmt(params.interaction_probability)} [")
                w.line(
                    f"set {pool_name} {pool_name} -"
                    f" ({_fmt(params.destruction_rate)} * ({pool_name} - {minimum}))"
                )
                w.close("]")
                w.close("]")
            else:
                target = plural(names[rel.target])
                w.open(f"ask {source} [")
                w.open(f"if (random-float 1) < {_fmt(params.interaction_probability)} [")
                w.line(f"let victim one-of {target} in-radius 1.5")
                w.line("if victim != nobody [ ask victim [ die ] ]")
                w.close("]")
                w.close("]")
        elif rel.kind is RelationshipKind.PRODUCES:
            target_pop = domain.population(rel.target)
            rate = _fmt(params.production_rate)
            if target_pop.role is Role.SUBSTANCE_POOL:
                pool_name = names[rel.target]
                w.line(f"ask {source} [ set {pool_name} {pool_name} + random-poisson {rate} ]")
            else:
                target = plural(names[rel.target])
                carbon = _fmt(target_pop.component.properties.carbon_biomass)
                w.open(f"ask {source} [")
                w.line(
                    f"hatch-{target} (random-poisson {rate})"
                    f" [ set energy {carbon} set age 0 ]"
                )
                w.close("]")
        elif rel.kind is RelationshipKind.AFFECTS:
            factor = f"(1 + {_fmt(params.growth_rate_modifier or 0.0)})"
            prob = _fmt(params.interaction_probability)
            target_pop = domain.population(rel.target)
            source_pop = domain.population(rel.source)
            if target_pop.role is Role.SUBSTANCE_POOL:
                pool_name = names[rel.target]
                line = f"if (random-float 1) < {prob} [ set {pool_name} {pool_name} * {factor} ]"
                if source_pop.role is Role.SUBSTANCE_POOL:
                    w.line(line)
                else:
                    w.line(f"ask {source} [ {line} ]")
            elif source_pop.role is Role.SUBSTANCE_POOL:
                target = plural(names[rel.target])
                w.open(f"ask {target} [")
                w.line(f"if (random-float 1) < {prob} [ set energy energy * {factor} ]")
                w.close("]")
            else:
                target = plural(names[rel.target])
                w.open(f"ask {source} [")
                w.open(f"if (random-float 1) < {prob} [")
                w.line(f"let neighbor one-of {target} in-radius 1.5")
                w.line(f"if neighbor != nobody [ ask neighbor [ set energy energy * {factor} ] ]")
                w.close("]")
                w.close("]")
        w.close()
        w.line()

    if "reproduce-agents" in procedures:
        w.open("to reproduce-agents")
        for pop in biotic:
            props = pop.component.properties
            assert isinstance(props, BioticProperties)
            brood = count_of(props.offspring_count)
            if brood < 1:
                continue
            name = plural(names[pop.component.id])
            maturity = maturity_ticks(props.reproductive_maturity)
            interval = interval_ticks(props.reproductive_interval)
            w.open(f"ask {name} [")
            w.open(f"if age >= {maturity} and ((age - {maturity}) mod {interval}) = 0 [")
            w.line(f"let share (0.2 * energy / {brood})")
            w.line(f"hatch-{name} {brood} [ set energy share set age 0 rt random-float 360 fd 1 ]")
            w.line("set energy energy - (0.2 * energy)")
            w.close("]")
            w.close("]")
        w.close()
        w.line()

    if biotic:
        becomes: dict[str, list] = {}
        for rel in domain.interactions:
            if rel.kind is RelationshipKind.BECOMES_ON_DEATH:
                becomes.setdefault(rel.source, []).append(rel)
        w.open("to check-death")
        w.line("ask turtles [ set age age + 1 ]")
        for pop in biotic:
            props = pop.component.properties
            assert isinstance(props, BioticProperties)
            name = plural(names[pop.component.id])
            lifespan = lifespan_ticks(props.lifespan)
            w.open(f"ask {name} [")
            w.open(f"if age >= {lifespan} or energy <= 0 [")
            for rel in becomes.get(pop.component.id, []):
                converted = rel.params.percent_body_mass * props.body_mass
                target_pop = domain.population(rel.target)
                if target_pop.role is Role.SUBSTANCE_POOL:
                    pool_name = names[rel.target]
                    w.line(f"set {pool_name} {pool_name} + {_fmt(converted)}")
                else:
                    target = plural(names[rel.target])
                    w.line(f"hatch-{target} 1 [ set energy {_fmt(converted)} set age 0 ]")
            w.line("die")
            w.close("]")
            w.close("]")
        w.close()
        w.line()

    if pools:
        w.open("to regrow-pools")
        for pool in pools:
            props = pool.component.properties
            name = names[pool.component.id]
            w.line(
                f"set {name} max (list {_fmt(props.minimum_amount)}"
                f" ({name} + {_fmt(props.growth_rate)}))"
            )
        w.close()
        w.line()

    return w.text()


# ---------------------------------------------------------------------------
# Subset grammar checker


def _tokenize(source: str) -> list[str]:
    tokens: list[str] = []
    for raw_line in source.splitlines():
        line = raw_line.split(";", 1)[0]
        for piece in re.findall(r"\[|\]|\(|\)|[^\s\[\]()]+", line):
            tokens.append(piece)
    return tokens


def check_netlogo(source: str) -> list[str]:
    """Check bracket balance and that every word is a known primitive,
    an operator/number, or a name the source itself declares.

    Returns a list of problems (empty means the subset check passed).
    """
    problems: list[str] = []
    tokens = _tokenize(source)

    stack: list[str] = []
    pairs = {"]": "[", ")": "("}
    for token in tokens:
        if token in ("[", "("):
            stack.append(token)
        elif token in ("]", ")"):
            if not stack or stack[-1] != pairs[token]:
                problems.append(f"unbalanced {token!r}")
            elif stack:
                stack.pop()
    if stack:
        problems.append(f"unclosed {stack[-1]!r}")

    declared: set[str] = set()
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token == "breed" and i + 3 < len(tokens) and tokens[i + 1] == "[":
            plural_name, singular = tokens[i + 2], tokens[i + 3]
            declared.update({plural_name, singular})
            declared.add(f"create-{plural_name}")
            declared.add(f"hatch-{plural_name}")
            i += 4
            continue
        if token in ("globals", "turtles-own") and i + 1 < len(tokens) and tokens[i + 1] == "[":
            j = i + 2
            while j < len(tokens) and tokens[j] != "]":
                declared.add(tokens[j])
                j += 1
            i = j
            continue
        if token in ("to", "to-report", "let") and i + 1 < len(tokens):
            declared.add(tokens[i + 1])
            i += 2
            continue
        i += 1

    for token in tokens:
        if token in ("[", "]", "(", ")"):
            continue
        if token in _OPERATORS or token in _LEXICON or token in declared:
            continue
        if _NUMBER_RE.match(token):
            continue
        problems.append(f"unknown token {token!r}")
    return problems
