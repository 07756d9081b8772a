"""Command-line front door: validate, compile, simulate, lookup, derive,
map-interaction, serve.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 runtime
error. Diagnostics go to stderr, as single-line JSON with --json.
Payload output (reports, mappings, CSV to stdout) is byte-deterministic
for a given input set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .compiler import CompileError, build_domain_model, compile_for_engine, emit_netlogo, lower_to_ir
from .engine import SimConfig, run
from .model import (
    ModelError,
    canonical_json,
    parse_model,
    validate_model,
)
from .ontology import OntologyError, Sign, map_interaction
from .traits import TraitError, active_backend, derive_parameters


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _diag(args, level: str, message: str, **fields) -> None:
    if getattr(args, "json", False):
        payload = {"level": level, "message": message, **fields}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    else:
        print(f"{level}: {message}", file=sys.stderr)


def _read_model(path: str, args):
    data = Path(path).read_bytes()
    return parse_model(data, check_refs=False)


def _grid_from(args, model) -> tuple[int, int]:
    if args.grid:
        raw = args.grid.lower().replace("x", ",")
        parts = [p for p in raw.split(",") if p]
        if len(parts) != 2:
            raise UsageError("--grid expects WIDTHxHEIGHT")
        return int(parts[0]), int(parts[1])
    meta = model.metadata
    width = meta.get("grid_width", 51)
    height = meta.get("grid_height", 51)
    return int(width), int(height)


def cmd_validate(args) -> int:
    model = _read_model(args.model, args)
    report = validate_model(model)
    print(canonical_json(report.as_dict()).decode("utf-8"), end="")
    if report.errors:
        _diag(args, "error", f"{len(report.errors)} validation error(s)", subject=args.model)
        return 2
    return 0


def cmd_compile(args) -> int:
    model = _read_model(args.model, args)
    report = validate_model(model)
    if report.errors:
        _diag(args, "error", "model fails validation", errors=len(report.errors))
        return 2
    program = lower_to_ir(build_domain_model(model))
    if args.target == "netlogo":
        payload = emit_netlogo(program).encode("utf-8")
    else:
        payload = canonical_json(compile_for_engine(program).as_dict())
    if args.output == "-":
        sys.stdout.buffer.write(payload)
    else:
        Path(args.output).write_bytes(payload)
    return 0


def cmd_simulate(args) -> int:
    model = _read_model(args.model, args)
    report = validate_model(model)
    if report.errors:
        _diag(args, "error", "model fails validation", errors=len(report.errors))
        return 2
    program = compile_for_engine(lower_to_ir(build_domain_model(model)))
    width, height = _grid_from(args, model)
    config = SimConfig(
        seed=args.seed,
        max_ticks=args.months,
        grid_width=width,
        grid_height=height,
        snapshot_every=args.snapshot_every,
    )
    series = run(program, config)
    payload = series.to_csv_bytes()
    if args.csv == "-":
        sys.stdout.buffer.write(payload)
    else:
        Path(args.csv).write_bytes(payload)
    if args.plot:
        from .report import render_timeseries

        render_timeseries(series, args.plot, title=model.name)
    return 0


def cmd_lookup(args) -> int:
    backend = active_backend()
    matches = backend.search_taxa(args.name)
    print(canonical_json([m.as_dict() for m in matches]).decode("utf-8"), end="")
    return 0


def cmd_derive(args) -> int:
    backend = active_backend()
    taxon = backend.get_taxon(args.taxon)
    records = backend.fetch_traits(args.taxon)
    _, report = derive_parameters(records, taxon.ancestry)
    sys.stdout.buffer.write(report.to_bytes())
    return 0


def cmd_map_interaction(args) -> int:
    sign = None
    if args.sign == "+":
        sign = Sign.POSITIVE
    elif args.sign == "-":
        sign = Sign.NEGATIVE
    mapping = map_interaction(args.name, sign)
    print(json.dumps(mapping.as_dict(), sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("ECOFORGE_PORT", "8080"))
    uvicorn.run(create_app(), host=args.host, port=port, log_level="info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ecoforge", description="conceptual ecology models to simulations")
    parser.add_argument("--json", action="store_true", help="JSON-lines diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model document")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile a model to a backend")
    p.add_argument("model")
    p.add_argument("--target", choices=("netlogo", "engine"), required=True)
    p.add_argument("-o", "--output", required=True, help="output path, - for stdout")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run the built-in engine")
    p.add_argument("model")
    p.add_argument("--months", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True, help="output path, - for stdout")
    p.add_argument("--plot", help="also render a PNG population chart")
    p.add_argument("--grid", help="WIDTHxHEIGHT (default: model metadata, else 51x51)")
    p.add_argument("--snapshot-every", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lookup", help="search taxa by name")
    p.add_argument("name")
    p.set_defaults(func=cmd_lookup)

    p = sub.add_parser("derive", help="derive simulation parameters for a taxon")
    p.add_argument("taxon")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("map-interaction", help="map a vocabulary name to a relationship kind")
    p.add_argument("name")
    p.add_argument("--sign", choices=("+", "-"))
    p.set_defaults(func=cmd_map_interaction)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ModelError,) as exc:
        _diag(args, "error", str(exc), kind=type(exc).__name__)
        return 2
    except (OntologyError, TraitError, CompileError) as exc:
        _diag(args, "error", str(exc), kind=type(exc).__name__)
        return 3
    except FileNotFoundError as exc:
        _diag(args, "error", str(exc), kind="FileNotFoundError")
        return 3
    except Exception as exc:  # pragma: no cover - last resort
        _diag(args, "error", f"unexpected failure: {exc}", kind=type(exc).__name__)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
