"""Calibration harness for the kudzu scenario.

Sweeps the bug starting population over the documented grid, classifies
each run's outcome regime, and writes a CSV plus a matplotlib figure.
The three bundled configs (kudzu_low / kudzu / kudzu_high) were pinned
from this sweep; rerun after changing scenario parameters:

    python -m ecoforge.calibrate --out calibration/

Outcome classes at the final frame: k_only (kudzu alive, hornbeam
extinct), both, h_only, neither.
"""

from __future__ import annotations

import argparse
import json
from importlib import resources
from pathlib import Path

from .compiler import build_domain_model, compile_for_engine, lower_to_ir
from .engine import SimConfig, run
from .model import ConceptualModel, parse_model, serialize_model


def load_scenario() -> dict:
    text = (
        resources.files("ecoforge.data").joinpath("models/kudzu_scenario.json").read_text()
    )
    return json.loads(text)


def scenario_model(bug_level: float) -> ConceptualModel:
    base = resources.files("ecoforge.data").joinpath("models/kudzu.json").read_bytes()
    doc = json.loads(base)
    for comp in doc["components"]:
        if comp["id"] == "kudzu-bug":
            comp["properties"]["starting_population"] = float(bug_level)
    return parse_model(json.dumps(doc))


def classify(counts: tuple[int, ...]) -> str:
    kudzu, hornbeam = counts[0], counts[1]
    if kudzu > 0 and hornbeam > 0:
        return "both"
    if kudzu > 0:
        return "k_only"
    if hornbeam > 0:
        return "h_only"
    return "neither"


def sweep(levels, seeds, months, grid_w, grid_h):
    rows = []
    for level in levels:
        program = compile_for_engine(lower_to_ir(build_domain_model(scenario_model(level))))
        tally = {"k_only": 0, "both": 0, "h_only": 0, "neither": 0}
        for seed in seeds:
            cfg = SimConfig(
                seed=seed, max_ticks=months, grid_width=grid_w, grid_height=grid_h
            )
            series = run(program, cfg)
            tally[classify(series.frames[-1].counts)] += 1
        rows.append({"bug_level": level, **tally})
        print(
            f"bug_level={level:5g}  "
            + "  ".join(f"{key}={tally[key]:2d}" for key in ("k_only", "both", "h_only", "neither"))
        )
    return rows


def write_outputs(rows, out_dir: Path, n_seeds: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "kudzu_sweep.csv"
    with csv_path.open("w") as handle:
        handle.write("bug_level,k_only,both,h_only,neither\n")
        for row in rows:
            handle.write(
                f"{row['bug_level']},{row['k_only']},{row['both']},{row['h_only']},{row['neither']}\n"
            )
    print(f"wrote {csv_path}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    levels = [row["bug_level"] for row in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for key, color in (
        ("k_only", "tab:green"),
        ("both", "tab:blue"),
        ("h_only", "tab:cyan"),
        ("neither", "tab:red"),
    ):
        ax.plot(levels, [row[key] / n_seeds for row in rows], marker="o", label=key, color=color)
    ax.set_xscale("symlog")
    ax.set_xlabel("bug starting population")
    ax.set_ylabel(f"outcome share over {n_seeds} seeds")
    ax.set_title("Kudzu scenario regimes vs bug level (final frame at 120 months)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig_path = out_dir / "kudzu_sweep.png"
    fig.savefig(fig_path, dpi=130)
    print(f"wrote {fig_path}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="kudzu scenario calibration sweep")
    parser.add_argument("--out", default="calibration", help="output directory")
    parser.add_argument("--seeds", type=int, default=20, help="seeds per level")
    parser.add_argument("--quick", action="store_true", help="coarse level grid only")
    args = parser.parse_args(argv)

    scenario = load_scenario()
    levels = scenario["calibration"]["swept_bug_levels"]
    if args.quick:
        levels = [0, 2, 20, 100, 200, 800]
    seeds = list(range(args.seeds))
    rows = sweep(
        levels,
        seeds,
        scenario["months"],
        scenario["grid_width"],
        scenario["grid_height"],
    )
    write_outputs(rows, Path(args.out), len(seeds))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
