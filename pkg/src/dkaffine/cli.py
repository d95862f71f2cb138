"""Command line interface.

Subcommands:
  run    execute one named scenario and write a deterministic CSV
  plot   render a results CSV to SVG (medians for sweeps, per-draw markers
         for attained-versus-bound studies, scatter against degree extremes)
  bound  compute the bound for two matrices given as Matrix Market or CSV

Configuration precedence for run: built-in preset, then the INI file given
with --config (section named like the scenario, plus an optional [run]
section for seed/out/workers/timing/full), then explicit flags.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

from . import __version__, scenarios
from .matrixio import read_matrix
from .separation import make_comparison
from .solvers import SolverOptions, assemble_bound

_INT_KEYS = {"j", "r", "n_blocks", "replicates", "seed"}
_FLOAT_KEYS = {"p_between", "p_within"}
_TUPLE_KEYS = {"sizes", "n_samples"}


def _parse_config_value(key: str, text: str):
    text = text.strip()
    if key in _TUPLE_KEYS:
        return tuple(int(part) for part in text.split(",") if part.strip())
    if key in _INT_KEYS:
        return int(text)
    if key in _FLOAT_KEYS:
        return float(text)
    return text


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _cmd_run(args) -> int:
    cfg_overrides: dict = {}
    run_section: dict = {}
    if args.config:
        parser = configparser.ConfigParser()
        if not parser.read(args.config):
            print(f"error: cannot read config file {args.config}", file=sys.stderr)
            return 2
        if parser.has_section(args.scenario):
            for key, text in parser.items(args.scenario):
                cfg_overrides[key] = _parse_config_value(key, text)
        if parser.has_section("run"):
            run_section = dict(parser.items("run"))

    seed = args.seed
    if seed is None and "seed" in run_section:
        seed = int(run_section["seed"])
    if seed is None:
        seed = scenarios.DEFAULT_SEED
    full = args.full or run_section.get("full", "").strip() in ("1", "true", "yes")
    timing = args.timing or run_section.get("timing", "").strip() in ("1", "true", "yes")
    workers = args.workers
    if workers is None:
        workers = int(run_section.get("workers", "1"))
    out_dir = Path(args.out if args.out is not None else run_section.get("out", "results"))

    config = scenarios.scenario_config(
        args.scenario, full=full, seed=seed, overrides=cfg_overrides)
    rows = scenarios.run_scenario(
        config, timing=timing, workers=workers, only_replicate=args.replicate)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{args.scenario}.csv"
    scenarios.write_csv(out_path, rows, config, timing=timing)
    failed = sum(1 for row in rows if row["status"] != "ok")
    print(f"wrote {out_path} rows={len(rows)} failed={failed}")
    return 0


def _numeric_rows(rows, column):
    out = []
    for row in rows:
        text = row.get(column, "")
        try:
            out.append((row, float(text)))
        except ValueError:
            continue
    return out


def _median(values):
    values = sorted(values)
    m = len(values)
    if m == 0:
        return math.nan
    mid = m // 2
    return values[mid] if m % 2 else 0.5 * (values[mid - 1] + values[mid])


def _plot_sweep(ax, rows, x_column, log_x):
    comparisons = sorted({row["comparison"] for row in rows})
    markers = ["o", "D", "s", "^", "v", "*"]
    for idx, comparison in enumerate(comparisons):
        series = {}
        for row, value in _numeric_rows(
                [r for r in rows if r["comparison"] == comparison], "bound_rescaled"):
            series.setdefault(int(row[x_column]), []).append(value)
        xs = sorted(series)
        ax.plot(xs, [_median(series[x]) for x in xs],
                marker=markers[idx % len(markers)], label=comparison)
    if log_x:
        ax.set_xscale("log")
    ax.set_ylabel("rescaled bound (median)")
    ax.legend()


def _plot_attained(fig, rows):
    comparisons = sorted({row["comparison"] for row in rows})
    axes = fig.subplots(1, len(comparisons), squeeze=False)[0]
    for ax, comparison in zip(axes, comparisons):
        sub = [r for r in rows if r["comparison"] == comparison]
        for column, marker, label in (
                ("bound_rescaled", "D", "affine bound"),
                ("standard_bound_rescaled", "x", "standard bound"),
                ("rho1_rescaled", ".", "rho1"),
                ("rho2", "*", "rho2")):
            pts = [(int(row["replicate"]), value)
                   for row, value in _numeric_rows(sub, column)]
            if pts:
                ax.scatter([p[0] for p in pts], [p[1] for p in pts],
                           marker=marker, label=label)
        ax.axhline(1.0, linewidth=0.6, linestyle=":")
        ax.set_title(comparison)
        ax.set_xlabel("replicate")
    axes[0].set_ylabel("rescaled value")
    axes[-1].legend(loc="best", fontsize="small")


def _plot_degree_scatter(fig, rows):
    ax_bound, ax_attained = fig.subplots(1, 2)
    comparisons = sorted({row["comparison"] for row in rows})
    markers = ["*", "D", "o", "s"]
    for idx, comparison in enumerate(comparisons):
        sub = [r for r in rows if r["comparison"] == comparison]
        for ax, column in ((ax_bound, "bound_rescaled"), (ax_attained, "rho1_rescaled")):
            pts = [(float(row["degree_extreme_difference"]), value)
                   for row, value in _numeric_rows(sub, column)
                   if row["degree_extreme_difference"] != ""]
            if pts:
                ax.scatter([p[0] for p in pts], [p[1] for p in pts],
                           marker=markers[idx % len(markers)], label=comparison)
    ax_bound.set_ylabel("rescaled bound")
    ax_attained.set_ylabel("attained rho1 (rescaled)")
    for ax in (ax_bound, ax_attained):
        ax.set_xlabel("degree extreme difference")
    ax_bound.legend(fontsize="small")


def _cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "dkaffine"
    csv_path = Path(args.csv if args.csv else Path("results") / f"{args.scenario}.csv")
    if not csv_path.exists():
        print(f"error: no results file at {csv_path}", file=sys.stderr)
        return 2
    _, rows = scenarios.read_csv(csv_path)
    rows = [row for row in rows if row["scenario"] == args.scenario]
    if not rows:
        print(f"error: {csv_path} holds no rows for scenario {args.scenario}",
              file=sys.stderr)
        return 2

    fig = plt.figure(figsize=(9, 3.6))
    if args.scenario in ("gso-nodes-sweep", "gen-nodes-sweep"):
        _plot_sweep(fig.subplots(), rows, "n", log_x=False)
        fig.axes[0].set_xlabel("nodes")
    elif args.scenario == "pca-sample-sweep":
        _plot_sweep(fig.subplots(), rows, "n_samples", log_x=True)
        fig.axes[0].set_xlabel("samples")
    elif args.scenario == "pca-dim-sweep":
        _plot_sweep(fig.subplots(), rows, "n", log_x=False)
        fig.axes[0].set_xlabel("dimension")
    elif args.scenario in ("gen-attained-vs-bound", "pca-attained-vs-bound"):
        _plot_attained(fig, rows)
    else:  # gso-pairwise, gen-vs-gso
        _plot_degree_scatter(fig, rows)
    fig.suptitle(args.scenario)
    fig.tight_layout()

    out_path = Path(args.out if args.out else csv_path.with_suffix(".svg"))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {out_path}")
    return 0


def _cmd_bound(args) -> int:
    phi = read_matrix(args.phi)
    psi = read_matrix(args.psi)
    trace: list[str] | None = [] if args.trace else None
    options = SolverOptions(check_dinkelbach=args.check_dinkelbach,
                            check_oracle=args.check_oracle, trace=trace)
    comp = make_comparison(phi, psi, args.j, args.r,
                           reverse_phi=args.reverse_phi,
                           reverse_psi=args.reverse_psi,
                           symmetrize=args.symmetrize)
    report = assemble_bound(comp, options)

    print(f"n={report.n} j={report.j} r={report.r} "
          f"reverse_phi={int(report.reverse_phi)} reverse_psi={int(report.reverse_psi)} "
          f"scaling_constant={_fmt(report.scaling_constant)}")
    print(f"extended_bound_rescaled={_fmt(report.extended_bound_rescaled)}")
    print(f"extended_bound_raw={_fmt(report.extended_bound_raw)}")
    standard = ("infeasible" if math.isinf(report.standard_dk_rescaled)
                else _fmt(report.standard_dk_rescaled))
    print(f"standard_bound_rescaled={standard}")
    print(f"trivial_bound_rescaled={_fmt(report.trivial_bound_rescaled)}")
    best = report.best
    if best is not None and best.params is not None and not report.capped_at_trivial:
        print(f"transform c1={_fmt(best.params.c1)} c0={_fmt(best.params.c0)} "
              f"variant={best.variant.value} supremum={int(best.supremum_at_infinity)}")
    else:
        print("transform trivial")
    print(f"rho1_rescaled={_fmt(report.rho1_rescaled)} rho2={_fmt(report.rho2)}")
    for variant, sol in sorted(report.solutions.items(), key=lambda kv: kv[0].value):
        line = (f"subproblem variant={variant.value} solver={sol.solver} "
                f"feasible={int(sol.feasible)} objective={_fmt(sol.objective_unscaled)} "
                f"iterations={sol.iterations} cuts={sol.cut_count}")
        if sol.note:
            line += f" note={sol.note!r}"
        print(line)
    for label, checks in (("dinkelbach", report.dinkelbach_checks),
                          ("oracle", report.oracle_checks)):
        if not checks:
            continue
        for variant, sol in sorted(checks.items(), key=lambda kv: kv[0].value):
            print(f"check={label} variant={variant.value} feasible={int(sol.feasible)} "
                  f"objective={_fmt(sol.objective_unscaled)}")
    if trace:
        for line in trace:
            print(f"trace {line}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dkaffine",
        description="Affine-transform eigenvector subspace bounds and experiments.")
    parser.add_argument("--version", action="version", version=f"dkaffine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write CSV")
    run.add_argument("scenario", choices=scenarios.scenario_names())
    run.add_argument("--out", default=None, help="output directory (default results)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--config", default=None, help="INI file with overrides")
    run.add_argument("--full", action="store_true", help="full-scale preset")
    run.add_argument("--replicate", type=int, default=None,
                     help="run only this replicate index")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--timing", action="store_true",
                     help="append wall_time_ms (breaks byte-identical reruns)")
    run.set_defaults(func=_cmd_run)

    plot = sub.add_parser("plot", help="render a results CSV to SVG")
    plot.add_argument("scenario", metavar="figure",
                      choices=scenarios.scenario_names(),
                      help="figure id (same names as the scenarios)")
    plot.add_argument("--csv", default=None)
    plot.add_argument("--out", default=None)
    plot.set_defaults(func=_cmd_plot)

    bound = sub.add_parser("bound", help="bound one matrix pair from files")
    bound.add_argument("--phi", required=True, help="matrix file (.mtx/.mm/.csv)")
    bound.add_argument("--psi", required=True, help="matrix file (.mtx/.mm/.csv)")
    bound.add_argument("--j", type=int, default=0)
    bound.add_argument("--r", type=int, default=1)
    bound.add_argument("--reverse-phi", action="store_true")
    bound.add_argument("--reverse-psi", action="store_true")
    bound.add_argument("--symmetrize", action="store_true")
    bound.add_argument("--check-dinkelbach", action="store_true")
    bound.add_argument("--check-oracle", action="store_true")
    bound.add_argument("--trace", action="store_true")
    bound.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
