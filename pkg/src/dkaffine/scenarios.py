"""Experiment scenarios: matrix families, presets, execution, CSV layout.

Eight named scenarios cover three studies: pairwise graph shift operator
comparisons on one stochastic block model draw, operators against their
expected (generating) matrices, and sample against population covariance in
a spiked model.  Desk presets keep everything at coffee-break scale; --full
switches to the larger sweeps.

Determinism contract: every random draw is keyed by
(seed, scenario, point labels, replicate, purpose), so results do not depend
on execution order or worker count, and a single replicate can be reproduced
alone.  CSV rows are fully sorted and floats are written with %.17g, which
makes reruns byte-identical.  Wall-clock columns are opt-in for that reason.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import models
from .separation import make_comparison
from .solvers import assemble_bound

# Sides whose informative eigenvectors sit at the top of the spectrum; these
# enter the comparison with reversed eigenvalue order.
_REVERSED_SIDES = {"A", "BA", "sample", "population"}

_FAMILY_COMPARISONS = {
    "gso": (("A", "L"), ("L", "Lsym"), ("A", "Lsym")),
    "gen": (("A", "BA"), ("L", "BL"), ("Lsym", "BLsym")),
    "pca": (("sample", "population"),),
}

_SCENARIOS: dict[str, dict] = {
    "gso-pairwise": dict(
        family="gso", j=1, r=2, p_between=0.1, p_within=0.6,
        desk=dict(sizes=(60,), n_samples=(), replicates=10),
        full=dict(sizes=(300,), n_samples=(), replicates=25),
    ),
    "gso-nodes-sweep": dict(
        family="gso", j=1, r=2, p_between=0.1, p_within=0.9,
        desk=dict(sizes=(30, 60, 120), n_samples=(), replicates=10),
        full=dict(sizes=(30, 120, 210, 300), n_samples=(), replicates=25),
    ),
    "gen-vs-gso": dict(
        family="gen", j=0, r=3, p_between=0.1, p_within=0.9,
        desk=dict(sizes=(60,), n_samples=(), replicates=10),
        full=dict(sizes=(210,), n_samples=(), replicates=25),
    ),
    "gen-nodes-sweep": dict(
        family="gen", j=0, r=3, p_between=0.1, p_within=0.8,
        desk=dict(sizes=(30, 60, 120), n_samples=(), replicates=10),
        full=dict(sizes=(30, 120, 210, 300), n_samples=(), replicates=25),
    ),
    "gen-attained-vs-bound": dict(
        family="gen", j=0, r=3, p_between=0.1, p_within=0.6,
        desk=dict(sizes=(30,), n_samples=(), replicates=25),
        full=dict(sizes=(30,), n_samples=(), replicates=25),
    ),
    "pca-sample-sweep": dict(
        family="pca", j=0, r=3, p_between=0.2, p_within=0.8,
        desk=dict(sizes=(60,), n_samples=(10, 100, 1000), replicates=10),
        full=dict(sizes=(60,), n_samples=(10, 100, 1000), replicates=25),
    ),
    "pca-dim-sweep": dict(
        family="pca", j=0, r=3, p_between=0.2, p_within=0.8,
        desk=dict(sizes=(30, 60, 120), n_samples=(100,), replicates=10),
        full=dict(sizes=(30, 210, 420), n_samples=(100,), replicates=25),
    ),
    "pca-attained-vs-bound": dict(
        family="pca", j=0, r=3, p_between=0.4, p_within=0.6,
        desk=dict(sizes=(60,), n_samples=(100,), replicates=25),
        full=dict(sizes=(60,), n_samples=(100,), replicates=25),
    ),
}

DEFAULT_SEED = 1729
N_BLOCKS = 3

COLUMNS = [
    "scenario", "comparison", "n", "n_samples", "p_between", "p_within",
    "n_blocks", "j", "r", "replicate", "attempt", "degree_extreme_difference",
    "bound_rescaled", "bound_raw", "standard_bound_rescaled", "c1", "c0",
    "variant", "supremum", "rho1_rescaled", "rho2", "capped", "status",
]

_VALUE_COLUMNS = [
    "bound_rescaled", "bound_raw", "standard_bound_rescaled", "c1", "c0",
    "variant", "supremum", "rho1_rescaled", "rho2", "capped",
]


def scenario_names() -> list[str]:
    return sorted(_SCENARIOS)


def scenario_config(name: str, *, full: bool = False, seed: int = DEFAULT_SEED,
                    overrides: dict | None = None) -> dict:
    """Resolve one scenario into a flat, override-friendly parameter dict."""
    if name not in _SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {scenario_names()}")
    base = _SCENARIOS[name]
    preset = base["full" if full else "desk"]
    config = dict(
        scenario=name, family=base["family"], j=base["j"], r=base["r"],
        p_between=base["p_between"], p_within=base["p_within"],
        n_blocks=N_BLOCKS, sizes=tuple(preset["sizes"]),
        n_samples=tuple(preset["n_samples"]), replicates=preset["replicates"],
        seed=seed, preset="full" if full else "desk",
    )
    for key, value in (overrides or {}).items():
        if key not in config:
            raise ValueError(f"unknown config key {key!r}")
        config[key] = value
    return config


def _graph_operators(config: dict, size: int, replicate: int):
    seed, name = config["seed"], config["scenario"]

    def make_gen(attempt: int):
        return models.stream(seed, name, f"n={size}", f"rep={replicate}",
                             f"adjacency:{attempt}")

    a, attempt = models.sample_adjacency(
        make_gen, size, config["p_within"], config["p_between"],
        config["n_blocks"])
    ops = {
        "A": a,
        "L": models.laplacian(a),
        "Lsym": models.sym_normalized_laplacian(a),
    }
    if config["family"] == "gen":
        ops["BA"] = models.expected_adjacency(
            size, config["p_within"], config["p_between"], config["n_blocks"])
        ops["BL"] = models.laplacian(ops["BA"])
        ops["BLsym"] = models.sym_normalized_laplacian(ops["BA"])
    return ops, attempt, models.degree_extreme_difference(a)


def _pca_operators(config: dict, size: int, n_samples: int, replicate: int):
    sigma = models.spiked_covariance(
        size, config["p_within"], config["p_between"], config["n_blocks"])
    gen = models.stream(config["seed"], config["scenario"], f"p={size}",
                        f"N={n_samples}", f"rep={replicate}", "samples")
    sigma_hat = models.sample_spiked_covariance(gen, sigma, n_samples)
    return {"sample": sigma_hat, "population": sigma}


def run_work_item(config: dict, size: int, n_samples: int | None,
                  replicate: int, timing: bool = False) -> list[dict]:
    """All comparison rows for one (point, replicate); one model draw shared."""
    rows = []
    attempt: int | str = ""
    extreme: float | str = ""
    try:
        if config["family"] == "pca":
            ops = _pca_operators(config, size, n_samples, replicate)
        else:
            ops, attempt, extreme = _graph_operators(config, size, replicate)
        draw_error = None
    except Exception as exc:  # degenerate draw: every comparison fails
        ops, draw_error = {}, exc

    for phi_name, psi_name in _FAMILY_COMPARISONS[config["family"]]:
        row = {
            "scenario": config["scenario"],
            "comparison": f"{phi_name}-vs-{psi_name}",
            "n": size,
            "n_samples": "" if n_samples is None else n_samples,
            "p_between": config["p_between"],
            "p_within": config["p_within"],
            "n_blocks": config["n_blocks"],
            "j": config["j"],
            "r": config["r"],
            "replicate": replicate,
            "attempt": attempt,
            "degree_extreme_difference": extreme,
            "status": "ok",
        }
        started = time.perf_counter()
        try:
            if draw_error is not None:
                raise draw_error
            comp = make_comparison(
                ops[phi_name], ops[psi_name], config["j"], config["r"],
                reverse_phi=phi_name in _REVERSED_SIDES,
                reverse_psi=psi_name in _REVERSED_SIDES,
            )
            report = assemble_bound(comp)
            best = report.best
            trivial = best is None or report.capped_at_trivial or best.params is None
            row.update({
                "bound_rescaled": report.extended_bound_rescaled,
                "bound_raw": report.extended_bound_raw,
                "standard_bound_rescaled": (
                    "infeasible" if math.isinf(report.standard_dk_rescaled)
                    else report.standard_dk_rescaled),
                "c1": "" if trivial else best.params.c1,
                "c0": "" if trivial else best.params.c0,
                "variant": "" if trivial else best.variant.value,
                "supremum": 0 if trivial else int(best.supremum_at_infinity),
                "rho1_rescaled": report.rho1_rescaled,
                "rho2": report.rho2,
                "capped": int(report.capped_at_trivial),
            })
        except Exception as exc:
            for column in _VALUE_COLUMNS:
                row[column] = "failed"
            row["status"] = f"failed:{type(exc).__name__}"
        if timing:
            row["wall_time_ms"] = (time.perf_counter() - started) * 1e3
        rows.append(row)
    return rows


def _work_items(config: dict, timing: bool, only_replicate: int | None):
    replicates = (range(config["replicates"]) if only_replicate is None
                  else [only_replicate])
    sample_counts = config["n_samples"] or (None,)
    for size in config["sizes"]:
        for n_samples in sample_counts:
            for replicate in replicates:
                yield (config, size, n_samples, replicate, timing)


def _run_item_star(item):
    return run_work_item(*item)


def run_scenario(config: dict, *, timing: bool = False, workers: int = 1,
                 only_replicate: int | None = None) -> list[dict]:
    """Execute a resolved scenario; row order is normalized afterwards."""
    items = list(_work_items(config, timing, only_replicate))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_item_star, items))
    else:
        chunks = [run_work_item(*item) for item in items]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=_row_key)
    return rows


def _row_key(row: dict):
    n_samples = row["n_samples"]
    return (
        row["scenario"], row["comparison"], int(row["n"]),
        -1 if n_samples == "" else int(n_samples), int(row["replicate"]),
    )


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def header_lines(config: dict, timing: bool) -> list[str]:
    from . import __version__

    def fmt(value):
        if isinstance(value, tuple):
            return ",".join(str(v) for v in value)
        return str(value)

    pairs = " ".join(
        f"{key}={fmt(config[key])}" for key in (
            "family", "j", "r", "p_between", "p_within", "n_blocks",
            "sizes", "n_samples", "replicates"))
    return [
        f"# dkaffine {__version__} scenario={config['scenario']} "
        f"seed={config['seed']} preset={config['preset']} timing={int(timing)}",
        f"# {pairs}",
    ]


def write_csv(path, rows: list[dict], config: dict, timing: bool = False) -> None:
    columns = COLUMNS + (["wall_time_ms"] if timing else [])
    lines = header_lines(config, timing)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(row.get(col, "")) for col in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> tuple[list[str], list[dict]]:
    """Read a results file back into (comment lines, row dicts of strings)."""
    comments, rows, columns = [], [], None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        parts = line.split(",")
        if columns is None:
            columns = parts
            continue
        rows.append(dict(zip(columns, parts)))
    return comments, rows
