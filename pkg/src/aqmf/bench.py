"""Synthetic benchmark harness: seeded replications over noise families,
ranks and methods, with machine-readable JSON and aligned-table reporting.

Every replication derives its own seeds from the master seed, so runs are
reproducible, order-independent, and never share generator state.  Wall-clock
timings are collected around the fits only and are reported separately from
the deterministic results so the result JSON is byte-stable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .em import FitOptions, fit, fit_l1_baseline
from .metrics import l1_error, l2_error
from .synth import (
    AsymmetricLaplaceNoise,
    GaussianNoise,
    LaplaceNoise,
    MixtureNoise,
    SkewNormalNoise,
    StudentTNoise,
    make_instance,
)

# The eight stock noise rows of the synthetic study, in table order.
NOISE_ROWS = {
    "laplace": ("Laplace (b=1.5)", LaplaceNoise(0.0, 1.5)),
    "gaussian": ("Gaussian (sigma=5)", GaussianNoise(5.0)),
    "student_t_df1": ("Student-t (df=1)", StudentTNoise(1.0)),
    "student_t_df2": ("Student-t (df=2)", StudentTNoise(2.0)),
    "asym_laplace": ("Asym. Laplace (1, 0.7)", AsymmetricLaplaceNoise(1.0, 0.7)),
    "skew_normal": ("Skew normal (3, 0.7)", SkewNormalNoise(3.0, 0.7)),
    "mixture1": (
        "Mixture (Gauss + 2 Laplace)",
        MixtureNoise(
            (
                (0.5, GaussianNoise(1.0)),
                (0.3, LaplaceNoise(0.0, 1.0)),
                (0.2, LaplaceNoise(0.0, 2.0)),
            )
        ),
    ),
    "mixture2": (
        "Mixture (Gauss + Laplace + AL)",
        MixtureNoise(
            (
                (0.5, GaussianNoise(1.0)),
                (0.3, LaplaceNoise(0.0, 1.0)),
                (0.2, AsymmetricLaplaceNoise(1.0, 0.8)),
            )
        ),
    ),
}

METHODS = ("aq", "cwm_uniform")


@dataclass(frozen=True)
class BenchmarkConfig:
    """Grid definition for :func:`run_benchmark`."""

    m: int = 40
    n: int = 20
    ranks: tuple = (4, 8)
    replications: int = 30
    missing_fraction: float = 0.2
    noise_rows: tuple = tuple(NOISE_ROWS)
    methods: tuple = METHODS
    master_seed: int = 0
    components: int = 4
    max_iterations: int = 100

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "noise_rows", tuple(self.noise_rows))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.m < 1 or self.n < 1:
            raise ValueError("matrix dimensions must be positive")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not (0.0 <= self.missing_fraction < 1.0):
            raise ValueError("missing_fraction must lie in [0, 1)")
        if not self.ranks:
            raise ValueError("at least one rank is required")
        for r in self.ranks:
            if not (1 <= r <= min(self.m, self.n)):
                raise ValueError(f"rank {r} out of range for {self.m}x{self.n}")
        if not self.noise_rows:
            raise ValueError("at least one noise row is required")
        for name in self.noise_rows:
            if name not in NOISE_ROWS:
                known = ", ".join(NOISE_ROWS)
                raise ValueError(f"unknown noise row {name!r} (known: {known})")
        if not self.methods:
            raise ValueError("at least one method is required")
        for meth in self.methods:
            if meth not in METHODS:
                raise ValueError(f"unknown method {meth!r} (known: {', '.join(METHODS)})")
        if self.components < 1:
            raise ValueError("components must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class RunRecord:
    """Outcome of one (noise, rank, method, replication) fit."""

    noise: str
    rank: int
    method: str
    replication: int
    data_seed: int
    fit_seed: int
    l1_noisy: float
    l2_noisy: float
    l1_truth: float
    l2_truth: float
    iterations: int
    converged: bool
    final_components: int | None
    seconds: float


@dataclass
class BenchmarkResult:
    config: BenchmarkConfig
    records: list = field(default_factory=list)


def _derived_seeds(master_seed: int, noise_name: str, rank: int, replication: int):
    """Independent (data, fit) seeds per replication cell.

    The noise row enters through its global index so a run restricted to a
    subset of rows still sees the same instances as a full run.
    """
    row_index = list(NOISE_ROWS).index(noise_name)
    ss = np.random.SeedSequence([master_seed, row_index, rank, replication])
    state = ss.generate_state(2, dtype=np.uint64)
    return int(state[0]), int(state[1])


def _run_one(inst, rank: int, method: str, fit_seed: int, cfg: BenchmarkConfig):
    start = time.perf_counter()
    if method == "aq":
        opts = FitOptions(
            rank=rank, components=cfg.components, max_iterations=cfg.max_iterations
        )
        factors, _, report = fit(inst.observed, opts, seed=fit_seed)
        iterations = report.iterations
        converged = report.converged
        final_components = report.final_components
    else:
        factors, report = fit_l1_baseline(
            inst.observed, rank, seed=fit_seed, max_sweeps=cfg.max_iterations
        )
        iterations = report.sweeps
        converged = report.converged
        final_components = None
    seconds = time.perf_counter() - start
    return factors, iterations, converged, final_components, seconds


def run_benchmark(cfg: BenchmarkConfig, progress=None) -> BenchmarkResult:
    """Run the full grid and collect one record per fit.

    ``progress``, if given, is called with a short status string once per
    (noise, rank) cell.
    """
    result = BenchmarkResult(config=cfg)
    for name in cfg.noise_rows:
        _, spec = NOISE_ROWS[name]
        for rank in cfg.ranks:
            if progress is not None:
                progress(f"{name} rank={rank}")
            for rep in range(cfg.replications):
                data_seed, fit_seed = _derived_seeds(cfg.master_seed, name, rank, rep)
                inst = make_instance(
                    cfg.m, cfg.n, rank, cfg.missing_fraction, spec, seed=data_seed
                )
                for method in cfg.methods:
                    factors, iters, conv, final_s, secs = _run_one(
                        inst, rank, method, fit_seed, cfg
                    )
                    result.records.append(
                        RunRecord(
                            noise=name,
                            rank=rank,
                            method=method,
                            replication=rep,
                            data_seed=data_seed,
                            fit_seed=fit_seed,
                            l1_noisy=l1_error(inst.observed.values, factors),
                            l2_noisy=l2_error(inst.observed.values, factors),
                            l1_truth=l1_error(inst.ground_truth, factors),
                            l2_truth=l2_error(inst.ground_truth, factors),
                            iterations=iters,
                            converged=conv,
                            final_components=final_s,
                            seconds=secs,
                        )
                    )
    return result


def _cell_records(result: BenchmarkResult, noise: str, rank: int, method: str):
    recs = [
        r
        for r in result.records
        if r.noise == noise and r.rank == rank and r.method == method
    ]
    return sorted(recs, key=lambda r: r.replication)


def aggregate(result: BenchmarkResult) -> list:
    """Per-cell summary rows (means, medians, convergence rate), computed
    directly from the records in replication order."""
    out = []
    for noise in result.config.noise_rows:
        for rank in result.config.ranks:
            for method in result.config.methods:
                recs = _cell_records(result, noise, rank, method)
                if not recs:
                    continue
                cell = {
                    "noise": noise,
                    "rank": rank,
                    "method": method,
                    "replications": len(recs),
                }
                for key in ("l1_noisy", "l2_noisy", "l1_truth", "l2_truth"):
                    vals = np.array([getattr(r, key) for r in recs])
                    cell[f"mean_{key}"] = float(vals.mean())
                    cell[f"median_{key}"] = float(np.median(vals))
                cell["convergence_rate"] = float(
                    np.mean([1.0 if r.converged else 0.0 for r in recs])
                )
                out.append(cell)
    return out


def result_to_json(result: BenchmarkResult) -> dict:
    """Deterministic report payload: config, per-run records (without
    timings), and aggregates derived from those records."""
    cfg = result.config
    records = []
    for r in result.records:
        records.append(
            {
                "noise": r.noise,
                "rank": r.rank,
                "method": r.method,
                "replication": r.replication,
                "data_seed": r.data_seed,
                "fit_seed": r.fit_seed,
                "l1_noisy": float(r.l1_noisy),
                "l2_noisy": float(r.l2_noisy),
                "l1_truth": float(r.l1_truth),
                "l2_truth": float(r.l2_truth),
                "iterations": int(r.iterations),
                "converged": bool(r.converged),
                "final_components": (
                    None if r.final_components is None else int(r.final_components)
                ),
            }
        )
    return {
        "schema": "aqmf-benchmark/1",
        "config": {
            "m": cfg.m,
            "n": cfg.n,
            "ranks": list(cfg.ranks),
            "replications": cfg.replications,
            "missing_fraction": cfg.missing_fraction,
            "noise_rows": list(cfg.noise_rows),
            "methods": list(cfg.methods),
            "master_seed": cfg.master_seed,
            "components": cfg.components,
            "max_iterations": cfg.max_iterations,
        },
        "records": records,
        "aggregates": aggregate(result),
    }


def timing_to_json(result: BenchmarkResult) -> dict:
    """Wall-clock sidecar: per-run seconds plus per-cell means.  Kept apart
    from :func:`result_to_json` because timings differ run to run."""
    records = [
        {
            "noise": r.noise,
            "rank": r.rank,
            "method": r.method,
            "replication": r.replication,
            "seconds": float(r.seconds),
        }
        for r in result.records
    ]
    cells = []
    for noise in result.config.noise_rows:
        for rank in result.config.ranks:
            for method in result.config.methods:
                recs = _cell_records(result, noise, rank, method)
                if recs:
                    cells.append(
                        {
                            "noise": noise,
                            "rank": rank,
                            "method": method,
                            "mean_seconds": float(np.mean([r.seconds for r in recs])),
                        }
                    )
    return {
        "schema": "aqmf-benchmark-timing/1",
        "master_seed": result.config.master_seed,
        "records": records,
        "aggregates": cells,
    }


def render_table(result: BenchmarkResult) -> str:
    """Aligned text tables: for each rank, one block of errors against the
    clean ground-truth matrix and one against the noisy observed matrix.
    Each block has an L1 and an L2 column per method, one row per noise
    family, then mean and median footer rows.

    Every number is recomputed from the per-replication records, so the table
    always agrees with the JSON.
    """
    cfg = result.config
    blocks = []
    for rank in cfg.ranks:
        for suffix, caption in (("truth", "clean ground truth"),
                                ("noisy", "noisy input")):
            label_w = max(
                [len(NOISE_ROWS[name][0]) for name in cfg.noise_rows]
                + [len("median")]
            )
            headers = []
            for metric in ("L1", "L2"):
                for method in cfg.methods:
                    headers.append(f"{metric}:{method}")
            col_w = max(12, max(len(h) for h in headers) + 2)
            lines = [
                f"rank {rank} "
                f"({cfg.replications} replications, errors vs the {caption})"
            ]
            lines.append(
                "noise".ljust(label_w) + "".join(h.rjust(col_w) for h in headers)
            )
            columns = {h: [] for h in headers}
            for name in cfg.noise_rows:
                row = NOISE_ROWS[name][0].ljust(label_w)
                for metric_key, metric in ((f"l1_{suffix}", "L1"),
                                           (f"l2_{suffix}", "L2")):
                    for method in cfg.methods:
                        recs = _cell_records(result, name, rank, method)
                        mean = float(np.mean([getattr(r, metric_key) for r in recs]))
                        columns[f"{metric}:{method}"].append(mean)
                        row += f"{mean:.3f}".rjust(col_w)
                lines.append(row)
            for footer, reducer in (("mean", np.mean), ("median", np.median)):
                row = footer.ljust(label_w)
                for h in headers:
                    row += f"{float(reducer(columns[h])):.3f}".rjust(col_w)
                lines.append(row)
            blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
