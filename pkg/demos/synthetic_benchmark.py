#!/usr/bin/env python3
"""Reduced synthetic benchmark: adaptive weights vs the uniform baseline.

Runs a small slice of the full grid (four noise rows, rank 4, ten
replications, ~10 s), prints the error tables, and leaves
benchmark_demo.json + its timing sidecar behind.

The slice pairs one symmetric control row (Gaussian — where uniform weights
are already the right answer) with three rows of heavy-tailed or skewed
noise, where adapting the weights to the residual distribution pays off.
The full grid is the CLI's job:  aqmf synth-bench --output full.json
"""

import sys
import time

from aqmf.bench import (
    BenchmarkConfig,
    render_table,
    result_to_json,
    run_benchmark,
    timing_to_json,
)
from aqmf.jsonfmt import dump


def main():
    cfg = BenchmarkConfig(
        ranks=(4,),
        replications=10,
        noise_rows=("gaussian", "student_t_df1", "asym_laplace", "skew_normal"),
        master_seed=0,
    )
    print(f"grid: {cfg.m}x{cfg.n}, rank {cfg.ranks[0]}, "
          f"{cfg.replications} replications, rows {', '.join(cfg.noise_rows)}")
    start = time.time()
    result = run_benchmark(cfg, progress=lambda msg: print(f"  running {msg}", file=sys.stderr))
    print(f"done in {time.time() - start:.1f}s\n")
    sys.stdout.write(render_table(result))

    dump(result_to_json(result), "benchmark_demo.json")
    dump(timing_to_json(result), "benchmark_demo.timing.json")
    print("\nwrote benchmark_demo.json and benchmark_demo.timing.json")
    print("(the result file is byte-stable for a fixed master seed; "
          "timings live in the sidecar)")

    # the quantity the adaptive weights are supposed to buy: error against
    # the clean matrix on skewed noise
    cells = {
        (c["noise"], c["method"]): c["mean_l1_truth"]
        for c in result_to_json(result)["aggregates"]
        if c["rank"] == 4
    }
    print("\nmean L1 vs clean truth (rank 4):")
    for noise in cfg.noise_rows:
        aq = cells[(noise, "aq")]
        cwm = cells[(noise, "cwm_uniform")]
        verdict = "adaptive wins" if aq <= cwm else "uniform wins"
        print(f"  {noise:>14}: adaptive {aq:.3f} vs uniform {cwm:.3f}  ({verdict})")
    print("\non symmetric light-tailed noise uniform weights are already optimal;")
    print("the adaptive model earns its keep once tails go heavy or asymmetric.")


if __name__ == "__main__":
    main()
