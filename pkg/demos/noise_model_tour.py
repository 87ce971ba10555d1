#!/usr/bin/env python3
"""A tour of the asymmetric Laplace noise model.

Walks through the single-component density (shape, tail masses, closed-form
quantiles) and the mixture layer on top of it, all numerically — run it and
read the output top to bottom.
"""

import numpy as np

from aqmf import ald
from aqmf.ald import ALParams, MoALModel
from aqmf.metrics import sample_skewness


def section(title):
    print()
    print(title)
    print("-" * len(title))


def main():
    rng = np.random.default_rng(0)

    section("One component: location 0, rate 2, asymmetry 0.7")
    p = ALParams(location=0.0, rate=2.0, asymmetry=0.7)
    print("asymmetry k is the probability mass strictly below the mode:")
    print(f"  cdf(0)  = {ald.cdf(0.0, p):.4f}   (the k you asked for)")
    print("the two tails decay at different rates (k*rate right, (1-k)*rate left):")
    for x in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0):
        bar = "#" * int(round(60 * ald.pdf(x, p)))
        print(f"  pdf({x:+.1f}) = {ald.pdf(x, p):.4f}  {bar}")

    section("Quantiles invert the cdf exactly")
    for u in (0.05, 0.25, 0.5, 0.7, 0.95):
        x = ald.quantile(u, p)
        print(f"  quantile({u:.2f}) = {x:+.4f};  cdf back = {ald.cdf(x, p):.10f}")

    section("Sampling matches the analytic tail split")
    xs = ald.sample(200_000, p, rng)
    print(f"  empirical mass below mode: {np.mean(xs < 0):.4f}  (target 0.7)")
    print(f"  sample skewness: {sample_skewness(xs):+.3f}  "
          "(negative: the long tail points left)")

    section("A mixture covers what one component cannot")
    # one tight symmetric component for the bulk, one slow skewed one for
    # outliers — weights say how often each regime occurs
    m = MoALModel(weights=[0.8, 0.2], rates=[4.0, 0.4], asymmetries=[0.5, 0.85])
    ys = ald.mixture_sample(200_000, m, rng)
    print(f"  mixture sample std: {np.std(ys):.3f}")
    print(f"  mixture sample skewness: {sample_skewness(ys):+.3f}")
    # a single symmetric component forced to cover the same sample must
    # stretch to the outliers' scale, flattening everywhere
    single = ALParams(0.0, float(1.0 / np.std(ys)), 0.5)
    print("  log-density at a few points (mixture vs one matched-scale component):")
    for x in (-10.0, -1.0, 0.0, 1.0, 10.0):
        lm = float(ald.mixture_logpdf(x, m))
        ls = float(ald.logpdf(x, single))
        print(f"    x={x:+5.1f}: mixture {lm:+8.3f}   single {ls:+8.3f}")
    print("  one wide component wastes its mass on an inflated bulk; the mixture")
    print("  keeps the bulk sharp and pays only a modest premium in the far tails.")


if __name__ == "__main__":
    main()
