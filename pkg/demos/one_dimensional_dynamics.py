"""Scalar retraining dynamics: a finite interval pins, a half line drifts off.

Two runs of the one-dimensional mean-estimation loop. First, a biased finite
acceptance interval: the estimate leaves the true mean and locks onto the
interval midpoint at the predicted geometric rate. Second, a semi-infinite
interval (upper bound only): there is no fixed point, and the estimate wanders
downward without bound — slowly, because the drift dies off once the estimate
sits a few standard deviations below the boundary.
"""
import argparse
import math

import numpy as np

from verisynth import (
    Bounds,
    Gaussian1DConfig,
    Interval1D,
    derive_stream,
    hitting_time,
    run_iterations,
    std_moments,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1109)
    args = parser.parse_args()

    print("== finite biased interval: contraction to the midpoint ==")
    interval = Interval1D(2.0, 4.0)
    config = Gaussian1DConfig(true_mean=0.0, sigma=1.0, interval=interval,
                              n0=100, schedule=np.full(40, 200))
    traj = run_iterations(config, derive_stream(args.seed, 1, 0, 0))
    width = (interval.upper - interval.lower) / 2.0
    rho = std_moments(Bounds(-width, width)).m2
    print(f"true mean 0, acceptance interval [2, 4], contraction rate "
          f"rho = {rho:.4f}")
    print("round   estimate   |estimate - midpoint|")
    for k in (0, 1, 2, 3, 5, 10, 20, 40):
        print(f"{k:>5}   {traj.means[k]:>8.4f}   {traj.dist_midpoint[k]:>10.6f}")
    inside = hitting_time(traj, interval.lower, direction="up")
    print(f"first round at or above the interval's lower edge: {inside}\n")

    print("== semi-infinite interval (-inf, 1]: unbounded downward drift ==")
    config = Gaussian1DConfig(true_mean=0.0, sigma=1.0,
                              interval=Interval1D(-math.inf, 1.0),
                              n0=100, schedule=np.full(2000, 50))
    traj = run_iterations(config, derive_stream(args.seed, 2, 0, 0))
    print("round   estimate")
    for k in (0, 10, 50, 100, 500, 1000, 2000):
        print(f"{k:>5}   {traj.means[k]:>8.3f}")
    for level in (-2.0, -5.0, -10.0):
        ht = hitting_time(traj, level)
        print(f"first round below {level:>5.1f}: "
              f"{ht if ht is not None else 'never (within 2000 rounds)'}")
    print("\nthe early slide is fast (the boundary truncates half the draws)")
    print("but the pull weakens like exp(-t^2/2) in the standardized distance")
    print("t below the boundary, so deep levels are reached only by diffusion")


if __name__ == "__main__":
    main()
