"""Many retraining rounds: contraction to the verifier's center, with a bound.

Runs the scheduled iterative experiment (verifier bias Delta=1, radius 2,
default slack, verified sample totals growing linearly) and prints the Monte
Carlo mean squared distance to the verifier center next to the closed-form
contraction bound for every fifth round, then fits the empirical contraction
rate from the trajectory and compares it with the theoretical one.
"""
import argparse

import numpy as np

from verisynth import config_from_mapping, estimate_contraction, run_iterative


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1105)
    parser.add_argument("--reps", type=int, default=50)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    config = config_from_mapping({
        "experiment": "iterate_linreg",
        "replications": args.reps,
        "master_seed": args.seed,
        "problem": {"dimension": 8, "true_theta": [1.0] * 8,
                    "sigma": 1.0, "n0": 100},
        "ball": {"radius": 2.0, "delta": 1.0},
        "schedule": {"kind": "linear", "start": 100, "end_or_ratio": 5500,
                     "rounds": 60},
        "arms": ["direct"],
    })
    rows = run_iterative(config, threads=args.threads)

    rho = rows[0]["rho"]
    print(f"verifier: radius 2, bias 1, default slack -> contraction rate "
          f"rho = {rho:.4f}")
    print(f"{args.reps} replications, 60 rounds, linear schedule "
          f"100 -> 5500 verified samples per round (total)\n")
    print("round  n_k/dir   E||theta - center||^2     bound")
    for r in rows:
        if r["round"] % 5 == 0:
            print(f"{r['round']:>5}  {r['n_k_per_direction']:>7}   "
                  f"{r['dist_center_mean']:>12.4f} +/- "
                  f"{r['dist_center_se']:.4f}   {r['theory_bound']:>9.4f}")

    rounds = np.array([r["round"] for r in rows], dtype=float)
    mean_sq = np.array([r["dist_center_mean"] for r in rows])
    estimate = estimate_contraction(rounds, mean_sq)
    print(f"\nfitted contraction from the trajectory: {estimate:.4f} "
          f"(theory {rho:.4f})")
    print("the estimate sits slightly above rho because the growing schedule")
    print("keeps adding fresh sampling noise on top of the geometric decay")


if __name__ == "__main__":
    main()
