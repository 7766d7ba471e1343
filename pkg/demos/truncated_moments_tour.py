"""Tour of the truncated-moment engine: the three moments across regimes.

Walks the closed-form m1/m2/m3 evaluations from easy central windows out to
deep-tail and semi-infinite intervals where naive CDF-difference formulas lose
all precision, cross-checking each against adaptive quadrature, and ends with
the variance-factor saturation that drives every contraction rate in the
package.
"""
import numpy as np

from verisynth import Bounds, acceptance_probability, quadrature_moments, std_moments


def show(label: str, bounds: Bounds) -> None:
    m = std_moments(bounds)
    q = quadrature_moments(bounds)
    err = max(abs(m.m1 - q.m1), abs(m.m2 - q.m2), abs(m.m3 - q.m3))
    prob = acceptance_probability(bounds)
    print(f"{label:<26} [{bounds.lower:>8.3g}, {bounds.upper:>8.3g}]  "
          f"m1={m.m1:+.6f}  m2={m.m2:.6f}  m3={m.m3:+.6f}  "
          f"mass={prob:.3e}  |err vs quad|={err:.1e}")


def main() -> None:
    print("== moments of a standard normal restricted to an interval ==\n")
    print("Central and shifted windows:")
    show("symmetric unit window", Bounds(-1.0, 1.0))
    show("off-center window", Bounds(-0.5, 2.0))
    show("half line (positive)", Bounds(0.0, np.inf))

    print("\nTail regimes (CDF differences underflow; the scaled-erfcx path")
    print("stays accurate — acceptance mass drops below 1e-20):")
    show("deep tail, narrow", Bounds(10.0, 11.0))
    show("deep tail, wide", Bounds(8.0, 30.0))
    show("semi-infinite tail", Bounds(-np.inf, -12.0))

    print("\nVariance factor m2 on symmetric windows (-w, w): this is the")
    print("contraction rate of verified retraining with half-width w. It")
    print("rises from ~w^2/3 for narrow windows toward 1, and saturates to")
    print("exactly 1.0 in floating point once w ~ 9 (truncation invisible):")
    for w in (0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 9.0):
        m2 = std_moments(Bounds(-w, w)).m2
        print(f"  w = {w:>4.1f}   m2 = {m2:.15f}   1 - m2 = {1.0 - m2:.3e}")


if __name__ == "__main__":
    main()
