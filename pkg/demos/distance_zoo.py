"""Tour of the distance family on two kinds of distribution change.

Two experiments, both against a fixed source distribution:

  A. a pure mean shift (same shape, moved by 0.02)
  B. a pure shape change (same mean, fatter tails)

Raw-moment distances and polynomial MMD blow the tiny mean shift up
through powers of the mean, ranking A farther than B.  The central
moment distance keeps the orders separated, so the shape change is the
one that registers.
"""

import numpy as np

from momentalign import (
    AffineBeta,
    CmdConfig,
    Normal,
    SeededRng,
    cmd_analytic,
    cmd_estimate,
    coral_distance,
    mmd_gaussian_estimate,
    mmd_polynomial_analytic,
    raw_moment_ipm,
    sample_analytic,
)

SOURCE = AffineBeta(0.4, 0.4, 0.8, 0.1)   # bimodal, mean 0.5
SHIFTED = AffineBeta(0.4, 0.4, 0.8, 0.12)  # same shape, mean 0.52
RESHAPED = Normal(0.5, 0.27)               # same mean, different shape


def row(name, left, right):
    verdict = "shape change" if left > right else "mean shift"
    print(f"  {name:<14} shape={left:<12.6g} mean-shift={right:<12.6g} farther: {verdict}")


def main():
    print("analytic values, no sampling noise")
    print(f"  source   {SOURCE}")
    print(f"  shifted  {SHIFTED}   (mean moved by 0.02)")
    print(f"  reshaped {RESHAPED}  (same mean, new shape)")
    print()

    for k in (1, 2, 4):
        row(f"d_P{k}", raw_moment_ipm(SOURCE, RESHAPED, k),
            raw_moment_ipm(SOURCE, SHIFTED, k))
    for deg in (2, 4):
        row(f"mmd poly {deg}", mmd_polynomial_analytic(SOURCE, RESHAPED, deg),
            mmd_polynomial_analytic(SOURCE, SHIFTED, deg))
    cfg = CmdConfig(k=4)
    row("cmd k=4", cmd_analytic(SOURCE, RESHAPED, cfg).value,
        cmd_analytic(SOURCE, SHIFTED, cfg).value)

    print()
    print("cmd is the one metric above that calls the shape change farther.")
    print("its per-order terms localize where the difference lives:")
    rep = cmd_analytic(SOURCE, RESHAPED, cfg)
    for j, term in enumerate(rep.terms, start=1):
        print(f"  order {j}: {term:.6g}")

    print()
    print("empirical estimates converge to the analytic values:")
    rng = SeededRng(0)
    xs = sample_analytic(SOURCE, 20000, rng)
    ys = sample_analytic(RESHAPED, 20000, rng)
    est = cmd_estimate(xs, ys, cfg).value
    print(f"  cmd k=4  analytic {rep.value:.6f}  from 20k draws {est:.6f}")

    X = xs[:2000, None]
    Y = ys[:2000, None]
    print(f"  gaussian mmd (beta=1)  {mmd_gaussian_estimate(X, Y, 1.0):.3g}")
    print(f"  coral                  {coral_distance(X, Y):.3g}")


if __name__ == "__main__":
    main()
