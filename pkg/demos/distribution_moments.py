#!/usr/bin/env python3
"""What the gap of a random degree-3 polynomial looks like.

Moments of the normalized gap stay below the Gaussian targets, a fixed
fraction of instances lands in the promise classes, and the mass estimate
behind that fraction comes from a 16-coefficient polynomial.
"""

from fractions import Fraction

from gapbench import avgcase, gapdist, poly3

# exact moments: second matches the Gaussian, fourth stays below 3
for n in (1, 2, 3, 4):
    m2 = gapdist.exact_moment(n, 1)
    m4 = gapdist.exact_moment(n, 2)
    print(f"n={n}: E[(gap^2/2^n)] = {m2.value}   E[..^2] = {m4.value}"
          f"  (gaussian {gapdist.gaussian_moment_target(2)})")

# the counts behind those rationals
print("degree-3 condition subspaces:",
      [gapdist.count_condition_subspaces(k, 3) for k in (1, 2, 3, 4)])
print("matrix solutions at n=2, k=2:", gapdist.count_matrix_solutions(2, 2))

# promise fractions, exact at small n and sampled at n=12
exact = gapdist.promise_stats(4)
print("n=4 exact: yes =", exact.yes_fraction, " no =", exact.no_fraction)
sampled = gapdist.promise_stats(12, samples=20_000, seed=3)
print(f"n=12 sampled: yes = {sampled.yes_fraction:.3f}"
      f"  no = {sampled.no_fraction:.3f}  p0 = {sampled.p0:.3f}")

# the lower-bound polynomial for the NO mass
mp = gapdist.mass_poly()
print("mass coefficients:", [round(c, 4) for c in mp.c[:4]], "...")
print("coefficient sum:", float(mp.c_sum()), " (~0.1222 asymptotic NO mass)")
print("stays below the integrand on the grid:", mp.grid_max_excess() <= 0)
print("value at 1/4:", float(mp.eval_exact(Fraction(1, 4))))

# recover a gap through the quasi-average-case recursion
import numpy as np

f = poly3.parse_poly("x1 + x2 + x1*x2 + x1*x2*x3", 3)
oracle = avgcase.exact_oracle()
claimed = avgcase.gap_from_quasi_avg_oracle(f, oracle, np.random.default_rng(0))
print("recursion claims gap", claimed, "with", oracle.calls, "oracle calls")

# the same recursion survives a corrupted oracle most of the time
wins = 0
for trial in range(100):
    g = poly3.random_poly(8, np.random.default_rng(100 + trial))
    bad = avgcase.make_corrupt_oracle(1 / 24, seed=trial)
    got = avgcase.gap_from_quasi_avg_oracle(g, bad,
                                            np.random.default_rng(200 + trial))
    wins += got == poly3.gap_bruteforce(g)
print("corrupted-oracle success:", wins, "/ 100")

# acceptance thresholds in log space for the tiny-threshold regime
for n in (4, 6, 8):
    yes = avgcase.sb_acceptance_exact(avgcase.yes_threshold_gap(n), n)
    no = avgcase.sb_acceptance_exact(avgcase.no_threshold_gap(n), n)
    print(f"n={n}: log p(yes) = {yes:.1f}   log p(no) = {no:.1f}")
