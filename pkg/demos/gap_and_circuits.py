#!/usr/bin/env python3
"""Gap of a degree-3 polynomial and two quantum circuits that compute it.

The gap of f counts zeros minus ones over all assignments. An IQP circuit
puts it in one amplitude, a QAOA circuit puts its square in one acceptance
probability. Both are checked against brute force here.
"""

import numpy as np

from gapbench import circuits, poly3, statevector

f = poly3.parse_poly("x1 + x2 + x1*x2 + x1*x2*x3", 3)
print("f:", poly3.to_text(f))
print("gap =", poly3.gap_bruteforce(f), " zeros =", poly3.zeros_count(f))

# the amplitude at |0...0> is gap / 2^n
amp = circuits.iqp_gap_amplitude(f)
print("2^n * <0|U_f|0> =", (2 ** f.n * amp).real)

# hiding: drop the linear part and the gap moves to output index delta
fbar = poly3.strip_linear(f)
delta = poly3.linear_part(f)
circ = circuits.build_iqp(fbar)
state = statevector.run(circ)
print("amplitude at delta =", 2 ** f.n * state[delta].real, " (same gap)")

# sweeping delta recovers the gap of every member of the class [fbar]
dist = circuits.class_distribution(fbar)
for d in range(2 ** f.n):
    g = poly3.gap_bruteforce(poly3.with_linear(fbar, d))
    assert abs(dist[d] - (g / 2 ** f.n) ** 2) < 1e-12
print("class distribution matches all", 2 ** f.n, "linear shifts")

# QAOA: acceptance proportional to gap^2
spec = circuits.build_qaoa(f)
acc = circuits.qaoa_acceptance(f)
print("qaoa on", spec.q, "qubits,", len(spec.constraints), "constraints")
print("acceptance / gap^2 =", acc / poly3.gap_bruteforce(f) ** 2)

# promise classification from either route
print("sgap label:", circuits.sgap_classify(f))

rng = np.random.default_rng(7)
worst = 0.0
for _ in range(50):
    g = poly3.random_poly(6, rng)
    err = abs(2 ** 6 * circuits.iqp_gap_amplitude(g) - poly3.gap_bruteforce(g))
    worst = max(worst, err)
print("worst identity error over 50 random n=6 instances:", worst)
