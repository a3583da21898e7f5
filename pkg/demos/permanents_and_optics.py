#!/usr/bin/env python3
"""Permanents, unitary dilations, and photon-configuration amplitudes.

A linear-optics amplitude is a permanent of a submatrix built by repeating
rows and columns according to photon occupations. Any matrix can be pushed
into the top-left block of a unitary after scaling, so any permanent shows
up as an amplitude.
"""

import math

import numpy as np

from gapbench import permanents as pm

# cross-check the two permanent algorithms
rng = np.random.default_rng(5)
a = rng.integers(-3, 4, size=(6, 6))
print("ryser:", pm.permanent_ryser(a), " naive:", pm.permanent_naive(a))

# a 2x2 unitary whose (2,1)->(1,2) transition amplitude is a 3x3 permanent
u = np.array([[1, 1j], [-1j, -1]]) / math.sqrt(2)
sub = u[np.ix_([0, 0, 1], [0, 1, 1])]
print("submatrix permanent:", pm.permanent_ryser(sub),
      " expected -i/sqrt(2) =", -1j / math.sqrt(2))
amp = pm.fock_amplitude(u, (2, 1), (1, 2))
# normalization divides by sqrt(2! 1! 1! 2!) = 2
print("fock amplitude:", amp, " expected", -1j / (2 * math.sqrt(2)))

# dilation: embed c*A as the corner of a unitary on twice the modes
d = 3
m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
c = 1 / (2 * pm.spectral_norm(m))
dil = pm.dilate(m, c=c)
print("unitarity defect:", pm.unitarity_defect(dil.unitary))
print("corner error:", np.max(np.abs(dil.unitary[:d, :d] - c * m)))

# one photon in each of the first d modes reads the permanent back out
occ = (1,) * d + (0,) * d
amp = pm.fock_amplitude(dil.unitary, occ, occ)
print("amplitude      :", amp)
print("c^d Per(A)     :", c ** d * pm.permanent_naive(m))

enc = pm.encode_permanent(m)
print("encode_permanent agrees:", abs(enc.amplitude - amp) < 1e-12)
