"""
Band structure and Dirac points of the non-commuting walk
=========================================================

One step of a translation-invariant walk is a 2x2 unitary U(k) at every
momentum.  Its eigenphases ±E(k) are the quasi-energies.  Where they touch
0 or π as the coin angles vary, the gap closes at a Dirac point.
"""

import numpy as np

from dtqw.bands import bloch_vector, count_dirac_points, find_dirac_points, phase_diagram, quasienergy
from dtqw.walk import NonCommuting

p = NonCommuting(0.7, 0.2)
for k in np.linspace(-np.pi, np.pi, 5):
    e, _ = quasienergy(p, k)
    print(f"k = {k:+.3f}  E = {e:.4f}  n = {np.round(bloch_vector(p, k).n, 4)}")

# the gap map on a modest grid, then the refined gapless points
gm = phase_diagram("noncommuting", resolution=65, k_samples=64)
print("gap-map rows:", len(list(gm.rows())), " smallest gap to 0:", float(np.min(gm.gap0)))

for d in find_dirac_points(128):
    print(f"theta = {d.theta / np.pi:+.2f} pi  phi = {d.phi / np.pi:+.2f} pi  k = {d.k / np.pi:+.2f} pi  {d.label}")

# the count depends on whether the edges of the parameter square are glued
print(count_dirac_points(128))
