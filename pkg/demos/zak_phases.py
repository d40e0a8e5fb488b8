"""
Zak phases from Wilson loops
============================

The Zak phase is the Berry phase of one band across the Brillouin zone.
Products of overlaps between neighbouring eigenvectors give it without
ever fixing a smooth gauge.
"""

import numpy as np

from dtqw.bands import winding_number
from dtqw.walk import NonCommuting, SplitStep
from dtqw.zak import zak_difference, zak_landscape, zak_phase_wilson, zak_split_step_analytic

# split-step walks: the phase is 0 or π and follows the winding number
for t1, t2 in [(0.3, 1.0), (1.0, 0.3), (2.9, 0.5), (-0.4, 0.9)]:
    p = SplitStep(t1, t2)
    z = zak_phase_wilson(p, "+")
    print(f"SS({t1:+.1f}, {t2:+.1f})  Z+ = {z.phase:.6f}  W = {winding_number(p)}  "
          f"analytic tan(t2)/tan(t1) = {zak_split_step_analytic(t1, t2):+.4f}")

# only differences between phases are free of the gauge choice
print("Z(SS(0.3,1.0)) - Z(SS(1.0,0.3)) =", zak_difference(SplitStep(0.3, 1.0), SplitStep(1.0, 0.3)))

# with n_z identically zero the loop is a great circle, so Z = π
print("NC(pi/2, 0):", zak_phase_wilson(NonCommuting(np.pi / 2, 0.0), "+").phase)

land = zak_landscape("splitstep", resolution=17, samples=64)
print("masked cells on a 17x17 split-step grid:", int(np.sum(~land.defined)))
