"""
Spatial versus temporal multiplexing
====================================

A spatial walk needs 2n + 1 modes.  A fiber loop needs 2^n time bins and
loses photons every round trip, so its count rate falls geometrically.
"""

from dtqw.architecture import TemporalLoopParams, feasibility_report, multiphoton_fraction

p = TemporalLoopParams()
print(f"multiphoton fraction at mu = {p.mean_photon}: {multiphoton_fraction(p.mean_photon):.2e}")
for row in feasibility_report(p, target_n=20):
    print(f"n = {row.n:2d}  modes {row.spatial_modes:3d} / {row.temporal_modes:8d}  "
          f"loop rate {row.temporal_rate:.3e} /s  feasible {row.temporal_feasible}")
