"""
How much is lost by observing one coordinate
============================================

``CI2 / CI1`` compares observing all three nodes with the best single
linear combination. It always lies in ``[1, 2]``, and tends to 2 as the two
trees become hard to distinguish.
"""

import numpy as np

from treechernoff.experiment import g_inequality_check, normalized_ci, ratio_surface
from treechernoff.reduction import CanonicalPair

rows = ratio_surface()
ratios = np.array([r.ratio for r in rows])
print(f"{len(rows)} grid points, ratio in [{ratios.min():.4f}, {ratios.max():.4f}]")

nc = normalized_ci(CanonicalPair(0.5, 0.6))
print(f"at (0.5, 0.6): ratio = {nc.ratio:.5f}, per-measurement ratio = {nc.normalized_ratio:.5f}")

###############################################################################
# Along a row the ratio climbs to 2 as ``w2`` shrinks.

for w2 in (0.9, 0.5, 0.1, 0.01):
    print(f"w2={w2:<5} ratio={normalized_ci(CanonicalPair(0.3, w2)).ratio:.6f}")

###############################################################################
# The lower bound of 1/2 on ``CI1 / CI2`` is the scalar inequality
# ``2 g(x) >= ln((x + 1) / (2 sqrt(x)))``.

report = g_inequality_check(np.logspace(0, 6, 10001)[1:])
print(f"smallest gap {report.min_gap:.3e} at x = {report.argmin_x:.5f}")
