"""
Every integer tuple summing to zero, realized by a clutching construction
========================================================================
"""
from eigenbundle import (assemble, build_sphere_grid, clutching, default_profile,
                         diag_obstruction, order_globally)
from eigenbundle.construct import clutching_seam_mismatch
import numpy as np

grid = build_sphere_grid(64, 32)

for c in [(1, -1), (2, -1, -1), (3, 0, -3), (1, 1, -2)]:
    fam = clutching(c, grid)
    # the two hemisphere formulas agree on the equator
    seam = clutching_seam_mismatch(c, np.linspace(0, 2 * np.pi, 129))
    sd = order_globally(assemble(default_profile(len(c)), fam, grid))
    print(c, "->", tuple(diag_obstruction(sd).components.ravel().tolist()), f"seam {seam:.1e}")

# tuples not summing to zero are refused
try:
    clutching((1, 1))
except ValueError as exc:
    print("refused:", exc)
