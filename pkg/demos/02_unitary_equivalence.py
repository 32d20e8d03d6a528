"""
Same characteristic polynomial, not unitarily equivalent
=========================================================

Fixture B shares A's eigenvalues at every point but its eigenlines twist
the other way.  The hom bundles between matching eigenlines detect this.
"""
import numpy as np

from eigenbundle import (MatrixField, build_sphere_grid, char_poly, fixture_A, fixture_B,
                         order_globally, theta, verdict)

grid = build_sphere_grid(64, 32)
sA = order_globally(fixture_A(grid))
sB = order_globally(fixture_B(grid))

print("char poly mismatch", np.abs(char_poly(sA.field).sample() - char_poly(sB.field).sample()).max())

inv = theta(sA, sB)
print("theta(A, B) =", inv.components.ravel(), "equivalent:", verdict(inv).holds)

# conjugating A by a fixed unitary does not change its class
rng = np.random.default_rng(0)
U, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
A = fixture_A(grid)
UAU = MatrixField(2, lambda t, p: U @ A(t, p) @ U.conj().T, grid)
print("theta(A, U A U*) =", theta(sA, order_globally(UAU)).components.ravel())
