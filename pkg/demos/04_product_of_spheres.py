"""
Fields on a product of two spheres and the degree-4 relation
=============================================================
"""
from eigenbundle import (bloch, build_product_domain, build_sphere_grid, enumerate_admissible_n2,
                         first_factor, fixture_A_projectors, pair_with_cycles, pullback,
                         second_factor, star_check)

g = build_sphere_grid(32, 16)
X = build_product_domain(g, g)
basis = X.cycle_basis()

# pulling back along a projection only sees that factor's cycle
for name, fam in [("A on the first factor", pullback(fixture_A_projectors(), first_factor, X)),
                  ("bloch(2) on the second", pullback(bloch(2), second_factor, X))]:
    print(name, [tuple(pair_with_cycles(fam.band(i), basis)) for i in range(2)])

# for 2x2 fields the obstruction k a' + l b' must satisfy k l = 0
print("admissible (k, l) with |k|,|l| <= 2:", enumerate_admissible_n2(2))

# for 3x3 fields, a necessary condition on (k1, k2, l1, l2)
for t in [(1, -1, 0, 0), (1, 0, 1, 0), (2, 0, -1, 2)]:
    print(t, star_check(*t))
