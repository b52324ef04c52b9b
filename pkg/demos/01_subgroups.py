"""Cosets, free bases and abelianizations of Gamma_1(N 2^r).

Run:  python3 demos/01_subgroups.py
"""
from control2.presentations import inclusion_map, presentation
from control2.subgroups import (Mat, SubgroupSpec, eta, eta_lift, index,
                                index_by_reduction, residue_classes)

# Gamma_1(8) has index 48 in SL2(Z); the projective coset table has 24 rows
G = SubgroupSpec.gamma1(1, 3)
print(G, "index", index(G), "by reduction", index_by_reduction(G))

P = presentation(G)
print("free rank", P.rank, "cusp widths", P.cusp_widths())
for g in P.gens:
    print("  ", g)

# any element rewrites into the free basis
m = P.gens[0] * P.gens[3] ** 2 * P.gens[0].inv()
print("abelianized", P.abelianize(m))

# the intermediate group Phi_3^2 = Gamma_1(4) cap Gamma_0(8) sits over
# Gamma_1(8) with quotient (1 + 4Z)/(1 + 8Z), detected by eta
phi = SubgroupSpec(1, 3, 2)
print(phi, "index", index(phi))
print("eta of (5 1; 24 5):", eta(Mat(5, 1, 24, 5), 3))
for x in residue_classes(4):
    print("  lift of", x, "mod 16:", eta_lift(x, 4, 1))

# inclusion Gamma_1(8) -> Gamma_1(4) on abelianizations
print(inclusion_map(P, presentation(SubgroupSpec.gamma1(1, 2))))
