"""Ordinary parts and the control isomorphism mod 2^16.

Run:  python3 demos/03_control.py
"""
from control2.operators import operator_set
from control2.padiclin import coinvariants, ordinary_part
from control2.subgroups import gamma_generator
from control2.verifier import verify_control, verify_rank_stability

k = 16
for N in (1, 3, 5):
    ranks = []
    for r in (2, 3, 4):
        M = ordinary_part(operator_set(N, r, r).U, k)
        gamma = operator_set(N, r, r).diamond(gamma_generator(2) % (1 << r))
        Q = coinvariants(M, gamma)
        ranks.append((r, M.ord_rank, Q.free_rank))
    print(f"N={N}: (r, ord rank, rank of coinvariants under 1+4)", ranks)

# the ordinary rank grows like d 2^(r-2) while the coinvariants stay at d;
# this is what freeness over Z_2[[1 + 4Z_2]] predicts
for N, r, s in ((1, 3, 2), (3, 4, 2), (5, 4, 3)):
    c = verify_control(N, r, s, k)
    print(c.id, c.params, c.status, c.witness)

print(verify_rank_stability(1, [2, 3, 4], k).witness)
