"""Atkin U, diamond operators and the transfer as integer matrices.

Run:  python3 demos/02_hecke.py
"""
import numpy as np

from control2.operators import chain_map, operator_set

ops = operator_set(1, 3, 2)          # Phi_3^2 for N = 1
print(ops, "rank", ops.U.shape[0])

# U is the composite transfer, conjugation by diag(1, 2), inclusion
print("U =\n", ops.U)
assert (ops.U == ops.inc @ ops.C_t @ ops.V).all()

# the nebentypus action of 5 mod 8 commutes with U
D = ops.diamond(5)
print("<5> =\n", D)
print("commutes:", (D @ ops.U == ops.U @ D).all())

# transfer down to Gamma_1(8) followed by inclusion is multiplication by 2
V = ops.transfer_down
print("incl . V == 2:", (ops.gamma1_inclusion @ V == 2 * np.eye(V.shape[1])).all())

# U is compatible with the tower Gamma_1(8) -> Gamma_1(4)
C = chain_map(1, 3, 2)
print("U C == C U:", (operator_set(1, 2, 2).U @ C == C @ operator_set(1, 3, 3).U).all())
