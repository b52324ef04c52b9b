import numpy as np
import pytest

from control2.operators import (chain_map, coset_reps, diamond, eta_log,
                                operator_set, transfer, transfer_down)
from control2.padiclin import elementary_divisors
from control2.presentations import inclusion_map, presentation
from control2.subgroups import (T, SubgroupSpec, conj_t, conj_t_inv, eta_lift,
                                is_member, residue_classes, residue_order)

LEVELS = [(1, 2, 2), (1, 3, 2), (1, 3, 3), (3, 3, 2), (5, 3, 2), (1, 4, 2)]


def eye(n):
    return np.eye(n, dtype=np.int64)


def test_transfer_trivial():
    P = presentation(SubgroupSpec.gamma1(1, 3))
    assert (transfer(P, P) == eye(P.rank)).all()


@pytest.mark.parametrize("H,G", [
    (SubgroupSpec.gamma1(1, 3), SubgroupSpec.gamma1(1, 2)),
    (SubgroupSpec(1, 3, 2, upper0=True), SubgroupSpec(1, 3, 2)),
    (SubgroupSpec.gamma1(3, 3), SubgroupSpec(3, 3, 2)),
])
def test_transfer_norm_and_rep_independence(H, G):
    PH, PG = presentation(H), presentation(G)
    n = len(PH.table) // len(PG.table)
    V = transfer(PH, PG)
    assert (inclusion_map(PH, PG) @ V == n * eye(PG.rank)).all()
    # moving each representative within its coset does not change the map
    h = PH.gens[0]
    reps = [h * t for t in coset_reps(PH, PG)]
    assert (transfer(PH, PG, reps=reps) == V).all()


def test_transfer_rejects_bad_reps():
    PH = presentation(SubgroupSpec(1, 3, 2, upper0=True))
    PG = presentation(SubgroupSpec(1, 3, 2))
    with pytest.raises(ValueError):
        transfer(PH, PG, reps=[T, T * PH.gens[0]])
    with pytest.raises(ValueError):
        transfer(PG, PH)


@pytest.mark.parametrize("N,r,s", LEVELS)
def test_hecke_pieces(N, r, s):
    ops = operator_set(N, r, s)
    for g in ops.P_upper.gens:
        assert is_member(conj_t(g), ops.spec_next)
    for g in ops.P_next.gens:
        assert is_member(conj_t_inv(g), ops.spec_upper)
    assert (ops.U == ops.inc @ ops.C_t @ ops.V).all()
    n = ops.C_t.shape[0]
    assert ops.C_t.shape == (n, n)
    assert [int(d) for d in elementary_divisors(ops.C_t)] == [1] * n


def test_eq6_level_132():
    ops, lower = operator_set(1, 3, 2), operator_set(1, 2, 2)
    assert (lower.Uprime @ ops.pi == ops.U).all()
    assert (ops.pi @ lower.Uprime == lower.U).all()
    assert (ops.inc @ ops.Uprime == ops.U).all()


@pytest.mark.parametrize("N,r,s", LEVELS)
def test_diamonds(N, r, s):
    ops = operator_set(N, r, s)
    n = ops.U.shape[0]
    assert (ops.diamond(1) == eye(n)).all()
    for x in residue_classes(r):
        D = ops.diamond(x)
        assert (D @ ops.U == ops.U @ D).all()
        assert (np.linalg.matrix_power(D, residue_order(x, r)) == eye(n)).all()
        assert (ops.diamond(x, variant=2) == D).all()


@pytest.mark.parametrize("N,r,s", LEVELS)
def test_transfer_down(N, r, s):
    ops = operator_set(N, r, s)
    V = ops.transfer_down
    top = operator_set(N, r, r)
    assert (V @ ops.U == top.U @ V).all()
    assert (ops.gamma1_inclusion @ V == (1 << (r - s)) * eye(ops.U.shape[0])).all()
    if r == s:
        assert (V == eye(V.shape[0])).all()


@pytest.mark.parametrize("N,r,s", LEVELS)
def test_cokernel_is_cyclic_with_u_doubling(N, r, s):
    ops = operator_set(N, r, s)
    m = 1 << (r - s)
    J = ops.gamma1_inclusion
    divisors = sorted(int(d) for d in elementary_divisors(J) if d != 1)
    assert divisors == ([m] if m > 1 else [])
    ell = ops.cokernel_projection
    assert not ((ell @ J) % m).any()
    assert ((ell @ ops.U - 2 * ell) % m == 0).all()


def test_eta_log():
    m = eta_lift(13, 4, 1)
    assert eta_log(m, 4, 2) == 3      # 5^3 = 125 = 13 mod 16
    with pytest.raises(ValueError):
        eta_log(eta_lift(5, 4, 1), 4, 3)


@pytest.mark.parametrize("N,r,s", [(1, 3, 2), (1, 4, 2), (1, 4, 3), (3, 3, 2), (1, 3, 3)])
def test_chain_map(N, r, s):
    C = chain_map(N, r, s)
    top, bottom = operator_set(N, r, r), operator_set(N, s, s)
    assert (bottom.U @ C == C @ top.U).all()
    for x in residue_classes(r):
        assert (C @ top.diamond(x) == bottom.diamond(x % (1 << s)) @ C).all()
    if r == s:
        assert (C == eye(C.shape[0])).all()


def test_chain_composes():
    assert (chain_map(1, 3, 2) @ chain_map(1, 4, 3) == chain_map(1, 4, 2)).all()


def test_module_helpers():
    assert (diamond(5, 1, 3, 2) == operator_set(1, 3, 2).diamond(5)).all()
    assert (transfer_down(1, 3, 2) == operator_set(1, 3, 2).transfer_down).all()
    with pytest.raises(ValueError):
        operator_set(1, 2, 3)
