import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from control2.padiclin import (IterationCapError, PresentedModule, coinvariants,
                               elementary_divisors, free_module, inv_mod,
                               isomorphic, matmul_mod, ordinary_idempotent,
                               ordinary_part, smith_normal_form, snf_mod, to_mod,
                               unit_rank)
from control2.operators import operator_set


def det(M):
    # Bareiss, exact
    M = [list(map(int, row)) for row in M]
    n, sign, prev = len(M), 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[-1][-1] if n else 1


def determinantal_divisors(A):
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    out, prev = [], 1
    for i in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), i):
            for cols in itertools.combinations(range(n), i):
                g = math.gcd(g, det(A[np.ix_(rows, cols)].tolist()))
        out.append(g // prev if prev else 0)
        prev = g
    return out


def f2_rank(rows):
    # rows as python ints (bitsets)
    rank, rows = 0, list(rows)
    while rows:
        pivot = rows.pop()
        if pivot:
            rank += 1
            low = pivot & -pivot
            rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def ordinary_rank_mod2(U):
    n = U.shape[0]
    P = np.asarray(U, dtype=np.int64) % 2
    for _ in range(max(n, 1).bit_length() + 1):
        P = (P @ P) % 2
    return f2_rank(int("".join(map(str, row)), 2) for row in P)


small = st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n),
                       min_size=m, max_size=m)))
square = st.integers(1, 6).flatmap(lambda n: st.lists(
    st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=n, max_size=n))


def test_snf_examples():
    assert [int(d) for d in elementary_divisors([[1, 0], [0, 2]])] == [1, 2]
    assert [int(d) for d in elementary_divisors([[2, 4], [6, 8]])] == [2, 4]
    assert [int(d) for d in elementary_divisors([[0, 0], [0, 0]])] == [0, 0]


@given(small)
def test_snf_against_minors(A):
    D, L, R = smith_normal_form(A)
    assert (L.dot(np.array(A, dtype=object)).dot(R) == D).all()
    assert abs(det(L.tolist())) == 1 and abs(det(R.tolist())) == 1
    diag = [abs(int(D[i, i])) for i in range(min(D.shape))]
    assert diag == determinantal_divisors(A)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0 if a else b == 0


@given(small, st.integers(1, 12))
def test_snf_mod_valuations(A, k):
    exps, L, R = snf_mod(to_mod(np.array(A), k), k)
    D = matmul_mod(L, matmul_mod(to_mod(np.array(A), k), R, k), k)
    m, n = D.shape
    expected = np.zeros((m, n), dtype=np.uint64)
    for i, e in enumerate(exps):
        if e < k:
            expected[i, i] = 1 << e
    assert (D == expected).all()
    vals = sorted(min((d & -d).bit_length() - 1, k) if d else k
                  for d in map(int, elementary_divisors(A)))
    assert exps == vals
    assert unit_rank(to_mod(np.array(A), k), k) == vals.count(0)


@given(square, st.integers(1, 40))
def test_inv_mod(A, k):
    A = np.array(A)
    if det(A.tolist()) % 2 == 0:
        with pytest.raises(ArithmeticError):
            inv_mod(to_mod(A, k), k)
        return
    X = inv_mod(to_mod(A, k), k)
    assert (matmul_mod(to_mod(A, k), X, k) == to_mod(np.eye(len(A), dtype=np.int64), k)).all()


def test_idempotent_examples():
    I3 = np.eye(3, dtype=np.int64)
    assert (ordinary_idempotent(I3, 8) == I3).all()
    assert not ordinary_idempotent(2 * I3, 8).any()
    U = np.diag([3, 2])
    for method in ("fitting", "factorial"):
        assert (ordinary_idempotent(U, 4, method=method) == np.diag([1, 0])).all()
    assert ordinary_part(I3, 8).ord_rank == 3
    assert ordinary_part(U, 4).ord_rank == 1


@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)),
    st.integers(1, 20))
def test_idempotent_methods_agree(U, k):
    U = np.array(U)
    e = ordinary_idempotent(U, k)
    Um = to_mod(U, k)
    assert (matmul_mod(e, e, k) == e).all()
    assert (matmul_mod(e, Um, k) == matmul_mod(Um, e, k)).all()
    assert (ordinary_idempotent(U, k, method="factorial", cap=400) == e).all()
    M = ordinary_part(U, k)
    assert M.ord_rank == ordinary_rank_mod2(U)


def test_iteration_cap():
    # companion of x^3 + x + 1: order 7 mod 2, needs 7 | n!
    U = np.array([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
    with pytest.raises(IterationCapError):
        ordinary_idempotent(U, 4, method="factorial", cap=3)
    assert (ordinary_idempotent(U, 4, method="factorial") == np.eye(3)).all()


def test_bad_method():
    with pytest.raises(ValueError):
        ordinary_idempotent(np.eye(2, dtype=np.int64), 4, method="magic")


@pytest.mark.parametrize("N,r", [(1, 2), (1, 3), (3, 2), (3, 3), (5, 3)])
def test_hecke_ordinary_rank_mod2(N, r):
    U = operator_set(N, r, r).U
    M = ordinary_part(U, 16)
    assert M.ord_rank == ordinary_rank_mod2(U) == ordinary_part(U, 1).ord_rank
    assert (matmul_mod(M.coords, M.basis, 16) == np.eye(M.ord_rank, dtype=np.uint64)).all()


@pytest.mark.parametrize("N,r", [(1, 3), (3, 3), (5, 2)])
def test_precision_coherence(N, r):
    U = operator_set(N, r, r).U
    e16, e8 = ordinary_idempotent(U, 16), ordinary_idempotent(U, 8)
    assert ((e16 & np.uint64(0xFF)) == e8).all()


def test_coinvariants():
    I2 = np.eye(2, dtype=np.int64)
    M = ordinary_part(I2, 8)
    assert isomorphic(coinvariants(M, I2), free_module(2, 8))
    swap = np.array([[0, 1], [1, 0]])
    assert isomorphic(coinvariants(M, swap), free_module(1, 8))
    assert isomorphic(coinvariants(M, np.array([[3, 0], [0, 1]])),
                      PresentedModule(8, (1, 8)))
    with pytest.raises(ValueError):
        coinvariants(ordinary_part(np.diag([1, 3]), 8), swap)


def test_isomorphic():
    assert isomorphic(free_module(3, 8), free_module(3, 8))
    assert not isomorphic(PresentedModule(8, (1,)), PresentedModule(8, (2,)))
    assert free_module(2, 8).is_free and free_module(2, 8).free_rank == 2
    assert PresentedModule(8, (1, 8)).log2_order == 9
    with pytest.raises(ValueError):
        isomorphic(free_module(1, 8), free_module(1, 16))
