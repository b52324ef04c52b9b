"""Exact linear algebra over Z and Z/2^k.

Matrices mod ``2^k`` are ``uint64`` arrays.  Ring operations in ``uint64``
wrap modulo ``2^64`` and ``2^k`` divides ``2^64``, so every product and sum
is exact mod ``2^k`` once masked; ``k`` may be anything in ``[1, 64]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "smith_normal_form", "elementary_divisors", "to_mod", "matmul_mod",
    "matpow_mod", "inv_mod", "snf_mod", "ordinary_idempotent",
    "ordinary_part", "OrdinaryModule", "PresentedModule", "coinvariants",
    "isomorphic", "free_module", "FreenessError", "IterationCapError",
    "unit_rank",
]


class FreenessError(ArithmeticError):
    """The ordinary part did not come out free; raise the precision."""


class IterationCapError(ArithmeticError):
    """The factorial-power sequence did not stabilize within the cap."""


# -- exact Smith normal form over Z -------------------------------------------

def _snf_lists(A, with_transforms):
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    L = [[int(i == j) for j in range(m)] for i in range(m)] if with_transforms else None
    R = [[int(i == j) for j in range(n)] for i in range(n)] if with_transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if L is not None:
            L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if R is not None:
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a, b = A[dst], A[src]
        for j in range(n):
            if b[j]:
                a[j] -= q * b[j]
        if L is not None:
            a, b = L[dst], L[src]
            for j in range(m):
                if b[j]:
                    a[j] -= q * b[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]
        if R is not None:
            for row in R:
                if row[src]:
                    row[dst] -= q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            moved = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    if A[i][t]:
                        moved = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    if A[t][j]:
                        moved = True
            if moved:
                # bring the smallest leftover in row/column t to the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if L is not None:
                L[t] = [-x for x in L[t]]
    return A, L, R


def smith_normal_form(A):
    """``(D, L, R)`` with ``L @ A @ R == D`` and ``D`` in Smith form.

    Exact over Z; returns ``object`` arrays of Python ints.
    """
    A = np.asarray(A, dtype=object)
    if A.ndim != 2:
        raise ValueError("need a 2-D matrix")
    D, L, R = _snf_lists(A.tolist(), True)
    m, n = A.shape
    D = np.array(D, dtype=object).reshape(m, n)
    L = np.array(L, dtype=object).reshape(m, m)
    R = np.array(R, dtype=object).reshape(n, n)
    if not (L.dot(A).dot(R) == D).all():
        raise AssertionError("Smith normal form failed re-verification")
    return D, L, R


def elementary_divisors(A):
    """Diagonal of the Smith form of ``A`` (zeros included), exact."""
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        return []
    D, _, _ = _snf_lists(A.tolist(), False)
    return [abs(D[i][i]) for i in range(min(A.shape))]


# -- arithmetic mod 2^k --------------------------------------------------------

def _mask(k):
    return np.uint64((1 << k) - 1) if k < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)


def to_mod(A, k):
    """Reduce an integer matrix mod ``2^k`` into ``uint64``."""
    A = np.asarray(A)
    if A.dtype == object:
        A = np.vectorize(lambda x: int(x) % (1 << k), otypes=[object])(A)
        return A.astype(np.uint64)
    return A.astype(np.int64).astype(np.uint64) & _mask(k)


def matmul_mod(A, B, k):
    return (A @ B) & _mask(k)


def matpow_mod(A, e, k):
    out = np.eye(A.shape[0], dtype=np.uint64)
    base = A.copy()
    while e:
        if e & 1:
            out = matmul_mod(out, base, k)
        base = matmul_mod(base, base, k)
        e >>= 1
    return out


def _lowbit(A):
    return A & (~A + np.uint64(1))


def inv_mod(A, k):
    """Inverse of a square matrix whose determinant is odd."""
    n = A.shape[0]
    mask = _mask(k)
    M = np.concatenate([A.astype(np.uint64) & mask, np.eye(n, dtype=np.uint64)], axis=1)
    for t in range(n):
        odd = np.nonzero(M[t:, t] & np.uint64(1))[0]
        if odd.size == 0:
            raise ArithmeticError("matrix is not invertible mod 2")
        p = t + odd[0]
        if p != t:
            M[[t, p]] = M[[p, t]]
        u = pow(int(M[t, t]), -1, 1 << k)
        M[t] = (M[t] * np.uint64(u)) & mask
        f = M[:, t].copy()
        f[t] = 0
        M -= np.outer(f, M[t])
        M &= mask
    return M[:, n:].copy()


def snf_mod(A, k, transforms=True):
    """Smith form over ``Z/2^k``.

    Returns ``(exps, L, R)`` with ``L @ A @ R`` diagonal, diagonal entries
    ``2^exps[i]`` (``exps[i] == k`` means zero) in increasing order.
    """
    mask = _mask(k)
    A = np.array(A, dtype=np.uint64) & mask
    m, n = A.shape
    L = np.eye(m, dtype=np.uint64) if transforms else None
    R = np.eye(n, dtype=np.uint64) if transforms else None
    exps = []
    zero_low = np.uint64(1 << 63)  # above every nonzero lowbit when k < 64
    for t in range(min(m, n)):
        sub = A[t:, t:]
        low = _lowbit(sub)
        if k == 64:
            # lowbit of zero is zero; push zeros out of the argmin
            low = np.where(sub == 0, np.uint64(0xFFFFFFFFFFFFFFFF), low)
        else:
            low = np.where(sub == 0, zero_low, low)
        flat = int(np.argmin(low))
        i, j = divmod(flat, sub.shape[1])
        if sub[i, j] == 0:
            break
        i += t
        j += t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if L is not None:
                L[[t, i]] = L[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if R is not None:
                R[:, [t, j]] = R[:, [j, t]]
        p = int(A[t, t])
        v = (p & -p).bit_length() - 1
        u = pow(p >> v, -1, 1 << k)
        A[t] = (A[t] * np.uint64(u)) & mask
        if L is not None:
            L[t] = (L[t] * np.uint64(u)) & mask
        sv = np.uint64(v)
        f = A[t + 1:, t] >> sv
        if f.any():
            A[t + 1:, t:] -= np.outer(f, A[t, t:])
            A[t + 1:, t:] &= mask
            if L is not None:
                L[t + 1:] -= np.outer(f, L[t])
                L[t + 1:] &= mask
        g = A[t, t + 1:] >> sv
        if g.any():
            A[t, t + 1:] = 0
            if R is not None:
                R[:, t + 1:] -= np.outer(R[:, t], g)
                R[:, t + 1:] &= mask
        exps.append(v)
    exps += [k] * (min(m, n) - len(exps))
    return exps, L, R


def unit_rank(A, k):
    """Number of unit elementary divisors of ``A`` mod ``2^k`` (= rank mod 2)."""
    exps, _, _ = snf_mod(A, k, transforms=False)
    return sum(1 for e in exps if e == 0)


# -- ordinary parts --------------------------------------------------------------

def _factorial_idempotent(U, k, cap):
    P = U.copy()
    for n in range(2, cap + 2):
        if (matmul_mod(P, P, k) == P).all():
            return P
        P = matpow_mod(P, n, k)
    raise IterationCapError(f"U^(n!) did not stabilize mod 2^{k} within n <= {cap}")


def _fitting_split(U, k):
    """``(B, C)`` with ``U^m = B @ C`` for ``m`` past the nilpotence index.

    ``B`` (n x d) spans the image, a free direct summand of rank ``d``.
    """
    n = U.shape[0]
    P = U.copy()
    m = 1
    # on the non-ordinary summand U is nilpotent mod 2, so U^(n k) = 0 mod 2^k
    while m < max(n * k, 1):
        P = matmul_mod(P, P, k)
        m *= 2
    exps, L, R = snf_mod(P, k)
    d = sum(1 for e in exps if e == 0)
    if any(0 < e < k for e in exps):
        raise FreenessError(
            f"image of U^{m} is not a free summand mod 2^{k}: divisors {exps}")
    B = inv_mod(L, k)[:, :d]
    C = inv_mod(R, k)[:d, :]
    return B, C


def ordinary_idempotent(U, k, method="fitting", cap=200):
    """The ordinary projector ``e = lim U^(n!)`` mod ``2^k``.

    ``method="factorial"`` iterates ``P <- P^n`` until ``P^2 = P``;
    ``method="fitting"`` builds ``e`` from the image of a high power of
    ``U`` and is polynomial time.  Both return the same matrix.
    """
    if k < 1:
        raise ValueError("precision k must be >= 1")
    U = to_mod(U, k)
    if method == "factorial":
        return _factorial_idempotent(U, k, cap)
    if method != "fitting":
        raise ValueError(f"unknown method {method!r}")
    B, C = _fitting_split(U, k)
    if B.shape[1] == 0:
        return np.zeros_like(U)
    Qinv = inv_mod(matmul_mod(C, B, k), k)
    return matmul_mod(B, matmul_mod(Qinv, C, k), k)


@dataclass
class OrdinaryModule:
    """The ordinary part of ``(Z/2^k)^n`` under ``U``.

    ``basis`` (n x d) and ``coords`` (d x n) satisfy
    ``coords @ basis = I`` and ``basis @ coords = e``.
    """

    k: int
    n: int
    U: np.ndarray
    e: np.ndarray
    basis: np.ndarray
    coords: np.ndarray
    ord_rank: int

    def restrict(self, op):
        """Matrix of an operator preserving the ordinary part, in ``basis``."""
        op = to_mod(op, self.k)
        return matmul_mod(self.coords, matmul_mod(op, self.basis, self.k), self.k)

    @property
    def U_ord(self):
        return self.restrict(self.U)


def ordinary_part(U, k):
    U = to_mod(U, k)
    n = U.shape[0]
    B, C = _fitting_split(U, k)
    d = B.shape[1]
    if d:
        coords = matmul_mod(inv_mod(matmul_mod(C, B, k), k), C, k)
    else:
        coords = np.zeros((0, n), dtype=np.uint64)
    e = matmul_mod(B, coords, k)
    mod = OrdinaryModule(k, n, U, e, B, coords, d)
    if not (matmul_mod(e, e, k) == e).all() or not (
            matmul_mod(e, U, k) == matmul_mod(U, e, k)).all():
        raise AssertionError("ordinary projector is not a U-equivariant idempotent")
    if d and unit_rank(mod.U_ord, k) != d:
        raise AssertionError("U is not invertible on the ordinary part")
    if d and unit_rank(B, k) != d:
        raise FreenessError("ordinary basis is not a free summand")
    return mod


@dataclass(frozen=True)
class PresentedModule:
    """``sum_i Z/2^exps[i]`` over ``Z/2^k``; ``exps[i] == k`` is a free summand."""

    k: int
    exps: tuple = field(default_factory=tuple)

    @property
    def free_rank(self):
        return sum(1 for e in self.exps if e == self.k)

    @property
    def is_free(self):
        return all(e == self.k for e in self.exps)

    @property
    def log2_order(self):
        return sum(self.exps)


def free_module(rank, k):
    return PresentedModule(k, (k,) * rank)


def _presented(exps, k):
    return PresentedModule(k, tuple(sorted(e for e in exps if e > 0)))


def cokernel_mod(A, k):
    """Cokernel of ``A`` (rows = target rank) over ``Z/2^k``."""
    A = to_mod(A, k)
    m, n = A.shape
    exps, _, _ = snf_mod(A, k, transforms=False) if n else ([], None, None)
    exps = list(exps) + [k] * (m - len(exps))
    return _presented(exps, k)


def coinvariants(M, gamma):
    """``M / (gamma - 1) M`` for the ordinary module ``M``."""
    k = M.k
    g = to_mod(gamma, k)
    if not (matmul_mod(g, M.U, k) == matmul_mod(M.U, g, k)).all():
        raise ValueError("gamma does not commute with U")
    gB = matmul_mod(g, M.basis, k)
    if not (matmul_mod(M.e, gB, k) == gB).all():
        raise ValueError("gamma does not preserve the ordinary part")
    G = (matmul_mod(M.coords, gB, k) - np.eye(M.ord_rank, dtype=np.uint64)) & _mask(k)
    return cokernel_mod(G, k)


def isomorphic(M1, M2):
    if M1.k != M2.k:
        raise ValueError("modules must share the precision k")
    return sorted(M1.exps) == sorted(M2.exps)
