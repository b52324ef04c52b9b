"""Transfer, Atkin U, nebentypus and inclusion maps on abelianizations.

All maps are integer matrices acting on column vectors of exponent sums in
the free bases produced by :mod:`control2.presentations`.
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np

from .presentations import inclusion_map, induced_map, presentation
from .subgroups import (IDENTITY, T, SubgroupSpec, conj_t, eta, eta_lift,
                        gamma_generator, is_member)

__all__ = [
    "transfer", "coset_reps", "OperatorSet", "operator_set", "atkin_u",
    "diamond", "transfer_down", "chain_map", "eta_log", "gamma_power",
]


def coset_reps(H, G):
    """Right coset representatives of ``H`` in ``G`` (both presentations).

    Breadth-first over the free generators of ``G`` acting on the coset
    table of ``H``; the identity comes first.
    """
    tab = H.table
    reps = {tab.coset_of(IDENTITY): IDENTITY}
    order = [IDENTITY]
    frontier = [IDENTITY]
    moves = list(G.gens) + [g.inv() for g in G.gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in moves:
                y = x * g
                q = tab.coset_of(y)
                if q not in reps:
                    reps[q] = y
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    return order


def transfer(H, G, reps=None):
    """Transfer ``G^ab -> H^ab`` for ``H`` of finite index in ``G``.

    The column for a generator ``g`` of ``G`` is
    ``sum_i ab(t_i g t_{j(i)}^-1)`` with ``H t_i g = H t_{j(i)}``.
    """
    for i, h in enumerate(H.gens):
        if not is_member(h, G.subgroup):
            raise ValueError(f"generator {i} of {H.subgroup} is not in {G.subgroup}")
    if len(H.table) % len(G.table):
        raise ValueError(f"{H.subgroup} is not of finite index in {G.subgroup}")
    n = len(H.table) // len(G.table)
    if reps is None:
        reps = coset_reps(H, G)
    reps = list(reps)
    where = {}
    for i, t in enumerate(reps):
        if not is_member(t, G.subgroup):
            raise ValueError(f"coset representative {t!r} not in {G.subgroup}")
        where[H.table.coset_of(t)] = i
    if len(where) != len(reps) or len(reps) != n:
        raise ValueError(f"need {n} distinct coset representatives, got {len(reps)}")
    inv = [t.inv() for t in reps]
    cols = []
    for g in G.gens:
        col = np.zeros(H.rank, dtype=np.int64)
        for i, t in enumerate(reps):
            x = t * g
            j = where[H.table.coset_of(x)]
            col += H.abelianize(x * inv[j])
        cols.append(col)
    if not cols:
        return np.zeros((H.rank, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def gamma_power(s, j, r):
    """``gamma_s^j mod 2^r``."""
    return pow(gamma_generator(s), j, 1 << r)


def eta_log(m, r, s):
    """Discrete log of ``eta_r(m)`` to the base ``gamma_s`` in ``Gamma_s/Gamma_r``."""
    x = eta(m, r)
    n = 1 << (r - s)
    for j in range(n):
        if gamma_power(s, j, r) == x:
            return j
    raise ValueError(f"eta = {x} is not in Gamma_{s}/Gamma_{r}")


class OperatorSet:
    """Presentations and operator matrices at level ``(N, r, s)``.

    ``U = inc @ C_t @ V`` and ``Uprime = C_t @ V`` where ``V`` is the
    transfer to ``Phi_r^s cap Gamma^0(2)``, ``C_t`` is ``A -> t A t^-1``
    and ``inc`` comes from ``Phi_{r+1}^s`` inside ``Phi_r^s``.
    """

    def __init__(self, N, r, s):
        if not r >= s >= 2:
            raise ValueError(f"need r >= s >= 2, got r={r}, s={s}")
        self.N, self.r, self.s = N, r, s
        self.spec = SubgroupSpec(N, r, s)
        self.spec_upper = SubgroupSpec(N, r, s, upper0=True)
        self.spec_next = SubgroupSpec(N, r + 1, s)
        self.spec_gamma1 = SubgroupSpec(N, r, r)

    def __repr__(self):
        return f"OperatorSet(N={self.N}, r={self.r}, s={self.s})"

    @property
    def P(self):
        return presentation(self.spec)

    @property
    def P_upper(self):
        return presentation(self.spec_upper)

    @property
    def P_next(self):
        return presentation(self.spec_next)

    @property
    def P_gamma1(self):
        return presentation(self.spec_gamma1)

    @cached_property
    def V(self):
        return transfer(self.P_upper, self.P, reps=[IDENTITY, T])

    @cached_property
    def C_t(self):
        return induced_map(conj_t, self.P_upper, self.P_next)

    @cached_property
    def inc(self):
        return inclusion_map(self.P_next, self.P)

    @cached_property
    def Uprime(self):
        return self.C_t @ self.V

    @cached_property
    def U(self):
        return self.inc @ self.Uprime

    @cached_property
    def pi(self):
        """``Phi_r^s -> Phi_{r-1}^s``; only for ``r - 1 >= s``."""
        if self.r - 1 < self.s:
            raise ValueError("pi needs r - 1 >= s")
        return inclusion_map(self.P, presentation(SubgroupSpec(self.N, self.r - 1, self.s)))

    def diamond(self, dbar, variant=0):
        alpha = eta_lift(dbar, self.r, self.N, neben=True, variant=variant)
        ainv = alpha.inv()
        return induced_map(lambda g: alpha * g * ainv, self.P, self.P)

    @cached_property
    def transfer_down_reps(self):
        r, s = self.r, self.s
        return [eta_lift(gamma_power(s, j, r), r, self.N, neben=True)
                for j in range(1 << (r - s))]

    @cached_property
    def transfer_down(self):
        """Transfer ``Phi_r^s ab -> Gamma_1(N 2^r) ab``."""
        return transfer(self.P_gamma1, self.P, reps=self.transfer_down_reps)

    @cached_property
    def gamma1_inclusion(self):
        """``Gamma_1(N 2^r) ab -> Phi_r^s ab``."""
        return inclusion_map(self.P_gamma1, self.P)

    @cached_property
    def cokernel_projection(self):
        """Row vector sending ``Phi_r^s ab`` onto ``Gamma_s/Gamma_r = Z/2^(r-s)``."""
        return np.array([eta_log(g, self.r, self.s) for g in self.P.gens], dtype=np.int64)


@lru_cache(maxsize=None)
def operator_set(N, r, s):
    return OperatorSet(N, r, s)


def atkin_u(N, r, s):
    """``(U, Uprime)`` on ``Phi_r^s ab``."""
    ops = operator_set(N, r, s)
    return ops.U, ops.Uprime


def diamond(dbar, N, r, s, variant=0):
    return operator_set(N, r, s).diamond(dbar, variant)


def transfer_down(N, r, s):
    return operator_set(N, r, s).transfer_down


def chain_map(N, r, s):
    """Inclusion-induced ``Gamma_1(N 2^r) ab -> Gamma_1(N 2^s) ab``."""
    if not r >= s >= 2:
        raise ValueError(f"need r >= s >= 2, got r={r}, s={s}")
    return inclusion_map(presentation(SubgroupSpec(N, r, r)),
                         presentation(SubgroupSpec(N, s, s)))
