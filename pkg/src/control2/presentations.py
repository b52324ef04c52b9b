"""Free presentations of torsion-free subgroups of PSL2(Z).

PSL2(Z) is the free product of ``<sigma>`` (order 2) and ``<tau>`` (order
3).  For a torsion-free subgroup the tau-orbits on cosets are triangles and
the sigma-orbits are pairs; contracting each triangle leaves a graph whose
non-tree edges are exactly the free generators (Reidemeister-Schreier with
the relators ``sigma^2`` and ``tau^3`` already eliminated).

Words are tuples of ``(generator, exponent)`` pairs.  Ambient words use
generator 0 for sigma and 1 for tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subgroups import (DEFAULT_COSET_BOUND, IDENTITY, SIGMA,
                        ResourceLimitError, coset_enumerate, is_member)

__all__ = [
    "FreePresentation", "presentation", "reidemeister_schreier", "set_coset_bound",
    "express_ambient", "evaluate", "reduce_word", "abelianize_word",
    "rewrite", "abelianize", "induced_map", "inclusion_map",
]


def reduce_word(pairs):
    """Freely reduce a sequence of ``(gen, exp)`` pairs."""
    out = []
    for g, e in pairs:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
            if e:
                out.append((g, e))
        else:
            out.append((g, e))
    return tuple(out)


def evaluate(word, gens):
    m = IDENTITY
    for g, e in word:
        m = m * gens[g] ** e
    return m


def abelianize_word(word, rank):
    v = np.zeros(rank, dtype=np.int64)
    for g, e in word:
        v[g] += e
    return v


def _ambient_tokens(m):
    """Factor ``+-m`` as ``T^q1 S T^q2 S ... T^qn`` (Euclid on the first column).

    Returns a list of ``("T", q)`` and ``("S", 1)`` tokens.
    """
    if m.det != 1:
        raise ValueError(f"need det 1, got det {m.det}")
    a, b, c, d = m.entries()
    tokens = []
    while c != 0:
        q = a // c
        if 2 * (a - q * c) > abs(c):
            q += 1
        # T^-q m, then S
        a, b = a - q * c, b - q * d
        if q:
            tokens.append(("T", q))
        tokens.append(("S", 1))
        a, b, c, d = -c, -d, a, b
    # now +-(1 n; 0 1)
    n = b if a == 1 else -b
    if n:
        tokens.append(("T", n))
    return tokens


def express_ambient(m):
    """A word in sigma (0) and tau (1) evaluating to ``+-m``."""
    letters = []
    for kind, q in _ambient_tokens(m):
        if kind == "S":
            letters.append((0, 1))
        elif q > 0:
            letters.extend([(1, 2), (0, 1)] * q)       # T = tau^2 sigma
        else:
            letters.extend([(0, 1), (1, 1)] * (-q))    # T^-1 = sigma tau
    return reduce_word(letters)


@dataclass
class FreePresentation:
    """A free basis ``gens`` of a torsion-free congruence subgroup.

    ``emit[i]`` is the generator contribution ``(g, +-1)`` of the sigma-edge
    leaving coset ``i``, or ``None`` for spanning-tree edges.
    """

    subgroup: object
    gens: list
    table: object
    rank: int
    emit: list

    def __post_init__(self):
        tab = self.table
        n = len(tab)
        # one T = tau^2 sigma step from each coset
        self._t_next = [tab.sigma[tab.tau[tab.tau[i]]] for i in range(n)]
        self._t_emit = [self.emit[tab.tau[tab.tau[i]]] for i in range(n)]
        self._t_prev = [0] * n
        for i, j in enumerate(self._t_next):
            self._t_prev[j] = i
        self._cycle_len = [0] * n
        self._cycle_sum = [None] * n
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            cyc, j = [], i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self._t_next[j]
            total = {}
            for j in cyc:
                if self._t_emit[j] is not None:
                    g, e = self._t_emit[j]
                    total[g] = total.get(g, 0) + e
            for j in cyc:
                self._cycle_len[j] = len(cyc)
                self._cycle_sum[j] = total

    @property
    def index_psl(self):
        return len(self.table)

    def cusp_widths(self):
        """Lengths of the cycles of ``T`` on cosets."""
        widths, seen = [], set()
        for i in range(len(self.table)):
            if i not in seen:
                j = i
                while j not in seen:
                    seen.add(j)
                    j = self._t_next[j]
                widths.append(self._cycle_len[i])
        return widths

    def _walk_abelian(self, m, acc):
        i = 0
        tab = self.table
        for kind, q in _ambient_tokens(m):
            if kind == "S":
                if self.emit[i] is not None:
                    g, e = self.emit[i]
                    acc[g] += e
                i = tab.sigma[i]
                continue
            L = self._cycle_len[i]
            full, rest = divmod(abs(q), L)
            sgn = 1 if q > 0 else -1
            if full:
                for g, e in self._cycle_sum[i].items():
                    acc[g] += sgn * full * e
            for _ in range(rest):
                if q > 0:
                    if self._t_emit[i] is not None:
                        g, e = self._t_emit[i]
                        acc[g] += e
                    i = self._t_next[i]
                else:
                    i = self._t_prev[i]
                    if self._t_emit[i] is not None:
                        g, e = self._t_emit[i]
                        acc[g] -= e
        return i

    def abelianize(self, m):
        """Exponent-sum vector of ``m`` in the free basis."""
        if not is_member(m, self.subgroup):
            raise ValueError(f"{m!r} is not in {self.subgroup}")
        acc = [0] * self.rank
        end = self._walk_abelian(m, acc)
        if end != 0:
            raise AssertionError("rewriting did not return to the base coset")
        return np.array(acc, dtype=np.int64)

    def rewrite(self, m):
        """A word in ``gens`` evaluating to ``+-m``."""
        if not is_member(m, self.subgroup):
            raise ValueError(f"{m!r} is not in {self.subgroup}")
        tab, i, out = self.table, 0, []
        for g, e in express_ambient(m):
            perm = tab.sigma if g == 0 else tab.tau
            for _ in range(e % (2 if g == 0 else 3)):
                if g == 0 and self.emit[i] is not None:
                    out.append(self.emit[i])
                i = perm[i]
        if i != 0:
            raise AssertionError("rewriting did not return to the base coset")
        return reduce_word(out)


def reidemeister_schreier(G, bound=DEFAULT_COSET_BOUND):
    if not G.torsion_free:
        raise ValueError(f"{G} is not torsion free")
    tab = coset_enumerate(G, bound)
    n = len(tab)
    gens, emit = [], [None] * n
    for i in range(n):
        j = tab.sigma[i]
        if i < j and tab.parent[j] != i:
            x = tab.reps[i] * SIGMA * tab.reps[j].inv()
            if not G._contains(x):
                x = -x
            if not G._contains(x):
                raise AssertionError(f"Schreier generator {x!r} not in {G}")
            emit[i] = (len(gens), 1)
            emit[j] = (len(gens), -1)
            gens.append(x)
    rank = len(gens)
    if 6 * (rank - 1) != n:
        raise AssertionError(
            f"rank {rank} contradicts Euler characteristic for index {n}")
    # relator check: tau^3 and sigma^2 around every coset rewrite trivially
    for i in range(n):
        j = tab.tau[tab.tau[tab.tau[i]]]
        if j != i or tab.sigma[tab.sigma[i]] != i:
            raise AssertionError("coset table violates the ambient relators")
        a, b = emit[i], emit[tab.sigma[i]]
        if (a is None) != (b is None) or (a and (a[0] != b[0] or a[1] != -b[1])):
            raise AssertionError("sigma^2 relator rewrites nontrivially")
    return FreePresentation(G, gens, tab, rank, emit)


_cache = {}
_coset_bound = DEFAULT_COSET_BOUND


def set_coset_bound(bound):
    """Set the coset bound used by :func:`presentation`; returns the old one."""
    global _coset_bound
    old, _coset_bound = _coset_bound, int(bound)
    return old


def presentation(G):
    """Cached :func:`reidemeister_schreier` under the current coset bound."""
    P = _cache.get(G)
    if P is None:
        P = _cache[G] = reidemeister_schreier(G, _coset_bound)
    elif len(P.table) > _coset_bound:
        raise ResourceLimitError(
            f"{G} has {len(P.table)} cosets, above bound {_coset_bound}")
    return P


def rewrite(m, P):
    return P.rewrite(m)


def abelianize(m, P):
    return P.abelianize(m)


def induced_map(f, src, dst):
    """Matrix of ``src^ab -> dst^ab`` induced by ``f`` on generators."""
    cols = []
    for i, g in enumerate(src.gens):
        img = f(g)
        if not is_member(img, dst.subgroup):
            raise ValueError(
                f"image of generator {i} ({g!r}) is {img!r}, not in {dst.subgroup}")
        cols.append(dst.abelianize(img))
    if not cols:
        return np.zeros((dst.rank, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def inclusion_map(src, dst):
    return induced_map(lambda g: g, src, dst)
