"""Integer 2x2 matrices and the congruence subgroups Phi_r^s.

``Phi_r^s = Gamma_1(N 2^s) cap Gamma_0(2^r)``, optionally intersected with
``Gamma^0(2)`` (``b`` even).  ``Phi_r^r`` is ``Gamma_1(N 2^r)``.

Residue classes of ``Gamma / Gamma_r = (1 + 4Z_2) / (1 + 2^r Z_2)`` are plain
integers in ``[1, 2^r)`` congruent to 1 mod 4.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

__all__ = [
    "Mat", "IDENTITY", "SIGMA", "TAU", "T", "HECKE_T",
    "SubgroupSpec", "CosetTable", "ResourceLimitError",
    "is_member", "index", "coset_enumerate", "eta", "eta_lift",
    "gamma_generator", "residue_classes", "residue_order",
    "conj_t", "conj_t_inv", "DEFAULT_COSET_BOUND", "index_by_reduction",
]

DEFAULT_COSET_BOUND = 10**6


class ResourceLimitError(RuntimeError):
    """Raised when an enumeration exceeds its configured bound."""


class Mat:
    """A 2x2 integer matrix ``(a b; c d)`` with exact entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = int(a)
        self.b = int(b)
        self.c = int(c)
        self.d = int(d)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __mul__(self, o):
        return Mat(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                   self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return Mat(-self.a, -self.b, -self.c, -self.d)

    def inv(self):
        if self.det != 1:
            raise ValueError(f"inverse only for det 1, got det {self.det}")
        return Mat(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        out, base = IDENTITY, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def canonical(self):
        """Representative of ``{m, -m}``: ``c > 0``, or ``c == 0`` and ``a > 0``."""
        if self.c < 0 or (self.c == 0 and self.a < 0):
            return -self
        return self

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, o):
        return isinstance(o, Mat) and self.entries() == o.entries()

    def __hash__(self):
        return hash(self.entries())

    def __repr__(self):
        return f"Mat({self.a}, {self.b}, {self.c}, {self.d})"


IDENTITY = Mat(1, 0, 0, 1)
SIGMA = Mat(0, -1, 1, 0)   # order 4 in SL2, order 2 in PSL2
TAU = Mat(0, -1, 1, -1)    # order 3
T = Mat(1, 1, 0, 1)
HECKE_T = Mat(1, 0, 0, 2)


def conj_t(m):
    """``t m t^-1 = (a, b/2; 2c, d)``; needs ``b`` even."""
    if m.b % 2:
        raise ValueError(f"t m t^-1 is not integral for {m!r}")
    return Mat(m.a, m.b // 2, 2 * m.c, m.d)


def conj_t_inv(m):
    """``t^-1 m t = (a, 2b; c/2, d)``; needs ``c`` even."""
    if m.c % 2:
        raise ValueError(f"t^-1 m t is not integral for {m!r}")
    return Mat(m.a, 2 * m.b, m.c // 2, m.d)


@dataclass(frozen=True)
class SubgroupSpec:
    """``Gamma_1(N 2^s) cap Gamma_0(2^r)``, and ``b = 0 mod 2`` if ``upper0``.

    ``SubgroupSpec(1, 0, 0)`` is the full modular group.
    """

    N: int
    r: int
    s: int
    upper0: bool = False

    def __post_init__(self):
        if self.N < 1 or self.N % 2 == 0:
            raise ValueError(f"N must be an odd positive integer, got {self.N}")
        if not 0 <= self.s <= self.r:
            raise ValueError(f"need 0 <= s <= r, got s={self.s}, r={self.r}")

    @classmethod
    def gamma1(cls, N, r, upper0=False):
        return cls(N, r, r, upper0)

    @classmethod
    def full(cls):
        return cls(1, 0, 0)

    @property
    def unit_modulus(self):
        """Modulus for ``a = d = 1``."""
        return self.N << self.s

    @property
    def lower_modulus(self):
        """Modulus for ``c = 0``."""
        return self.N << self.r

    @property
    def conductor(self):
        m = self.lower_modulus
        if self.upper0 and m % 2:
            m *= 2
        return m

    @property
    def contains_minus_identity(self):
        return self.unit_modulus <= 2

    @property
    def torsion_free(self):
        # Gamma_1(M) is torsion free in PSL2(Z) for M >= 4.
        return self.unit_modulus >= 4

    def _contains(self, m):
        A, C = self.unit_modulus, self.lower_modulus
        return ((m.a - 1) % A == 0 and (m.d - 1) % A == 0 and m.c % C == 0
                and (not self.upper0 or m.b % 2 == 0))

    def __str__(self):
        name = f"Phi_{self.r}^{self.s}(N={self.N})"
        return name + (" cap Gamma^0(2)" if self.upper0 else "")


def is_member(m, G):
    """True iff ``m`` or ``-m`` lies in ``G`` (membership in ``PSL2``)."""
    if m.det != 1:
        raise ValueError(f"membership needs det 1, got det {m.det}")
    m = m.canonical()
    return G._contains(m) or G._contains(-m)


# -- coset tables ------------------------------------------------------------

def _key_multipliers(G):
    # units u mod C with u = 1 mod A, together with their negatives
    A, C = G.unit_modulus, G.lower_modulus
    out = set()
    for u in range(1, C + 1, A if A > 0 else 1):
        if gcd(u, C) == 1:
            out.add(u % C)
            out.add((-u) % C)
    return sorted(out) or [0]


def _row_key(m, C, mults):
    c, d = m.c % C, m.d % C
    return min(((u * c) % C, (u * d) % C) for u in mults)


@dataclass
class CosetTable:
    """Right cosets ``G x`` of ``G`` in ``PSL2(Z)``.

    ``sigma[i]``/``tau[i]`` give the coset of ``reps[i] * SIGMA``/``TAU``.
    Cosets come in tau-triangles ``(b, tau[b], tau[tau[b]])`` and every
    coset first reached through a sigma-edge is the base of its triangle;
    ``parent[b]`` records that sigma-edge (``-1`` for the identity triangle).
    """

    subgroup: SubgroupSpec
    reps: list
    sigma: list
    tau: list
    parent: list
    _buckets: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.reps)

    @cached_property
    def _mults(self):
        return _key_multipliers(self.subgroup)

    def lookup(self, x):
        """Index of the coset containing ``x``, or ``None`` if not yet known."""
        G = self.subgroup
        key = _row_key(x, G.lower_modulus, self._mults)
        for q in self._buckets.get(key, ()):
            if is_member(x * self.reps[q].inv(), G):
                return q
        return None

    def coset_of(self, x):
        q = self.lookup(x)
        if q is None:
            raise KeyError(f"{x!r} is in no enumerated coset")
        return q

    def _add(self, x):
        key = _row_key(x, self.subgroup.lower_modulus, self._mults)
        self._buckets.setdefault(key, []).append(len(self.reps))
        self.reps.append(x)
        self.sigma.append(None)
        self.tau.append(None)
        self.parent.append(-1)
        return len(self.reps) - 1

    def walk(self, i, word):
        """Coset reached from ``i`` by an ambient word of (gen, exp) pairs."""
        for g, e in word:
            perm = self.sigma if g == 0 else self.tau
            for _ in range(e % (2 if g == 0 else 3)):
                i = perm[i]
        return i


def coset_enumerate(G, bound=DEFAULT_COSET_BOUND):
    """Enumerate ``G \\ PSL2(Z)`` breadth-first over sigma and tau."""
    table = CosetTable(G, [], [], [], [])

    def add_triangle(x):
        if len(table) + 3 > bound:
            raise ResourceLimitError(
                f"coset enumeration of {G} exceeds bound {bound}")
        if is_member(x * TAU * x.inv(), G):
            raise ValueError(f"{G} contains an element of order 3")
        i = table._add(x)
        j = table._add(x * TAU)
        k = table._add(x * TAU * TAU)
        table.tau[i], table.tau[j], table.tau[k] = j, k, i
        return i

    if is_member(TAU, G) or is_member(SIGMA, G):
        # torsion in G: tau- or sigma-orbits collapse; only the trivial
        # case G = PSL2(Z) is supported
        if not (is_member(TAU, G) and is_member(SIGMA, G)):
            raise ValueError(f"{G} has torsion; enumeration unsupported")
        table._add(IDENTITY)
        table.sigma[0] = table.tau[0] = 0
        return table

    add_triangle(IDENTITY)
    queue = deque(range(3))
    while queue:
        i = queue.popleft()
        if table.sigma[i] is not None:
            continue
        x = table.reps[i] * SIGMA
        j = table.lookup(x)
        if j is None:
            j = add_triangle(x)
            table.parent[j] = i
            queue.extend((j, j + 1, j + 2))
        if j == i:
            raise ValueError(f"{G} contains an element of order 2")
        table.sigma[i] = j
        table.sigma[j] = i
    return table


def index(G, bound=DEFAULT_COSET_BOUND):
    """``[SL2(Z) : G]`` by coset enumeration."""
    n = len(coset_enumerate(G, bound))
    return n if G.contains_minus_identity else 2 * n


# -- eta and its lifts -------------------------------------------------------

def eta(m, r, N=None):
    """``d mod 2^r`` for ``m`` in ``Phi_r^2``.

    Without ``N`` only the 2-adic conditions (``a = d = 1 mod 4``,
    ``2^r | c``) are checked.
    """
    if m.det != 1:
        raise ValueError(f"eta needs det 1, got det {m.det}")
    if m.d % 4 != 1:
        m = -m
    if N is not None:
        ok = SubgroupSpec(N, r, 2)._contains(m)
    else:
        ok = (m.a - 1) % 4 == 0 and (m.d - 1) % 4 == 0 and m.c % (1 << r) == 0
    if not ok:
        raise ValueError(f"{m!r} is not in Phi_{r}^2")
    return m.d % (1 << r)


def eta_lift(dbar, r, N, neben=False, variant=0):
    """A matrix in ``Phi_r^2`` (for level ``N``) whose eta is ``dbar``.

    With ``neben`` the lift lies in ``Phi_{r+1}^2 cap Gamma^0(2)``.
    ``variant`` selects among distinct lifts of the same class.
    """
    if dbar % 4 != 1:
        raise ValueError(f"class {dbar} is not 1 mod 4")
    M = 1 << r
    dbar %= M
    c = N << (r + 1 if neben else r)
    # d = dbar mod 2^r, d = 1 mod N
    d = dbar + M * (((1 - dbar) * pow(M, -1, N)) % N) if N > 1 else dbar
    d += variant * N * M
    a = pow(d, -1, c)
    b = (a * d - 1) // c
    if neben and b % 2:
        a += c
        b += d
    return Mat(a, b, c, d)


def gamma_generator(s):
    """The fixed topological generator ``1 + 2^s`` of ``Gamma_s``."""
    return 1 + (1 << s)


def residue_classes(r):
    """Elements of ``Gamma / Gamma_r`` as integers in ``[1, 2^r)``."""
    return list(range(1, 1 << r, 4))


def residue_order(x, r):
    M, n, y = 1 << r, 1, x % (1 << r)
    while y != 1:
        y = (y * x) % M
        n += 1
    return n


def _count_sl2(M):
    import numpy as np
    x = np.arange(M)
    hist = np.bincount((np.outer(x, x) % M).ravel(), minlength=M)
    ad = np.outer(x, x) % M
    return int(hist[(ad - 1) % M].sum())


def index_by_reduction(G):
    """``[SL2(Z) : G]`` by counting ``SL2(Z/M)`` and the image of ``G`` in it.

    Independent of coset enumeration; ``M`` is the conductor of ``G``.
    """
    import numpy as np
    M = max(G.conductor, 1)
    A, C = G.unit_modulus, G.lower_modulus
    a = np.arange(1, M + 1, A) % M
    c = np.arange(0, M, C)
    b = np.arange(0, M, 2) if G.upper0 else np.arange(M)
    ad = np.outer(a, a).ravel() % M                  # all (a, d) pairs
    bc = np.outer(b, c).ravel() % M
    hist = np.bincount(bc, minlength=M)
    image = int(hist[(ad - 1) % M].sum())
    return _count_sl2(M) // image
