"""End-to-end checks of the control theorem at concrete levels.

Every check returns a :class:`CheckResult`; failures carry a witness that
names the identity that broke.  :func:`run` sweeps a grid of ``(N, r, s)``
and assembles a :class:`ControlReport`.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .operators import chain_map, operator_set
from .padiclin import (FreenessError, coinvariants, elementary_divisors,
                       free_module, isomorphic, matmul_mod, ordinary_part,
                       to_mod, unit_rank)
from .presentations import (inclusion_map, induced_map, presentation,
                            set_coset_bound)
from .subgroups import (DEFAULT_COSET_BOUND, ResourceLimitError, SubgroupSpec,
                        conj_t_inv, eta, eta_lift, gamma_generator, index,
                        index_by_reduction, is_member, residue_classes,
                        residue_order)

log = logging.getLogger(__name__)

CHECK_IDS = (
    "lemma-2.1", "presentation-rank", "eq-5", "eq-6", "lemma-3.1",
    "lemma-3.4", "lemma-3.5", "lemma-3.6", "transfer-norm", "theorem-4.1",
    "prop-5.1", "dual-rank", "rank-stability", "lambda-rank",
)
OPERATOR_CHECKS = ("eq-5", "eq-6", "lemma-3.1", "lemma-3.4", "lemma-3.5",
                   "lemma-3.6", "transfer-norm")


@dataclass
class CheckResult:
    id: str
    params: dict
    status: str
    witness: dict = field(default_factory=dict)
    ms: float = 0.0

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        return {"id": self.id, "params": self.params, "status": self.status,
                "witness": self.witness, "ms": round(self.ms, 3)}


@dataclass
class Config:
    Ns: tuple = (1, 3, 5)
    r_min: int = 2
    r_max: int = 4
    s_min: int = 2
    k: int = 16
    checks: tuple = CHECK_IDS
    out: str | None = None
    jobs: int = 1
    coset_bound: int = DEFAULT_COSET_BOUND

    def __post_init__(self):
        self.Ns = tuple(int(n) for n in self.Ns)
        if any(n < 1 or n % 2 == 0 for n in self.Ns):
            raise ValueError(f"every N must be odd and positive, got {self.Ns}")
        if self.r_min < 2:
            raise ValueError(f"r-min must be >= 2, got {self.r_min}")
        if self.r_max < self.r_min:
            raise ValueError(f"r-max {self.r_max} is below r-min {self.r_min}")
        if self.s_min < 2:
            raise ValueError(f"s-min must be >= 2, got {self.s_min}")
        if not 4 <= self.k <= 64:
            raise ValueError(f"precision must lie in [4, 64], got {self.k}")
        if "all" in self.checks:
            self.checks = CHECK_IDS
        unknown = set(self.checks) - set(CHECK_IDS)
        if unknown:
            raise ValueError(f"unknown check ids: {sorted(unknown)}")
        self.checks = tuple(c for c in CHECK_IDS if c in self.checks)

    def to_json(self):
        d = asdict(self)
        d["Ns"] = list(self.Ns)
        d["checks"] = list(self.checks)
        return d


@dataclass
class ControlReport:
    version: str
    config: dict
    checks: list
    summary: dict

    @property
    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def to_json(self, timings=True):
        checks = [c.to_json() for c in self.checks]
        if not timings:
            for c in checks:
                c.pop("ms")
        return {"version": self.version, "config": self.config,
                "checks": checks, "summary": self.summary}

    def dumps(self, timings=True):
        return json.dumps(self.to_json(timings), indent=2)


# -- helpers -------------------------------------------------------------------

def matrix_hash(A):
    A = np.ascontiguousarray(np.asarray(A, dtype=np.int64))
    h = hashlib.sha256(repr(A.shape).encode())
    h.update(A.tobytes())
    return h.hexdigest()[:16]


def _mismatch(name, lhs, rhs):
    """None if equal, else a serializable counterexample."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    if lhs.shape == rhs.shape and (lhs == rhs).all():
        return None
    out = {"identity": name, "lhs_shape": list(lhs.shape), "rhs_shape": list(rhs.shape)}
    if lhs.shape == rhs.shape:
        i, j = map(int, np.argwhere(lhs != rhs)[0])
        out.update(entry=[i, j], lhs=int(lhs[i, j]), rhs=int(rhs[i, j]),
                   lhs_hash=matrix_hash(lhs), rhs_hash=matrix_hash(rhs))
    return out


def _result(cid, params, problems, witness):
    if problems:
        witness = dict(witness, counterexample=problems)
    return CheckResult(cid, params, "fail" if problems else "pass", witness)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except ResourceLimitError as exc:
            cid, params = fn.check_id, fn.params(*args, **kwargs)
            out = CheckResult(cid, params, "skipped", {"reason": str(exc), "resource": True})
        ms = (time.perf_counter() - t0) * 1000
        for c in out if isinstance(out, list) else [out]:
            c.ms = ms / (len(out) if isinstance(out, list) else 1)
        return out
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _check(check_id, params):
    def deco(fn):
        fn.check_id = check_id
        fn.params = params
        return _timed(fn)
    return deco


def _p(N=None, r=None, s=None, k=None):
    return {"N": N, "r": r, "s": s, "k": k}


# -- checks --------------------------------------------------------------------

@_check("lemma-2.1", lambda N, r: _p(N, r))
def verify_eta(N, r):
    """Surjectivity of eta_r and of its restriction to Gamma^0(2)."""
    if r > 6:
        raise ValueError("eta is verified exhaustively only for r <= 6")
    problems = []
    phi = SubgroupSpec(N, r, 2)
    phi_up = SubgroupSpec(N, r, 2, upper0=True)
    phi_next_up = SubgroupSpec(N, r + 1, 2, upper0=True)
    classes = residue_classes(r)
    lifts = {}
    for x in classes:
        a = eta_lift(x, r, N)
        if not is_member(a, phi) or eta(a, r, N) != x:
            problems.append({"class": x, "lift": repr(a), "restricted": False})
        b = eta_lift(x, r, N, neben=True)
        if not (is_member(b, phi_up) and is_member(b, phi_next_up)) or eta(b, r, N) != x:
            problems.append({"class": x, "lift": repr(b), "restricted": True})
        lifts[x] = a
    for x in classes:
        for y in classes:
            if eta(lifts[x] * lifts[y], r, N) != (x * y) % (1 << r):
                problems.append({"homomorphism": [x, y]})
    order = residue_order(gamma_generator(2), r)
    if order != len(classes) or len(classes) != 1 << (r - 2):
        problems.append({"cyclic_order": order, "classes": len(classes)})
    # t^-1 (.) t sends Phi_{r+1}^2 to Phi_r^2 cap Gamma^0(2) over eta
    for y in residue_classes(r + 1):
        m = eta_lift(y, r + 1, N)
        m2 = conj_t_inv(m)
        if not is_member(m2, phi_up) or eta(m2, r, N) != y % (1 << r):
            problems.append({"remark-2.2": y, "image": repr(m2)})
    witness = {"classes": len(classes), "lifted": len(lifts), "generator_order": order}
    return _result("lemma-2.1", _p(N, r), problems, witness)


@_check("presentation-rank", lambda N, r: _p(N, r))
def verify_presentation(N, r):
    """Free rank of Gamma_1(N 2^r) against the Euler characteristic and index."""
    G = SubgroupSpec(N, r, r)
    P = presentation(G)
    idx_sl = index(G)
    idx_red = index_by_reduction(G)
    problems = []
    if P.rank != 1 + P.index_psl // 6 or 6 * (P.rank - 1) != P.index_psl:
        problems.append({"rank": P.rank, "index_psl": P.index_psl})
    if idx_sl != idx_red or idx_sl != 2 * P.index_psl:
        problems.append({"index_cosets": idx_sl, "index_reduction": idx_red})
    bad = [i for i, g in enumerate(P.gens) if not is_member(g, G)]
    if bad:
        problems.append({"non_member_generators": bad[:10]})
    witness = {"rank": P.rank, "index_psl": P.index_psl, "index_sl": idx_sl,
               "index_by_reduction": idx_red}
    return _result("presentation-rank", _p(N, r), problems, witness)


def _eq5(ops):
    problems = []
    for name, lhs, rhs in (("U = inc C_t V", ops.U, ops.inc @ ops.C_t @ ops.V),
                           ("U' = C_t V", ops.Uprime, ops.C_t @ ops.V)):
        bad = _mismatch(name, lhs, rhs)
        if bad:
            problems.append(bad)
    # C_t is invertible over Z: its inverse is induced by t^-1 (.) t
    C_inv = induced_map(conj_t_inv, ops.P_next, ops.P_upper)
    n = ops.C_t.shape[0]
    for name, lhs in (("C_t^-1 C_t = 1", C_inv @ ops.C_t), ("C_t C_t^-1 = 1", ops.C_t @ C_inv)):
        bad = _mismatch(name, lhs, np.eye(n, dtype=np.int64))
        if bad:
            problems.append(bad)
    for name, P, G in (("Phi cap Gamma^0(2) in Phi", ops.P_upper, ops.spec),
                       ("Phi_{r+1} in Phi", ops.P_next, ops.spec)):
        if not all(is_member(g, G) for g in P.gens):
            problems.append({"identity": name})
    witness = {"rank": int(ops.U.shape[0]), "rank_upper": int(ops.C_t.shape[1]),
               "U_hash": matrix_hash(ops.U)}
    return problems, witness


def _eq6(ops):
    problems = []
    bad = _mismatch("pi' U' = U", ops.inc @ ops.Uprime, ops.U)
    if bad:
        problems.append(bad)
    witness = {"lower_level": None}
    if ops.r - 1 >= ops.s:
        lower = operator_set(ops.N, ops.r - 1, ops.s)
        for name, lhs, rhs in (("U'_(r-1) pi = U", lower.Uprime @ ops.pi, ops.U),
                               ("pi U'_(r-1) = U_(r-1)", ops.pi @ lower.Uprime, lower.U)):
            bad = _mismatch(name, lhs, rhs)
            if bad:
                problems.append(bad)
        witness["lower_level"] = ops.r - 1
    return problems, witness


def _lemma31(ops):
    N, r, s = ops.N, ops.r, ops.s
    top, bottom = operator_set(N, r, r), operator_set(N, s, s)
    J1 = ops.gamma1_inclusion
    J2 = inclusion_map(ops.P, bottom.P)
    C = chain_map(N, r, s)
    problems = []
    for name, lhs, rhs in (
            ("U J1 = J1 U", ops.U @ J1, J1 @ top.U),
            ("U J2 = J2 U", bottom.U @ J2, J2 @ ops.U),
            ("U C = C U", bottom.U @ C, C @ top.U),
            ("C D_r = D_s C", C @ top.diamond(5 % (1 << r)), bottom.diamond(5 % (1 << s)) @ C),
            ("J2 J1 = C", J2 @ J1, C)):
        bad = _mismatch(name, lhs, rhs)
        if bad:
            problems.append(bad)
    return problems, {"chain_shape": list(C.shape), "chain_hash": matrix_hash(C)}


def _lemma34(ops):
    r, s = ops.r, ops.s
    M = 1 << (r - s)
    J = ops.gamma1_inclusion
    divisors = [int(d) for d in elementary_divisors(J)]
    nontrivial = sorted(d for d in divisors if d != 1)
    problems = []
    expected = [M] if M > 1 else []
    if nontrivial != expected or len(divisors) != J.shape[0]:
        problems.append({"identity": "coker = Z/2^(r-s)", "divisors": nontrivial,
                         "rows": int(J.shape[0]), "diagonal": len(divisors)})
    ell = ops.cokernel_projection
    if M > 1:
        if ((ell @ J) % M).any():
            problems.append({"identity": "eta kills Gamma_1"})
        if not (ell % 2).any():
            problems.append({"identity": "eta onto Gamma_s/Gamma_r"})
        lhs, rhs = (ell @ ops.U) % M, (2 * ell) % M
        if (lhs != rhs).any():
            j = int(np.argmax(lhs != rhs))
            problems.append({"identity": "U = 2 on coker", "generator": j,
                             "lhs": int(lhs[j]), "rhs": int(rhs[j])})
    return problems, {"cokernel": nontrivial, "degenerate": M == 1}


def _lemma35(ops):
    r = ops.r
    problems = []
    n = ops.U.shape[0]
    eye = np.eye(n, dtype=np.int64)
    D = {x: ops.diamond(x) for x in residue_classes(r)}
    bad = _mismatch("D(1) = 1", D[1], eye)
    if bad:
        problems.append(bad)
    for x, Dx in D.items():
        for name, lhs, rhs in (
                (f"U D({x}) = D({x}) U", ops.U @ Dx, Dx @ ops.U),
                (f"D({x}) lift independent", Dx, ops.diamond(x, variant=1)),
                (f"D({x}) D(5) = D({5 * x % (1 << r)})", Dx @ D[5 % (1 << r)],
                 D[(5 * x) % (1 << r)]),
                (f"D({x})^ord = 1", np.linalg.matrix_power(Dx, residue_order(x, r)), eye)):
            bad = _mismatch(name, lhs, rhs)
            if bad:
                problems.append(bad)
    return problems, {"classes": len(D)}


def _lemma36(ops):
    V = ops.transfer_down
    U_g1 = operator_set(ops.N, ops.r, ops.r).U
    bad = _mismatch("V U = U V", V @ ops.U, U_g1 @ V)
    return ([bad] if bad else []), {"transfer_shape": list(V.shape)}


def _transfer_norm(ops):
    problems = []
    n = ops.U.shape[0]
    pairs = (("inc V = 2", inclusion_map(ops.P_upper, ops.P) @ ops.V, 2),
             ("inc V_down = [Phi:Gamma_1]", ops.gamma1_inclusion @ ops.transfer_down,
              1 << (ops.r - ops.s)))
    for name, lhs, m in pairs:
        bad = _mismatch(name, lhs, m * np.eye(n, dtype=np.int64))
        if bad:
            problems.append(bad)
    return problems, {"indices": [2, 1 << (ops.r - ops.s)]}


_OPERATOR_IMPL = {
    "eq-5": _eq5, "eq-6": _eq6, "lemma-3.1": _lemma31, "lemma-3.4": _lemma34,
    "lemma-3.5": _lemma35, "lemma-3.6": _lemma36, "transfer-norm": _transfer_norm,
}


def verify_operator_lemmas(N, r, s, k=16, checks=OPERATOR_CHECKS):
    """One CheckResult per operator identity at level ``(N, r, s)``."""
    out = []
    for cid in checks:
        if cid not in _OPERATOR_IMPL:
            continue

        @_check(cid, lambda: _p(N, r, s, k))
        def one():
            problems, witness = _OPERATOR_IMPL[cid](operator_set(N, r, s))
            return _result(cid, _p(N, r, s, k), problems, witness)
        out.append(one())
    return out


# -- ordinary parts ------------------------------------------------------------

_ORD_CACHE = {}


def ordinary_module(N, r, s, k):
    """Ordinary part of ``Phi_r^s ab`` mod ``2^k`` (``s = r``: level r homology)."""
    key = (N, r, s, k)
    if key not in _ORD_CACHE:
        _ORD_CACHE[key] = ordinary_part(operator_set(N, r, s).U, k)
    return _ORD_CACHE[key]


def _augmentation(M, gamma):
    """``gamma - 1`` on the ordinary basis of ``M``."""
    G = M.restrict(gamma) - np.eye(M.ord_rank, dtype=np.uint64)
    return to_mod(G, M.k)


def _escalating(fn, k):
    """Run ``fn(k)``; on a freeness failure retry once at ``2k`` (at most 64)."""
    try:
        return fn(k), k
    except FreenessError:
        k2 = min(2 * k, 64)
        if k2 == k:
            raise
        log.info("precision escalation %d -> %d", k, k2)
        return fn(k2), k2


def _control_at(N, r, s, k):
    Mr = ordinary_module(N, r, r, k)
    Ms = ordinary_module(N, s, s, k)
    Mphi = ordinary_module(N, r, s, k)
    top = operator_set(N, r, r)
    gamma = top.diamond(gamma_generator(s) % (1 << r))
    Q = coinvariants(Mr, gamma)
    G = _augmentation(Mr, gamma)
    C = chain_map(N, r, s)
    J1 = operator_set(N, r, s).gamma1_inclusion
    J2 = inclusion_map(operator_set(N, r, s).P, operator_set(N, s, s).P)

    def restricted(dst, A, src):
        return matmul_mod(dst.coords, matmul_mod(to_mod(A, k), src.basis, k), k)

    direct = restricted(Ms, C, Mr)
    f1 = restricted(Mphi, J1, Mr)
    f2 = restricted(Ms, J2, Mphi)
    problems = []

    def iso_from_coinvariants(name, F, target_rank):
        if matmul_mod(F, G, k).any():
            problems.append({"identity": f"{name} kills a_s"})
        if unit_rank(F, k) != target_rank:
            problems.append({"identity": f"{name} surjective", "unit_rank": unit_rank(F, k),
                             "target_rank": target_rank})
        if not isomorphic(Q, free_module(target_rank, k)):
            problems.append({"identity": f"{name} coinvariants free of rank {target_rank}",
                             "coinvariants": list(Q.exps)})

    iso_from_coinvariants("H_r/a_s -> H_s", direct, Ms.ord_rank)
    iso_from_coinvariants("H_r/a_s -> Phi", f1, Mphi.ord_rank)
    if Mphi.ord_rank != Ms.ord_rank or unit_rank(f2, k) != Ms.ord_rank:
        problems.append({"identity": "Phi^ord -> H_s^ord iso",
                         "ranks": [Mphi.ord_rank, Ms.ord_rank]})
    bad = _mismatch("composite of the two factor maps", matmul_mod(f2, f1, k), direct)
    if bad:
        problems.append(bad)
    bad = _mismatch("J2 J1 = C", J2 @ J1, C)
    if bad:
        problems.append(bad)
    witness = {"ord_rank_r": Mr.ord_rank, "ord_rank_phi": Mphi.ord_rank,
               "ord_rank_s": Ms.ord_rank, "coinvariants": list(Q.exps),
               "map_hash": matrix_hash(direct.astype(np.int64))}
    return problems, witness


@_check("theorem-4.1", lambda N, r, s, k=16: _p(N, r, s, k))
def verify_control(N, r, s, k=16):
    """``(H_r^ord)/a_s -> H_s^ord`` is bijective mod ``2^k``."""
    try:
        (problems, witness), used = _escalating(lambda kk: _control_at(N, r, s, kk), k)
    except FreenessError as exc:
        return CheckResult("theorem-4.1", _p(N, r, s, k), "skipped",
                           {"reason": f"precision escalation exhausted: {exc}"})
    witness["k_used"] = used
    return _result("theorem-4.1", _p(N, r, s, k), problems, witness)


@_check("prop-5.1", lambda N, r, s, k=16: _p(N, r, s, k))
def verify_composition(N, r, s, k=16):
    """Control maps compose: (r -> s) = (r' -> s)(r -> r') for s < r' < r."""
    problems = []
    C = chain_map(N, r, s)
    Mr, Ms = ordinary_module(N, r, r, k), ordinary_module(N, s, s, k)
    direct = matmul_mod(Ms.coords, matmul_mod(to_mod(C, k), Mr.basis, k), k)
    middles = list(range(s + 1, r))
    for rp in middles:
        A, B = chain_map(N, rp, s), chain_map(N, r, rp)
        bad = _mismatch(f"C(r->s) = C({rp}->s) C(r->{rp})", A @ B, C)
        if bad:
            problems.append(bad)
        Mm = ordinary_module(N, rp, rp, k)
        first = matmul_mod(Mm.coords, matmul_mod(to_mod(B, k), Mr.basis, k), k)
        second = matmul_mod(Ms.coords, matmul_mod(to_mod(A, k), Mm.basis, k), k)
        bad = _mismatch(f"ordinary composite via r'={rp}", matmul_mod(second, first, k), direct)
        if bad:
            problems.append(bad)
    return _result("prop-5.1", _p(N, r, s, k), problems, {"intermediate": middles})


@_check("dual-rank", lambda N, r, s, k=16: _p(N, r, s, k))
def verify_dual_rank(N, r, s, k=16):
    """Dual of the transfer Phi_r^s -> Gamma_1(N 2^r) on ordinary parts."""
    Mr, Ms = ordinary_module(N, r, r, k), ordinary_module(N, s, s, k)
    Mphi = ordinary_module(N, r, s, k)
    top = operator_set(N, r, r)
    problems = []
    dual_rank = ordinary_part(top.U.T, k).ord_rank
    if dual_rank != Mr.ord_rank:
        problems.append({"identity": "ord_rank(U) = ord_rank(U^T)",
                         "ranks": [Mr.ord_rank, dual_rank]})
    V = operator_set(N, r, s).transfer_down
    Vo = matmul_mod(Mr.coords, matmul_mod(to_mod(V, k), Mphi.basis, k), k)
    Vt = Vo.T.copy()
    if unit_rank(Vt, k) != Mphi.ord_rank:
        problems.append({"identity": "V* surjective on ordinary duals",
                         "unit_rank": unit_rank(Vt, k), "target": Mphi.ord_rank})
    kernel_rank = Mr.ord_rank - Mphi.ord_rank
    if kernel_rank != Mr.ord_rank - Ms.ord_rank:
        problems.append({"identity": "kernel rank", "kernel_rank": kernel_rank,
                         "expected": Mr.ord_rank - Ms.ord_rank})
    gamma = top.diamond(gamma_generator(s) % (1 << r))
    G = _augmentation(Mr, gamma)
    Gt = G.T.copy()
    if matmul_mod(Vt, Gt, k).any():
        problems.append({"identity": "a_s Hom in ker V*"})
    if unit_rank(Gt, k) != kernel_rank:
        problems.append({"identity": "ker V* = a_s Hom", "unit_rank": unit_rank(Gt, k),
                         "kernel_rank": kernel_rank})
    witness = {"ord_rank_r": Mr.ord_rank, "ord_rank_phi": Mphi.ord_rank,
               "ord_rank_s": Ms.ord_rank, "kernel_rank": kernel_rank}
    return _result("dual-rank", _p(N, r, s, k), problems, witness)


def nakayama_dimension(N):
    """``dim_F2 (H_2 tensor F_2)^ord`` at level ``N 2^2``."""
    return ordinary_part(operator_set(N, 2, 2).U, 1).ord_rank


@_check("rank-stability", lambda N, r_range, k=16: _p(N, None, None, k))
def verify_rank_stability(N, r_range, k=16):
    """``ord_rank(H_r)`` constant in ``r`` and equal to the mod-2 count ``d``."""
    r_range = list(r_range)
    if any(not 2 <= r <= 6 for r in r_range):
        raise ValueError("r_range must lie in [2, 6]")
    ranks = {r: ordinary_module(N, r, r, k).ord_rank for r in r_range}
    d = nakayama_dimension(N)
    problems = []
    if len(set(ranks.values())) > 1:
        problems.append({"identity": "ord_rank(H_r) independent of r",
                         "ranks": {str(r): v for r, v in ranks.items()}})
    if 2 in ranks and ranks[2] != d:
        problems.append({"identity": "ord_rank(H_2) = Nakayama dimension",
                         "rank": ranks[2], "d": d})
    witness = {"r_range": r_range, "ranks": {str(r): v for r, v in ranks.items()},
               "d": d, "per_lambda_r": {str(r): v / (1 << (r - 2)) for r, v in ranks.items()}}
    return _result("rank-stability", _p(N, None, None, k), problems, witness)


@_check("lambda-rank", lambda N, r_range, k=16: _p(N, None, None, k))
def verify_lambda_rank(N, r_range, k=16):
    """``ord_rank(H_r) = d 2^(r-2)`` and ``H_r^ord / a_2`` free of rank ``d``."""
    d = nakayama_dimension(N)
    problems, ranks = [], {}
    for r in r_range:
        M = ordinary_module(N, r, r, k)
        ranks[str(r)] = M.ord_rank
        if M.ord_rank != d << (r - 2):
            problems.append({"identity": f"ord_rank(H_{r}) = d 2^(r-2)",
                             "rank": M.ord_rank, "d": d})
        Q = coinvariants(M, operator_set(N, r, r).diamond(gamma_generator(2) % (1 << r)))
        if not isomorphic(Q, free_module(d, k)):
            problems.append({"identity": f"H_{r}^ord / a_2 free of rank d",
                             "coinvariants": list(Q.exps)})
    return _result("lambda-rank", _p(N, None, None, k), problems,
                   {"d": d, "ranks": ranks})


# -- orchestration -------------------------------------------------------------

def _levels(config):
    for r in range(config.r_min, config.r_max + 1):
        for s in range(max(config.s_min, 2), r + 1):
            yield r, s


def _run_for_N(config, N):
    old = set_coset_bound(config.coset_bound)
    try:
        return _checks_for_N(config, N)
    finally:
        set_coset_bound(old)


def _checks_for_N(config, N):
    chosen = set(config.checks)
    k = config.k
    out = []
    for r in range(config.r_min, config.r_max + 1):
        if "lemma-2.1" in chosen:
            out.append(verify_eta(N, r))
        if "presentation-rank" in chosen:
            out.append(verify_presentation(N, r))
    for r, s in _levels(config):
        ops = [c for c in OPERATOR_CHECKS if c in chosen]
        if ops:
            out.extend(verify_operator_lemmas(N, r, s, k, ops))
        if "theorem-4.1" in chosen:
            out.append(verify_control(N, r, s, k))
        if "prop-5.1" in chosen:
            out.append(verify_composition(N, r, s, k))
        if "dual-rank" in chosen:
            out.append(verify_dual_rank(N, r, s, k))
    r_range = range(config.r_min, config.r_max + 1)
    if "rank-stability" in chosen:
        out.append(verify_rank_stability(N, r_range, k))
    if "lambda-rank" in chosen:
        out.append(verify_lambda_rank(N, r_range, k))
    return out


def run(config):
    """Run the selected checks over the grid; deterministic order."""
    if config.jobs > 1 and len(config.Ns) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            parts = list(pool.map(_run_for_N, [config] * len(config.Ns), config.Ns))
    else:
        parts = [_run_for_N(config, N) for N in config.Ns]
    checks = [c for part in parts for c in part]
    d_by_N, stable = {}, True
    for c in checks:
        if c.id == "rank-stability":
            if "d" in c.witness:
                d_by_N[str(c.params["N"])] = c.witness["d"]
            stable = stable and c.passed
    summary = {
        "d_by_N": d_by_N,
        "stable": stable,
        "passed": sum(c.status == "pass" for c in checks),
        "failed": sum(c.status == "fail" for c in checks),
        "skipped": sum(c.status == "skipped" for c in checks),
        "warnings": sum(bool(c.witness.get("resource")) for c in checks),
    }
    return ControlReport(__version__, config.to_json(), checks, summary)
