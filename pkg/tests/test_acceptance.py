"""Acceptance criteria 1-10, one test each.

Each test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and when the module is run directly.
"""

import json
import os
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from control2.operators import operator_set
from control2.padiclin import (matmul_mod, ordinary_idempotent,
                               smith_normal_form, to_mod)
from control2.verifier import (verify_control, verify_eta,
                               verify_operator_lemmas, verify_presentation,
                               verify_rank_stability)

NS = (1, 3, 5)
GRID = [(N, r, s) for N in NS for r in range(2, 5) for s in range(2, r + 1)]
RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def failures(results):
    return [(c.id, c.params, c.witness.get("counterexample")) for c in results
            if not c.passed]


def test_criterion_01_eta_surjective():
    t0 = time.perf_counter()
    out = [verify_eta(N, r) for N in NS for r in range(2, 7)]
    dt = time.perf_counter() - t0
    sizes_ok = all(c.witness["classes"] == 1 << (c.params["r"] - 2) for c in out)
    bad = failures(out)
    ok = not bad and sizes_ok and dt < 1.0
    assert record(1, ok, f"eta_r onto Z/2^(r-2), {len(out)} levels, {dt:.2f}s (< 1s)"), bad


def test_criterion_02_presentation_ranks():
    t0 = time.perf_counter()
    out = [verify_presentation(N, r) for N in NS for r in range(2, 5)]
    dt = time.perf_counter() - t0
    bad = failures(out)
    ranks = {f"{c.params['N']}*2^{c.params['r']}": c.witness["rank"] for c in out}
    ok = not bad and dt < 10.0
    assert record(2, ok, f"rank = 1 + index/6, index by reduction agrees, {ranks}, "
                         f"{dt:.1f}s (< 10s)"), bad


def _grid_checks(ids):
    out = []
    for N, r, s in GRID:
        out.extend(verify_operator_lemmas(N, r, s, 16, ids))
    return out


def test_criterion_03_hecke_identities():
    t0 = time.perf_counter()
    out = _grid_checks(("eq-5", "eq-6"))
    dt = time.perf_counter() - t0
    bad = failures(out)
    ok = not bad and len(out) == 2 * len(GRID) and dt < 60.0
    assert record(3, ok, f"U = inc C_t V and U' pi = pi' U' = U exactly on {len(GRID)} levels, "
                         f"{dt:.1f}s (< 60s)"), bad


def test_criterion_04_cokernel_doubling():
    out = _grid_checks(("lemma-3.4",))
    bad = failures(out)
    ok = not bad and len(out) == len(GRID)
    assert record(4, ok, f"U = 2 on coker = Z/2^(r-s), {len(GRID)} levels"), bad


def test_criterion_05_diamond_and_transfer_commute():
    out = _grid_checks(("lemma-3.5", "lemma-3.6"))
    bad = failures(out)
    ok = not bad and len(out) == 2 * len(GRID)
    assert record(5, ok, f"U commutes with diamonds and transfer_down, lifts agree, "
                         f"{len(GRID)} levels"), bad


def test_criterion_06_control_isomorphism():
    t0 = time.perf_counter()
    v16 = [verify_control(N, r, s, 16) for N, r, s in GRID]
    v32 = [verify_control(N, r, s, 32) for N, r, s in GRID]
    dt = time.perf_counter() - t0
    same = [a.status for a in v16] == [b.status for b in v32]
    bad = failures(v16) + failures(v32)
    ok = not bad and same and dt < 300.0
    assert record(6, ok, f"control iso at k=16 and k=32 on {len(GRID)} levels, verdicts "
                         f"{'identical' if same else 'differ'}, {dt:.1f}s (< 300s)"), bad


def test_criterion_07_rank_stability():
    out = [verify_rank_stability(N, range(2, 5), 16) for N in NS]
    ranks = {c.params["N"]: c.witness["ranks"] for c in out}
    d = {c.params["N"]: c.witness["d"] for c in out}
    bad = failures(out)
    assert record(7, not bad, f"ord_rank(H_r) for r=2..4: {ranks}, Nakayama d: {d}"), bad


def test_criterion_08_transfer_norm():
    out = _grid_checks(("transfer-norm",))
    bad = failures(out)
    ok = not bad and len(out) == len(GRID)
    assert record(8, ok, f"incl V = [G:H] for both transfers on {len(GRID)} levels"), bad


def test_criterion_09_padiclin_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240609)
    bad = []
    for trial in range(1000):
        m, n = rng.integers(1, 9, size=2)
        A = rng.integers(-1000, 1001, size=(m, n))
        D, L, R = smith_normal_form(A)
        Ao = A.astype(object)
        diag = [D[i, i] for i in range(min(m, n))]
        off = D.copy()
        for i in range(min(m, n)):
            off[i, i] = 0
        chain = all(b % a == 0 if a else b == 0 for a, b in zip(diag, diag[1:]))
        if not ((L.dot(Ao).dot(R) == D).all() and not off.any() and chain):
            bad.append(("snf", trial))
    for trial in range(50):
        n = int(rng.integers(1, 9))
        U = rng.integers(-1000, 1001, size=(n, n))
        e = ordinary_idempotent(U, 16)
        Um = to_mod(U, 16)
        if not ((matmul_mod(e, e, 16) == e).all() and
                (matmul_mod(e, Um, 16) == matmul_mod(Um, e, 16)).all()):
            bad.append(("idempotent", trial))
        if not ((e & np.uint64(0xFF)) == ordinary_idempotent(U, 8)).all():
            bad.append(("coherence", trial))
    for N, r in ((1, 4), (3, 4), (5, 3)):
        U = operator_set(N, r, r).U
        e16 = ordinary_idempotent(U, 16)
        if not ((e16 & np.uint64(0xFF)) == ordinary_idempotent(U, 8)).all():
            bad.append(("coherence", (N, r)))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30.0
    assert record(9, ok, f"1000 SNF re-verifications, idempotent laws, k=16 -> 8 coherence, "
                         f"{dt:.1f}s (< 30s)"), bad


def _cli_report(path):
    env = dict(os.environ)
    env.pop("CONTROL2_LOG", None)
    subprocess.run([sys.executable, "-m", "control2", "--out", str(path)],
                   capture_output=True, text=True, env=env, check=False)
    doc = json.loads(path.read_text())
    for c in doc["checks"]:
        c.pop("ms")
    doc["config"].pop("out")
    return json.dumps(doc, indent=2).encode()


def test_criterion_10_determinism(tmp_path):
    a = _cli_report(tmp_path / "a.json")
    b = _cli_report(tmp_path / "b.json")
    ok = a == b and len(a) > 0
    assert record(10, ok, f"two default CLI runs byte-identical without timings "
                          f"({len(a)} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
