"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import itertools
import time

import numpy as np
import pytest
from gmpy2 import mpq

from bethe_forge.bethe import DressedAlgebra, NestedSchedule, expected_eigenvalue, nested_bethe_vector
from bethe_forge.errors import ZeroVector
from bethe_forge.representation import build_W_tilde, find_vacuum
from bethe_forge.rmatrix import corrupted_R
from bethe_forge.scalars import Params
from bethe_forge.solver import BetheSystem, bethe_residuals, eigencheck, match_spectrum, solve
from bethe_forge.verify import (LemmaFrame, draw_pairs, dressed_points, generic_triples, generic_tuple,
                                nu_with_swapped_orientation, reduced_R_with_full_h, transfer_probe,
                                verify_commutation_A1, verify_inverse, verify_lemmas, verify_prop1,
                                verify_prop2_prop3, verify_rtt, verify_theorem3, verify_theorem4,
                                verify_transfer_commutativity, verify_vacuum, verify_yang_baxter)

from conftest import make_rep, q

ETAS = (q(1), q(-1), q(1, 2))
SAMPLE_XS = (q(2, 7), q(-3, 2), q(9, 4))


@pytest.fixture
def verdict(capsys):
    def emit(k, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
        assert ok, detail
    return emit


def _sweep_triples():
    for n in (1, 2, 3):
        for eta in ETAS:
            params = Params(n, eta)
            yield params, generic_triples(params, 25, seed=1000 * n + int(eta * 2))


def test_criterion_01_yang_baxter(verdict):
    start = time.perf_counter()
    bad = []
    for params, triples in _sweep_triples():
        rep = verify_yang_baxter(params, triples)
        if not rep.passed or rep.checks != 25:
            bad.append((params.n, params.eta, rep.counterexample))
    elapsed = time.perf_counter() - start
    verdict(1, not bad and elapsed < 60,
            f"Yang-Baxter exact on 9 (n, eta) cases x 25 triples in {elapsed:.1f}s; failures={bad}")


def test_criterion_02_inverse(verdict):
    bad = []
    for params, triples in _sweep_triples():
        rep = verify_inverse(params, [(x, y) for x, y, _ in triples])
        if not rep.passed:
            bad.append((params.n, params.eta, rep.counterexample))
    verdict(2, not bad, f"R Rinv = Rinv R = I on the same sweep; failures={bad}")


def test_criterion_03_rtt_and_commutation(verdict, rep22):
    pairs = draw_pairs(rep22, 10, seed=3)
    rtt = verify_rtt(rep22, pairs)
    a1 = verify_commutation_A1(rep22, pairs)
    verdict(3, rtt.passed and a1.passed,
            f"RTT full + 4 sector forms ({rtt.checks} checks), 8 commutation relations ({a1.checks} checks)")


def test_criterion_04_vacuum(verdict):
    bad = []
    for n, L in itertools.product((2, 3), (1, 2)):
        rep = make_rep(n, q(1, 2), L)
        assert find_vacuum(rep.chain) == rep.vacuum_index
        report = verify_vacuum(rep, generic_tuple(rep, 5, seed=n + 7 * L))
        if not report.passed:
            bad.append((n, L, report.counterexample))
    verdict(4, not bad, f"vacuum found and exact for n in {{2,3}}, L in {{1,2}}; failures={bad}")


def test_criterion_05_transfer_commutativity(verdict):
    bad = []
    for L in (1, 2, 3):
        rep = make_rep(2, q(-1), L)
        report = verify_transfer_commutativity(rep, draw_pairs(rep, 10, seed=L))
        if not report.passed:
            bad.append((L, report.counterexample))
    verdict(5, not bad, f"[H(e)(x), H(e')(y)] = 0 for all sign pairs, n=2, L=1..3, 10 pairs; failures={bad}")


def test_criterion_06_w_tilde_relations(verdict):
    bad = []
    for n in (2, 3):
        rep = make_rep(n, q(1, 2), 2)
        wt = build_W_tilde(rep)
        pts = generic_tuple(rep, 3, seed=11)
        for report in (verify_prop1(rep, wt, pts), verify_prop2_prop3(rep, wt, [pts[:2], pts[1:]])):
            if not report.passed:
                bad.append((n, report.identity, report.counterexample))
    verdict(6, not bad, f"annihilation/eigenvalue, invariance and reduced RTT on W-tilde; failures={bad}")


def test_criterion_07_dressed_rtt(verdict, rep32):
    wt = build_W_tilde(rep32)
    bad = []
    for P, Q in itertools.product((0, 1), repeat=2):
        level = DressedAlgebra(rep32, (q(7, 5),)[:P], (q(-3, 4),)[:Q])
        report = verify_theorem3(level, wtilde=wt, seed=P + 2 * Q)
        if not report.passed:
            bad.append((P, Q, report.counterexample))
    verdict(7, not bad, f"dressed RTT with the reduced R on slots (x) W-tilde (rank {wt.rank}), n=3; failures={bad}")


def test_criterion_08_dressed_vacuum(verdict):
    bad = []
    raps = (q(7, 5), q(-2, 3)), (q(9, 4), q(-11, 6))
    for n in (2, 3):
        rep = make_rep(n, q(1, 2), 2)
        for P, Q in itertools.product((0, 1, 2), repeat=2):
            level = DressedAlgebra(rep, raps[0][:P], raps[1][:Q])
            report = verify_theorem4(level, dressed_points(level, 5, seed=P + 3 * Q))
            if not report.passed:
                bad.append((n, P, Q, report.counterexample))
    verdict(8, not bad, f"dressed vacuum triangularity and nu weights, n in {{2,3}}, P,Q <= 2; failures={bad}")


def test_criterion_09_lemmas(verdict):
    single = make_rep(2, q(-1), 1, (0,))
    double = make_rep(2, q(-1), 2, (0, q(1, 3)))
    bad = []
    for which in ("L1", "L2"):
        report = verify_lemmas(single, which, seed=5)
        if not report.passed:
            bad.append((which, report.counterexample))
    for which in ("L3", "L4", "L5"):
        for rep in (single, double):
            for P, Q in itertools.product((0, 1, 2), repeat=2):
                if P + Q == 0:
                    continue
                report = verify_lemmas(rep, which, P=P, Q=Q, seed=P + 3 * Q)
                if not report.passed:
                    bad.append((which, rep.chain.L, P, Q, report.counterexample))
    verdict(9, not bad, f"slot-level action formulas exact on n=2 chains with L=1 and L=2; failures={bad}")


def test_criterion_10_end_to_end(verdict, rep22):
    start = time.perf_counter()
    notes = []
    # (a) the vacuum
    vac = nested_bethe_vector(rep22, [((), ())])
    ok_a = vac == rep22.vacuum
    for x in SAMPLE_XS:
        for sign in (1, -1):
            lam = sum(rep22.weight(sign * i, x) for i in (1, 2))
            ok_a &= rep22.transfer(sign, x).apply(vac) == vac.scale(lam)
            ok_a &= expected_eigenvalue(rep22, [((), ())], sign, x) == lam
    notes.append(f"vacuum exact={ok_a}")
    # (b) every sector with 1 <= P+Q, P,Q <= 2
    verified = 0
    ok_b = True
    for P, Q in itertools.product((0, 1, 2), repeat=2):
        if P + Q == 0:
            continue
        system = BetheSystem(rep22, NestedSchedule(((P, Q),)))
        report = solve(system, seeds=20, seed=0)
        null = 0
        for root in report.roots:
            if np.max(np.abs(bethe_residuals(system, root))) >= 1e-10:
                ok_b = False
                continue
            try:
                check = eigencheck(system, root, SAMPLE_XS)
            except ZeroVector:
                null += 1
                continue
            ok_b &= check.passed
            for x in SAMPLE_XS:
                for row in match_spectrum(system, [root], x):
                    ok_b &= row["delta"] < 1e-8 and row["overlap"] > 1 - 1e-6
            verified += 1
        notes.append(f"({P},{Q}): {len(report.roots) - null} roots, {null} null")
    elapsed = time.perf_counter() - start
    verdict(10, ok_a and ok_b and verified >= 1 and elapsed < 300,
            f"{verified} verified roots in {elapsed:.1f}s; " + "; ".join(notes))


def test_criterion_11_fault_injection(verdict, rep22, monkeypatch):
    probes = {}
    params = Params(2, q(-1))
    triples = generic_triples(params, 3, seed=2)
    pairs = draw_pairs(rep22, 2, seed=2)
    probes["corrupted R (Yang-Baxter)"] = not verify_yang_baxter(params, triples, r_factory=corrupted_R).passed
    probes["corrupted R (RTT)"] = not verify_rtt(rep22, pairs, r_factory=corrupted_R).passed
    rep3 = make_rep(3, q(1, 2), 2)
    wt = build_W_tilde(rep3)
    pts = [generic_tuple(rep3, 2, seed=9)]
    probes["h swapped for h-tilde (reduced RTT)"] = not verify_prop2_prop3(
        rep3, wt, pts, reduced_R=reduced_R_with_full_h).passed
    probes["truncated p-sum (commutation relations)"] = not verify_commutation_A1(
        rep3, draw_pairs(rep3, 1, seed=2), p_max={3: 1}).passed
    system = BetheSystem(rep22, NestedSchedule(((1, 0),)))
    root = next(r for r in solve(system, seeds=20).roots if abs(r[0] - 5 / 3) < 1e-9)
    good = eigencheck(system, root, SAMPLE_XS)
    bad = eigencheck(system, (root[0] + 0.1,), SAMPLE_XS)
    probes["perturbed root (eigencheck)"] = good.passed and not bad.passed and max(bad.ratios.values()) > 1e-3
    level = DressedAlgebra(rep3, (q(7, 5),), (q(9, 4),))
    probes["swapped F orientation (dressed weights)"] = not verify_theorem4(
        level, dressed_points(level, 2, seed=1), nu=nu_with_swapped_orientation(level)).passed
    probes["non-commuting partner (transfer)"] = transfer_probe(rep22, q(2, 7), q(-3, 2))
    with monkeypatch.context() as mp:
        mp.setattr(LemmaFrame, "ht", lambda self, x, y: self.h(x, y))
        probes["h swapped for h-tilde (lemmas)"] = not verify_lemmas(rep22, "L4", P=1, Q=1).passed
    missed = [k for k, v in probes.items() if not v]
    verdict(11, not missed, f"{len(probes) - len(missed)}/{len(probes)} probes turn their suite red; missed={missed}")
