import pytest
from gmpy2 import mpq

from bethe_forge.bethe import DressedAlgebra
from bethe_forge.representation import build_W_tilde
from bethe_forge.rmatrix import corrupted_R
from bethe_forge.scalars import Params
from bethe_forge.verify import (LemmaFrame, draw_pairs, dressed_points, generic_triples, generic_tuple,
                                nu_with_swapped_orientation, outside_vector, reduced_R_with_full_h,
                                transfer_probe, verify_commutation_A1, verify_inverse, verify_lemmas,
                                verify_prop1, verify_prop2_prop3, verify_rtt, verify_theorem3, verify_theorem4,
                                verify_transfer_commutativity, verify_vacuum, verify_yang_baxter)

from conftest import make_rep, q


def test_yang_baxter_and_inverse_sweeps():
    for n in (1, 2, 3):
        params = Params(n, q(-1))
        triples = generic_triples(params, 4, seed=n)
        assert verify_yang_baxter(params, triples).passed
        assert verify_inverse(params, [t[:2] for t in triples]).passed
    bad = verify_yang_baxter(Params(2, q(1)), generic_triples(Params(2, q(1)), 2), r_factory=corrupted_R)
    assert not bad.passed
    assert set(bad.counterexample) >= {"lhs", "rhs"}


def test_generic_points_are_distinct_and_regular(rep22):
    pts = generic_tuple(rep22, 4, seed=3)
    assert len(set(pts)) == 4
    assert generic_tuple(rep22, 4, seed=3) == pts
    assert len(draw_pairs(rep22, 5, seed=1)) == 5


def test_vacuum_suite():
    for n in (2, 3):
        for L in (1, 2):
            rep = make_rep(n, q(1, 2), L)
            assert verify_vacuum(rep, generic_tuple(rep, 3, seed=L)).passed


def test_rtt_and_corrupted_r(rep22):
    pts = draw_pairs(rep22, 2, seed=0)
    assert verify_rtt(rep22, pts).passed
    assert not verify_rtt(rep22, pts, r_factory=corrupted_R).passed


def test_a1_relations_and_truncated_sum(rep32):
    pts = draw_pairs(rep32, 1, seed=2)
    assert verify_commutation_A1(rep32, pts).passed
    assert not verify_commutation_A1(rep32, pts, p_max={3: 1}).passed


def test_transfer_suite_can_fail(rep22):
    assert verify_transfer_commutativity(rep22, draw_pairs(rep22, 2, seed=4)).passed
    assert transfer_probe(rep22, q(2, 7), q(-3, 2))


def test_w_tilde_relations(rep22, rep32):
    for rep in (rep22, rep32):
        wt = build_W_tilde(rep)
        pts = generic_tuple(rep, 2, seed=9)
        assert verify_prop1(rep, wt, pts).passed
        assert verify_prop2_prop3(rep, wt, [pts]).passed
        out = outside_vector(rep, pts[0], wt)
        assert not wt.contains(out)
        assert not verify_prop1(rep, [out], pts).passed


def test_h_swap_fault_needs_a_nontrivial_w_tilde(rep32):
    wt = build_W_tilde(rep32)
    assert wt.rank == 4
    pts = [generic_tuple(rep32, 2, seed=9)]
    assert not verify_prop2_prop3(rep32, wt, pts, reduced_R=reduced_R_with_full_h).passed
    # on a one-dimensional W-tilde every reduced relation is scalar and the fault is invisible
    flat = make_rep(3, q(1, 2), 2, (0, q(1, 3)), vacuum_index=3)
    wt1 = build_W_tilde(flat)
    assert wt1.rank == 1
    assert verify_prop2_prop3(flat, wt1, pts, reduced_R=reduced_R_with_full_h).passed


@pytest.mark.parametrize("P,Q", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_dressed_rtt(rep32, P, Q):
    v = (q(7, 5),)[:P]
    w = (q(-3, 4),)[:Q]
    level = DressedAlgebra(rep32, v, w)
    assert verify_theorem3(level, seed=P + 2 * Q).passed


@pytest.mark.parametrize("n", [2, 3])
def test_dressed_vacuum_and_orientation_fault(n):
    rep = make_rep(n, q(1, 2), 2)
    level = DressedAlgebra(rep, (q(7, 5), q(-2, 3)), (q(9, 4), q(-3, 4)))
    pts = dressed_points(level, 3, seed=1)
    assert verify_theorem4(level, pts).passed
    swapped = verify_theorem4(level, pts, nu=nu_with_swapped_orientation(level))
    assert swapped.passed is (n == 2)


def test_lemmas_rank2_single_site():
    rep = make_rep(2, q(-1), 1, (0,))
    for which in ("L1", "L2"):
        assert verify_lemmas(rep, which, seed=1).passed
    for which in ("L3", "L4", "L5"):
        for P, Q in ((1, 0), (0, 1), (1, 1), (2, 1)):
            assert verify_lemmas(rep, which, P=P, Q=Q, seed=2).passed, (which, P, Q)


def test_lemma_h_tilde_fault(rep22, monkeypatch):
    monkeypatch.setattr(LemmaFrame, "ht", lambda self, x, y: self.h(x, y))
    for which in ("L1", "L4", "L5"):
        assert not verify_lemmas(rep22, which, P=1, Q=1, seed=0).passed, which


def test_lemma_argument_checks(rep22):
    with pytest.raises(ValueError):
        verify_lemmas(rep22, "L6")
    with pytest.raises(ValueError):
        verify_lemmas(rep22, "L3", P=3)
    with pytest.raises(ValueError):
        verify_lemmas(make_rep(1, 1, 1), "L1")
