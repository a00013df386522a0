import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bethe_forge.bethe import NestedSchedule
from bethe_forge.errors import ZeroVector
from bethe_forge.solver import (BetheSystem, bethe_residuals, bethe_vector_complex, eigencheck, match_spectrum,
                                solve, unexplained)

from conftest import make_rep, q

XS = (q(2, 7), q(-3, 2), q(9, 4))


def test_rank2_residual_reduces_to_weight_difference(rep22):
    system = BetheSystem(rep22, NestedSchedule(((1, 0),)))
    for v in (0.7 + 0.2j, -1.3 + 0.5j):
        res = bethe_residuals(system, [v])
        want = system.weight(2, v) - system.weight(1, v)
        assert abs(res[0] - want) < 1e-13


def test_rank2_residual_against_closed_form(rep22):
    # lambda_2(v) F(others; v) F(w; v - 1 + eta) - lambda_1(v) F(v; others) F(v - 1 + eta; w)
    system = BetheSystem(rep22, NestedSchedule(((2, 1),)))
    f = lambda x, y: (x - y + 1) / (x - y)
    eta = complex(rep22.params.eta)
    v = [0.4 + 0.3j, -0.9 + 1.1j]
    w = [1.7 - 0.6j]
    res = bethe_residuals(system, v + w)
    lam = system.weight
    for ell in range(2):
        o = v[1 - ell]
        want = (lam(2, v[ell]) * f(o, v[ell]) * f(w[0], v[ell] - 1 + eta)
                - lam(1, v[ell]) * f(v[ell], o) * f(v[ell] - 1 + eta, w[0]))
        assert abs(res[ell] - want) < 1e-12


def test_empty_schedule(rep22):
    system = BetheSystem(rep22, NestedSchedule.empty(2))
    assert bethe_residuals(system, []).size == 0
    report = solve(system, seeds=3)
    assert report.roots == [()] and not report.sector_empty
    assert max(eigencheck(system, (), [q(2, 7), q(-3, 2)]).ratios.values()) < 1e-14
    rows = match_spectrum(system, [()], q(2, 7))
    for row in rows:
        assert row["delta"] < 1e-10
        assert abs(row["overlap"] - 1) < 1e-10


@given(st.permutations([0.4 + 0.3j, -0.9 + 1.1j, 2.2 - 0.4j]), st.permutations([1.7 - 0.6j, -0.3 - 0.8j]))
@settings(max_examples=15, deadline=None)
def test_residuals_symmetric_under_shuffles(vs, ws):
    rep = make_rep(2, -1, 2, (0, q(1, 3)))
    system = BetheSystem(rep, NestedSchedule(((3, 2),)))
    base = bethe_residuals(system, [0.4 + 0.3j, -0.9 + 1.1j, 2.2 - 0.4j, 1.7 - 0.6j, -0.3 - 0.8j])
    perm = bethe_residuals(system, list(vs) + list(ws))
    order_v = [[0.4 + 0.3j, -0.9 + 1.1j, 2.2 - 0.4j].index(z) for z in vs]
    order_w = [[1.7 - 0.6j, -0.3 - 0.8j].index(z) for z in ws]
    assert np.allclose(perm[:3], base[order_v], atol=1e-12)
    assert np.allclose(perm[3:], base[[3 + j for j in order_w]], atol=1e-12)


def test_solve_finds_rational_root_and_checks_it(rep22):
    system = BetheSystem(rep22, NestedSchedule(((1, 0),)))
    report = solve(system, seeds=20, seed=0)
    assert report.roots
    near = [r for r in report.roots if abs(r[0] - 5 / 3) < 1e-9]
    assert near
    root = near[0]
    assert max(np.abs(bethe_residuals(system, root))) < 1e-10
    check = eigencheck(system, root, XS)
    assert check.passed and max(check.ratios.values()) < 1e-8
    for x in XS:
        for row in match_spectrum(system, [root], x):
            assert row["delta"] < 1e-8
            assert row["overlap"] > 1 - 1e-6


def test_perturbed_root_fails_eigencheck(rep22):
    system = BetheSystem(rep22, NestedSchedule(((1, 0),)))
    check = eigencheck(system, (5 / 3 + 0.1,), XS)
    assert not check.passed
    assert max(check.ratios.values()) > 1e-3


def test_sector_without_eigenvectors_gives_null_roots(rep22):
    system = BetheSystem(rep22, NestedSchedule(((1, 1),)))
    report = solve(system, seeds=20, seed=0)
    for root in report.roots:
        with pytest.raises(ZeroVector):
            bethe_vector_complex(system, root)


def test_unexplained_accounts_for_matched_values(rep22):
    system = BetheSystem(rep22, NestedSchedule(((1, 0),)))
    table = match_spectrum(system, [(5 / 3,)], q(2, 7))
    left = unexplained(system, table, q(2, 7))
    assert len(left) <= 2 * rep22.dim - 2
    assert all(abs(val - row["eigenvalue"]) > 1e-8 for sign, val in left for row in table if row["sign"] == sign)


def test_rank3_nested_root_is_an_eigenvector():
    rep = make_rep(3, q(1, 2), 2, (0, q(1, 3)), vacuum_index=3)
    system = BetheSystem(rep, NestedSchedule(((1, 0), (0, 0))))
    report = solve(system, seeds=20, seed=1)
    verified = 0
    for root, res in zip(report.roots, report.residual_norms):
        assert res < 1e-10
        try:
            check = eigencheck(system, root, XS)
        except ZeroVector:
            continue
        assert check.passed, check.ratios
        verified += 1
    assert verified >= 1


def test_schedule_deeper_than_rank_is_rejected(rep22):
    with pytest.raises(ValueError):
        BetheSystem(rep22, NestedSchedule(((1, 0), (1, 0))))


def test_reported_roots_respect_the_root_tolerance(rep22):
    # this sector has a root close to a pole whose cleared residual converges first
    system = BetheSystem(rep22, NestedSchedule(((1, 2),)))
    report = solve(system, seeds=20, seed=0)
    assert report.failures.get("ResidualAboveTolerance", 0) >= 1
    for root, res in zip(report.roots, report.residual_norms):
        assert res < 1e-10
        assert np.max(np.abs(bethe_residuals(system, root))) == res
