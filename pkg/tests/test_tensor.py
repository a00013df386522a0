import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from bethe_forge.errors import ShapeMismatch
from bethe_forge.tensor import (SparseOperator, TensorSpace, Vec, embed, label, matrix_unit, pair_contract,
                                partial_trace)

small = st.integers(-3, 3).map(mpq)


def space(*dims):
    return TensorSpace([label("quantum_site", d, f"q{j}") for j, d in enumerate(dims)])


def dense_ops(draw, sp):
    arr = np.array([[draw(small) for _ in range(sp.dim)] for _ in range(sp.dim)], dtype=object)
    return SparseOperator.from_dense(arr, sp), arr


@st.composite
def op_pair(draw):
    sp = space(2, 2)
    a, da = dense_ops(draw, sp)
    b, db = dense_ops(draw, sp)
    return a, da, b, db


@given(op_pair())
@settings(max_examples=40)
def test_compose_matches_dense(pair):
    a, da, b, db = pair
    assert np.all(a.compose(b).to_dense() == da.dot(db))


@given(st.lists(st.integers(0, 5), min_size=3, max_size=3))
def test_encode_decode_roundtrip(multi):
    sp = space(6, 6, 6)
    assert sp.decode(sp.encode(multi)) == tuple(multi)


def test_matrix_unit_algebra():
    assert matrix_unit(1, 1, 2).to_dense()[0, 0] == 1
    lhs = matrix_unit(1, 2, 2).compose(matrix_unit(2, 1, 2))
    assert lhs == matrix_unit(2, 2, 2)
    # E^i_k E^r_s = delta^i_s E^r_k for every index choice
    for i in (1, 2):
        for k in (1, 2):
            for r in (1, 2):
                for s in (1, 2):
                    got = matrix_unit(i, k, 2).compose(matrix_unit(r, s, 2))
                    want = matrix_unit(r, k, 2).scale(1 if i == s else 0)
                    assert got == want
    total = matrix_unit(1, 1, 3) + matrix_unit(2, 2, 3) + matrix_unit(3, 3, 3)
    assert total == SparseOperator.identity(total.domain)


def test_embed_examples():
    sp = TensorSpace([label("aux_plus", 2, "a"), label("aux_plus", 2, "b")])
    e21 = matrix_unit(2, 1, 2, lb=sp[1])
    out = embed(e21, sp, [1]).apply(Vec.basis(sp, [0, 1]))
    assert out == Vec.basis(sp, [0, 0])
    ident = SparseOperator.identity(TensorSpace([sp[0]]))
    assert embed(ident, sp, [0]) == SparseOperator.identity(sp)
    a = embed(matrix_unit(1, 2, 2, lb=sp[0]), sp, [0])
    b = embed(matrix_unit(2, 2, 2, lb=sp[1]), sp, [1])
    assert a.compose(b) == b.compose(a)
    with pytest.raises(ShapeMismatch):
        embed(e21, sp, [1, 1])


def test_partial_trace():
    sp = space(3, 2)
    rng = np.random.default_rng(0)
    a = np.array(rng.integers(-4, 5, (2, 2)), dtype=object)
    big = np.kron(np.eye(3, dtype=int).astype(object), a)
    pt = partial_trace(SparseOperator.from_dense(big, sp), 0)
    assert np.all(pt.to_dense() == 3 * a)
    unit = np.zeros((3, 3), dtype=object)
    unit[1, 0] = 1
    assert partial_trace(SparseOperator.from_dense(np.kron(unit, a), sp), 0).is_zero()


def test_pair_contract_pairs_dual_basis():
    slots = TensorSpace([label("plus_factor", 2, "p1"), label("plus_factor", 2, "p2")])
    mod = space(1)
    ident = SparseOperator.identity(mod)
    zero = ident.scale(0)
    w = Vec.basis(mod, [0])
    ket = Vec.basis(slots, [0, 1]).kron(w)
    # rows picking basis vectors f^1 (x) f^2 and f^2 (x) f^1
    assert pair_contract(ket, [("p1", [ident, zero]), ("p2", [zero, ident])], 2) == w
    assert pair_contract(ket, [("p1", [zero, ident]), ("p2", [ident, zero])], 2).is_zero()
    assert pair_contract(w, [], 0) == w


def test_vector_insert_project_inverse():
    sp = space(2, 3)
    v = Vec(sp, {0: mpq(1, 2), 4: mpq(-3)})
    lb = label("aux_plus", 2, "a")
    assert v.insert_factor(1, lb, 1).project(1, 1) == v
    assert v.insert_factor(1, lb, 1).project(1, 0).is_zero()
