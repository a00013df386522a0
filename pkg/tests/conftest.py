import pytest
from gmpy2 import mpq

from bethe_forge.representation import ChainSpec, Representation
from bethe_forge.scalars import Params


def q(p, d=1):
    return mpq(p, d)


def make_rep(n, eta, L, sites=None, vacuum_index=None):
    if sites is None:
        sites = tuple(mpq(j, 3) for j in range(L))
    return Representation(ChainSpec(Params(n, mpq(eta)), L, tuple(mpq(a) for a in sites)),
                          vacuum_index=vacuum_index)


@pytest.fixture(scope="session")
def rep22():
    """The n=2, L=2 chain with a=(0, 1/3), eta=-1 used by the end-to-end checks."""
    return make_rep(2, -1, 2, (0, mpq(1, 3)))


@pytest.fixture(scope="session")
def rep32():
    return make_rep(3, mpq(1, 2), 2, (0, mpq(1, 3)))
