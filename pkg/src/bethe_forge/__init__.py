"""Exact verification and numerical solution of the nested Bethe ansatz for the RTT-algebra A_n.

The algebra has generators ``T^a_b(x)`` with signed indices ``a, b`` in
``{+-1, ..., +-n}``; the chains studied here carry the fundamental
``2n``-dimensional representation at each site.
"""

from .bethe import DressedAlgebra, NestedSchedule, nested_bethe_vector
from .errors import BetheForgeError, Singular
from .report import VerificationReport
from .representation import ChainSpec, Representation, build_W_tilde, find_vacuum
from .rmatrix import build_R, build_R_inverse
from .scalars import Params, f_fn, g_fn, h_fn, h_tilde_fn, k_fn, rational

__all__ = [
    "BetheForgeError", "ChainSpec", "DressedAlgebra", "NestedSchedule", "Params", "Representation",
    "Singular", "VerificationReport", "build_R", "build_R_inverse", "build_W_tilde", "f_fn", "find_vacuum",
    "g_fn", "h_fn", "h_tilde_fn", "k_fn", "nested_bethe_vector", "rational",
]
__version__ = "0.1.0"
