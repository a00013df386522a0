"""Inhomogeneous chain representations, vacuum search, W-tilde and spectra.

The monodromy is the ordered product ``T_0(x) = R_{0L}(x, a_L) ... R_{01}(x, a_1)``
on ``aux (x) site_1 (x) ... (x) site_L``; the generator ``T^a_b(x)`` is its
auxiliary matrix element ``<a| T_0(x) |b>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import DepthExceeded, DimensionTooLarge, NoVacuumFound, SectorMismatch, Singular
from .rmatrix import aux_full_label, build_R
from .scalars import Params, RationalSampler, rational, to_complex
from .tensor import DENSE_LIMIT, SparseOperator, TensorSpace, Vec, embed, label, signed_to_local

W_TILDE_POINTS = (mpq(17, 5), mpq(-23, 7), mpq(41, 3))


@dataclass(frozen=True)
class ChainSpec:
    params: Params
    L: int
    inhomogeneities: tuple

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError("a chain needs L >= 1 sites")
        a = tuple(self.inhomogeneities)
        if len(a) != self.L:
            raise ValueError(f"expected {self.L} inhomogeneities, got {len(a)}")
        if not isinstance(self.params.eta, complex):
            a = tuple(rational(v) for v in a)
        else:
            a = tuple(to_complex(v) for v in a)
        if len(set(a)) != len(a):
            raise ValueError("inhomogeneities must be pairwise distinct")
        object.__setattr__(self, "inhomogeneities", a)

    @property
    def n(self) -> int:
        return self.params.n

    def complexified(self) -> "ChainSpec":
        return ChainSpec(self.params.as_complex(), self.L, tuple(to_complex(a) for a in self.inhomogeneities))


def signed_indices(n: int) -> list:
    """Signed basis order ``(+1..+n, -1..-n)``."""
    return list(range(1, n + 1)) + [-i for i in range(1, n + 1)]


def _local_vacuum_weight(params: Params, b: int, a: int, x, site):
    """``<e_b| <a| R(x, site) |a> |e_b>`` for a single site."""
    n = params.n
    lbs = (aux_full_label(n), label("quantum_site", 2 * n))
    r = build_R(params, x, site, labels=lbs)
    i = signed_to_local(a, lbs[0]) * 2 * n + signed_to_local(b, lbs[1])
    return r[(i, i)]


class Representation:
    """Chain module with monodromy factory, vacuum and weights.

    Also serves as the top rung of the nested ladder: it exposes the
    provider interface (``rank``, ``carrier``, ``apply``, ``vacuum``,
    ``weight``) used by :mod:`bethe_forge.bethe`.
    """

    def __init__(self, chain: ChainSpec, vacuum_index: int | None = None):
        self.chain = chain
        self.params = chain.params
        n, L = chain.n, chain.L
        self.sites = TensorSpace([label("quantum_site", 2 * n, f"site{j + 1}") for j in range(L)])
        self.aux = aux_full_label(n, "aux0")
        self._cache: dict = {}
        if vacuum_index is None:
            vacuum_index = find_vacuum(chain, rep=self)
        self.vacuum_index = vacuum_index
        loc = signed_to_local(vacuum_index, self.sites[0])
        self.vacuum = Vec.basis(self.sites, [loc] * L)

    # provider interface ------------------------------------------------
    @property
    def rank(self) -> int:
        return self.params.n

    @property
    def carrier(self) -> TensorSpace:
        return self.sites

    def apply(self, a: int, b: int, x, vec: Vec) -> Vec:
        return self.T(a, b, x).apply(vec)

    def weight(self, a: int, x):
        """Vacuum eigenvalue of ``T^a_a(x)`` as a product of single-site factors."""
        out = 1
        for site in self.chain.inhomogeneities:
            out = out * _local_vacuum_weight(self.params, self.vacuum_index, a, x, site)
        if isinstance(out, int):
            out = mpq(out)
        return out

    # monodromy ---------------------------------------------------------
    def monodromy(self, x) -> SparseOperator:
        """Full ``T_0(x)`` on ``aux (x) sites``."""
        key = ("full", x)
        if key not in self._cache:
            space = TensorSpace([self.aux, *self.sites])
            out = None
            for j, site in enumerate(self.chain.inhomogeneities):
                r = build_R(self.params, x, site, labels=(self.aux, self.sites[j]))
                r = embed(r, space, [0, j + 1])
                out = r if out is None else r.compose(out)
            if len(self._cache) > 512:
                self._cache.clear()
            self._cache[key] = out
            self._cache[("blocks", x)] = self._split(out)
        return self._cache[key]

    def _split(self, mono: SparseOperator) -> dict:
        dq = self.sites.dim
        parts: dict = {}
        for (r, c), v in mono.entries.items():
            ar, rr = divmod(r, dq)
            ac, cc = divmod(c, dq)
            parts.setdefault((ar, ac), {})[(rr, cc)] = v
        idx = signed_indices(self.params.n)
        out = {}
        for a in idx:
            for b in idx:
                key = (signed_to_local(a, self.aux), signed_to_local(b, self.aux))
                out[(a, b)] = SparseOperator(self.sites, self.sites, parts.get(key, {}), clean=False)
        return out

    def T(self, a: int, b: int, x) -> SparseOperator:
        """The generator ``T^a_b(x)`` on the quantum space."""
        if (a > 0) != (b > 0):
            raise SectorMismatch(f"T^{a}_{b} mixes the + and - sectors")
        n = self.params.n
        if not (1 <= abs(a) <= n and 1 <= abs(b) <= n):
            raise IndexError(f"index out of range for rank {n}: ({a}, {b})")
        key = ("blocks", x)
        if key not in self._cache:
            self.monodromy(x)
        return self._cache[key][(a, b)]

    def transfer(self, sign: int, x) -> SparseOperator:
        n = self.params.n
        out = None
        for i in range(1, n + 1):
            t = self.T(sign * i, sign * i, x)
            out = t if out is None else out + t
        return out

    def complexified(self) -> "Representation":
        return Representation(self.chain.complexified(), vacuum_index=self.vacuum_index)

    @property
    def dim(self) -> int:
        return self.sites.dim


def monodromy_entry(rep: Representation, a: int, b: int, x) -> SparseOperator:
    return rep.T(a, b, x)


def transfer(rep: Representation, sign: int, x) -> SparseOperator:
    return rep.transfer(sign, x)


def _vacuum_points(chain: ChainSpec, count: int = 5, seed: int = 7):
    sampler = RationalSampler(seed)
    pts = []
    while len(pts) < count:
        x = sampler.draw()
        if isinstance(chain.params.eta, complex):
            x = to_complex(x)
        try:
            for a in chain.inhomogeneities:
                build_R(chain.params, x, a)
        except Singular:
            continue
        pts.append(x)
    return pts


def vacuum_violation(rep: Representation, vec: Vec, points: Sequence):
    """First failing vacuum condition on ``vec`` as a dict, or None."""
    n = rep.params.n
    for x in points:
        for i in range(1, n + 1):
            for k in range(i + 1, n + 1):
                for a, b in ((i, k), (-k, -i)):
                    out = rep.T(a, b, x).apply(vec)
                    if not out.is_zero():
                        return {"condition": "annihilation", "entry": (a, b), "x": x}
            for a in (i, -i):
                out = rep.T(a, a, x).apply(vec)
                lam = rep.weight(a, x) if getattr(rep, "vacuum", None) is vec else None
                if lam is None:
                    # eigenvector test: out must be proportional to vec
                    key = next(iter(vec.entries))
                    lam = out[key] / vec[key]
                diff = out - vec.scale(lam)
                if not diff.is_zero():
                    return {"condition": "diagonal", "entry": (a, a), "x": x}
    return None


def find_vacuum(chain: ChainSpec, points: Sequence | None = None, rep: Representation | None = None,
                all_candidates: bool = False):
    """Scan the product states ``e_b^{(x)L}`` for one obeying the vacuum conditions.

    Candidates are tried in the order ``-1..-n, +1..+n``.  Both ``e_{-1}`` and
    ``e_{+n}`` pass for these chains; the minus sector is scanned first so the
    result is ``e_{-1}``.  Returns the signed local index (or the list of all
    passing indices when ``all_candidates`` is set).
    """
    n = chain.n
    if rep is None:
        rep = Representation(chain, vacuum_index=-1)
    if points is None:
        points = _vacuum_points(chain)
    found = []
    order = [-i for i in range(1, n + 1)] + list(range(1, n + 1))
    for b in order:
        loc = signed_to_local(b, rep.sites[0])
        vec = Vec.basis(rep.sites, [loc] * chain.L)
        if vacuum_violation(rep, vec, points) is None:
            if not all_candidates:
                return b
            found.append(b)
    if not found:
        raise NoVacuumFound(f"no product vacuum among {order}")
    return found


def compute_weights(rep: Representation) -> dict:
    """Evaluators ``{a: x -> lambda_a(x)}`` for every signed index."""
    return {a: (lambda x, a=a: rep.weight(a, x)) for a in signed_indices(rep.params.n)}


# ---------------------------------------------------------------------------
# exact spans and W-tilde


class ExactSpan:
    """Reduced row-echelon basis over an exact field, grown one vector at a time."""

    def __init__(self, space: TensorSpace):
        self.space = space
        self.rows: list = []  # list of (pivot, dict)

    def _reduce(self, entries: dict) -> dict:
        v = dict(entries)
        for p, row in self.rows:
            c = v.get(p, 0)
            if c != 0:
                for j, a in row.items():
                    nv = v.get(j, 0) - c * a
                    if nv == 0:
                        v.pop(j, None)
                    else:
                        v[j] = nv
        return v

    def contains(self, vec: Vec) -> bool:
        return not self._reduce(vec.entries)

    def add(self, vec: Vec) -> bool:
        v = self._reduce(vec.entries)
        if not v:
            return False
        p = min(v)
        c = v[p]
        c = rational(c)
        v = {j: a / c for j, a in v.items()}
        new_rows = []
        for q, row in self.rows:
            coef = row.get(p, 0)
            if coef != 0:
                row = dict(row)
                for j, a in v.items():
                    nv = row.get(j, 0) - coef * a
                    if nv == 0:
                        row.pop(j, None)
                    else:
                        row[j] = nv
            new_rows.append((q, row))
        new_rows.append((p, v))
        new_rows.sort(key=lambda t: t[0])
        self.rows = new_rows
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list:
        return [Vec(self.space, row, clean=False) for _, row in self.rows]


@dataclass
class WTildeBasis:
    vectors: list
    span: ExactSpan = field(repr=False)
    points: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def contains(self, vec: Vec) -> bool:
        return self.span.contains(vec)


def _closure(span: ExactSpan, frontier: list, gens: list, max_depth: int):
    depth = 0
    while frontier:
        if depth >= max_depth:
            # one more sweep to see whether the rank is still growing
            for v in frontier:
                for g in gens:
                    if not span.contains(g.apply(v)):
                        raise DepthExceeded(f"rank still growing after depth {max_depth}")
            return
        new = []
        for v in frontier:
            for g in gens:
                w = g.apply(v)
                if span.add(w):
                    new.append(w)
        frontier = new
        depth += 1


def _safe_points(rep: Representation, points):
    out = []
    for x in points:
        while True:
            try:
                rep.monodromy(x)
                break
            except Singular:
                x = x + mpq(1, 7)
        out.append(x)
    return out


def build_W_tilde(rep: Representation, max_depth: int = 64, points=W_TILDE_POINTS) -> WTildeBasis:
    """Exact basis of the span of ``A~(+) A~(-) omega``.

    Generators with indices ``<= n-1`` are applied at the fixed sample points:
    first the minus ones to closure, then the plus ones to closure.
    """
    n = rep.params.n
    pts = _safe_points(rep, points)
    span = ExactSpan(rep.sites)
    span.add(rep.vacuum)
    minus = [rep.T(-i, -k, x) for x in pts for i in range(1, n) for k in range(1, n)]
    plus = [rep.T(i, k, x) for x in pts for i in range(1, n) for k in range(1, n)]
    _closure(span, [rep.vacuum], minus, max_depth)
    _closure(span, span.basis(), plus, max_depth)
    return WTildeBasis(span.basis(), span, tuple(pts))


# ---------------------------------------------------------------------------
# dense spectral oracle


def dense_complex(op: SparseOperator) -> np.ndarray:
    arr = np.zeros((op.codomain.dim, op.domain.dim), dtype=complex)
    for (r, c), v in op.entries.items():
        arr[r, c] = complex(v) if not hasattr(v, "denominator") else float(v)
    return arr


def vec_complex(vec: Vec) -> np.ndarray:
    arr = np.zeros(vec.space.dim, dtype=complex)
    for i, v in vec.entries.items():
        arr[i] = complex(v) if not hasattr(v, "denominator") else float(v)
    return arr


def normalize_eigvec(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    return v / v[j]


def brute_force_spectrum(rep: Representation, sign: int, x) -> list:
    """Dense eigen-decomposition of ``H^(sign)(x)``.

    Returns ``[(eigenvalue, eigenvector), ...]`` sorted by ``(re, im)``; each
    eigenvector has its largest-magnitude entry scaled to 1.
    """
    if rep.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"module dimension {rep.dim} exceeds {DENSE_LIMIT}")
    h = dense_complex(rep.transfer(sign, x))
    vals, vecs = np.linalg.eig(h)
    pairs = [(complex(vals[j]), normalize_eigvec(vecs[:, j])) for j in range(len(vals))]
    pairs.sort(key=lambda p: (p[0].real, p[0].imag))
    return pairs
