"""Sparse operators and vectors on labelled tensor-product spaces.

Basis vectors of a :class:`TensorSpace` are numbered row-major in factor
order (the first factor is the slowest index).  Signed indices of the
``2r``-dimensional auxiliary space are laid out as ``(+1..+r, -1..-r)``.

Matrix units follow ``E^a_b e_a = e_b``, i.e. ``E^a_b`` has its single
nonzero entry at (row ``b``, column ``a``), which gives
``E^i_k E^r_s = delta^i_s E^r_k``.  On dual factors the unit ``F^a_b`` maps
``f^b`` to ``f^a``; it is the transpose of ``E^a_b`` in the dual basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, ShapeMismatch

KINDS = (
    "aux_plus",
    "aux_minus",
    "aux_full",
    "quantum_site",
    "plus_factor",
    "dual_minus_factor",
    "module_W",
)

DENSE_LIMIT = 4096

_counter = itertools.count()


def fresh_id(prefix: str = "s") -> str:
    return f"{prefix}{next(_counter)}"


@dataclass(frozen=True)
class SpaceLabel:
    kind: str
    dim: int
    id: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("factor dimension must be positive")
        if self.kind == "aux_full" and self.dim % 2:
            raise ValueError("aux_full factors have even dimension")

    @property
    def dual(self) -> bool:
        return self.kind == "dual_minus_factor"

    def relabel(self, kind: str | None = None, id: str | None = None) -> "SpaceLabel":
        return SpaceLabel(kind or self.kind, self.dim, id or self.id)


def label(kind: str, dim: int, id: str | None = None) -> SpaceLabel:
    return SpaceLabel(kind, dim, id if id is not None else fresh_id(kind[:3]))


class TensorSpace(tuple):
    """An ordered tuple of :class:`SpaceLabel` with row-major indexing."""

    def __new__(cls, labels: Iterable[SpaceLabel] = ()):
        labels = tuple(labels)
        ids = [lb.id for lb in labels]
        if len(set(ids)) != len(ids):
            raise ShapeMismatch(f"duplicate factor ids in {ids}")
        self = super().__new__(cls, labels)
        dims = tuple(lb.dim for lb in labels)
        strides = []
        acc = 1
        for d in reversed(dims):
            strides.append(acc)
            acc *= d
        self._dims = dims
        self._strides = tuple(reversed(strides))
        self._dim = acc
        return self

    @property
    def dims(self) -> tuple:
        return self._dims

    @property
    def strides(self) -> tuple:
        return self._strides

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def ids(self) -> tuple:
        return tuple(lb.id for lb in self)

    def position(self, factor_id: str) -> int:
        for i, lb in enumerate(self):
            if lb.id == factor_id:
                return i
        raise KeyError(factor_id)

    def encode(self, multi: Sequence[int]) -> int:
        if len(multi) != len(self):
            raise ShapeMismatch("multi-index length does not match the number of factors")
        idx = 0
        for m, d, s in zip(multi, self._dims, self._strides):
            if not 0 <= m < d:
                raise IndexOutOfRange(f"index {m} outside factor of dim {d}")
            idx += m * s
        return idx

    def decode(self, idx: int) -> tuple:
        out = []
        for d, s in zip(self._dims, self._strides):
            out.append((idx // s) % d)
        return tuple(out)

    def __add__(self, other):
        return TensorSpace(tuple(self) + tuple(other))

    def replace(self, positions: Sequence[int], labels: Sequence[SpaceLabel]) -> "TensorSpace":
        lst = list(self)
        for p, lb in zip(positions, labels):
            lst[p] = lb
        return TensorSpace(lst)

    def drop(self, positions: Iterable[int]) -> "TensorSpace":
        ps = set(positions)
        return TensorSpace([lb for i, lb in enumerate(self) if i not in ps])


def _same_shape(a: Sequence[SpaceLabel], b: Sequence[SpaceLabel]) -> bool:
    return len(a) == len(b) and all(x.dim == y.dim and x.kind == y.kind for x, y in zip(a, b))


def _clean(entries: dict) -> dict:
    return {k: v for k, v in entries.items() if v != 0}


class SparseOperator:
    """Linear map ``domain -> codomain`` stored as ``{(row, col): value}``.

    Instances are treated as immutable; no zero entries are stored.
    """

    __slots__ = ("codomain", "domain", "entries", "_cols", "_rows")

    def __init__(self, codomain: TensorSpace, domain: TensorSpace, entries: dict | None = None,
                 clean: bool = True):
        self.codomain = TensorSpace(codomain)
        self.domain = TensorSpace(domain)
        entries = dict(entries or {})
        self.entries = _clean(entries) if clean else entries
        self._cols = None
        self._rows = None

    # construction ------------------------------------------------------
    @classmethod
    def identity(cls, space: TensorSpace, scale=1) -> "SparseOperator":
        return cls(space, space, {(i, i): scale for i in range(space.dim)})

    @classmethod
    def zero(cls, codomain: TensorSpace, domain: TensorSpace | None = None) -> "SparseOperator":
        return cls(codomain, codomain if domain is None else domain, {})

    @classmethod
    def from_dense(cls, array, codomain: TensorSpace, domain: TensorSpace | None = None):
        domain = codomain if domain is None else domain
        arr = np.asarray(array, dtype=object)
        if arr.shape != (codomain.dim, domain.dim):
            raise ShapeMismatch(f"dense shape {arr.shape} vs ({codomain.dim}, {domain.dim})")
        ent = {}
        for (r, c), v in np.ndenumerate(arr):
            if v != 0:
                ent[(r, c)] = v
        return cls(codomain, domain, ent, clean=False)

    def to_dense(self, dtype=object) -> np.ndarray:
        if self.codomain.dim * self.domain.dim > DENSE_LIMIT * DENSE_LIMIT:
            raise ShapeMismatch("operator too large for a dense copy")
        arr = np.zeros((self.codomain.dim, self.domain.dim), dtype=dtype)
        if dtype is object:
            arr[...] = 0
        for (r, c), v in self.entries.items():
            arr[r, c] = v
        return arr

    # access ------------------------------------------------------------
    @property
    def nnz(self) -> int:
        return len(self.entries)

    def columns(self) -> dict:
        if self._cols is None:
            cols: dict = {}
            for (r, c), v in self.entries.items():
                cols.setdefault(c, []).append((r, v))
            self._cols = cols
        return self._cols

    def rows(self) -> dict:
        if self._rows is None:
            rows: dict = {}
            for (r, c), v in self.entries.items():
                rows.setdefault(r, []).append((c, v))
            self._rows = rows
        return self._rows

    def __getitem__(self, rc):
        return self.entries.get(rc, 0)

    def is_zero(self) -> bool:
        return not self.entries

    # arithmetic --------------------------------------------------------
    def _check_same(self, other):
        if not (_same_shape(self.codomain, other.codomain) and _same_shape(self.domain, other.domain)):
            raise ShapeMismatch("operators live on different spaces")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_same(other)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return SparseOperator(self.codomain, self.domain, ent)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_same(other)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) - v
        return SparseOperator(self.codomain, self.domain, ent)

    def __neg__(self):
        return SparseOperator(self.codomain, self.domain, {k: -v for k, v in self.entries.items()}, clean=False)

    def scale(self, c) -> "SparseOperator":
        if c == 0:
            return SparseOperator(self.codomain, self.domain, {})
        return SparseOperator(self.codomain, self.domain, {k: c * v for k, v in self.entries.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other):
        if isinstance(other, Vec):
            return self.apply(other)
        return self.compose(other)

    def compose(self, other: "SparseOperator") -> "SparseOperator":
        """``self o other``."""
        if not _same_shape(self.domain, other.codomain):
            raise ShapeMismatch("composition of operators on mismatched spaces")
        orows = other.rows()
        out: dict = {}
        for (r, k), a in self.entries.items():
            row = orows.get(k)
            if row is None:
                continue
            for c, b in row:
                key = (r, c)
                out[key] = out.get(key, 0) + a * b
        return SparseOperator(self.codomain, other.domain, out)

    def apply(self, vec: "Vec") -> "Vec":
        if not _same_shape(self.domain, vec.space):
            raise ShapeMismatch("operator domain does not match vector space")
        cols = self.columns()
        out: dict = {}
        for c, x in vec.entries.items():
            col = cols.get(c)
            if col is None:
                continue
            for r, a in col:
                out[r] = out.get(r, 0) + a * x
        return Vec(self.codomain, out)

    def transpose(self) -> "SparseOperator":
        return SparseOperator(self.domain, self.codomain, {(c, r): v for (r, c), v in self.entries.items()},
                              clean=False)

    def kron(self, other: "SparseOperator") -> "SparseOperator":
        dr, dc = other.codomain.dim, other.domain.dim
        out = {}
        for (r1, c1), a in self.entries.items():
            for (r2, c2), b in other.entries.items():
                out[(r1 * dr + r2, c1 * dc + c2)] = a * b
        return SparseOperator(self.codomain + other.codomain, self.domain + other.domain, out)

    def map_values(self, fn: Callable) -> "SparseOperator":
        return SparseOperator(self.codomain, self.domain, {k: fn(v) for k, v in self.entries.items()})

    def relabel(self, codomain: TensorSpace, domain: TensorSpace | None = None) -> "SparseOperator":
        domain = codomain if domain is None else domain
        if codomain.dims != self.codomain.dims or domain.dims != self.domain.dims:
            raise ShapeMismatch("relabel must keep dimensions")
        return SparseOperator(codomain, domain, self.entries, clean=False)

    # comparison --------------------------------------------------------
    def first_difference(self, other: "SparseOperator"):
        """First ``(row_multi, col_multi, lhs, rhs)`` where the operators differ, or None."""
        self._check_same(other)
        keys = set(self.entries) | set(other.entries)
        for key in sorted(keys):
            a = self.entries.get(key, 0)
            b = other.entries.get(key, 0)
            if a != b:
                return (self.codomain.decode(key[0]), self.domain.decode(key[1]), a, b)
        return None

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.entries.values()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        return f"SparseOperator({self.codomain.dims}<-{self.domain.dims}, nnz={self.nnz})"

    # partial matrix elements ------------------------------------------
    def component(self, position: int, row: int, col: int) -> "SparseOperator":
        """Matrix element ``<row| . |col>`` on one factor, an operator on the rest.

        Requires codomain and domain to agree on every factor other than
        ``position``.
        """
        cod_rest = self.codomain.drop([position])
        dom_rest = self.domain.drop([position])
        cs, cd = self.codomain.strides[position], self.codomain.dims[position]
        ds, dd = self.domain.strides[position], self.domain.dims[position]
        out = {}
        for (r, c), v in self.entries.items():
            if (r // cs) % cd != row or (c // ds) % dd != col:
                continue
            rr = (r // (cs * cd)) * cs + r % cs
            cc = (c // (ds * dd)) * ds + c % ds
            out[(rr, cc)] = v
        return SparseOperator(cod_rest, dom_rest, out, clean=False)


class Vec:
    """Sparse vector ``{index: value}`` on a :class:`TensorSpace`."""

    __slots__ = ("space", "entries")

    def __init__(self, space: TensorSpace, entries: dict | None = None, clean: bool = True):
        self.space = TensorSpace(space)
        entries = dict(entries or {})
        self.entries = _clean(entries) if clean else entries

    @classmethod
    def basis(cls, space: TensorSpace, multi: Sequence[int], value=1) -> "Vec":
        return cls(space, {space.encode(multi): value})

    @classmethod
    def from_dense(cls, space: TensorSpace, array) -> "Vec":
        arr = np.asarray(array, dtype=object).reshape(-1)
        if arr.shape[0] != space.dim:
            raise ShapeMismatch("dense vector length mismatch")
        return cls(space, {i: v for i, v in enumerate(arr) if v != 0}, clean=False)

    def to_dense(self, dtype=object) -> np.ndarray:
        arr = np.zeros(self.space.dim, dtype=dtype)
        if dtype is object:
            arr[...] = 0
        for i, v in self.entries.items():
            arr[i] = v
        return arr

    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, idx):
        return self.entries.get(idx, 0)

    def __add__(self, other: "Vec") -> "Vec":
        if not _same_shape(self.space, other.space):
            raise ShapeMismatch("vectors live on different spaces")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return Vec(self.space, ent)

    def __sub__(self, other: "Vec") -> "Vec":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Vec":
        if c == 0:
            return Vec(self.space, {})
        return Vec(self.space, {k: c * v for k, v in self.entries.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def kron(self, other: "Vec") -> "Vec":
        d = other.space.dim
        return Vec(self.space + other.space,
                   {i * d + j: a * b for i, a in self.entries.items() for j, b in other.entries.items()})

    def relabel(self, space: TensorSpace) -> "Vec":
        if space.dims != self.space.dims:
            raise ShapeMismatch("relabel must keep dimensions")
        return Vec(space, self.entries, clean=False)

    def map_values(self, fn: Callable) -> "Vec":
        return Vec(self.space, {k: fn(v) for k, v in self.entries.items()})

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(complex(v)) ** 2 for v in self.entries.values())))

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.entries.values()), default=0.0)

    def first_difference(self, other: "Vec"):
        if not _same_shape(self.space, other.space):
            raise ShapeMismatch("vectors live on different spaces")
        for key in sorted(set(self.entries) | set(other.entries)):
            a = self.entries.get(key, 0)
            b = other.entries.get(key, 0)
            if a != b:
                return (self.space.decode(key), a, b)
        return None

    def __eq__(self, other):
        if not isinstance(other, Vec):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        return f"Vec({self.space.dims}, nnz={len(self.entries)})"

    # local actions ----------------------------------------------------
    def apply_local(self, op: SparseOperator, positions: Sequence[int]) -> "Vec":
        """Apply ``op`` to the factors at ``positions`` (identity elsewhere).

        The codomain labels of ``op`` replace the labels at those positions,
        which lets sector-swap maps turn a dual factor into a primal one.
        """
        positions = list(positions)
        sp = self.space
        if not _same_shape([sp[p] for p in positions], op.domain):
            raise ShapeMismatch("operator factors do not match the selected positions")
        if [lb.dim for lb in op.codomain] != [sp[p].dim for p in positions]:
            raise ShapeMismatch("local operator must preserve factor dimensions")
        new_space = sp.replace(positions, list(op.codomain))
        strides = [sp.strides[p] for p in positions]
        dims = [sp.dims[p] for p in positions]
        local_space = op.domain
        offsets = []
        for loc in range(local_space.dim):
            digits = local_space.decode(loc)
            offsets.append(sum(dg * st for dg, st in zip(digits, strides)))
        cols = op.columns()
        out: dict = {}
        for idx, x in self.entries.items():
            loc = 0
            for st, d in zip(strides, dims):
                loc = loc * d + (idx // st) % d
            col = cols.get(loc)
            if col is None:
                continue
            base = idx - offsets[loc]
            for r, a in col:
                key = base + offsets[r]
                out[key] = out.get(key, 0) + a * x
        return Vec(new_space, out)

    def split_tail(self, start: int) -> dict:
        """Group entries as ``{head_index: Vec on factors[start:]}``."""
        tail = TensorSpace(self.space[start:])
        td = tail.dim
        groups: dict = {}
        for idx, v in self.entries.items():
            groups.setdefault(idx // td, {})[idx % td] = v
        return {h: Vec(tail, e, clean=False) for h, e in groups.items()}

    def apply_tail(self, start: int, fn: Callable[["Vec"], "Vec"], new_tail: TensorSpace | None = None) -> "Vec":
        """Apply a linear map ``fn`` to the trailing factors ``space[start:]``."""
        head = TensorSpace(self.space[:start])
        out: dict = {}
        tail_space = new_tail
        for h, tv in self.split_tail(start).items():
            res = fn(tv)
            if tail_space is None:
                tail_space = res.space
            td = tail_space.dim
            for j, v in res.entries.items():
                key = h * td + j
                out[key] = out.get(key, 0) + v
        if tail_space is None:
            tail_space = TensorSpace(self.space[start:])
        return Vec(head + tail_space, out)

    def project(self, position: int, index: int) -> "Vec":
        """Component along basis vector ``index`` of one factor (factor removed)."""
        sp = self.space
        st, d = sp.strides[position], sp.dims[position]
        out = {}
        for idx, v in self.entries.items():
            if (idx // st) % d == index:
                out[(idx // (st * d)) * st + idx % st] = v
        return Vec(sp.drop([position]), out, clean=False)

    def insert_factor(self, position: int, lb: SpaceLabel, index: int) -> "Vec":
        """Tensor in the basis vector ``index`` of factor ``lb`` at ``position``."""
        sp = self.space
        lst = list(sp)
        lst.insert(position, lb)
        new = TensorSpace(lst)
        low_dim = 1
        for lbl in sp[position:]:
            low_dim *= lbl.dim
        out = {}
        for idx, v in self.entries.items():
            hi, lo = divmod(idx, low_dim)
            out[(hi * lb.dim + index) * low_dim + lo] = v
        return Vec(new, out, clean=False)


# ---------------------------------------------------------------------------
# matrix units and structural operations


def signed_to_local(a: int, lb: SpaceLabel) -> int:
    """Basis position of signed index ``a`` inside factor ``lb``."""
    if a == 0:
        raise IndexOutOfRange("signed indices are nonzero")
    if lb.kind == "aux_full" or lb.kind == "quantum_site":
        r = lb.dim // 2
        if abs(a) > r:
            raise IndexOutOfRange(f"index {a} outside rank {r}")
        return a - 1 if a > 0 else r + (-a) - 1
    if abs(a) > lb.dim:
        raise IndexOutOfRange(f"index {a} outside rank {lb.dim}")
    if lb.kind in ("aux_plus", "plus_factor") and a < 0:
        raise IndexOutOfRange(f"negative index {a} on a plus factor")
    if lb.kind in ("aux_minus", "dual_minus_factor") and a > 0:
        raise IndexOutOfRange(f"positive index {a} on a minus factor")
    return abs(a) - 1


def matrix_unit(a: int, b: int, rank: int, dual: bool = False, lb: SpaceLabel | None = None) -> SparseOperator:
    """``E^a_b`` (or ``F^a_b`` on a dual factor) as a one-factor operator.

    ``E^a_b`` sends ``e_a`` to ``e_b``; ``F^a_b`` sends ``f^b`` to ``f^a``.
    """
    if (a > 0) != (b > 0):
        raise IndexOutOfRange("matrix unit indices must carry the same sign")
    if lb is None:
        if dual:
            lb = label("dual_minus_factor", rank)
        else:
            lb = label("aux_plus" if a > 0 else "aux_minus", rank)
    ia = signed_to_local(a, lb)
    ib = signed_to_local(b, lb)
    space = TensorSpace([lb])
    if dual:
        return SparseOperator(space, space, {(ia, ib): 1})
    return SparseOperator(space, space, {(ib, ia): 1})


def embed(op: SparseOperator, target: TensorSpace, positions: Sequence[int]) -> SparseOperator:
    """Extend ``op`` by the identity on every factor not in ``positions``."""
    positions = list(positions)
    if len(set(positions)) != len(positions) or any(not 0 <= p < len(target) for p in positions):
        raise ShapeMismatch(f"invalid positions {positions}")
    if not _same_shape([target[p] for p in positions], op.domain):
        raise ShapeMismatch("operator factors do not match the target positions")
    if [lb.dim for lb in op.codomain] != [target[p].dim for p in positions]:
        raise ShapeMismatch("embedded operator must preserve factor dimensions")
    codomain = target.replace(positions, list(op.codomain))
    strides = [target.strides[p] for p in positions]
    local = op.domain

    def off(loc):
        return sum(dg * st for dg, st in zip(local.decode(loc), strides))

    rest = [i for i in range(len(target)) if i not in positions]
    rest_offsets = [0]
    for i in rest:
        st, d = target.strides[i], target.dims[i]
        rest_offsets = [o + j * st for o in rest_offsets for j in range(d)]
    out = {}
    for (r, c), v in op.entries.items():
        orow, ocol = off(r), off(c)
        for o in rest_offsets:
            out[(orow + o, ocol + o)] = v
    return SparseOperator(codomain, target, out, clean=False)


def partial_trace(op: SparseOperator, position: int) -> SparseOperator:
    """Trace over one factor of a square operator."""
    if op.codomain.dims != op.domain.dims or not 0 <= position < len(op.domain):
        raise ShapeMismatch("partial trace needs a square operator and a valid factor")
    d = op.domain.dims[position]
    total = None
    for i in range(d):
        piece = op.component(position, i, i)
        total = piece if total is None else total + piece
    return total


def pair_contract(ket: Vec, rows: Sequence, module_start: int) -> Vec:
    """Contract b-rows against the slot factors of ``ket``.

    ``ket`` lives on ``slots + module`` where the module factors start at
    ``module_start``.  ``rows`` lists ``(factor_id, components)`` in operator
    order (leftmost first); ``components[j]`` is a linear map on module
    vectors (a :class:`SparseOperator` or a callable) paired with basis
    vector ``j`` of that slot.  Returns
    ``sum_j rows[0][j] ... rows[-1][j'] ket[j, ..., j']`` on the module.
    """
    slot_ids = [lb.id for lb in ket.space[:module_start]]
    if sorted(slot_ids) != sorted(fid for fid, _ in rows):
        raise ShapeMismatch("b-rows must pair one-to-one with the slot factors")
    cur = ket
    start = module_start
    for fid, comps in reversed(list(rows)):
        pos = cur.space.position(fid)
        if len(comps) != cur.space.dims[pos]:
            raise ShapeMismatch(f"row for factor {fid} has {len(comps)} components")
        acc = None
        for j, comp in enumerate(comps):
            part = cur.project(pos, j)
            if part.is_zero():
                continue
            res = part.apply_tail(start - 1, lambda v, c=comp: apply_op(c, v))
            acc = res if acc is None else acc + res
        start -= 1
        if acc is None:
            acc = Vec(cur.space.drop([pos]), {})
        cur = acc
    return cur


def apply_op(op, vec: Vec) -> Vec:
    if isinstance(op, SparseOperator):
        return op.apply(vec)
    return op(vec)


def dense_equal(a, b) -> bool:
    return bool(np.all(np.asarray(a, dtype=object) == np.asarray(b, dtype=object)))


def kron_all(ops: Iterable[SparseOperator]) -> SparseOperator:
    ops = list(ops)
    out = ops[0]
    for o in ops[1:]:
        out = out.kron(o)
    return out
