"""R-matrices of the algebra and of its nested reductions.

Index layout of a two-factor operator is ``(first factor, second factor)``.
Entries are listed through signed indices: ``(a', b'), (a, b), value`` means
``<e_a' (x) e_b'| R |e_a (x) e_b> = value``.

Blocks of the full R-matrix (``n`` = rank)::

    PP = (1 + g P) / f                 P = sum E^i_k (x) E^k_i
    PM = 1 - k  sum E^i_k (x) E^{-i}_{-k}
    MP = 1 - h  sum E^{-i}_{-k} (x) E^i_k
    MM = (1 + g P) / f

The dressing ("hat") blocks act on an auxiliary factor of the reduced rank
``m - 1`` times a slot factor (plus or dual-minus) of the same dimension.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import Singular
from .report import VerificationReport
from .scalars import Params, f_fn, g_fn, h_fn, h_tilde_fn, k_fn
from .tensor import SparseOperator, SpaceLabel, TensorSpace, embed, label

BLOCKS = ("PP", "PM", "MP", "MM")
SIGN_OF = {"P": 1, "M": -1}


def block_name(e1: int, e2: int) -> str:
    return ("P" if e1 > 0 else "M") + ("P" if e2 > 0 else "M")


def _block_terms(block: str, params: Params, x, y, inverse: bool = False):
    """Yield ``((a', b'), (a, b), value)`` for one block, signed indices."""
    n = params.n
    s1, s2 = SIGN_OF[block[0]], SIGN_OF[block[1]]
    if block in ("PP", "MM"):
        if inverse:
            ff, gg = f_fn(y, x), g_fn(y, x)
        else:
            ff, gg = f_fn(x, y), g_fn(x, y)
        diag = 1 / ff
        off = gg / ff
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                yield (s1 * i, s2 * k), (s1 * i, s2 * k), diag
                # E^i_k (x) E^k_i sends e_i (x) e_k to e_k (x) e_i
                yield (s1 * k, s2 * i), (s1 * i, s2 * k), off
        return
    if block == "PM":
        c = h_fn(params, y, x) if inverse else k_fn(params, x, y)
    else:
        c = k_fn(params, y, x) if inverse else h_fn(params, x, y)
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            yield (s1 * i, s2 * k), (s1 * i, s2 * k), 1
            # E^i_k (x) E^{-i}_{-k} sends e_i (x) e_{-i} to e_k (x) e_{-k}
            yield (s1 * k, s2 * k), (s1 * i, s2 * i), -c


def _local(a: int, lb: SpaceLabel) -> int:
    if lb.kind in ("aux_full", "quantum_site"):
        r = lb.dim // 2
        return a - 1 if a > 0 else r - a - 1
    return abs(a) - 1


def _assemble(terms, lb1: SpaceLabel, lb2: SpaceLabel) -> SparseOperator:
    space = TensorSpace([lb1, lb2])
    d2 = lb2.dim
    ent: dict = {}
    for (ao, bo), (ai, bi), v in terms:
        key = (_local(ao, lb1) * d2 + _local(bo, lb2), _local(ai, lb1) * d2 + _local(bi, lb2))
        ent[key] = ent.get(key, 0) + v
    return SparseOperator(space, space, ent)


def aux_full_label(n: int, id: str | None = None) -> SpaceLabel:
    return label("aux_full", 2 * n, id)


def sector_label(sign: int, rank: int, id: str | None = None) -> SpaceLabel:
    return label("aux_plus" if sign > 0 else "aux_minus", rank, id)


def build_R(params: Params, x, y, labels: Sequence[SpaceLabel] | None = None,
            inverse: bool = False) -> SparseOperator:
    """The full R-matrix on ``V (x) V`` with ``V = V_+ + V_-`` of dim ``2n``."""
    n = params.n
    lb1, lb2 = labels if labels is not None else (aux_full_label(n), aux_full_label(n))
    terms = []
    for block in BLOCKS:
        terms.extend(_block_terms(block, params, x, y, inverse))
    return _assemble(terms, lb1, lb2)


def build_R_inverse(params: Params, x, y, labels=None) -> SparseOperator:
    return build_R(params, x, y, labels, inverse=True)


def build_R_block(block: str, params: Params, x, y, labels=None, inverse: bool = False) -> SparseOperator:
    """One sector block ``R^(e1,e2)`` on ``V_e1 (x) V_e2`` (each of dim ``n``)."""
    if block not in BLOCKS:
        raise ValueError(f"unknown block {block!r}")
    n = params.n
    if labels is None:
        labels = (sector_label(SIGN_OF[block[0]], n), sector_label(SIGN_OF[block[1]], n))
    return _assemble(_block_terms(block, params, x, y, inverse), *labels)


def build_R_reduced(block: str, m: int, params: Params, x, y, labels=None) -> SparseOperator:
    """Block of the rank-``m`` R-matrix, the one obeyed by the reduced generators.

    Here ``m`` is the rank of the reduced algebra, so each factor has dim
    ``m`` and the MP block carries ``1/(x - y + m - eta)``.
    """
    if m < 1:
        raise ValueError("reduced rank must be >= 1")
    return build_R_block(block, params.with_rank(m), x, y, labels)


# ---------------------------------------------------------------------------
# dressing blocks


def hat_labels(block: str, m: int, aux_id: str | None = None, slot_id: str | None = None):
    r = m - 1
    aux = sector_label(SIGN_OF[block[0]], r, aux_id)
    slot = label("plus_factor" if block[1] == "P" else "dual_minus_factor", r, slot_id)
    return aux, slot


def _hat_entries(block: str, m: int, params: Params, x, u, coincident: bool):
    """Dense-index entries ``{(row, col): value}`` on ``aux (x) slot``.

    Row ``(c, s)`` and column ``(d, r)`` are zero-based positions.  For plus
    slots the entry is the component ``R^{c,s}_{d,r}``; for dual slots the
    component ``R^{c,-r}_{d,-s}`` (upper slot index is the input).
    """
    r = m - 1
    out = {}

    def put(c, s, d, rr, v):
        if v != 0:
            key = (c * r + s, d * r + rr)
            out[key] = out.get(key, 0) + v

    if block == "PP":
        if coincident or x == u:
            for a in range(r):
                for p in range(r):
                    put(a, p, p, a, 1)
            return out
        ff, gg = f_fn(x, u), g_fn(x, u)
        for a in range(r):
            for p in range(r):
                put(a, p, a, p, 1 / ff)
                put(a, p, p, a, gg / ff)
        return out
    if block == "MM":
        if coincident or x == u:
            for c in range(r):
                for d in range(r):
                    put(c, c, d, d, 1)
            return out
        ff, gg = f_fn(u, x), g_fn(u, x)
        for c in range(r):
            for s in range(r):
                put(c, s, c, s, 1 / ff)
        for c in range(r):
            for d in range(r):
                put(c, c, d, d, gg / ff)
        return out
    if block == "PM":
        ht = 1 if coincident else h_tilde_fn(params, r, u, x)
        for c in range(r):
            for s in range(r):
                if not coincident:
                    put(c, s, c, s, 1)
                put(c, s, s, c, -ht if not coincident else 1)
        return out
    if block == "MP":
        ht = 1 if coincident else h_tilde_fn(params, r, x, u)
        for a in range(r):
            for p in range(r):
                if not coincident:
                    put(a, p, a, p, 1)
        for a in range(r):
            for b in range(r):
                put(a, a, b, b, -ht if not coincident else 1)
        return out
    raise ValueError(f"unknown block {block!r}")


def build_R_hat(block: str, m: int, params: Params, x, u, labels=None) -> SparseOperator:
    """Dressing factor at level rank ``m`` between ``x`` and a rapidity ``u``.

    Factors are ``(aux of rank m-1, slot of dim m-1)``; the slot is a plus
    factor for PP/MP and a dual-minus factor for PM/MM.  PP at ``u == x`` and
    MM at ``u == x`` return their coincident limits.
    """
    if m < 2:
        raise ValueError("dressing blocks need level rank m >= 2")
    aux, slot = labels if labels is not None else hat_labels(block, m)
    space = TensorSpace([aux, slot])
    return SparseOperator(space, space, _hat_entries(block, m, params, x, u, coincident=False))


def build_R_hat_coincident(block: str, m: int, labels=None) -> SparseOperator:
    """The coincident-point operators: permutations (PP, MM) and swap-trace terms (PM, MP).

    PP: sum E^i_k (x) E^k_i;  PM: sum E^r_s (x) F^{-r}_{-s};
    MP: sum E^{-i}_{-k} (x) E^i_k;  MM: sum E^{-r}_{-s} (x) F^{-s}_{-r}.
    """
    aux, slot = labels if labels is not None else hat_labels(block, m)
    space = TensorSpace([aux, slot])
    return SparseOperator(space, space, _hat_entries(block, m, Params(max(m, 1), 0), 0, 0, coincident=True))


def build_R_hat_product(block: str, m: int, params: Params, x, rapidities: Sequence,
                        aux: SpaceLabel | None = None, slots: Sequence[SpaceLabel] | None = None) -> SparseOperator:
    """Ordered product of dressing factors on ``aux (x) slot_1 (x) ... (x) slot_K``.

    PP and MP: ``R(x,u_K) ... R(x,u_1)``; PM and MM: ``R(x,u_1) ... R(x,u_K)``.
    """
    if aux is None:
        aux = hat_labels(block, m)[0]
    if slots is None:
        slots = [hat_labels(block, m)[1] for _ in rapidities]
    space = TensorSpace([aux, *slots])
    out = SparseOperator.identity(space)
    for j, u in enumerate(rapidities):
        fac = embed(build_R_hat(block, m, params, x, u, labels=(aux, slots[j])), space, [0, j + 1])
        # PP/MP: new factor multiplies on the left; PM/MM: on the right
        out = fac.compose(out) if block[1] == "P" else out.compose(fac)
    return out


class SectorSwap:
    """Identification ``f^{-r} <-> e_r`` between dual-minus and plus slots."""

    def __init__(self, direction: str, rank: int):
        if direction not in ("plus_to_minus", "minus_to_plus"):
            raise ValueError(direction)
        self.direction = direction
        self.rank = rank

    def operator(self, source: SpaceLabel, target_id: str | None = None) -> SparseOperator:
        kind = "plus_factor" if self.direction == "minus_to_plus" else "dual_minus_factor"
        need = "dual_minus_factor" if self.direction == "minus_to_plus" else "plus_factor"
        if source.kind != need or source.dim != self.rank:
            raise ValueError(f"sector swap {self.direction} cannot act on {source}")
        target = SpaceLabel(kind, self.rank, target_id or source.id)
        return SparseOperator(TensorSpace([target]), TensorSpace([source]),
                              {(i, i): 1 for i in range(self.rank)})


# ---------------------------------------------------------------------------
# Yang-Baxter checks


def _yb_triple(r12: SparseOperator, r13: SparseOperator, r23: SparseOperator):
    lhs = r12.compose(r13).compose(r23)
    rhs = r23.compose(r13).compose(r12)
    return lhs, rhs


def check_yang_baxter(params: Params, x, y, z, variant: str = "full",
                      r_factory: Callable | None = None) -> VerificationReport:
    """Exact Yang-Baxter check.

    ``full``: ``R12(x,y) R13(x,z) R23(y,z) = R23 R13 R12`` on ``V^{(x)3}``.
    ``hat_mixed``: for the rank ``n`` level, both dressing families
    ``Rt_{00'}(x,y) Rh_{0,1}(x,z) Rh_{0',1}(y,z) = Rh_{0',1}(y,z) Rh_{0,1}(x,z) Rt_{00'}(x,y)``
    for every sign pair, with a plus slot and with a dual slot.
    """
    rep = VerificationReport(f"yang_baxter_{variant}",
                             {"n": params.n, "eta": params.eta, "point": (x, y, z)})
    if variant == "full":
        factory = r_factory or build_R
        n = params.n
        lbs = [aux_full_label(n) for _ in range(3)]
        space = TensorSpace(lbs)
        r12 = embed(factory(params, x, y, labels=(lbs[0], lbs[1])), space, [0, 1])
        r13 = embed(factory(params, x, z, labels=(lbs[0], lbs[2])), space, [0, 2])
        r23 = embed(factory(params, y, z, labels=(lbs[1], lbs[2])), space, [1, 2])
        lhs, rhs = _yb_triple(r12, r13, r23)
        rep.checks += 1
        diff = lhs.first_difference(rhs)
        if diff is not None:
            rep.fail(row=diff[0], col=diff[1], lhs=diff[2], rhs=diff[3])
        return rep
    if variant != "hat_mixed":
        raise ValueError(f"unknown variant {variant!r}")
    m = params.n
    if m < 2:
        return rep
    for e1 in (1, -1):
        for e2 in (1, -1):
            for slot_kind in ("P", "M"):
                b1 = ("P" if e1 > 0 else "M") + slot_kind
                b2 = ("P" if e2 > 0 else "M") + slot_kind
                a0, slot = hat_labels(b1, m)
                a1, _ = hat_labels(b2, m)
                space = TensorSpace([a0, a1, slot])
                rt = embed(build_R_reduced(block_name(e1, e2), m - 1, params, x, y, labels=(a0, a1)),
                           space, [0, 1])
                h0 = embed(build_R_hat(b1, m, params, x, z, labels=(a0, slot)), space, [0, 2])
                h1 = embed(build_R_hat(b2, m, params, y, z, labels=(a1, slot)), space, [1, 2])
                lhs, rhs = _yb_triple(rt, h0, h1)
                rep.checks += 1
                diff = lhs.first_difference(rhs)
                if diff is not None:
                    return rep.fail(signs=(e1, e2), slot=slot_kind, row=diff[0], col=diff[1],
                                    lhs=diff[2], rhs=diff[3])
    return rep


def check_inverse(params: Params, x, y) -> VerificationReport:
    rep = VerificationReport("r_inverse", {"n": params.n, "eta": params.eta, "point": (x, y)})
    n = params.n
    lbs = (aux_full_label(n), aux_full_label(n))
    r = build_R(params, x, y, labels=lbs)
    ri = build_R_inverse(params, x, y, labels=lbs)
    eye = SparseOperator.identity(TensorSpace(lbs))
    for name, prod in (("R.Rinv", r.compose(ri)), ("Rinv.R", ri.compose(r))):
        rep.checks += 1
        diff = prod.first_difference(eye)
        if diff is not None:
            return rep.fail(order=name, row=diff[0], col=diff[1], lhs=diff[2], rhs=diff[3])
    return rep


def corrupted_R(params: Params, x, y, labels=None, inverse: bool = False) -> SparseOperator:
    """R with one diagonal entry altered; used to prove the checks can fail."""
    r = build_R(params, x, y, labels=labels, inverse=inverse)
    ent = dict(r.entries)
    ent[(0, 0)] = ent.get((0, 0), 0) + 1
    return SparseOperator(r.codomain, r.domain, ent)
