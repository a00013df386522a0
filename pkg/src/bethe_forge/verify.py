"""Exact identity harness.

Every check evaluates both sides of an identity on concrete representations
at rational spectral points and compares them entry by entry.  A check passes
only when all entries are identical; the first offending entry is recorded.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .bethe import DressedAlgebra
from .errors import Singular
from .report import VerificationReport
from .representation import (ChainSpec, Representation, WTildeBasis, build_W_tilde, signed_indices,
                             vacuum_violation)
from .rmatrix import (SectorSwap, block_name, build_R, build_R_block, build_R_hat,
                      build_R_hat_coincident, build_R_reduced, check_inverse, check_yang_baxter,
                      sector_label)
from .scalars import Params, RationalSampler, f_fn, g_fn, h_fn, h_tilde_fn, product_F
from .tensor import SparseOperator, TensorSpace, Vec, embed, label, pair_contract

SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def draw_points(count: int, seed: int = 0, check: Callable | None = None) -> list:
    """``count`` distinct random rationals; ``check(x)`` may raise Singular to reject one."""
    sampler = RationalSampler(seed)
    out: list = []
    while len(out) < count:
        x = sampler.draw()
        if x in out:
            continue
        if check is not None:
            try:
                check(x)
            except (Singular, ZeroDivisionError):
                continue
        out.append(x)
    return out


def generic_tuple(rep: Representation, count: int, seed: int = 0, tries: int = 200) -> tuple:
    """``count`` rationals avoiding every structure-function pole among themselves and the sites."""
    sampler = RationalSampler(seed)
    params = rep.params
    sites = list(rep.chain.inhomogeneities)
    for _ in range(tries):
        pts = tuple(sampler.draw_many(count))
        try:
            for i, a in enumerate(pts):
                for b in pts[i + 1:] + tuple(sites):
                    for x, y in ((a, b), (b, a)):
                        1 / f_fn(x, y), g_fn(x, y), h_fn(params, x, y), 1 / (x - y + params.eta)
                        for m in range(1, params.n + 1):
                            h_tilde_fn(params, m, x, y)
        except (Singular, ZeroDivisionError):
            continue
        return pts
    raise Singular("generic", None, None)


def draw_pairs(rep: Representation, count: int, seed: int = 0) -> list:
    """``count`` generic ``(x, y)`` pairs for ``rep``."""
    return [generic_tuple(rep, 2, seed + 7919 * t) for t in range(count)]


def _chain_params(rep) -> dict:
    chain = rep.chain
    return {"n": chain.n, "eta": chain.params.eta, "L": chain.L, "a": chain.inhomogeneities}


def _record(report: VerificationReport, lhs, rhs, **where) -> bool:
    """Compare two operators or vectors; record the first difference.  True when equal."""
    report.checks += 1
    diff = lhs.first_difference(rhs)
    if diff is None:
        return True
    if isinstance(lhs, SparseOperator):
        report.fail(row=diff[0], col=diff[1], lhs=diff[2], rhs=diff[3], **where)
    else:
        report.fail(index=diff[0], lhs=diff[1], rhs=diff[2], **where)
    return False


# ---------------------------------------------------------------------------
# R-matrix level


def verify_yang_baxter(params: Params, triples: Sequence, variant: str = "full",
                       r_factory: Callable | None = None) -> VerificationReport:
    report = VerificationReport(f"yang_baxter_{variant}", {"n": params.n, "eta": params.eta,
                                                           "points": list(triples)})
    for x, y, z in triples:
        if not report.merge(check_yang_baxter(params, x, y, z, variant=variant, r_factory=r_factory)):
            break
    return report


def verify_inverse(params: Params, pairs: Sequence) -> VerificationReport:
    report = VerificationReport("inverse", {"n": params.n, "eta": params.eta, "points": list(pairs)})
    for x, y in pairs:
        if not report.merge(check_inverse(params, x, y)):
            break
    return report


def generic_triples(params: Params, count: int, seed: int = 0) -> list:
    """Triples with every pairwise difference away from the R-matrix poles."""
    sampler = RationalSampler(seed)

    def bad(vals):
        for i, a in enumerate(vals):
            for b in vals[i + 1:]:
                for x, y in ((a, b), (b, a)):
                    1 / f_fn(x, y), h_fn(params, x, y), 1 / (x - y + params.eta)
        return False

    out = []
    while len(out) < count:
        try:
            out.append(tuple(sampler.draw_many(3, avoid=bad)))
        except ZeroDivisionError:
            continue
    return out


# ---------------------------------------------------------------------------
# vacuum


def _single_site_weight(rep: Representation, a: int, x, site) -> object:
    """Eigenvalue of ``T^a_a(x)`` on a one-site chain, read off the operator itself."""
    one = Representation(ChainSpec(rep.params, 1, (site,)), vacuum_index=rep.vacuum_index)
    om = one.vacuum
    out = one.T(a, a, x).apply(om)
    (idx, c), = om.entries.items()
    return out[idx] / c


def verify_vacuum(rep: Representation, points: Sequence) -> VerificationReport:
    """Vacuum conditions on ``rep.vacuum`` and the product structure of its weights."""
    report = VerificationReport("vacuum", dict(_chain_params(rep), points=list(points),
                                               vacuum_index=rep.vacuum_index))
    om = rep.vacuum
    report.checks += 1
    bad = vacuum_violation(rep, om, points)
    if bad is not None:
        return report.fail(**bad)
    for x in points:
        for a in signed_indices(rep.params.n):
            got = rep.T(a, a, x).apply(om)
            prod = 1
            for site in rep.chain.inhomogeneities:
                prod = prod * _single_site_weight(rep, a, x, site)
            if not _record(report, got, om.scale(prod), entry=a, point=x, kind="site_product"):
                return report
            report.checks += 1
            if rep.weight(a, x) != prod:
                return report.fail(entry=a, point=x, lhs=rep.weight(a, x), rhs=prod, kind="weight_formula")
    return report


# ---------------------------------------------------------------------------
# monodromy in auxiliary form


def aux_monodromy(rep: Representation, x, aux, indices: Sequence) -> SparseOperator:
    """``sum_{a,b} |a><b| (x) T^a_b(x)`` on ``aux (x) sites`` for the listed signed indices."""
    space = TensorSpace([aux, *rep.sites])
    dq = rep.sites.dim
    loc = {a: j for j, a in enumerate(indices)}
    ent = {}
    for a in indices:
        for b in indices:
            if (a > 0) != (b > 0):
                continue
            for (r, c), v in rep.T(a, b, x).entries.items():
                ent[(loc[a] * dq + r, loc[b] * dq + c)] = v
    return SparseOperator(space, space, ent, clean=False)


def _sector_indices(sign: int, rank: int) -> list:
    return [sign * i for i in range(1, rank + 1)]


def verify_rtt(rep: Representation, points: Sequence, r_factory: Callable = build_R) -> VerificationReport:
    """Full RTT relation and its four sector forms at each ``(x, y)`` in ``points``."""
    params = rep.params
    n = params.n
    report = VerificationReport("rtt", dict(_chain_params(rep), points=list(points)))
    full = list(range(1, n + 1)) + [-i for i in range(1, n + 1)]
    for x, y in points:
        forms = [("full", label("aux_full", 2 * n, "A1"), label("aux_full", 2 * n, "A2"), full, full,
                  lambda a1, a2: r_factory(params, x, y, labels=(a1, a2)))]
        for e1, e2 in SIGN_PAIRS:
            blk = block_name(e1, e2)
            forms.append((blk, sector_label(e1, n, "A1"), sector_label(e2, n, "A2"),
                          _sector_indices(e1, n), _sector_indices(e2, n),
                          lambda a1, a2, blk=blk: build_R_block(blk, params, x, y, labels=(a1, a2))))
        for name, a1, a2, idx1, idx2, rfac in forms:
            space = TensorSpace([a1, a2, *rep.sites])
            tail = list(range(2, len(space)))
            t1 = embed(aux_monodromy(rep, x, a1, idx1), space, [0, *tail])
            t2 = embed(aux_monodromy(rep, y, a2, idx2), space, [1, *tail])
            r12 = embed(rfac(a1, a2), space, [0, 1])
            lhs = r12.compose(t1).compose(t2)
            rhs = t2.compose(t1).compose(r12)
            if not _record(report, lhs, rhs, form=name, point=(x, y)):
                return report
    return report


# ---------------------------------------------------------------------------
# quadratic commutation relations between generators


def _a1_relation(which: int, T: Callable, params: Params, i, k, r, s, x, y, p_max: int):
    """``(lhs, rhs)`` operators of one commutation relation."""
    n = params.n
    g = g_fn(x, y)
    gyx = g_fn(y, x)
    zero = T(1, 1, x).scale(0)

    def psum(fn):
        acc = zero
        for p in range(1, p_max + 1):
            acc = acc + fn(p)
        return acc

    d_ir = 1 if i == r else 0
    d_ks = 1 if k == s else 0
    if which == 1:
        lhs = T(i, k, x).compose(T(r, s, y)) + g * T(r, k, x).compose(T(i, s, y))
        rhs = T(r, s, y).compose(T(i, k, x)) + g * T(r, k, y).compose(T(i, s, x))
    elif which == 2:
        lhs = T(-i, -k, x).compose(T(-r, -s, y)) + g * T(-r, -k, x).compose(T(-i, -s, y))
        rhs = T(-r, -s, y).compose(T(-i, -k, x)) + g * T(-r, -k, y).compose(T(-i, -s, x))
    elif which == 3:
        kk = 1 / (x - y + params.eta)
        lhs = T(i, k, x).compose(T(-r, -s, y)) - (d_ir * kk) * psum(lambda p: T(p, k, x).compose(T(-p, -s, y)))
        rhs = T(-r, -s, y).compose(T(i, k, x)) - (d_ks * kk) * psum(lambda p: T(-r, -p, y).compose(T(i, p, x)))
    elif which == 4:
        h = h_fn(params, x, y)
        lhs = T(-i, -k, x).compose(T(r, s, y)) - (d_ir * h) * psum(lambda p: T(-p, -k, x).compose(T(p, s, y)))
        rhs = T(r, s, y).compose(T(-i, -k, x)) - (d_ks * h) * psum(lambda p: T(r, p, y).compose(T(-i, -p, x)))
    elif which == 5:
        lhs = T(i, k, x).compose(T(r, s, y)) + gyx * T(i, s, x).compose(T(r, k, y))
        rhs = T(r, s, y).compose(T(i, k, x)) + gyx * T(i, s, y).compose(T(r, k, x))
    elif which == 6:
        lhs = T(-i, -k, x).compose(T(-r, -s, y)) + gyx * T(-i, -s, x).compose(T(-r, -k, y))
        rhs = T(-r, -s, y).compose(T(-i, -k, x)) + gyx * T(-i, -s, y).compose(T(-r, -k, x))
    elif which == 7:
        h = h_fn(params, y, x)
        lhs = T(i, k, x).compose(T(-r, -s, y)) - (d_ks * h) * psum(lambda p: T(i, p, x).compose(T(-r, -p, y)))
        rhs = T(-r, -s, y).compose(T(i, k, x)) - (d_ir * h) * psum(lambda p: T(-p, -s, y).compose(T(p, k, x)))
    elif which == 8:
        kk = 1 / (y - x + params.eta)
        lhs = T(-i, -k, x).compose(T(r, s, y)) - (d_ks * kk) * psum(lambda p: T(-i, -p, x).compose(T(r, p, y)))
        rhs = T(r, s, y).compose(T(-i, -k, x)) - (d_ir * kk) * psum(lambda p: T(p, s, y).compose(T(-p, -k, x)))
    else:
        raise ValueError(f"relation number must be 1..8, got {which}")
    return lhs, rhs


def verify_commutation_A1(rep: Representation, points: Sequence, relations: Sequence = range(1, 9),
                          p_max: dict | None = None) -> VerificationReport:
    """The eight generator-level commutation relations for every index choice.

    ``p_max`` maps a relation number to a truncated upper limit of its p-sum
    (a fault-injection hook; the relations use ``n``).
    """
    params = rep.params
    n = params.n
    p_max = p_max or {}
    report = VerificationReport("commutation_a1", dict(_chain_params(rep), points=list(points),
                                                       relations=list(relations)))
    for x, y in points:
        for which in relations:
            top = p_max.get(which, n)
            for i in range(1, n + 1):
                for k in range(1, n + 1):
                    for r in range(1, n + 1):
                        for s in range(1, n + 1):
                            lhs, rhs = _a1_relation(which, rep.T, params, i, k, r, s, x, y, top)
                            if not _record(report, lhs, rhs, relation=which, indices=(i, k, r, s),
                                           point=(x, y)):
                                return report
    return report


# ---------------------------------------------------------------------------
# the subspace W-tilde: annihilation, invariance, reduced RTT


def _vectors(wtilde) -> list:
    return list(wtilde.vectors) if isinstance(wtilde, WTildeBasis) else list(wtilde)


def outside_vector(rep: Representation, x0, wtilde: WTildeBasis | None = None) -> Vec:
    """A creation-type image of the vacuum that leaves W-tilde.

    Tries ``T^n_k(x0) omega`` then ``T^{-k}_{-n}(x0) omega`` for ``k < n``; the
    annihilation relations generically fail on the result.
    """
    n = rep.params.n
    if wtilde is None:
        wtilde = build_W_tilde(rep)
    for a, b in [(n, k) for k in range(n - 1, 0, -1)] + [(-k, -n) for k in range(n - 1, 0, -1)]:
        vec = rep.T(a, b, x0).apply(rep.vacuum)
        if not vec.is_zero() and not wtilde.contains(vec):
            return vec
    raise ValueError("every creation image of the vacuum lies in W-tilde")


def verify_prop1(rep: Representation, wtilde, points: Sequence) -> VerificationReport:
    """Highest-index annihilation and eigenvalue relations on every given vector."""
    n = rep.params.n
    report = VerificationReport("prop1", dict(_chain_params(rep), points=list(points)))
    for x in points:
        for j, w in enumerate(_vectors(wtilde)):
            zero = w.scale(0)
            for i in range(1, n):
                for a, b in ((i, n), (-n, -i)):
                    if not _record(report, rep.T(a, b, x).apply(w), zero, relation=f"T^{a}_{b} w = 0",
                                   vector=j, point=x):
                        return report
            for a in (n, -n):
                if not _record(report, rep.T(a, a, x).apply(w), w.scale(rep.weight(a, x)),
                               relation=f"T^{a}_{a} w = lambda w", vector=j, point=x):
                    return report
    return report


def reduced_R_with_full_h(block: str, m: int, params: Params, x, y, labels=None) -> SparseOperator:
    """Reduced block whose MP coefficient uses ``h`` of rank ``m + 1`` (a deliberate fault)."""
    good = build_R_reduced(block, m, params, x, y, labels)
    if block != "MP":
        return good
    eye = SparseOperator.identity(good.domain)
    swap = (eye - good).scale(1 / h_tilde_fn(params, m, x, y))
    return eye - swap.scale(h_fn(params.with_rank(m + 1), x, y))


def _apply_generators(apply: Callable, vec: Vec, aux_pos: int, sign: int, x, tail_len: int) -> Vec:
    """``sum |c><d| (x) T^c_d(x)`` on the factor at ``aux_pos`` and the trailing module factors."""
    aux = vec.space[aux_pos]
    out = Vec(vec.space, {})
    for d in range(aux.dim):
        part = vec.project(aux_pos, d)
        if part.is_zero():
            continue
        start = len(part.space) - tail_len
        for c in range(aux.dim):
            res = part.apply_tail(start, lambda t, c=c, d=d: apply(sign * (c + 1), sign * (d + 1), x, t))
            if not res.is_zero():
                out = out + res.insert_factor(aux_pos, aux, c)
    return out


def _basis_with_aux(aux_labels: Sequence, head: TensorSpace, vectors: Sequence):
    """Basis vectors of ``aux... (x) head`` tensored with each module vector."""
    space = TensorSpace(list(aux_labels) + list(head))
    for idx in range(space.dim):
        front = Vec(space, {idx: 1})
        for j, w in enumerate(vectors):
            yield space.decode(idx), j, front.kron(w)


def verify_prop2_prop3(rep: Representation, wtilde: WTildeBasis, points: Sequence,
                       reduced_R: Callable = build_R_reduced) -> VerificationReport:
    """Invariance of W-tilde under the reduced generators and the reduced RTT relation on it."""
    n = rep.params.n
    params = rep.params
    report = VerificationReport("prop2_prop3", dict(_chain_params(rep), points=list(points)))
    if n < 2:
        return report
    r = n - 1
    vecs = _vectors(wtilde)
    for x, y in points:
        for px in (x, y):
            for sign in (1, -1):
                for i in range(1, r + 1):
                    for k in range(1, r + 1):
                        for j, w in enumerate(vecs):
                            report.checks += 1
                            if not wtilde.contains(rep.T(sign * i, sign * k, px).apply(w)):
                                return report.fail(relation="invariance", entry=(sign * i, sign * k),
                                                   vector=j, point=px)
        L = len(rep.sites)
        for e1, e2 in SIGN_PAIRS:
            a1, a2 = sector_label(e1, r, "A1"), sector_label(e2, r, "A2")
            rt = reduced_R(block_name(e1, e2), r, params, x, y, labels=(a1, a2))
            for multi, j, vec in _basis_with_aux([a1, a2], TensorSpace([]), vecs):
                lhs = _apply_generators(rep.apply, vec, 1, e2, y, L)
                lhs = _apply_generators(rep.apply, lhs, 0, e1, x, L)
                lhs = lhs.apply_local(rt, [0, 1])
                rhs = vec.apply_local(rt, [0, 1])
                rhs = _apply_generators(rep.apply, rhs, 0, e1, x, L)
                rhs = _apply_generators(rep.apply, rhs, 1, e2, y, L)
                if not _record(report, lhs, rhs, relation="reduced_rtt", signs=(e1, e2), aux=multi,
                               vector=j, point=(x, y)):
                    return report
    return report


# ---------------------------------------------------------------------------
# dressed generators


def verify_theorem3(level: DressedAlgebra, points: Sequence | None = None, wtilde=None,
                    seed: int = 0) -> VerificationReport:
    """Dressed RTT relation with the rank ``m - 1`` reduced R-matrix on ``slots (x) W~``."""
    m = level.m
    r = m - 1
    params = level.params
    report = VerificationReport("dressed_rtt", {"m": m, "eta": params.eta, "v": level.v, "w": level.w,
                                             "points": list(points or [])})
    if points is None:
        points = [dressed_points(level, 2, seed + 101 * t) for t in range(2)]
        report.params["points"] = points
    if wtilde is None:
        wtilde = build_W_tilde(level.parent)
    vecs = _vectors(wtilde)
    for x, y in points:
        for e1, e2 in SIGN_PAIRS:
            a1, a2 = sector_label(e1, r, "A1"), sector_label(e2, r, "A2")
            if r >= 1:
                rt = build_R_reduced(block_name(e1, e2), r, params, x, y, labels=(a1, a2))
            for multi, j, vec in _basis_with_aux([a1, a2], level.slots, vecs):
                lhs = level.apply_full(vec, e2, y, aux_pos=1)
                lhs = level.apply_full(lhs, e1, x, aux_pos=0).apply_local(rt, [0, 1])
                rhs = vec.apply_local(rt, [0, 1])
                rhs = level.apply_full(rhs, e1, x, aux_pos=0)
                rhs = level.apply_full(rhs, e2, y, aux_pos=1)
                if not _record(report, lhs, rhs, signs=(e1, e2), basis=multi, vector=j, point=(x, y)):
                    return report
    return report


def dressed_points(level: DressedAlgebra, count: int, seed: int = 0) -> tuple:
    """Generic points that also avoid poles against the level's rapidities."""
    raps = list(level.v) + list(level.w)
    params = level.params
    for t in range(200):
        cand = generic_tuple(level.parent, count + len(raps), seed + t)[:count]
        try:
            for z in cand:
                if z in raps:
                    raise ZeroDivisionError
                for u in raps:
                    for a, b in ((z, u), (u, z)):
                        1 / f_fn(a, b), g_fn(a, b)
                        for m in range(1, params.n + 1):
                            h_tilde_fn(params, m, a, b)
        except ZeroDivisionError:
            continue
        return cand
    raise Singular("generic", None, None)


def nu_with_swapped_orientation(level: DressedAlgebra) -> Callable:
    """Dressed weights with ``F(x-1; w)`` replaced by ``F(w; x-1)`` in the minus sector (a fault)."""
    def nu(a, x):
        if a < 0 and abs(a) < level.m - 1:
            return level.parent.weight(a, x) * product_F(x - 1, level.w, "right")
        return level.weight(a, x)
    return nu


def verify_theorem4(level: DressedAlgebra, points: Sequence, nu: Callable | None = None) -> VerificationReport:
    """Triangular action of the dressed generators on the dressed vacuum and its weights."""
    r = level.rank
    nu = nu or level.weight
    report = VerificationReport("dressed_vacuum", {"m": level.m, "eta": level.params.eta, "v": level.v,
                                             "w": level.w, "points": list(points)})
    om = level.vacuum
    zero = om.scale(0)
    for x in points:
        for sign in (1, -1):
            for i in range(1, r + 1):
                for k in range(1, r + 1):
                    a, b = sign * i, sign * k
                    out = level.apply(a, b, x, om)
                    if i == k:
                        ok = _record(report, out, om.scale(nu(a, x)), entry=(a, b), point=x, kind="weight")
                    elif (sign > 0 and i < k) or (sign < 0 and k < i):
                        ok = _record(report, out, zero, entry=(a, b), point=x, kind="annihilation")
                    else:
                        continue
                    if not ok:
                        return report
    return report


# ---------------------------------------------------------------------------
# transfer matrices


def verify_transfer_commutativity(rep: Representation, pairs: Sequence) -> VerificationReport:
    report = VerificationReport("transfer_commutativity", dict(_chain_params(rep), points=list(pairs)))
    for x, y in pairs:
        for e1, e2 in SIGN_PAIRS:
            hx = rep.transfer(e1, x)
            hy = rep.transfer(e2, y)
            if not _record(report, hx.compose(hy), hy.compose(hx), signs=(e1, e2), point=(x, y)):
                return report
    return report


def transfer_probe(rep: Representation, x, y) -> bool:
    """True when ``H^(+)(x)`` fails to commute with ``T^1_2(y)``: the commutator check can fail."""
    h = rep.transfer(1, x)
    t = rep.T(1, 2, y)
    return not (h.compose(t) == t.compose(h))


# ---------------------------------------------------------------------------
# slot-level action formulas: vectors on slots (x) [aux] (x) carrier


class LemmaFrame:
    """Evaluates the slot-level action formulas on ``slots (x) [aux0] (x) carrier``.

    Slots are identified by id; a plus slot pairs with ``b+`` rows
    (components ``T^n_k``) and a dual slot with ``b-`` rows (components
    ``T^{-r}_{-n}``).  Sector swaps change a slot's kind, and with it the
    row it pairs with.
    """

    def __init__(self, rep: Representation, kinds: Sequence[tuple]):
        self.rep = rep
        self.params = rep.params
        self.n = rep.rank
        self.r = self.n - 1
        self.L = len(rep.sites)
        self.set_slots(kinds)
        self.aux_plus = label("aux_plus", self.r, "a0")
        self.aux_minus = label("aux_minus", self.r, "a0")

    def set_slots(self, kinds: Sequence[tuple]) -> None:
        self.slots = [label("plus_factor" if k == "plus" else "dual_minus_factor", self.r, sid)
                      for sid, k in kinds]

    # scalars ------------------------------------------------------------
    def ht(self, x, y):
        return h_tilde_fn(self.params, self.r, x, y)

    def h(self, x, y):
        return h_fn(self.params, x, y)

    # inputs -------------------------------------------------------------
    def inputs(self, aux_sign: int | None, vectors: Sequence):
        head = list(self.slots)
        if aux_sign is not None:
            head.append(self.aux_plus if aux_sign > 0 else self.aux_minus)
        space = TensorSpace(head)
        for idx in range(space.dim):
            front = Vec(space, {idx: 1})
            for j, w in enumerate(vectors):
                yield (space.decode(idx), j), front.kron(w)

    # operators on vectors ------------------------------------------------
    def module(self, vec: Vec, a: int, b: int, x) -> Vec:
        op = self.rep.T(a, b, x)
        return vec.apply_tail(len(vec.space) - self.L, op.apply)

    def _aux_pos(self, vec: Vec) -> int:
        return vec.space.position("a0")

    def t_tilde(self, vec: Vec, sign: int, x) -> Vec:
        return _apply_generators(self.rep.apply, vec, self._aux_pos(vec), sign, x, self.L)

    def hat(self, vec: Vec, block: str, x, u, slot_id: str) -> Vec:
        """Aux-slot dressing factor; ``u=None`` gives the coincident operator."""
        pos = [self._aux_pos(vec), vec.space.position(slot_id)]
        labels = (vec.space[pos[0]], vec.space[pos[1]])
        if u is None:
            op = build_R_hat_coincident(block, self.n, labels=labels)
        else:
            op = build_R_hat(block, self.n, self.params, x, u, labels=labels)
        return vec.apply_local(op, pos)

    def hat_product(self, vec: Vec, sign: int, side: str, x, raps: Sequence, ids: Sequence) -> Vec:
        """``R(x, u_K) ... R(x, u_1)`` over plus slots, or ``R(x, u_1) ... R(x, u_K)`` over dual slots."""
        blk = ("P" if sign > 0 else "M") + ("P" if side == "plus" else "M")
        order = range(len(raps)) if side == "plus" else reversed(range(len(raps)))
        for j in order:
            vec = self.hat(vec, blk, x, raps[j], ids[j])
        return vec

    def slot_pair(self, vec: Vec, id1: str, id2: str, a=None, b=None) -> Vec:
        """``(I + g(a,b) P)/f(a,b)`` on two slots of equal kind; the plain swap when ``a`` is None."""
        p1, p2 = vec.space.position(id1), vec.space.position(id2)
        l1, l2 = vec.space[p1], vec.space[p2]
        d = l1.dim
        space = TensorSpace([l1, l2])
        ent = {}
        if a is None:
            for i in range(d):
                for k in range(d):
                    ent[(k * d + i, i * d + k)] = 1
        else:
            ff, gg = f_fn(a, b), g_fn(a, b)
            for i in range(d):
                for k in range(d):
                    ent[(i * d + k, i * d + k)] = ent.get((i * d + k, i * d + k), 0) + 1 / ff
                    ent[(k * d + i, i * d + k)] = ent.get((k * d + i, i * d + k), 0) + gg / ff
        return vec.apply_local(SparseOperator(space, space, ent), [p1, p2])

    def chain_plus(self, vec: Vec, ids: Sequence, v: Sequence, k: int) -> Vec:
        """``R_{1,k}(v_1,v_k) ... R_{k-1,k}(v_{k-1},v_k)`` (``k`` one-based)."""
        for j in reversed(range(k - 1)):
            vec = self.slot_pair(vec, ids[j], ids[k - 1], v[j], v[k - 1])
        return vec

    def chain_minus(self, vec: Vec, ids: Sequence, w: Sequence, r: int) -> Vec:
        """``R_{1*,r*}(w_r,w_1) ... R_{(r-1)*,r*}(w_r,w_{r-1})``."""
        for j in reversed(range(r - 1)):
            vec = self.slot_pair(vec, ids[j], ids[r - 1], w[r - 1], w[j])
        return vec

    def swap(self, vec: Vec, slot_id: str) -> Vec:
        pos = vec.space.position(slot_id)
        lb = vec.space[pos]
        direction = "minus_to_plus" if lb.dual else "plus_to_minus"
        return vec.apply_local(SectorSwap(direction, self.r).operator(lb), [pos])

    def pair(self, vec: Vec, rows: Sequence) -> Vec:
        """``< b ... b, vec >`` with ``rows = [(slot_id, rapidity), ...]`` in operator order."""
        n = self.n
        rep = self.rep
        slot_ids = {lb.id for lb in self.slots}
        n_slots = sum(1 for lb in vec.space if lb.id in slot_ids)
        lift = len(vec.space) - n_slots - self.L
        built = []
        for sid, u in rows:
            lb = vec.space[vec.space.position(sid)]
            if lb.dual:
                ops = [rep.T(-j, -n, u) for j in range(1, n)]
            else:
                ops = [rep.T(n, j, u) for j in range(1, n)]
            if lift:
                comps = [(lambda t, o=o: t.apply_tail(lift, o.apply)) for o in ops]
            else:
                comps = ops
            built.append((sid, comps))
        return pair_contract(vec, built, n_slots)

    def trace(self, vec: Vec, sign: int, fn: Callable[[Vec], Vec]) -> Vec:
        """``Tr_0`` of ``fn`` applied with a fresh auxiliary factor after the slots."""
        aux = self.aux_plus if sign > 0 else self.aux_minus
        pos = len(vec.space) - self.L
        out = None
        for d in range(aux.dim):
            res = fn(vec.insert_factor(pos, aux, d))
            res = res.project(res.space.position("a0"), d)
            out = res if out is None else out + res
        return out


def _rows(ids: Sequence, raps: Sequence) -> list:
    return list(zip(ids, raps))


def _drop(seq: Sequence, j: int) -> list:
    return list(seq[:j]) + list(seq[j + 1:])


def _lemma1(fr: LemmaFrame, x, v, w) -> list:
    """The eight single-excitation relations as ``(name, aux_sign, slot kinds, lhs_fn, rhs_fn)``."""
    n = fr.n
    cases = []
    P = [("s1", "plus")]
    M = [("s1", "dual")]
    cases.append(("1", None, P,
                  lambda phi: fr.module(fr.pair(phi, [("s1", v)]), n, n, x),
                  lambda phi: fr.pair(fr.module(phi, n, n, x), [("s1", v)]).scale(f_fn(v, x))
                  - fr.pair(fr.module(phi, n, n, v), [("s1", x)]).scale(g_fn(v, x))))
    cases.append(("2", None, M,
                  lambda phi: fr.module(fr.pair(phi, [("s1", w)]), -n, -n, x),
                  lambda phi: fr.pair(fr.module(phi, -n, -n, x), [("s1", w)]).scale(f_fn(x, w))
                  - fr.pair(fr.module(phi, -n, -n, w), [("s1", x)]).scale(g_fn(x, w))))
    cases.append(("3", 1, P,
                  lambda phi: fr.t_tilde(fr.pair(phi, [("s1", v)]), 1, x),
                  lambda phi: fr.pair(fr.t_tilde(fr.hat(phi, "PP", x, v, "s1"), 1, x), [("s1", v)]).scale(f_fn(x, v))
                  - fr.pair(fr.t_tilde(fr.hat(phi, "PP", x, None, "s1"), 1, v), [("s1", x)]).scale(g_fn(x, v))))
    cases.append(("4", -1, M,
                  lambda phi: fr.t_tilde(fr.pair(phi, [("s1", w)]), -1, x),
                  lambda phi: fr.pair(fr.hat(fr.t_tilde(phi, -1, x), "MM", x, w, "s1"), [("s1", w)]).scale(f_fn(w, x))
                  - fr.pair(fr.hat(fr.t_tilde(phi, -1, w), "MM", x, None, "s1"), [("s1", x)]).scale(g_fn(w, x))))
    cases.append(("5", None, M,
                  lambda phi: fr.module(fr.pair(phi, [("s1", w)]), n, n, x),
                  lambda phi: fr.pair(fr.module(phi, n, n, x), [("s1", w)]).scale(fr.ht(w, x) / fr.h(w, x))
                  + fr.trace(phi, -1, lambda q: fr.pair(
                      fr.swap(fr.hat(fr.t_tilde(q, -1, w), "MM", x, None, "s1"), "s1"), [("s1", x)])
                  ).scale(fr.ht(w, x))))
    cases.append(("6", None, P,
                  lambda phi: fr.module(fr.pair(phi, [("s1", v)]), -n, -n, x),
                  lambda phi: fr.pair(fr.module(phi, -n, -n, x), [("s1", v)]).scale(fr.ht(x, v) / fr.h(x, v))
                  + fr.trace(phi, 1, lambda q: fr.pair(
                      fr.swap(fr.t_tilde(fr.hat(q, "PP", x, None, "s1"), 1, v), "s1"), [("s1", x)])
                  ).scale(fr.ht(x, v))))
    cases.append(("7", 1, M,
                  lambda phi: fr.t_tilde(fr.pair(phi, [("s1", w)]), 1, x),
                  lambda phi: fr.pair(fr.hat(fr.t_tilde(phi, 1, x), "PM", x, w, "s1"), [("s1", w)])
                  - fr.pair(fr.swap(fr.hat(fr.module(phi, -n, -n, w), "PM", x, None, "s1"), "s1"),
                            [("s1", x)]).scale(fr.ht(w, x))))
    cases.append(("8", -1, P,
                  lambda phi: fr.t_tilde(fr.pair(phi, [("s1", v)]), -1, x),
                  lambda phi: fr.pair(fr.t_tilde(fr.hat(phi, "MP", x, v, "s1"), -1, x), [("s1", v)])
                  - fr.pair(fr.swap(fr.hat(fr.module(phi, n, n, v), "MP", x, None, "s1"), "s1"),
                            [("s1", x)]).scale(fr.ht(x, v))))
    return cases


def _lemma2(fr: LemmaFrame, x, y) -> list:
    PP = [("s1", "plus"), ("s2", "plus")]
    MM = [("s1", "dual"), ("s2", "dual")]
    PM = [("s1", "plus"), ("s2", "dual")]
    MP = [("s1", "dual"), ("s2", "plus")]
    sw = fr.swap
    cases = [
        ("1", None, PP, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(fr.slot_pair(p, "s1", "s2", x, y), [("s2", y), ("s1", x)])),
        ("2", None, MM, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(fr.slot_pair(p, "s1", "s2", y, x), [("s2", y), ("s1", x)])),
        ("3", None, PP, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(fr.slot_pair(p, "s1", "s2"), [("s2", x), ("s1", y)])),
        ("4", None, MM, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(fr.slot_pair(p, "s1", "s2"), [("s2", x), ("s1", y)])),
        ("5", None, PM, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(p, [("s2", y), ("s1", x)])),
        ("6a", None, PM, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(sw(fr.slot_pair(sw(p, "s2"), "s1", "s2"), "s1"), [("s2", x), ("s1", y)])),
        ("6b", None, PM, lambda p: fr.pair(p, [("s1", x), ("s2", y)]),
         lambda p: fr.pair(sw(fr.slot_pair(sw(p, "s1"), "s1", "s2"), "s2"), [("s2", x), ("s1", y)])),
        ("7a", None, MP, lambda p: fr.pair(p, [("s2", x), ("s1", y)]),
         lambda p: fr.pair(sw(fr.slot_pair(sw(p, "s1"), "s1", "s2"), "s2"), [("s1", x), ("s2", y)])),
        ("7b", None, MP, lambda p: fr.pair(p, [("s2", x), ("s1", y)]),
         lambda p: fr.pair(sw(fr.slot_pair(sw(p, "s2"), "s1", "s2"), "s1"), [("s1", x), ("s2", y)])),
    ]
    return cases


def _plus_ids(P):
    return [f"p{j + 1}" for j in range(P)]


def _dual_ids(Q):
    return [f"d{s + 1}" for s in range(Q)]


def _lemma3(fr: LemmaFrame, x, v, w) -> list:
    n = fr.n
    P, Q = len(v), len(w)
    pid, did = _plus_ids(P), _dual_ids(Q)
    kp = [(i, "plus") for i in pid]
    km = [(i, "dual") for i in did]

    def rows_k(ids, raps, k, at):
        return [(ids[k], at)] + _rows(_drop(ids, k), _drop(raps, k))

    def t_pp(phi, at):
        return fr.t_tilde(fr.hat_product(phi, 1, "plus", at, v, pid), 1, at)

    def t_mm(phi, at):
        return fr.hat_product(fr.t_tilde(phi, -1, at), -1, "dual", at, w, did)

    def rhs1(phi):
        out = fr.pair(fr.module(phi, n, n, x), _rows(pid, v)).scale(product_F(x, v, "right"))
        for k in range(P):
            c = g_fn(v[k], x) * product_F(v[k], _drop(v, k), "right")
            term = fr.pair(fr.chain_plus(fr.module(phi, n, n, v[k]), pid, v, k + 1), rows_k(pid, v, k, x))
            out = out - term.scale(c)
        return out

    def rhs2(phi):
        out = fr.pair(fr.module(phi, -n, -n, x), _rows(did, w)).scale(product_F(x, w, "left"))
        for r in range(Q):
            c = g_fn(x, w[r]) * product_F(w[r], _drop(w, r), "left")
            term = fr.pair(fr.chain_minus(fr.module(phi, -n, -n, w[r]), did, w, r + 1), rows_k(did, w, r, x))
            out = out - term.scale(c)
        return out

    def rhs3(phi):
        out = fr.pair(t_pp(phi, x), _rows(pid, v)).scale(product_F(x, v, "left"))
        for k in range(P):
            c = g_fn(x, v[k]) * product_F(v[k], _drop(v, k), "left")
            term = fr.pair(fr.chain_plus(t_pp(phi, v[k]), pid, v, k + 1), rows_k(pid, v, k, x))
            out = out - term.scale(c)
        return out

    def rhs4(phi):
        out = fr.pair(t_mm(phi, x), _rows(did, w)).scale(product_F(x, w, "right"))
        for r in range(Q):
            c = g_fn(w[r], x) * product_F(w[r], _drop(w, r), "right")
            term = fr.pair(fr.chain_minus(t_mm(phi, w[r]), did, w, r + 1), rows_k(did, w, r, x))
            out = out - term.scale(c)
        return out

    return [
        ("1", None, kp, lambda p: fr.module(fr.pair(p, _rows(pid, v)), n, n, x), rhs1),
        ("2", None, km, lambda p: fr.module(fr.pair(p, _rows(did, w)), -n, -n, x), rhs2),
        ("3", 1, kp, lambda p: fr.t_tilde(fr.pair(p, _rows(pid, v)), 1, x), rhs3),
        ("4", -1, km, lambda p: fr.t_tilde(fr.pair(p, _rows(did, w)), -1, x), rhs4),
    ]


def _lemma4(fr: LemmaFrame, x, v, w) -> list:
    n = fr.n
    eta = fr.params.eta
    P, Q = len(v), len(w)
    pid, did = _plus_ids(P), _dual_ids(Q)
    kp = [(i, "plus") for i in pid]
    km = [(i, "dual") for i in did]

    def t_pp(phi, at):
        return fr.t_tilde(fr.hat_product(phi, 1, "plus", at, v, pid), 1, at)

    def t_mm(phi, at):
        return fr.hat_product(fr.t_tilde(phi, -1, at), -1, "dual", at, w, did)

    def rhs1(phi):
        out = fr.pair(fr.module(phi, n, n, x), _rows(did, w)).scale(product_F(x - n + 1 + eta, w, "right"))
        for s in range(Q):
            c = fr.ht(w[s], x) * product_F(w[s], _drop(w, s), "right")
            rows = [(did[s], x)] + _rows(_drop(did, s), _drop(w, s))
            term = fr.trace(phi, -1, lambda q, s=s: fr.pair(
                fr.swap(fr.chain_minus(t_mm(q, w[s]), did, w, s + 1), did[s]), rows))
            out = out + term.scale(c)
        return out

    def rhs2(phi):
        out = fr.pair(fr.module(phi, -n, -n, x), _rows(pid, v)).scale(product_F(x + n - 1 - eta, v, "left"))
        for ell in range(P):
            c = fr.ht(x, v[ell]) * product_F(v[ell], _drop(v, ell), "left")
            rows = _rows(_drop(pid, ell), _drop(v, ell)) + [(pid[ell], x)]
            term = fr.trace(phi, 1, lambda q, ell=ell: fr.pair(
                fr.swap(fr.chain_plus(t_pp(q, v[ell]), pid, v, ell + 1), pid[ell]), rows))
            out = out + term.scale(c)
        return out

    def rhs3(phi):
        out = fr.pair(fr.hat_product(fr.t_tilde(phi, 1, x), 1, "dual", x, w, did), _rows(did, w))
        for s in range(Q):
            c = fr.ht(w[s], x) * product_F(w[s], _drop(w, s), "left")
            rows = [(did[s], x)] + _rows(_drop(did, s), _drop(w, s))
            q = fr.chain_minus(fr.module(phi, -n, -n, w[s]), did, w, s + 1)
            q = fr.swap(fr.hat(q, "PM", x, None, did[s]), did[s])
            out = out - fr.pair(q, rows).scale(c)
        return out

    def rhs4(phi):
        out = fr.pair(fr.t_tilde(fr.hat_product(phi, -1, "plus", x, v, pid), -1, x), _rows(pid, v))
        for ell in range(P):
            c = fr.ht(x, v[ell]) * product_F(v[ell], _drop(v, ell), "right")
            rows = _rows(_drop(pid, ell), _drop(v, ell)) + [(pid[ell], x)]
            q = fr.chain_plus(fr.module(phi, n, n, v[ell]), pid, v, ell + 1)
            q = fr.swap(fr.hat(q, "MP", x, None, pid[ell]), pid[ell])
            out = out - fr.pair(q, rows).scale(c)
        return out

    return [
        ("1", None, km, lambda p: fr.module(fr.pair(p, _rows(did, w)), n, n, x), rhs1),
        ("2", None, kp, lambda p: fr.module(fr.pair(p, _rows(pid, v)), -n, -n, x), rhs2),
        ("3", 1, km, lambda p: fr.t_tilde(fr.pair(p, _rows(did, w)), 1, x), rhs3),
        ("4", -1, kp, lambda p: fr.t_tilde(fr.pair(p, _rows(pid, v)), -1, x), rhs4),
    ]


def _lemma5(fr: LemmaFrame, x, v, w) -> list:
    n = fr.n
    eta = fr.params.eta
    P, Q = len(v), len(w)
    pid, did = _plus_ids(P), _dual_ids(Q)
    kinds = [(i, "plus") for i in pid] + [(i, "dual") for i in did]
    base = _rows(pid, v) + _rows(did, w)

    def t_hat(phi, sign, at):
        """Fully dressed ``T^(sign)(at; v; w)`` on the auxiliary factor."""
        phi = fr.hat_product(phi, sign, "plus", at, v, pid)
        phi = fr.t_tilde(phi, sign, at)
        return fr.hat_product(phi, sign, "dual", at, w, did)

    def plus_at(ell):
        return [(pid[ell], x)] + _rows(_drop(pid, ell), _drop(v, ell)) + _rows(did, w)

    def minus_at(s):
        return _rows(pid, v) + [(did[s], x)] + _rows(_drop(did, s), _drop(w, s))

    def plus_moved(s):
        # b+_{s*}(x) b+(v) b-(w without s)
        return [(did[s], x)] + _rows(pid, v) + _rows(_drop(did, s), _drop(w, s))

    def minus_moved(ell):
        # b+(v without l) b-_l(x) b-(w)
        return _rows(_drop(pid, ell), _drop(v, ell)) + [(pid[ell], x)] + _rows(did, w)

    def rhs1(phi):
        out = fr.pair(fr.module(phi, n, n, x), base).scale(
            product_F(x, v, "right") * product_F(x - n + 1 + eta, w, "right"))
        for ell in range(P):
            c = (g_fn(v[ell], x) * product_F(v[ell], _drop(v, ell), "right")
                 * product_F(v[ell] - n + 1 + eta, w, "right"))
            term = fr.pair(fr.chain_plus(fr.module(phi, n, n, v[ell]), pid, v, ell + 1), plus_at(ell))
            out = out - term.scale(c)
        for s in range(Q):
            c = fr.ht(w[s], x) * product_F(w[s], _drop(w, s), "right")
            term = fr.trace(phi, -1, lambda q, s=s: fr.pair(
                fr.swap(fr.chain_minus(t_hat(q, -1, w[s]), did, w, s + 1), did[s]), plus_moved(s)))
            out = out + term.scale(c)
        return out

    def rhs2(phi):
        out = fr.pair(t_hat(phi, 1, x), base).scale(product_F(x, v, "left"))
        for ell in range(P):
            c = g_fn(x, v[ell]) * product_F(v[ell], _drop(v, ell), "left")
            term = fr.pair(fr.chain_plus(t_hat(phi, 1, v[ell]), pid, v, ell + 1), plus_at(ell))
            out = out - term.scale(c)
        for s in range(Q):
            c = (fr.ht(w[s], x) * product_F(w[s], _drop(w, s), "left")
                 * product_F(w[s] + n - 1 - eta, v, "left"))
            q = fr.chain_minus(fr.module(phi, -n, -n, w[s]), did, w, s + 1)
            q = fr.swap(fr.hat(q, "PM", x, None, did[s]), did[s])
            out = out - fr.pair(q, plus_moved(s)).scale(c)
        return out

    def rhs3(phi):
        out = fr.pair(fr.module(phi, -n, -n, x), base).scale(
            product_F(x, w, "left") * product_F(x + n - 1 - eta, v, "left"))
        for s in range(Q):
            c = (g_fn(x, w[s]) * product_F(w[s], _drop(w, s), "left")
                 * product_F(w[s] + n - 1 - eta, v, "left"))
            term = fr.pair(fr.chain_minus(fr.module(phi, -n, -n, w[s]), did, w, s + 1), minus_at(s))
            out = out - term.scale(c)
        for ell in range(P):
            c = fr.ht(x, v[ell]) * product_F(v[ell], _drop(v, ell), "left")
            term = fr.trace(phi, 1, lambda q, ell=ell: fr.pair(
                fr.swap(fr.chain_plus(t_hat(q, 1, v[ell]), pid, v, ell + 1), pid[ell]), minus_moved(ell)))
            out = out + term.scale(c)
        return out

    def rhs4(phi):
        out = fr.pair(t_hat(phi, -1, x), base).scale(product_F(x, w, "right"))
        for s in range(Q):
            c = g_fn(w[s], x) * product_F(w[s], _drop(w, s), "right")
            term = fr.pair(fr.chain_minus(t_hat(phi, -1, w[s]), did, w, s + 1), minus_at(s))
            out = out - term.scale(c)
        for ell in range(P):
            c = (fr.ht(x, v[ell]) * product_F(v[ell], _drop(v, ell), "right")
                 * product_F(v[ell] - n + 1 + eta, w, "right"))
            q = fr.chain_plus(fr.module(phi, n, n, v[ell]), pid, v, ell + 1)
            q = fr.swap(fr.hat(q, "MP", x, None, pid[ell]), pid[ell])
            out = out - fr.pair(q, minus_moved(ell)).scale(c)
        return out

    return [
        ("1", None, kinds, lambda p: fr.module(fr.pair(p, base), n, n, x), rhs1),
        ("2", 1, kinds, lambda p: fr.t_tilde(fr.pair(p, base), 1, x), rhs2),
        ("3", None, kinds, lambda p: fr.module(fr.pair(p, base), -n, -n, x), rhs3),
        ("4", -1, kinds, lambda p: fr.t_tilde(fr.pair(p, base), -1, x), rhs4),
    ]


LEMMAS = ("L1", "L2", "L3", "L4", "L5")


def verify_lemmas(rep: Representation, which: str, P: int = 1, Q: int = 1, points: Sequence | None = None,
                  seed: int = 0, vectors: Sequence | None = None) -> VerificationReport:
    """Check every relation of one slot-level action family.

    Relations are evaluated on slot basis vectors (and auxiliary basis
    vectors where the relation carries an auxiliary space) tensored with
    ``vectors`` (default: the full carrier basis).  ``points`` lists
    ``(x, rapidities...)`` tuples; by default three random tuples are drawn.
    """
    if which not in LEMMAS:
        raise ValueError(f"unknown lemma {which!r}")
    if rep.rank < 2:
        raise ValueError("the slot-level action formulas need rank n >= 2")
    if which in ("L1", "L2"):
        P, Q = (1, 1) if which == "L1" else (2, 0)
    if P > 2 or Q > 2:
        raise ValueError("P and Q are limited to 2")
    report = VerificationReport(f"lemma_{which}", dict(_chain_params(rep), P=P, Q=Q))
    if vectors is None:
        vectors = [Vec(rep.sites, {i: 1}) for i in range(rep.sites.dim)]
    need = {"L1": 3, "L2": 2}.get(which, 1 + P + Q)
    if points is None:
        points = [generic_tuple(rep, need, seed + 31 * t) for t in range(3)]
    report.params["points"] = list(points)
    frame = LemmaFrame(rep, [])
    for pt in points:
        if which == "L1":
            cases = _lemma1(frame, *pt)
        elif which == "L2":
            cases = _lemma2(frame, *pt)
        else:
            x, raps = pt[0], pt[1:]
            builder = {"L3": _lemma3, "L4": _lemma4, "L5": _lemma5}[which]
            cases = builder(frame, x, raps[:P], raps[P:P + Q])
        for name, aux_sign, kinds, lhs_fn, rhs_fn in cases:
            frame.set_slots(kinds)
            for tag, phi in frame.inputs(aux_sign, vectors):
                if not _record(report, lhs_fn(phi), rhs_fn(phi), relation=name, input=tag, point=pt):
                    return report
    return report
