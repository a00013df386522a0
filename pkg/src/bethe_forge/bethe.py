"""The nested ladder: creation rows, dressed monodromies and Bethe vectors.

Every rung is an *algebra provider*: an object with ``rank``, ``params``,
``carrier`` (a TensorSpace), ``vacuum`` (a Vec), ``weight(a, x)`` and
``apply(a, b, x, vec)`` returning ``T^a_b(x) vec``.  The chain
:class:`~bethe_forge.representation.Representation` is the top rung;
:class:`DressedAlgebra` builds the rank ``m-1`` rung from a rank ``m`` one
and two rapidity sets.

Dressed generators at rank ``m - 1``::

    T^(+)(x) = Rh^{PM}_{0;1*..Q*}(x; w) T~^(+)_0(x) Rh^{PP}_{0;1..P}(x; v)
    T^(-)(x) = Rh^{MM}_{0;1*..Q*}(x; w) T~^(-)_0(x) Rh^{MP}_{0;1..P}(x; v)

with PP/MP products ordered ``P..1`` and PM/MM products ordered ``1..Q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ZeroVector
from .rmatrix import build_R_hat
from .scalars import Params, RapiditySet, f_fn, g_fn, h_fn, k_fn, product_F
from .tensor import SpaceLabel, TensorSpace, Vec, label, pair_contract


def local_weight(params: Params, a: int, b: int, x, y):
    """Diagonal entry ``<e_a (x) e_b| R(x,y) |e_a (x) e_b>`` of the full R-matrix."""
    same = abs(a) == abs(b)
    if (a > 0) == (b > 0):
        return (1 + g_fn(x, y)) / f_fn(x, y) if same else 1 / f_fn(x, y)
    if not same:
        return 1
    if a > 0:
        return 1 - k_fn(params, x, y)
    return 1 - h_fn(params, x, y)


def nu_weight(parent_weight: Callable, m: int, eta, v: Sequence, w: Sequence, a: int, x):
    """Vacuum eigenvalue of the dressed generator ``T^a_a`` at rank ``m - 1``.

    ``parent_weight(a, x)`` gives the rank-``m`` weights.
    """
    i = abs(a)
    if not 1 <= i <= m - 1:
        raise IndexError(f"dressed weight index {a} outside rank {m - 1}")
    lam = parent_weight(a, x)
    if a > 0:
        if i < m - 1:
            return lam * product_F(x + 1, v, "right")
        return lam * product_F(x - m + 1 + eta, w, "left")
    if i < m - 1:
        return lam * product_F(x - 1, w, "left")
    return lam * product_F(x + m - 1 - eta, v, "right")


@dataclass(frozen=True)
class NestedSchedule:
    """Excitation counts ``[(P_n, Q_n), ..., (P_2, Q_2)]`` from the top level down."""

    counts: tuple

    def __post_init__(self):
        counts = tuple((int(p), int(q)) for p, q in self.counts)
        if any(p < 0 or q < 0 for p, q in counts):
            raise ValueError("excitation counts must be >= 0")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def empty(cls, n: int) -> "NestedSchedule":
        return cls(tuple((0, 0) for _ in range(max(n - 1, 0))))

    @property
    def size(self) -> int:
        return sum(p + q for p, q in self.counts)

    def split(self, flat: Sequence) -> list:
        """Cut a flat rapidity list into ``[(v, w), ...]`` per level."""
        out = []
        pos = 0
        for p, q in self.counts:
            v = tuple(flat[pos:pos + p])
            pos += p
            w = tuple(flat[pos:pos + q])
            pos += q
            out.append((v, w))
        if pos != len(flat):
            raise ValueError(f"expected {pos} rapidities, got {len(flat)}")
        return out

    @staticmethod
    def flatten(levels: Sequence) -> list:
        flat = []
        for v, w in levels:
            flat.extend(v)
            flat.extend(w)
        return flat


class DressedAlgebra:
    """Rank ``m - 1`` provider built on a rank ``m`` parent and rapidities ``(v, w)``."""

    def __init__(self, parent, v: Sequence = (), w: Sequence = (), tag: str | None = None):
        self.parent = parent
        self.m = parent.rank
        if self.m < 2:
            raise ValueError("cannot dress a rank-1 algebra")
        self.params = parent.params
        self.v = RapiditySet(v)
        self.w = RapiditySet(w)
        r = self.m - 1
        tag = tag or f"L{self.m}"
        self.plus_slots = [label("plus_factor", r, f"{tag}p{j + 1}") for j in range(len(self.v))]
        self.dual_slots = [label("dual_minus_factor", r, f"{tag}d{s + 1}") for s in range(len(self.w))]
        self.aux_plus = label("aux_plus", r, f"{tag}a+")
        self.aux_minus = label("aux_minus", r, f"{tag}a-")
        self.slots = TensorSpace(self.plus_slots + self.dual_slots)
        self.carrier = self.slots + parent.carrier
        self._hat_cache: dict = {}
        self._vacuum = None

    @property
    def rank(self) -> int:
        return self.m - 1

    @property
    def n_slots(self) -> int:
        return len(self.plus_slots) + len(self.dual_slots)

    @property
    def vacuum(self) -> Vec:
        if self._vacuum is None:
            self._vacuum = omega_hat(self)
        return self._vacuum

    def weight(self, a: int, x):
        return nu_weight(self.parent.weight, self.m, self.params.eta, self.v, self.w, a, x)

    def hat(self, block: str, x, u, slot: SpaceLabel, aux: SpaceLabel | None = None):
        if aux is None:
            aux = self.aux_plus if block[0] == "P" else self.aux_minus
        key = (block, x, u, slot.id, aux.id)
        op = self._hat_cache.get(key)
        if op is None:
            op = build_R_hat(block, self.m, self.params, x, u, labels=(aux, slot))
            if len(self._hat_cache) > 4096:
                self._hat_cache.clear()
            self._hat_cache[key] = op
        return op

    def aux_label(self, sign: int) -> SpaceLabel:
        return self.aux_plus if sign > 0 else self.aux_minus

    def apply_dressing(self, vec: Vec, sign: int, side: str, x, aux_pos: int = 0) -> Vec:
        """Apply the v-side (``side='v'``) or w-side dressing product.

        ``vec`` must contain this level's slot factors, the parent carrier as
        its tail and an auxiliary factor at ``aux_pos``.
        """
        pos = vec.space.position
        aux = vec.space[aux_pos]
        if side == "v":
            block = "PP" if sign > 0 else "MP"
            # product R(v_P) ... R(v_1): the v_1 factor acts first
            for j, u in enumerate(self.v):
                slot = self.plus_slots[j]
                vec = vec.apply_local(self.hat(block, x, u, slot, aux), [aux_pos, pos(slot.id)])
        else:
            block = "PM" if sign > 0 else "MM"
            # product R(w_1) ... R(w_Q): the w_Q factor acts first
            for s in reversed(range(len(self.w))):
                slot = self.dual_slots[s]
                vec = vec.apply_local(self.hat(block, x, self.w[s], slot, aux), [aux_pos, pos(slot.id)])
        return vec

    def apply_reduced(self, vec: Vec, sign: int, x, aux_pos: int = 0) -> Vec:
        """Apply ``T~^(sign)_0(x) = sum |c><d| (x) T^c_d(x)`` (indices <= m-1)."""
        r = self.m - 1
        aux = vec.space[aux_pos]
        start = len(vec.space) - 1 - len(self.parent.carrier)
        out = None
        for d in range(r):
            part = vec.project(aux_pos, d)
            if part.is_zero():
                continue
            for c in range(r):
                a, b = sign * (c + 1), sign * (d + 1)
                res = part.apply_tail(start, lambda t, a=a, b=b: self.parent.apply(a, b, x, t))
                if res.is_zero():
                    continue
                res = res.insert_factor(aux_pos, aux, c)
                out = res if out is None else out + res
        if out is None:
            out = Vec(vec.space, {})
        return out

    def apply_full(self, vec: Vec, sign: int, x, aux_pos: int = 0) -> Vec:
        """Dressed monodromy ``T^(sign)`` acting on the auxiliary factor at ``aux_pos``."""
        vec = self.apply_dressing(vec, sign, "v", x, aux_pos)
        vec = self.apply_reduced(vec, sign, x, aux_pos)
        return self.apply_dressing(vec, sign, "w", x, aux_pos)

    def apply(self, a: int, b: int, x, vec: Vec) -> Vec:
        """``T^a_b(x) vec`` for the dressed generator (``|a|, |b| <= m - 1``)."""
        if (a > 0) != (b > 0):
            raise ValueError("dressed generators do not mix sectors")
        sign = 1 if a > 0 else -1
        big = vec.insert_factor(0, self.aux_label(sign), abs(b) - 1)
        big = self.apply_full(big, sign, x)
        return big.project(0, abs(a) - 1)


# A rung of the ladder is fully described by its dressed algebra.
LevelData = DressedAlgebra


def omega_hat(level: DressedAlgebra) -> Vec:
    """``e_{m-1}^{(x)P} (x) f^{-(m-1)(x)Q} (x) omega`` of the parent."""
    r = level.m - 1
    slot_vec = Vec.basis(level.slots, [r - 1] * level.n_slots) if level.n_slots else Vec(level.slots, {0: 1})
    return slot_vec.kron(level.parent.vacuum)


def b_plus_row(provider, v) -> list:
    """Components ``T^m_k(v)``, ``k = 1..m-1``, as callables on carrier vectors."""
    m = provider.rank
    return [(lambda t, k=k: provider.apply(m, k, v, t)) for k in range(1, m)]


def b_minus_row(provider, w) -> list:
    """Components ``T^{-r}_{-m}(w)``, ``r = 1..m-1``."""
    m = provider.rank
    return [(lambda t, r=r: provider.apply(-r, -m, w, t)) for r in range(1, m)]


def contract_rows(provider, level: DressedAlgebra, phi: Vec) -> Vec:
    """``< b+_{1*..P*}(v) b-_{1..Q}(w), phi >`` on the provider's carrier."""
    rows = []
    for j, v in enumerate(level.v):
        rows.append((level.plus_slots[j].id, b_plus_row(provider, v)))
    for s, w in enumerate(level.w):
        rows.append((level.dual_slots[s].id, b_minus_row(provider, w)))
    return pair_contract(phi, rows, level.n_slots)


def nested_bethe_vector(provider, levels: Sequence, check_zero: bool = True) -> Vec:
    """Bethe vector for ``levels = [(v, w), ...]`` from the provider's rank down.

    Level rapidity lists beyond the available ranks must be empty.
    """
    levels = list(levels)
    if provider.rank <= 1 or not levels:
        if any(len(v) or len(w) for v, w in levels):
            raise ValueError("excitations requested below rank 2")
        return provider.vacuum
    v, w = levels[0]
    level = DressedAlgebra(provider, v, w)
    phi = nested_bethe_vector(level, levels[1:], check_zero=False)
    out = contract_rows(provider, level, phi)
    if check_zero and out.is_zero():
        raise ZeroVector("Bethe vector contraction vanished")
    return out


def dressed_monodromy(level: DressedAlgebra, sign: int, x) -> dict:
    """Dressed generators as ``{(a, b): callable(vec) -> vec}``."""
    r = level.rank
    idx = [sign * i for i in range(1, r + 1)]
    return {(a, b): (lambda t, a=a, b=b: level.apply(a, b, x, t)) for a in idx for b in idx}


# ---------------------------------------------------------------------------
# scalar recursion for the eigenvalues


def expected_eigenvalue_from_weights(weight: Callable, m: int, eta, levels: Sequence, sign: int, x):
    """Eigenvalue of ``H^(sign)(x)`` on the nested Bethe vector, from vacuum weights."""
    if m == 1:
        return weight(sign, x)
    levels = list(levels)
    v, w = levels[0] if levels else ((), ())
    rest = levels[1:]

    def nu(a, y):
        return nu_weight(weight, m, eta, v, w, a, y)

    mu = expected_eigenvalue_from_weights(nu, m - 1, eta, rest, sign, x)
    if sign > 0:
        return (weight(m, x) * product_F(x, v, "right") * product_F(x - m + 1 + eta, w, "right")
                + mu * product_F(x, v, "left"))
    return (weight(-m, x) * product_F(x, w, "left") * product_F(x + m - 1 - eta, v, "left")
            + mu * product_F(x, w, "right"))


def expected_eigenvalue(provider, levels: Sequence, sign: int, x):
    return expected_eigenvalue_from_weights(provider.weight, provider.rank, provider.params.eta,
                                            levels, sign, x)


def bethe_conditions(weight: Callable, m: int, eta, levels: Sequence) -> list:
    """``LHS - RHS`` of the Bethe conditions at every level, flattened.

    Order: level ``m`` v's, level ``m`` w's, then level ``m - 1`` and so on.
    """
    levels = list(levels)
    if m < 2 or not levels:
        return []
    v, w = levels[0]
    rest = levels[1:]

    def nu(a, y):
        return nu_weight(weight, m, eta, v, w, a, y)

    out = []
    for ell, vl in enumerate(v):
        others = v[:ell] + v[ell + 1:]
        mu = expected_eigenvalue_from_weights(nu, m - 1, eta, rest, 1, vl)
        lhs = weight(m, vl) * product_F(vl, others, "right") * product_F(vl - m + 1 + eta, w, "right")
        rhs = mu * product_F(vl, others, "left")
        out.append(lhs - rhs)
    for s, ws in enumerate(w):
        others = w[:s] + w[s + 1:]
        mu = expected_eigenvalue_from_weights(nu, m - 1, eta, rest, -1, ws)
        lhs = weight(-m, ws) * product_F(ws, others, "left") * product_F(ws + m - 1 - eta, v, "left")
        rhs = mu * product_F(ws, others, "right")
        out.append(lhs - rhs)
    out.extend(bethe_conditions(nu, m - 1, eta, rest))
    return out
