"""Scalar fields, model parameters and the rational structure functions.

Two fields are in use.  Exact checks run over ``gmpy2.mpq`` rationals
(``RationalScalar``); the root finder runs over Python ``complex``.  Every
function here only uses ``+ - * /`` and comparison with zero, so it works
unchanged over either field.

The structure functions are::

    f(x, y) = (x - y + 1) / (x - y)
    g(x, y) = 1 / (x - y)
    h(x, y) = 1 / (x - y + n - eta)
    k(x, y) = 1 / (x - y + eta)
    h_tilde_level(m)(x, y) = 1 / (x - y + m - eta)
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import Singular

RationalScalar = type(mpq(0))
ComplexScalar = complex

__all__ = [
    "RationalScalar",
    "ComplexScalar",
    "Params",
    "RapiditySet",
    "rational",
    "parse_rational",
    "format_rational",
    "is_exact",
    "to_complex",
    "f_fn",
    "g_fn",
    "h_fn",
    "k_fn",
    "h_tilde_fn",
    "eval_structure_fn",
    "product_F",
    "RationalSampler",
]


def rational(value) -> RationalScalar:
    """Coerce ints, strings ("p/q"), Fractions and mpq to an exact rational."""
    if isinstance(value, RationalScalar):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals; pass a 'p/q' string")
    if isinstance(value, str):
        return parse_rational(value)
    return mpq(value)


def parse_rational(text: str) -> RationalScalar:
    """Parse the ``"p/q"`` literal format (``q`` may be omitted)."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    parts = s.split("/")
    if len(parts) > 2:
        raise ValueError(f"bad rational literal {text!r}")
    try:
        num = int(parts[0])
        den = int(parts[1]) if len(parts) == 2 else 1
    except ValueError as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(num, den)


def format_rational(value) -> str:
    """Inverse of :func:`parse_rational`."""
    q = rational(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def is_exact(value) -> bool:
    return isinstance(value, (RationalScalar, int)) and not isinstance(value, bool)


def to_complex(value) -> complex:
    if isinstance(value, RationalScalar):
        return complex(float(value))
    return complex(value)


@dataclass(frozen=True)
class Params:
    """Rank ``n`` of the algebra and the deformation-like shift ``eta``."""

    n: int
    eta: object

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError(f"rank n must be an integer >= 1, got {self.n!r}")
        eta = self.eta
        if isinstance(eta, (str, int)) or hasattr(eta, "denominator"):
            eta = rational(eta)
        elif not isinstance(eta, complex):
            raise TypeError(f"eta must be rational or complex, got {type(eta).__name__}")
        object.__setattr__(self, "eta", eta)

    def with_rank(self, m: int) -> "Params":
        return Params(m, self.eta)

    def as_complex(self) -> "Params":
        return Params(self.n, to_complex(self.eta))


class RapiditySet(tuple):
    """Ordered tuple of pairwise distinct spectral parameters."""

    def __new__(cls, items: Iterable = ()):
        items = tuple(items)
        for i in range(len(items)):
            for j in range(i):
                if items[i] == items[j]:
                    raise ValueError(f"rapidities must be pairwise distinct: {items[i]} repeated")
        return super().__new__(cls, items)

    def without(self, index: int) -> "RapiditySet":
        return RapiditySet(self[:index] + self[index + 1:])


def _inv(kind, x, y, den):
    if den == 0:
        raise Singular(kind, x, y)
    if isinstance(den, int):
        den = mpq(den)
    return 1 / den


def f_fn(x, y):
    d = x - y
    if d == 0:
        raise Singular("f", x, y)
    if isinstance(d, int):
        d = mpq(d)
    return (d + 1) / d


def g_fn(x, y):
    return _inv("g", x, y, x - y)


def h_fn(params: Params, x, y):
    return _inv("h", x, y, x - y + params.n - params.eta)


def k_fn(params: Params, x, y):
    return _inv("k", x, y, x - y + params.eta)


def h_tilde_fn(params: Params, m: int, x, y):
    """``1/(x - y + m - eta)``; equals ``h`` of the rank-``m`` algebra."""
    return _inv("h_tilde", x, y, x - y + m - params.eta)


def eval_structure_fn(kind: str, params: Params, x, y, m: int | None = None):
    """Evaluate one of the structure functions.

    ``kind`` is ``"f"``, ``"g"``, ``"h"``, ``"k"`` or ``"h_tilde"`` (the latter
    needs the level ``m`` with ``1 <= m <= params.n``).

    >>> eval_structure_fn("f", Params(1, 0), mpq(3), mpq(1))
    mpq(3,2)
    """
    if kind == "f":
        return f_fn(x, y)
    if kind == "g":
        return g_fn(x, y)
    if kind == "h":
        return h_fn(params, x, y)
    if kind == "k":
        return k_fn(params, x, y)
    if kind in ("h_tilde", "h_tilde_level"):
        if m is None or not 1 <= m <= params.n:
            raise ValueError(f"h_tilde needs 1 <= m <= n, got m={m}")
        return h_tilde_fn(params, m, x, y)
    raise ValueError(f"unknown structure function {kind!r}")


def product_F(x, rapidities: Sequence, side: str = "left"):
    """``F(x; set) = prod f(x, v)`` (``side="left"``) or ``F(set; x) = prod f(v, x)``."""
    out = 1
    if side == "left":
        for v in rapidities:
            out = out * f_fn(x, v)
    elif side == "right":
        for v in rapidities:
            out = out * f_fn(v, x)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if isinstance(out, int):
        out = mpq(out)
    return out


class RationalSampler:
    """Deterministic random rationals p/q with |p| <= 10^4 and 1 <= q <= 100."""

    def __init__(self, seed: int = 0, num_bound: int = 10_000, den_bound: int = 100):
        self._rng = random.Random(seed)
        self.num_bound = num_bound
        self.den_bound = den_bound

    def draw(self) -> RationalScalar:
        p = self._rng.randint(-self.num_bound, self.num_bound)
        q = self._rng.randint(1, self.den_bound)
        return mpq(p, q)

    def draw_many(self, count: int, avoid=None) -> list:
        """Draw ``count`` pairwise-distinct values; ``avoid(values)`` rejects a batch."""
        while True:
            vals = [self.draw() for _ in range(count)]
            if len(set(vals)) != count:
                continue
            if avoid is not None:
                try:
                    if avoid(vals):
                        continue
                except Singular:
                    continue
            return vals
