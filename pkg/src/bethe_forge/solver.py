"""Numerical Bethe roots, eigen-residual checks and matching against dense spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bethe import (NestedSchedule, bethe_conditions, expected_eigenvalue_from_weights, local_weight,
                    nested_bethe_vector)
from .errors import DimensionTooLarge, NoConvergence, PoleProximity, RapidityClash, Singular, ZeroVector
from .representation import Representation, brute_force_spectrum, dense_complex, vec_complex
from .scalars import to_complex
from .tensor import DENSE_LIMIT

TOL_ROOT = 1e-10
DEDUP_RADIUS = 1e-6
CLASH_RADIUS = 1e-8
POLE_RADIUS = 1e-8
MAX_HALVINGS = 40
MAX_ITER = 200
START_RADIUS = 5.0
ESCAPE_RADIUS = 1e4
EIGEN_TOL = 1e-8


class BetheSystem:
    """Nested Bethe conditions for a chain and a schedule, over complex scalars."""

    def __init__(self, rep: Representation, schedule: NestedSchedule):
        self.rep = rep
        self.schedule = schedule
        self.params = rep.params.as_complex()
        self.eta = self.params.eta
        self.sites = tuple(to_complex(a) for a in rep.chain.inhomogeneities)
        self.vac = rep.vacuum_index
        if len(schedule.counts) > max(rep.rank - 1, 0):
            raise ValueError(f"schedule has {len(schedule.counts)} levels, rank {rep.rank} allows {rep.rank - 1}")

    @property
    def size(self) -> int:
        return self.schedule.size

    def weight(self, a: int, x):
        out = 1
        for site in self.sites:
            out = out * local_weight(self.params, a, self.vac, x, site)
        return out

    def levels(self, flat: Sequence) -> list:
        return self.schedule.split([complex(z) for z in flat])

    def residuals(self, flat: Sequence) -> np.ndarray:
        return bethe_residuals(self, flat)

    def eigenvalue(self, flat: Sequence, sign: int, x) -> complex:
        return complex(expected_eigenvalue_from_weights(self.weight, self.rep.rank, self.eta,
                                                        self.levels(flat), sign, complex(x)))


def _guard(system: BetheSystem, levels: list):
    for v, w in levels:
        for group in (v, w):
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    if abs(group[i] - group[j]) < CLASH_RADIUS:
                        raise RapidityClash(f"rapidities {group[i]} and {group[j]} coincide")
    for v, w in levels[:1]:
        for z in v + w:
            for a in system.sites:
                if abs(z - a) < POLE_RADIUS:
                    raise PoleProximity(f"rapidity {z} sits on inhomogeneity {a}")


def bethe_residuals(system: BetheSystem, flat: Sequence) -> np.ndarray:
    """``LHS - RHS`` of every Bethe condition, ordered level by level (v's then w's)."""
    levels = system.levels(flat)
    _guard(system, levels)
    try:
        res = bethe_conditions(system.weight, system.rep.rank, system.eta, levels)
    except (Singular, ZeroDivisionError) as exc:
        raise PoleProximity(str(exc)) from exc
    out = np.array([complex(r) for r in res], dtype=complex)
    if not np.all(np.isfinite(out)):
        raise PoleProximity("residual is not finite")
    return out


@dataclass
class SolveReport:
    roots: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    seed: int = 0
    starts: int = 0
    converged: int = 0
    failures: dict = field(default_factory=dict)

    @property
    def sector_empty(self) -> bool:
        return not self.roots

    def to_dict(self) -> dict:
        return {
            "roots": [[{"re": z.real, "im": z.imag} for z in r] for r in self.roots],
            "residual_norms": list(self.residual_norms),
            "seed": self.seed,
            "starts": self.starts,
            "converged": self.converged,
            "failures": dict(sorted(self.failures.items())),
            "sector_empty": self.sector_empty,
        }


class Deferred:
    """Complex scalar kept as ``num / den`` so denominators can be cleared.

    Running the Bethe conditions over this type yields numerators that are
    polynomial in the rapidities; they stay away from zero at infinity,
    unlike the raw conditions which decay like ``1/z`` there.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1.0):
        self.num = complex(num)
        self.den = complex(den)

    @staticmethod
    def lift(x):
        return x if isinstance(x, Deferred) else Deferred(complex(x))

    def __add__(self, o):
        o = Deferred.lift(o)
        if o.den == self.den:
            return Deferred(self.num + o.num, self.den)
        return Deferred(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Deferred(-self.num, self.den)

    def __sub__(self, o):
        return self + (-Deferred.lift(o))

    def __rsub__(self, o):
        return Deferred.lift(o) - self

    def __mul__(self, o):
        o = Deferred.lift(o)
        return Deferred(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Deferred.lift(o)
        if o.num == 0:
            raise ZeroDivisionError("division by a vanishing numerator")
        return Deferred(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return Deferred.lift(o) / self

    def __eq__(self, o):
        if isinstance(o, (int, float, complex)) and o == 0:
            return self.num == 0
        return NotImplemented

    __hash__ = None

    def value(self) -> complex:
        return self.num / self.den


def cleared_residuals(system: BetheSystem, flat: Sequence) -> tuple:
    """``(numerators, raw residuals)`` of the Bethe conditions."""
    levels = system.levels(flat)
    _guard(system, levels)
    lifted = [(tuple(Deferred(z) for z in v), tuple(Deferred(z) for z in w)) for v, w in levels]
    try:
        res = bethe_conditions(system.weight, system.rep.rank, Deferred(system.eta), lifted)
    except (Singular, ZeroDivisionError) as exc:
        raise PoleProximity(str(exc)) from exc
    num = np.array([r.num for r in res], dtype=complex)
    den = np.array([r.den for r in res], dtype=complex)
    if np.any(np.abs(den) < 1e-300) or not np.all(np.isfinite(num)):
        raise PoleProximity("residual denominator vanished")
    return num, num / den


def _evaluate(system: BetheSystem, z: np.ndarray, mode: str) -> tuple:
    """``(vector Newton drives to zero, raw residual)`` for the given mode."""
    num, raw = cleared_residuals(system, z)
    return (num if mode == "cleared" else raw), raw


def _newton_step(system: BetheSystem, z: np.ndarray, fz: np.ndarray, mode: str) -> np.ndarray:
    N = len(z)
    jac = np.empty((N, N), dtype=complex)
    for j in range(N):
        step = 1e-7 * (1 + abs(z[j]))
        zj = z.copy()
        zj[j] += step
        jac[:, j] = (_evaluate(system, zj, mode)[0] - fz) / step
    return np.linalg.lstsq(jac, -fz, rcond=None)[0]


def _polish(system: BetheSystem, z, raw, steps: int = 3):
    """A few undamped raw-residual steps past the tolerance, kept only while they help."""
    nf = np.linalg.norm(raw)
    for _ in range(steps):
        try:
            trial = z + _newton_step(system, z, raw, "raw")
            rt = _evaluate(system, trial, "raw")[1]
        except (PoleProximity, RapidityClash, np.linalg.LinAlgError):
            break
        if np.linalg.norm(rt) >= nf:
            break
        z, raw, nf = trial, rt, np.linalg.norm(rt)
    return z


def newton(system: BetheSystem, z0: np.ndarray, tol: float = TOL_ROOT, max_iter: int = MAX_ITER) -> np.ndarray:
    """Damped Newton with a forward-difference Jacobian.

    Iteration starts on the cleared numerators, which do not flatten out at
    infinity.  If the line search stalls there (the numerators can be badly
    scaled near a root) it continues on the raw residual.  The conditions
    are analytic in the rapidities, so a complex Jacobian is used.
    Convergence is always judged on the raw residual.
    """
    z = np.array(z0, dtype=complex)
    mode = "cleared"
    fz, raw = _evaluate(system, z, mode)
    nf = np.linalg.norm(fz)
    for _ in range(max_iter):
        if np.max(np.abs(raw)) < tol:
            return _polish(system, z, raw)
        dz = _newton_step(system, z, fz, mode)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = z + t * dz
            try:
                ft, rt = _evaluate(system, trial, mode)
                nt = np.linalg.norm(ft)
            except (PoleProximity, RapidityClash):
                nt = np.inf
            if nt < nf:
                break
            t /= 2
        else:
            if mode == "raw":
                raise NoConvergence("line search exhausted")
            mode = "raw"
            fz, nf = raw, np.linalg.norm(raw)
            continue
        z, fz, raw, nf = trial, ft, rt, nt
        if np.max(np.abs(z)) > ESCAPE_RADIUS:
            raise NoConvergence("iterate escaped to infinity")
    if np.max(np.abs(raw)) < tol:
        return _polish(system, z, raw)
    raise NoConvergence(f"max_iter reached with residual {np.max(np.abs(raw)):.3e}")


def canonical_root(system: BetheSystem, z: np.ndarray) -> tuple:
    """Sort rapidities inside each set so equal configurations compare equal."""
    out = []
    for v, w in system.levels(z):
        out.extend(sorted(v, key=lambda c: (c.real, c.imag)))
        out.extend(sorted(w, key=lambda c: (c.real, c.imag)))
    return tuple(out)


def solve(system: BetheSystem, seeds: int = 20, tol_root: float = TOL_ROOT, max_iter: int = MAX_ITER,
          seed: int = 0) -> SolveReport:
    """Multistart Newton from ``seeds`` random starts; deduplicated, deterministic."""
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    report = SolveReport(seed=seed, starts=seeds)
    N = system.size
    if N == 0:
        report.roots = [()]
        report.residual_norms = [0.0]
        report.converged = seeds
        return report
    rng = np.random.default_rng(seed)
    centre = complex(np.mean(system.sites))
    found = []
    for _ in range(seeds):
        r = START_RADIUS * np.sqrt(rng.random(N))
        phase = np.exp(2j * np.pi * rng.random(N))
        z0 = centre + r * phase
        try:
            z = newton(system, z0, tol_root, max_iter)
        except (NoConvergence, PoleProximity, RapidityClash) as exc:
            name = type(exc).__name__
            report.failures[name] = report.failures.get(name, 0) + 1
            continue
        root = canonical_root(system, z)
        # the cleared form can converge where the direct residual still sits near a pole
        try:
            direct = float(np.max(np.abs(bethe_residuals(system, root))))
        except (PoleProximity, RapidityClash):
            direct = np.inf
        if not direct < tol_root:
            report.failures["ResidualAboveTolerance"] = report.failures.get("ResidualAboveTolerance", 0) + 1
            continue
        report.converged += 1
        if any(max(abs(a - b) for a, b in zip(root, old[0])) < DEDUP_RADIUS for old in found):
            continue
        found.append((root, direct))
    found.sort(key=lambda r: [(c.real, c.imag) for c in r[0]])
    report.roots = [r for r, _ in found]
    report.residual_norms = [res for _, res in found]
    return report


# ---------------------------------------------------------------------------
# checks against the operators


def bethe_vector_complex(system: BetheSystem, root: Sequence):
    rep_c = system.rep if isinstance(system.rep.params.eta, complex) else system.rep.complexified()
    vec = nested_bethe_vector(rep_c, system.levels(root), check_zero=False)
    arr = vec_complex(vec)
    # scale of the construction: product of the top-level creation operator norms
    scale = 1.0
    for v, w in system.levels(root)[:1]:
        m = rep_c.rank
        for z in v:
            scale *= max(np.linalg.norm(dense_complex(rep_c.T(m, k, z)), 2) for k in range(1, m))
        for z in w:
            scale *= max(np.linalg.norm(dense_complex(rep_c.T(-r, -m, z)), 2) for r in range(1, m))
    if np.max(np.abs(arr), initial=0.0) < 1e-12 * max(scale, 1.0):
        raise ZeroVector("Bethe vector is numerically null")
    return rep_c, arr


@dataclass
class EigenCheck:
    passed: bool
    ratios: dict

    def to_dict(self) -> dict:
        return {"pass": self.passed, "ratios": {k: v for k, v in self.ratios.items()}}


def eigencheck(system: BetheSystem, root: Sequence, sample_xs: Sequence, tol: float = EIGEN_TOL) -> EigenCheck:
    """Relative residual ``|H B - E B| / (|H| |B|)`` for both transfer signs."""
    rep_c, b = bethe_vector_complex(system, root)
    ratios = {}
    for sign in (1, -1):
        for x in sample_xs:
            xc = to_complex(x)
            h = dense_complex(rep_c.transfer(sign, xc))
            e = system.eigenvalue(root, sign, xc)
            r = np.linalg.norm(h @ b - e * b) / (np.linalg.norm(h, 2) * np.linalg.norm(b))
            ratios[f"{'+' if sign > 0 else '-'}@{x}"] = float(r)
    return EigenCheck(all(r < tol for r in ratios.values()), ratios)


def eigenspace_overlap(vecs: np.ndarray, b: np.ndarray) -> float:
    """``|P b| / |b|`` with ``P`` the orthogonal projector onto ``span(vecs)``."""
    q, _ = np.linalg.qr(vecs)
    return float(np.linalg.norm(q.conj().T @ b) / np.linalg.norm(b))


def match_spectrum(system: BetheSystem, roots: Sequence, x, cluster: float = 1e-6) -> list:
    """Nearest dense eigenvalue of ``H^(+-)(x)`` for every root, with eigenspace overlap."""
    rep = system.rep
    if rep.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"module dimension {rep.dim} exceeds {DENSE_LIMIT}")
    xc = to_complex(x)
    rep_c = rep if isinstance(rep.params.eta, complex) else rep.complexified()
    spectra = {s: brute_force_spectrum(rep_c, s, xc) for s in (1, -1)}
    table = []
    for rid, root in enumerate(roots):
        _, b = bethe_vector_complex(system, root)
        for sign in (1, -1):
            e = system.eigenvalue(root, sign, xc)
            vals = np.array([p[0] for p in spectra[sign]])
            j = int(np.argmin(np.abs(vals - e)))
            near = np.abs(vals - vals[j]) <= cluster * max(1.0, abs(vals[j]))
            vecs = np.column_stack([p[1] for p, keep in zip(spectra[sign], near) if keep])
            table.append({
                "root_id": rid,
                "sign": sign,
                "x": x,
                "expected": e,
                "eigenvalue": complex(vals[j]),
                "index": j,
                "delta": float(abs(vals[j] - e)),
                "overlap": eigenspace_overlap(vecs, b),
            })
    return table


def unexplained(system: BetheSystem, table: list, x, tol: float = 1e-8) -> list:
    """Dense eigenvalues (per sign) not matched by any root."""
    rep_c = system.rep if isinstance(system.rep.params.eta, complex) else system.rep.complexified()
    out = []
    for sign in (1, -1):
        matched = [row["eigenvalue"] for row in table if row["sign"] == sign and row["delta"] < tol]
        for val, _ in brute_force_spectrum(rep_c, sign, to_complex(x)):
            if all(abs(val - m) > tol for m in matched):
                out.append((sign, val))
    return out
