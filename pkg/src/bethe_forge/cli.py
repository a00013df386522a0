"""Command line entry point: ``bethe-forge <verify|solve|spectrum>``.

Configuration comes from a JSON file (rationals written as ``"p/q"`` strings)
and may be overridden by flags.  Exit codes: 0 pass, 1 check failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field

from . import verify as V
from .bethe import DressedAlgebra, NestedSchedule
from .errors import BetheForgeError, DimensionTooLarge, ZeroVector
from .report import VerificationReport, jsonable
from .representation import ChainSpec, Representation, brute_force_spectrum, build_W_tilde
from .rmatrix import build_R, corrupted_R
from .scalars import Params, format_rational, rational, to_complex
from .solver import BetheSystem, eigencheck, match_spectrum, solve, unexplained
from .tensor import DENSE_LIMIT

SCHEMA = 1
SUITES = ("yb", "rtt", "a1", "props", "thm3", "thm4", "lemmas", "transfer")
DEFAULT_SAMPLE_X = ("2/7", "-3/2", "9/4")


class ConfigError(ValueError):
    """Invalid configuration; mapped to exit code 2."""


@dataclass
class RunConfig:
    n: int = 2
    eta: str = "-1"
    L: int = 2
    inhomogeneities: list = field(default_factory=list)
    schedule: list = field(default_factory=list)
    seed: int = 0
    vacuum_index: int | None = None
    points: int = 3
    suites: list = field(default_factory=lambda: list(SUITES))
    seeds: int = 20
    sample_x: list = field(default_factory=lambda: list(DEFAULT_SAMPLE_X))
    x: list = field(default_factory=lambda: ["2/7"])
    match: bool = False
    tolerances: dict = field(default_factory=dict)
    corrupt_r: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ConfigError(f"rank n must be an integer >= 1, got {self.n!r}")
        if not isinstance(self.L, int) or isinstance(self.L, bool) or self.L < 1:
            raise ConfigError(f"chain length L must be an integer >= 1, got {self.L!r}")
        try:
            self.eta = format_rational(_parse(self.eta))
            if not self.inhomogeneities:
                self.inhomogeneities = [format_rational(rational(j) / 3) for j in range(self.L)]
            self.inhomogeneities = [format_rational(_parse(a)) for a in self.inhomogeneities]
            self.sample_x = [format_rational(_parse(a)) for a in self.sample_x]
            self.x = [format_rational(_parse(a)) for a in self.x]
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        if len(self.inhomogeneities) != self.L:
            raise ConfigError(f"expected {self.L} inhomogeneities, got {len(self.inhomogeneities)}")
        try:
            self.schedule = [[int(p), int(q)] for p, q in self.schedule]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"schedule must be a list of [P, Q] pairs: {exc}") from exc
        if any(p < 0 or q < 0 for p, q in self.schedule):
            raise ConfigError("schedule counts must be >= 0")
        if len(self.schedule) > max(self.n - 1, 0):
            raise ConfigError(f"schedule has {len(self.schedule)} levels; rank {self.n} allows {self.n - 1}")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suites {bad}; choose from {', '.join(SUITES)}")
        if self.points < 1 or self.seeds < 1:
            raise ConfigError("points and seeds must be >= 1")
        if self.vacuum_index is not None and not (1 <= abs(self.vacuum_index) <= self.n):
            raise ConfigError(f"vacuum_index must be a signed index of rank {self.n}")

    # derived objects ----------------------------------------------------
    def params(self) -> Params:
        return Params(self.n, _parse(self.eta))

    def chain(self) -> ChainSpec:
        return ChainSpec(self.params(), self.L, tuple(_parse(a) for a in self.inhomogeneities))

    def nested_schedule(self) -> NestedSchedule:
        counts = [tuple(c) for c in self.schedule]
        counts += [(0, 0)] * (max(self.n - 1, 0) - len(counts))
        return NestedSchedule(tuple(counts))


def _parse(value):
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"rationals must be given as 'p/q' strings or integers, got {value!r}")
    return rational(value)


# ---------------------------------------------------------------------------
# verify


def _skipped(name: str, reason: str) -> dict:
    return {"identity": name, "pass": True, "skipped": reason, "checks": 0, "counterexample": None}


def _run_suite(name: str, cfg: RunConfig, rep: Representation) -> list:
    params = rep.params
    seed = cfg.seed
    k = cfg.points
    r_factory = corrupted_R if cfg.corrupt_r else build_R
    out: list[VerificationReport] = []
    if name == "yb":
        triples = V.generic_triples(params, k, seed)
        out.append(V.verify_yang_baxter(params, triples, r_factory=r_factory if cfg.corrupt_r else None))
        out.append(V.verify_inverse(params, [t[:2] for t in triples]))
        if params.n >= 2:
            out.append(V.verify_yang_baxter(params, triples, variant="hat_mixed"))
    elif name == "rtt":
        out.append(V.verify_rtt(rep, V.draw_pairs(rep, k, seed), r_factory=r_factory))
    elif name == "a1":
        out.append(V.verify_commutation_A1(rep, V.draw_pairs(rep, k, seed)))
    elif name == "transfer":
        out.append(V.verify_transfer_commutativity(rep, V.draw_pairs(rep, k, seed)))
    elif name == "props":
        pts = list(V.generic_tuple(rep, k, seed))
        out.append(V.verify_vacuum(rep, pts))
        wt = build_W_tilde(rep)
        out.append(V.verify_prop1(rep, wt, pts))
        if params.n >= 2:
            out.append(V.verify_prop2_prop3(rep, wt, V.draw_pairs(rep, k, seed)))
    elif name in ("thm3", "thm4"):
        if params.n < 2:
            return [_skipped(name, "needs rank n >= 2")]
        raps = V.generic_tuple(rep, 2, seed + 5)
        for P, Q in ((0, 0), (1, 0), (0, 1), (1, 1)):
            level = DressedAlgebra(rep, raps[:P], raps[1:1 + Q])
            if name == "thm3":
                pairs = [V.dressed_points(level, 2, seed + 101 * t) for t in range(k)]
                out.append(V.verify_theorem3(level, pairs))
            else:
                out.append(V.verify_theorem4(level, V.dressed_points(level, k, seed)))
    elif name == "lemmas":
        if params.n < 2:
            return [_skipped(name, "needs rank n >= 2")]
        for which in V.LEMMAS:
            out.append(V.verify_lemmas(rep, which, 1, 1, seed=seed))
    return [r.to_dict() for r in out]


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    rep = Representation(cfg.chain(), vacuum_index=cfg.vacuum_index)
    results = []
    for name in cfg.suites:
        for res in _run_suite(name, cfg, rep):
            res["suite"] = name
            results.append(res)
    ok = all(r["pass"] for r in results)
    return (0 if ok else 1), _report("verify", cfg, results=results, passed=ok)


# ---------------------------------------------------------------------------
# solve and spectrum


def _solve_vacuum_index(cfg: RunConfig):
    if cfg.vacuum_index is not None:
        return cfg.vacuum_index
    # nested vectors of rank >= 3 are built over the highest plus state
    return cfg.n if cfg.n >= 3 and any(p or q for p, q in cfg.schedule) else None


def _system(cfg: RunConfig) -> BetheSystem:
    rep = Representation(cfg.chain(), vacuum_index=_solve_vacuum_index(cfg))
    return BetheSystem(rep, cfg.nested_schedule())


def _solve_roots(cfg: RunConfig, system: BetheSystem):
    tol = cfg.tolerances
    rep = solve(system, seeds=cfg.seeds, seed=cfg.seed, tol_root=float(tol.get("root", 1e-10)))
    sample = [_parse(x) for x in cfg.sample_x]
    eig_tol = float(tol.get("eigen", 1e-8))
    roots, null = [], []
    for root, res in zip(rep.roots, rep.residual_norms):
        try:
            check = eigencheck(system, root, sample, tol=eig_tol)
        except ZeroVector:
            null.append({"rapidities": list(root), "residual": res})
            continue
        roots.append({"id": len(roots), "rapidities": list(root), "residual": res,
                      "eigencheck": check.to_dict(), "verified": check.passed})
    return rep, roots, null


def cmd_solve(cfg: RunConfig) -> tuple[int, dict]:
    system = _system(cfg)
    if cfg.match and system.rep.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"module dimension {system.rep.dim} exceeds {DENSE_LIMIT}")
    report, roots, null = _solve_roots(cfg, system)
    spectrum = []
    extra = {}
    if cfg.match and roots:
        x = _parse(cfg.x[0])
        raw = [tuple(r["rapidities"]) for r in roots]
        table = match_spectrum(system, raw, x)
        for row in table:
            roots[row["root_id"]].setdefault("matches", []).append(row)
        spectrum = [{"sign": s, "x": x, "eigenvalue": val} for s, val in unexplained(system, table, x)]
        extra["unexplained"] = len(spectrum)
    ok = all(r["verified"] for r in roots)
    extra.update(sector_empty=not roots, null_roots=null, solver=report.to_dict())
    return (0 if ok else 1), _report("solve", cfg, roots=roots, spectrum=spectrum, passed=ok, **extra)


def spectrum_rows(cfg: RunConfig, system: BetheSystem, roots: list) -> list:
    rep = system.rep
    if rep.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"module dimension {rep.dim} exceeds {DENSE_LIMIT}")
    rep_c = rep.complexified()
    vac = BetheSystem(rep, NestedSchedule.empty(rep.rank))
    rows = []
    for xs in cfg.x:
        x = _parse(xs)
        known = [("vacuum", vac.eigenvalue((), s, to_complex(x)), s) for s in (1, -1)]
        for r in roots:
            for s in (1, -1):
                known.append((r["id"], system.eigenvalue(r["rapidities"], s, to_complex(x)), s))
        for sign in (1, -1):
            pairs = brute_force_spectrum(rep_c, sign, to_complex(x))
            vals = sorted((complex(p[0]) for p in pairs), key=lambda c: (round(c.real, 12), round(c.imag, 12)))
            for val in vals:
                tag = ""
                for rid, e, s in known:
                    if s == sign and abs(val - e) <= 1e-8 * max(1.0, abs(e)):
                        tag = str(rid)
                        break
                rows.append({"sign": sign, "x": xs, "re": val.real, "im": val.imag, "matched_root_id": tag})
    return rows


def cmd_spectrum(cfg: RunConfig) -> tuple[int, dict]:
    system = _system(cfg)
    if system.rep.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"module dimension {system.rep.dim} exceeds {DENSE_LIMIT}")
    roots = _solve_roots(cfg, system)[1] if cfg.schedule else []
    rows = spectrum_rows(cfg, system, roots)
    return 0, _report("spectrum", cfg, roots=roots, spectrum=rows, passed=True)


def spectrum_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["sign", "x", "re", "im", "matched_root_id"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# plumbing


def _report(command: str, cfg: RunConfig, results=(), roots=(), spectrum=(), passed=True, **extra) -> dict:
    out = {"schema": SCHEMA, "command": command, "config": asdict(cfg), "results": list(results),
           "roots": list(roots), "spectrum": list(spectrum), "pass": passed}
    out.update(extra)
    return jsonable(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bethe-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hlp in (("verify", "exact identity suites"), ("solve", "Bethe roots and eigenchecks"),
                      ("spectrum", "brute-force transfer spectra")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--config", help="JSON config file; rationals as 'p/q' strings")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int)
        p.add_argument("-n", type=int, help="rank n")
        p.add_argument("--eta", help="eta as 'p/q'")
        p.add_argument("-L", type=int, help="chain length")
        p.add_argument("--inhomogeneities", help="comma separated 'p/q' list")
        p.add_argument("--vacuum-index", type=int)
        if name == "verify":
            p.add_argument("--suite", help="comma separated subset of " + ",".join(SUITES))
            p.add_argument("--points", type=int, help="random points per suite")
            p.add_argument("--corrupt-r", action="store_true",
                           help="debug: use an R-matrix with one entry changed (the suites must fail)")
        else:
            p.add_argument("--schedule", help="levels as 'P,Q;P,Q' from the top level down")
            p.add_argument("--seeds", type=int, help="Newton starts")
            p.add_argument("--x", help="comma separated spectral points for matching/spectra")
        if name == "solve":
            p.add_argument("--match", action="store_true", help="match roots against dense spectra")
        if name == "spectrum":
            p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    overrides = {
        "n": args.n, "eta": args.eta, "L": args.L, "seed": args.seed, "vacuum_index": args.vacuum_index,
        "points": getattr(args, "points", None), "seeds": getattr(args, "seeds", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.inhomogeneities:
        data["inhomogeneities"] = args.inhomogeneities.split(",")
    if getattr(args, "suite", None):
        data["suites"] = [s.strip() for s in args.suite.split(",") if s.strip()]
    if getattr(args, "corrupt_r", False):
        data["corrupt_r"] = True
    if getattr(args, "schedule", None):
        data["schedule"] = [[int(t) for t in lvl.split(",")] for lvl in args.schedule.split(";") if lvl]
    if getattr(args, "x", None):
        data["x"] = args.x.split(",")
    if getattr(args, "match", False):
        data["match"] = True
    if "L" not in data and "inhomogeneities" in data:
        data["L"] = len(data["inhomogeneities"])
    try:
        return RunConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        command = {"verify": cmd_verify, "solve": cmd_solve, "spectrum": cmd_spectrum}[args.command]
        code, report = command(cfg)
    except (ConfigError, DimensionTooLarge, ValueError) as exc:
        print(f"bethe-forge: error: {exc}", file=sys.stderr)
        return 2
    except BetheForgeError as exc:
        print(f"bethe-forge: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "spectrum" and args.format == "csv":
        _emit(spectrum_csv(report["spectrum"]), args.out)
    else:
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
