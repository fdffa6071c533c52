"""Command-line front end.

    jointmaxwell verify-solution --spec wave.json
    jointmaxwell sweep --backend rational
    jointmaxwell bracket-table --output table.json
    jointmaxwell charge --current duality --times 0 1.5

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
Every report row carries an ``anchor`` naming the identity it checks.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .jetfield import POLYNOMIAL, Poly, PolynomialField, residual_stats
from .solutions import (
    MaxwellSolution,
    PlaneWaveSpec,
    SolutionError,
    catalog_plane_waves,
    plane_wave,
    polynomial_solutions,
)

SCHEMA = "jointmaxwell.report/1"
SPEC_SCHEMA = "jointmaxwell.solution/1"

ANCHORS = {
    "maxwell": "source-free Maxwell equations d.F = 0",
    "dual_maxwell": "dual Maxwell equations d.*F = 0",
    "F = DA": "potential relation F = DA",
    "*F = DA'": "dual potential relation *F = DA'",
    "lorentz A": "Lorentz gauge d.A = 0",
    "lorentz A'": "Lorentz gauge d.A' = 0",
    "determining": "symmetry determining equations DQ' = *DQ, d.Q = d.Q' = 0",
    "conservation": "current conservation D.Phi = 0",
    "bracket": "commutator table of the 38-dimensional algebra",
    "dimension": "dimension counts 38/14/15/10",
    "charge": "time independence of the slice charge",
}


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    spec: str = None
    backend: str = "rational"
    seed: int = 0
    points: int = 100
    tolerance: float = 1e-9
    jobs: int = 1
    output: str = None
    format: str = "json"
    extra: dict = field(default_factory=dict)

    def public(self) -> dict:
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


# ---------------------------------------------------------------- solution specs

_X = sympy.symbols("x0 x1 x2 x3")


def _parse_poly(text) -> Poly:
    try:
        expr = sympy.sympify(str(text), locals={str(s): s for s in _X})
        p = sympy.Poly(expr, *_X, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc}") from None
    return Poly({e: Fraction(int(c.p), int(c.q)) for e, c in p.terms()})


def poly_to_str(p: Poly) -> str:
    expr = sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** k for s, k in zip(_X, e)])
               for e, c in p.items())
    return str(sympy.sympify(expr))


def solution_to_spec(sol: MaxwellSolution) -> dict:
    """A ``custom`` spec for a polynomial solution."""
    if sol.backend != POLYNOMIAL:
        raise InputError("only polynomial solutions can be written as custom specs")
    F = sol.F.exact()
    return {
        "schema": SPEC_SCHEMA, "type": "custom", "name": sol.name,
        "F": {f"{a}{b}": poly_to_str(F[a, b]) for a in range(4) for b in range(a + 1, 4)},
        "A": [poly_to_str(p) for p in sol.A.exact()],
        "Aprime": [poly_to_str(p) for p in sol.Aprime.exact()],
    }


def solution_from_spec(d: dict) -> MaxwellSolution:
    if not isinstance(d, dict) or "type" not in d:
        raise InputError("solution spec must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "plane_wave":
            spec = PlaneWaveSpec(tuple(d["k"]), tuple(d["a"]), d.get("phase", "sin"), d.get("amplitude", 1))
            return plane_wave(spec)
        if kind == "polynomial":
            sols = polynomial_solutions(int(d["degree"]))
            idx = int(d.get("index", 0))
            if not 0 <= idx < len(sols):
                raise InputError(f"index {idx} out of range (0..{len(sols) - 1})")
            return sols[idx]
        if kind == "custom":
            F = np.empty((4, 4), dtype=object)
            for a in range(4):
                F[a, a] = Poly()
            for a in range(4):
                for b in range(a + 1, 4):
                    p = _parse_poly(d["F"].get(f"{a}{b}", "0"))
                    F[a, b], F[b, a] = p, -p
            A = [_parse_poly(v) for v in d["A"]]
            Ap = [_parse_poly(v) for v in d["Aprime"]]
            if len(A) != 4 or len(Ap) != 4:
                raise InputError("potentials need 4 components")
            return MaxwellSolution(PolynomialField(F, ("d", "d"), antisymmetric=True, name="F"),
                                   PolynomialField(A, ("d",), name="A"),
                                   PolynomialField(Ap, ("d",), name="A'"),
                                   lorentz=bool(d.get("lorentz", True)), name=d.get("name", "custom"))
    except KeyError as exc:
        raise InputError(f"solution spec is missing field {exc}") from None
    except (SolutionError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    raise InputError(f"unknown solution type {kind!r}")


def load_spec(path: str) -> MaxwellSolution:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    return solution_from_spec(d)


def sample_points(n: int, seed: int, scale: float = 2.0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-scale, scale, size=(n, 4))


def _stats_row(stats: dict, tol: float) -> dict:
    if stats["exact"]:
        return {"exact_zero": bool(stats["zero"]), "pass": bool(stats["zero"])}
    return {"max": stats["max"], "mean": stats["mean"], "pass": stats["max"] <= tol}


# ---------------------------------------------------------------- commands

def cmd_verify_solution(cfg: RunConfig) -> tuple:
    if not cfg.spec:
        raise InputError("verify-solution needs --spec")
    sol = load_spec(cfg.spec)
    rational = sol.backend == POLYNOMIAL and cfg.backend == "rational"
    pts = None if rational else sample_points(cfg.points, cfg.seed)
    rows = []
    for name, f in sol.residual_fields().items():
        stats = residual_stats(f, pts)
        rows.append({"check": name, "anchor": ANCHORS.get(name, name), "solution": sol.name,
                     "backend": "rational" if stats["exact"] else "float", **_stats_row(stats, cfg.tolerance)})
    failed = [r["check"] for r in rows if not r["pass"]]
    return rows, {"checks": len(rows), "failed": failed}, 1 if failed else 0


def _sweep_solutions(cfg: RunConfig) -> list:
    if cfg.spec:
        return [load_spec(cfg.spec)]
    if cfg.backend == "rational":
        return polynomial_solutions(0) + polynomial_solutions(1)
    return catalog_plane_waves()


def _map(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def cmd_sweep(cfg: RunConfig) -> tuple:
    from .currents import catalog, divergence_residual
    from .symmetries import apply, basis38, determining_residual

    sols = _sweep_solutions(cfg)
    pts = sample_points(cfg.points, cfg.seed)

    def pts_for(s):
        return None if (s.backend == POLYNOMIAL and cfg.backend == "rational") else pts

    def gen_row(item):
        gid, gen = item
        worst, exact_all, ok = 0.0, True, True
        for s in sols:
            for f in determining_residual(apply(gen, s), s):
                st = residual_stats(f, pts_for(s))
                if st["exact"]:
                    ok = ok and st["zero"]
                else:
                    exact_all = False
                    worst = max(worst, st["max"])
                    ok = ok and st["max"] <= cfg.tolerance
        row = {"kind": "generator", "id": gid, "anchor": ANCHORS["determining"], "solutions": len(sols)}
        row.update({"exact_zero": ok} if exact_all else {"max": worst})
        row["pass"] = ok
        return row

    def cur_rows(s):
        out = []
        for cid, c in catalog(s):
            st = divergence_residual(c, s, pts_for(s))
            out.append((cid, st))
        return out

    rows = _map(gen_row, basis38(), cfg.jobs)
    per_solution = _map(cur_rows, sols, cfg.jobs)
    ids = [cid for cid, _ in per_solution[0]]
    for k, cid in enumerate(ids):
        stats = [ps[k][1] for ps in per_solution]
        exact_all = all(st["exact"] for st in stats)
        ok = all((st["zero"] if st["exact"] else st["max"] <= cfg.tolerance) for st in stats)
        row = {"kind": "current", "id": cid, "anchor": ANCHORS["conservation"], "solutions": len(sols)}
        if exact_all:
            row["exact_zero"] = ok
        else:
            row["max"] = max(st["max"] for st in stats if not st["exact"])
        row["pass"] = ok
        rows.append(row)
    n_pass = sum(r["pass"] for r in rows)
    summary = {"generators": sum(r["kind"] == "generator" for r in rows),
               "currents": sum(r["kind"] == "current" for r in rows),
               "pass": n_pass, "fail": len(rows) - n_pass,
               "solutions": [s.name for s in sols]}
    return rows, summary, 0 if n_pass == len(rows) else 1


def cmd_bracket_table(cfg: RunConfig) -> tuple:
    from .algebra import bracket_table, dimension_audit, generic_solution, verify_all_brackets

    table = bracket_table()
    rows = [dict(r, anchor=ANCHORS["bracket"]) for r in table.rows()]
    summary = {"pairs": len(rows), "antisymmetric": table.antisymmetry_holds()}
    ok = summary["antisymmetric"]
    if not cfg.extra.get("no_verify"):
        check = verify_all_brackets([generic_solution(seed=cfg.seed)])
        summary["numeric_failures"] = [list(f) for f in check["failures"]]
        ok = ok and not check["failures"]
    audit = dimension_audit()
    summary["dimension_audit"] = {"anchor": ANCHORS["dimension"],
                                  **{k: v["found"] for k, v in audit.items()}}
    ok = ok and all(v["pass"] for v in audit.values())
    return rows, summary, 0 if ok else 1


def cmd_charge(cfg: RunConfig) -> tuple:
    from .charges import PERIOD_BOX, ChargeError, conservation_check, periodic_wave
    from .currents import duality_current, stress_energy
    from .geometry import translation

    sol = load_spec(cfg.spec) if cfg.spec else periodic_wave()
    if sol.backend == POLYNOMIAL:
        raise InputError("charges are computed on periodic (plane-wave) solutions")
    which = cfg.extra.get("current", "duality")
    if which == "duality":
        cur = duality_current(sol)
    elif which == "energy":
        cur = stress_energy(translation(1, 0, 0, 0), sol)
    else:
        raise InputError(f"unknown current {which!r} (choose duality or energy)")
    flat = cfg.extra.get("box")
    if flat is None:
        box = PERIOD_BOX
    elif len(flat) != 6:
        raise InputError("--box needs six numbers")
    else:
        box = tuple(zip(flat[0::2], flat[1::2]))
    t1, t2 = cfg.extra.get("times") or (0.0, 1.0)
    try:
        rep = conservation_check(cur, t1, t2, box, cfg.extra.get("resolution", 16), tol=1e-6)
    except ChargeError as exc:
        raise InputError(str(exc)) from None
    row = {"current": which, "anchor": ANCHORS["charge"], "solution": sol.name,
           "t1": t1, "t2": t2, **rep}
    if math.isinf(row["richardson_ratio"]):
        row["richardson_ratio"] = "inf"
    return [row], {"pass": rep["pass"]}, 0 if rep["pass"] else 1


COMMANDS = {
    "verify-solution": cmd_verify_solution,
    "sweep": cmd_sweep,
    "bracket-table": cmd_bracket_table,
    "charge": cmd_charge,
}


# ---------------------------------------------------------------- output

def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    lines = [f"# {report['command']} ({report['schema']})"]
    for r in report["rows"]:
        verdict = "PASS" if r.get("pass", True) else "FAIL"
        key = r.get("id") or r.get("check") or r.get("current") or f"{r.get('g1')},{r.get('g2')}"
        detail = " ".join(f"{k}={v}" for k, v in r.items()
                          if k not in ("id", "check", "current", "pass", "anchor"))
        lines.append(f"{verdict} {key} {detail}")
    lines.append("summary " + json.dumps(report["summary"], sort_keys=True, default=str))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="solution spec (JSON)")
    common.add_argument("--backend", choices=("rational", "float"), default="rational")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--points", type=int, default=100)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="jointmaxwell", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-solution", parents=[common], help="check field equations and potentials")
    sub.add_parser("sweep", parents=[common], help="determining-equation and conservation sweep")
    bt = sub.add_parser("bracket-table", parents=[common], help="export the verified bracket table")
    bt.add_argument("--no-verify", action="store_true", help="skip the numeric double-application check")
    ch = sub.add_parser("charge", parents=[common], help="slice charges and their time independence")
    ch.add_argument("--current", choices=("duality", "energy"), default="duality")
    ch.add_argument("--times", type=float, nargs=2, metavar=("T1", "T2"))
    ch.add_argument("--box", type=float, nargs=6, metavar="X")
    ch.add_argument("--resolution", type=int, default=16)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    base = {k: getattr(args, k) for k in ("spec", "backend", "seed", "points", "tolerance", "jobs",
                                          "output", "format")}
    extra = {k: v for k, v in vars(args).items() if k not in base and k != "command"}
    cfg = RunConfig(args.command, extra=extra, **base)
    try:
        rows, summary, code = COMMANDS[args.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": args.command, "config": cfg.public(),
              "rows": rows, "summary": summary, "exit_code": code}
    text = render(report, cfg.format)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
