"""Acceptance suite: nine criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see the report lines.
"""

import time

import numpy as np
import pytest

from jointmaxwell.algebra import bracket_table, dimension_audit, generic_solution, verify_all_brackets
from jointmaxwell.charges import PERIOD_BOX, conservation_check, periodic_wave
from jointmaxwell.currents import (
    catalog,
    combined_current_identity,
    divergence_residual,
    duality_current,
    ky_current,
    ky_dual_current,
    nonlocal_coefficient_blocks,
    scaling_coefficients,
    stress_energy,
    triviality_test,
)
from jointmaxwell.geometry import KillingYano, ckv_basis, ky_basis, translation
from jointmaxwell.jetfield import Poly, exterior_D, hodge_field, residual_stats
from jointmaxwell.solutions import (
    calibrate_cronstrom_normalization,
    catalog_plane_waves,
    cronstrom_potentials,
    polynomial_solutions,
)
from jointmaxwell.symmetries import apply, basis38, determining_residual
from jointmaxwell.tensor import dual2

POINTS = np.random.default_rng(20240611).uniform(-2.0, 2.0, size=(100, 4))
REPORT = {}


def report(key, ok, detail):
    line = f"{key} {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT[key] = line
    print(line)
    return ok


def _exact_zero(f):
    s = residual_stats(f)
    return s["exact"] and s["zero"]


def _max(f, pts=POINTS):
    return residual_stats(f, pts)["max"]


@pytest.fixture(scope="module")
def fixtures01():
    return polynomial_solutions(0) + polynomial_solutions(1)


@pytest.fixture(scope="module")
def waves():
    return catalog_plane_waves()


@pytest.fixture(scope="module")
def generic():
    return generic_solution((0, 1, 2), seed=11)


def test_c1_determining_equations(fixtures01, waves):
    t0 = time.perf_counter()
    gens = basis38()
    exact_fail, worst = [], 0.0
    for gid, gen in gens:
        for s in fixtures01:
            if not all(_exact_zero(r) for r in determining_residual(apply(gen, s), s)):
                exact_fail.append((gid, s.name))
        for s in waves:
            worst = max([worst] + [_max(r) for r in determining_residual(apply(gen, s), s)])
    dt = time.perf_counter() - t0
    ok = len(gens) == 38 and not exact_fail and worst <= 1e-9 and dt < 60
    report("C1", ok, f"38 generators, {len(fixtures01)} fixtures exact, {len(waves)} waves max={worst:.2e}, "
                     f"{dt:.1f}s")
    assert ok, exact_fail


def test_c2_conservation(fixtures01, waves):
    t0 = time.perf_counter()
    exact_fail, worst, count = [], 0.0, 0
    for s in fixtures01:
        cat = catalog(s)
        count = len(cat)
        for cid, c in cat:
            st = divergence_residual(c, s)
            if not (st["exact"] and st["zero"]):
                exact_fail.append((cid, s.name))
    for s in waves:
        for _, c in catalog(s):
            worst = max(worst, divergence_residual(c, s, POINTS)["max"])
    dt = time.perf_counter() - t0
    ok = count == 50 and not exact_fail and worst <= 1e-9 and dt < 120
    report("C2", ok, f"{count} currents, exact on fixtures, waves max={worst:.2e}, {dt:.1f}s")
    assert ok, exact_fail


def test_c3_algebra_closure(generic):
    t0 = time.perf_counter()
    res = verify_all_brackets([generic])
    jacobi = bracket_table().jacobi_holds()
    dt = time.perf_counter() - t0
    ok = res["pairs"] == 38 * 37 // 2 and not res["failures"] and jacobi and dt < 300
    report("C3", ok, f"{res['pairs']} pairs exact, {len(res['failures'])} failures, Jacobi={jacobi}, {dt:.1f}s")
    assert ok, res["failures"]


def test_c4_dimension_audit():
    audit = dimension_audit()
    ok = all(v["pass"] for v in audit.values())
    report("C4", ok, " ".join(f"{k}={v['found']}/{v['expected']}" for k, v in audit.items()))
    assert ok


def test_c5_nontriviality():
    blocks = nonlocal_coefficient_blocks()
    nontrivial = [not triviality_test(b)["trivial"] for _, b in blocks]
    scaling = triviality_test(scaling_coefficients())
    ok = len(blocks) == 15 and all(nontrivial) and scaling["trivial"]
    report("C5", ok, f"{sum(nontrivial)}/{len(blocks)} blocks nontrivial, scaling trivial (k={scaling['k']})")
    assert ok


def test_c6_cronstrom_exactness():
    norm = calibrate_cronstrom_normalization()
    x = [Poly.var(i) for i in range(4)]
    bad, n = [], 0
    for d in range(3):
        for s in polynomial_solutions(d):
            n += 1
            A, Ap = cronstrom_potentials(s.F)
            comps = A.exact()
            radial = sum((x[m] * comps[m] for m in range(4)), Poly())
            if not (_exact_zero(exterior_D(A) - s.F) and _exact_zero(exterior_D(Ap) - hodge_field(s.F))
                    and radial.is_zero()):
                bad.append(s.name)
    ok = norm == 2 and not bad
    report("C6", ok, f"normalization={norm}, {n} fixtures (degree <= 2) exact")
    assert ok, bad


def test_c7_duality_invariance(generic, waves):
    d = generic.dual()
    exact = all(_exact_zero(ky_current(y, generic).phi - ky_current(y, d).phi)
                and _exact_zero(ky_dual_current(y, generic).phi - ky_dual_current(y, d).phi)
                for y in ky_basis())
    worst = max(_max(f(y, s).phi - f(y, s.dual()).phi)
                for y in ky_basis() for s in waves for f in (ky_current, ky_dual_current))
    swap = True
    for y in ky_basis()[:6]:
        ys = KillingYano(dual2(y.y1))
        swap &= _exact_zero(ky_current(ys, generic).phi + ky_dual_current(y, generic).phi)
        swap &= _exact_zero(ky_dual_current(ys, generic).phi - ky_current(y, generic).phi)
    ok = exact and worst <= 1e-10 and swap
    report("C7", ok, f"KY currents invariant (exact; waves max={worst:.2e}), constant-KY interchange={swap}")
    assert ok


def test_c8_charge_conservation():
    wave = periodic_wave()
    rows = []
    for name, c in (("duality", duality_current(wave)), ("energy", stress_energy(translation(1, 0, 0, 0), wave))):
        r = conservation_check(c, 0.0, 2.3, PERIOD_BOX)
        rows.append((name, r))
    ok = all(r["difference"] <= 1e-6 and r["converged"] for _, r in rows)
    report("C8", ok, ", ".join(f"{n}: Q={r['Q(t1)']:.12f} |dQ|={r['difference']:.1e}" for n, r in rows))
    assert ok


def test_c9_reduction_identities(generic):
    homothetic = ckv_basis()[:11]  # translations, rotations, dilation
    bad = [(i, dual) for i, xi in enumerate(homothetic) for dual in (False, True)
           if not combined_current_identity(xi, generic, dual=dual)["equal"]]
    ok = not bad
    report("C9", ok, f"{2 * len(homothetic) - len(bad)}/{2 * len(homothetic)} combined-current identities "
                     "hold mod curls")
    assert ok, bad


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
