"""Exact source-free Maxwell solutions bundled with joint potentials.

A :class:`MaxwellSolution` carries ``F``, a potential ``A`` with ``F = DA``,
and a dual potential ``A'`` with ``*F = DA'``.  Catalog solutions are in
Lorentz gauge, ``d.A = d.A' = 0``.

The Cronstrom construction builds ``A`` from ``F`` through the radial
homotopy.  For polynomial ``F`` it is the terminating series

    A_n = N * sum_k (-1)^k / (k+2)! * x^m (x^{s1}..x^{sk} d_{s1..sk} F_{mn})

whose normalization ``N`` is fixed by demanding ``D A = F`` on constant
fields (see :func:`calibrate_cronstrom_normalization`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
import sympy

from . import _linalg
from .jetfield import (
    CLOSURE,
    POLYNOMIAL,
    JetError,
    JetField,
    Poly,
    PolynomialField,
    constant_field,
    cos,
    diff_array,
    box,
    divergence,
    exterior_D,
    fmap,
    hodge_field,
    materialize,
    poly_coords,
    residual_stats,
    sin,
    total_derivative,
)
from .tensor import DEFAULT_CTX, DIM, MetricContext, dual2, lower

PAIRS = tuple(combinations(range(DIM), 2))


class SolutionError(ValueError):
    """A precondition on a solution or its construction failed."""


# ---------------------------------------------------------------- bundle

def _maxwell_operator(f: JetField) -> JetField:
    """``d^m f_{mn}``."""
    return fmap(lambda a: np.trace(lower(a, [0]), axis1=0, axis2=1), total_derivative(f),
                variance=("d",))


def _div_form(a: JetField) -> JetField:
    """``d^m a_m`` for a covector field."""
    return divergence(fmap(lambda v: lower(v), a, variance=("u",)))


@dataclass(frozen=True, eq=False)
class MaxwellSolution:
    F: JetField
    A: JetField
    Aprime: JetField
    chi: JetField = None
    chiPrime: JetField = None
    lorentz: bool = True
    ctx: MetricContext = DEFAULT_CTX
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def Fdual(self) -> JetField:
        return hodge_field(self.F, self.ctx)

    @property
    def backend(self) -> str:
        fields = (self.F, self.A, self.Aprime)
        return POLYNOMIAL if all(f.backend == POLYNOMIAL for f in fields) else CLOSURE

    def residual_fields(self) -> dict:
        out = {
            "maxwell": _maxwell_operator(self.F),
            "dual_maxwell": _maxwell_operator(self.Fdual),
            "F = DA": exterior_D(self.A) - self.F,
            "*F = DA'": exterior_D(self.Aprime) - self.Fdual,
        }
        if self.lorentz:
            out["lorentz A"] = _div_form(self.A)
            out["lorentz A'"] = _div_form(self.Aprime)
        if self.chi is not None:
            out["wave chi"] = wave_operator(self.chi) - _div_form(self.A)
        if self.chiPrime is not None:
            out["wave chi'"] = wave_operator(self.chiPrime) - _div_form(self.Aprime)
        return out

    def invariants(self, points=None) -> dict:
        """Residual statistics per invariant; exact on the polynomial backend."""
        use_points = None if self.backend == POLYNOMIAL else points
        if self.backend != POLYNOMIAL and points is None:
            raise SolutionError("sample points are needed for a non-polynomial solution")
        return {k: residual_stats(f, use_points) for k, f in self.residual_fields().items()}

    def is_valid(self, points=None, tol: float = 1e-10) -> bool:
        for stats in self.invariants(points).values():
            if stats["exact"] and not stats["zero"]:
                return False
            if not stats["exact"] and stats["max"] > tol:
                return False
        return True

    # linear structure
    def __add__(self, other: "MaxwellSolution") -> "MaxwellSolution":
        if self.ctx != other.ctx:
            raise SolutionError("cannot superpose solutions with different orientations")
        return MaxwellSolution(self.F + other.F, self.A + other.A, self.Aprime + other.Aprime,
                               lorentz=self.lorentz and other.lorentz, ctx=self.ctx,
                               name=f"({self.name}+{other.name})")

    def scaled(self, s) -> "MaxwellSolution":
        return MaxwellSolution(self.F * s, self.A * s, self.Aprime * s, lorentz=self.lorentz,
                               ctx=self.ctx, name=f"{s}*{self.name}")

    def dual(self) -> "MaxwellSolution":
        """The duality-rotated bundle ``(*F, A', -A)``."""
        return MaxwellSolution(self.Fdual, self.Aprime, -self.A, lorentz=self.lorentz,
                               ctx=self.ctx, name=f"dual({self.name})")

    def with_potentials(self, A: JetField, Aprime: JetField, lorentz=None) -> "MaxwellSolution":
        return MaxwellSolution(self.F, A, Aprime, lorentz=self.lorentz if lorentz is None else lorentz,
                               ctx=self.ctx, name=self.name)

    def materialized(self) -> "MaxwellSolution":
        return MaxwellSolution(materialize(self.F), materialize(self.A), materialize(self.Aprime),
                               self.chi, self.chiPrime, self.lorentz, self.ctx, self.name, self.meta)


wave_operator = box


# ---------------------------------------------------------------- plane waves

def _as_number(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class PlaneWaveSpec:
    """``A_n = amplitude * a_n f(k.x)`` with ``k`` null and ``k.a = 0``.

    Both ``k`` and ``a`` are given with upper indices.
    """

    k: tuple
    a: tuple
    phase: str = "sin"
    amplitude: object = 1

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(_as_number(v) for v in self.k))
        object.__setattr__(self, "a", tuple(_as_number(v) for v in self.a))
        object.__setattr__(self, "amplitude", _as_number(self.amplitude))
        if len(self.k) != DIM or len(self.a) != DIM:
            raise SolutionError("k and a must have 4 components")
        if self.phase not in ("sin", "cos"):
            raise SolutionError("phase must be 'sin' or 'cos'")


def _dot(u, v) -> object:
    return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]


def _wedge_dd(u_d, v_d) -> np.ndarray:
    return np.array([[u_d[m] * v_d[n] - u_d[n] * v_d[m] for n in range(DIM)] for m in range(DIM)],
                    dtype=object)


def dual_polarization(k, a, ctx: MetricContext = DEFAULT_CTX) -> tuple:
    """``a'`` (upper index) solving ``*(k^a) = k^a'``; unique up to multiples of ``k``.

    The particular solution returned has its free component set to zero.
    """
    k_d = lower(np.array(k, dtype=object))
    a_d = lower(np.array(a, dtype=object))
    target = dual2(_wedge_dd(k_d, a_d), ctx)
    exact = all(isinstance(v, (int, Fraction)) for v in list(k) + list(a))
    rows, rhs = [], []
    for m, n in PAIRS:
        row = [0] * DIM
        # (k^a')_{mn} = k_m a'_n - k_n a'_m
        row[n] += k_d[m]
        row[m] -= k_d[n]
        rows.append(row)
        rhs.append(target[m, n])
    if exact:
        mat = sympy.Matrix([[sympy.Rational(v) for v in r] for r in rows])
        b = sympy.Matrix([sympy.Rational(v) for v in rhs])
        try:
            sol, params = mat.gauss_jordan_solve(b)
        except ValueError:
            raise SolutionError("no dual polarization exists (k not null or a not transverse)") from None
        sol = sol.subs({p: 0 for p in params})
        ap_d = [Fraction(int(v.p), int(v.q)) for v in sol]
    else:
        mat = np.array(rows, dtype=float)
        b = np.array(rhs, dtype=float)
        ap_d, *_ = np.linalg.lstsq(mat, b, rcond=None)
        if np.max(np.abs(mat @ ap_d - b)) > 1e-12:
            raise SolutionError("no dual polarization exists (k not null or a not transverse)")
        ap_d = [float(v) for v in ap_d]
    return tuple(lower(np.array(ap_d, dtype=object)))


def plane_wave(spec: PlaneWaveSpec, ctx: MetricContext = DEFAULT_CTX) -> MaxwellSolution:
    k, a = spec.k, spec.a
    if abs(float(_dot(k, k))) > 1e-14:
        raise SolutionError("plane wave precondition violated: k is not null (k.k != 0)")
    if abs(float(_dot(k, a))) > 1e-14:
        raise SolutionError("plane wave precondition violated: a is not transverse (k.a != 0)")
    k_d = lower(np.array(k, dtype=object))
    a_d = lower(np.array(a, dtype=object))
    if all(abs(float(v)) <= 1e-14 for v in _wedge_dd(k_d, a_d).flat):
        raise SolutionError("plane wave precondition violated: a is parallel to k (F vanishes)")
    ap = dual_polarization(k, a, ctx)
    ap_d = lower(np.array(ap, dtype=object))
    amp = spec.amplitude
    f, fprime = (sin, cos) if spec.phase == "sin" else (cos, lambda s: -sin(s))
    kf = [float(v) for v in k_d]

    def phase(x):
        return kf[0] * x[0] + kf[1] * x[1] + kf[2] * x[2] + kf[3] * x[3]

    def potential(pol_d):
        pol = np.array([float(amp) * float(v) for v in pol_d], dtype=object)

        def fn(x):
            s = f(phase(x))
            return np.array([s * c for c in pol], dtype=object)

        return fn

    # closed form F_{mn} = 1/2 (k_m a_n - k_n a_m) f'(k.x), independent of D A
    fcoef = _wedge_dd(k_d, a_d) * Fraction(1, 2)
    fcoef = np.array([[float(amp) * float(v) for v in r] for r in fcoef], dtype=object)

    def field_fn(x):
        s = fprime(phase(x))
        return fcoef * s

    label = f"plane_wave(k={tuple(str(v) for v in k)}, a={tuple(str(v) for v in a)}, {spec.phase})"
    return MaxwellSolution(
        F=JetField(field_fn, ("d", "d"), antisymmetric=True, name="F"),
        A=JetField(potential(a_d), ("d",), name="A"),
        Aprime=JetField(potential(ap_d), ("d",), name="A'"),
        lorentz=True, ctx=ctx, name=label,
        meta={"type": "plane_wave", "k": k, "a": a, "aprime": ap, "phase": spec.phase},
    )


def catalog_plane_waves(ctx: MetricContext = DEFAULT_CTX) -> list:
    """Three plane waves with different directions, polarizations and phases."""
    specs = [
        PlaneWaveSpec((1, 1, 0, 0), (0, 0, 1, 0), "sin"),
        PlaneWaveSpec((2, 0, 2, 0), (0, 1, 0, 1), "cos"),
        PlaneWaveSpec((3, 1, 2, 2), (0, 0, 1, -1), "sin", Fraction(1, 2)),
    ]
    return [plane_wave(s, ctx) for s in specs]


# ---------------------------------------------------------------- Cronstrom

def _euler_step(arr: np.ndarray, shift: int) -> np.ndarray:
    """``(x^s d_s - shift)`` applied componentwise."""
    x = poly_coords()
    out = np.empty(arr.shape, dtype=object)
    derivs = [diff_array(arr, i) for i in range(DIM)]
    for idx, p in np.ndenumerate(arr):
        v = p * (-shift)
        for i in range(DIM):
            v = v + x[i] * derivs[i][idx]
        out[idx] = v
    return out


def _interior_x(arr: np.ndarray) -> np.ndarray:
    x = poly_coords()
    return sum((x[m] * arr[m] for m in range(DIM)), np.zeros(arr.shape[1:], dtype=object))


def cronstrom_series(F: JetField, weight) -> PolynomialField:
    """``sum_k weight(k) x_|(x^k d^k F)`` for a polynomial 2-form.

    ``x^k d^k`` is the falling-factorial power of the Euler operator, so the
    series stops once ``k`` exceeds the degree of ``F``.
    """
    if F.backend != POLYNOMIAL:
        raise SolutionError("Cronstrom series needs a polynomial field")
    term = F.exact()
    total = np.zeros(DIM, dtype=object)
    k = 0
    while any(not p.is_zero() for p in term.flat):
        total = total + _interior_x(term) * weight(k)
        term = _euler_step(term, k)
        k += 1
    out = np.empty(DIM, dtype=object)
    for i in range(DIM):
        out[i] = total[i] if isinstance(total[i], Poly) else Poly.const(total[i])
    return PolynomialField(out, ("d",), name="A_F")


def homotopy_weight(k: int) -> Fraction:
    """Radial-homotopy coefficient for 2-forms: ``int_0^1 t (t-1)^k / k! dt``."""
    return Fraction((-1) ** k, math.factorial(k + 2))


def calibrate_cronstrom_normalization(weight=homotopy_weight) -> Fraction:
    """The constant ``N`` making ``D(N * series) = F`` on constant 2-forms."""
    ratios = set()
    for a, b in PAIRS:
        comps = np.zeros((DIM, DIM), dtype=object)
        comps[a, b], comps[b, a] = 1, -1
        F = constant_field(comps, ("d", "d"), antisymmetric=True)
        DA = exterior_D(cronstrom_series(F, weight)).exact()
        ratios.add(Fraction(1) / DA[a, b].items()[0][1])
    if len(ratios) != 1:
        raise SolutionError("normalization is not a single constant")
    return ratios.pop()


CRONSTROM_NORMALIZATION = Fraction(2)


def _require_solution(F: JetField, ctx: MetricContext):
    for f in (_maxwell_operator(F), _maxwell_operator(hodge_field(F, ctx))):
        if not all(p.is_zero() for p in f.exact().flat):
            raise SolutionError("F does not satisfy the source-free Maxwell equations")


def cronstrom_potentials(F: JetField, ctx: MetricContext = DEFAULT_CTX, check: bool = True):
    """``(A_F, A'_F)`` with ``D A_F = F``, ``D A'_F = *F`` and ``x_|A_F = 0``."""
    if F.backend != POLYNOMIAL:
        raise SolutionError("Cronstrom potentials need the polynomial backend")
    if check:
        _require_solution(F, ctx)

    def w(k):
        return CRONSTROM_NORMALIZATION * homotopy_weight(k)

    A = cronstrom_series(F, w)
    Ap = cronstrom_series(materialize(hodge_field(F, ctx)), w)
    return A, PolynomialField(Ap.comps, ("d",), name="A'_F")


# ---------------------------------------------------------------- polynomial fixtures

def _monomials(deg: int) -> list:
    out = []
    for e0 in range(deg + 1):
        for e1 in range(deg + 1 - e0):
            for e2 in range(deg + 1 - e0 - e1):
                out.append((e0, e1, e2, deg - e0 - e1 - e2))
    return out


def _flatten(arr: np.ndarray) -> dict:
    out = {}
    for idx, p in np.ndenumerate(arr):
        for e, c in p.items():
            out[(idx, e)] = c
    return out


def maxwell_constraint_nullspace(degree: int, ctx: MetricContext = DEFAULT_CTX) -> list:
    """Coefficient vectors of homogeneous degree-``degree`` solutions ``F``."""
    unknowns = [(pair, e) for pair in PAIRS for e in _monomials(degree)]
    columns = []
    for (a, b), e in unknowns:
        comps = np.array([[Poly() for _ in range(DIM)] for _ in range(DIM)], dtype=object)
        comps[a, b] = Poly({e: 1})
        comps[b, a] = Poly({e: -1})
        F = PolynomialField(comps, ("d", "d"), antisymmetric=True)
        col = {}
        col.update({("div",) + k: v for k, v in _flatten(_maxwell_operator(F).exact()).items()})
        bianchi = fmap(lambda d: d + np.transpose(d, (1, 2, 0)) + np.transpose(d, (2, 0, 1)),
                       total_derivative(F), variance=("d", "d", "d"))
        col.update({("curl",) + k: v for k, v in _flatten(bianchi.exact()).items()})
        columns.append(col)
    keys = sorted({k for c in columns for k in c}, key=repr)
    rows = [[c.get(k, Fraction(0)) for c in columns] for k in keys]
    return unknowns, _linalg.nullspace(rows, len(unknowns))


def polynomial_solutions(degree: int, ctx: MetricContext = DEFAULT_CTX) -> list:
    """Spanning set of solutions with ``F`` homogeneous of the given degree."""
    if degree not in (0, 1, 2, 3):
        raise SolutionError("polynomial fixtures are available for degrees 0..3")
    unknowns, basis = maxwell_constraint_nullspace(degree, ctx)
    out = []
    for j, vec in enumerate(basis):
        comps = np.array([[Poly() for _ in range(DIM)] for _ in range(DIM)], dtype=object)
        for ((a, b), e), c in zip(unknowns, vec):
            if c:
                comps[a, b] = comps[a, b] + Poly({e: c})
                comps[b, a] = comps[b, a] - Poly({e: c})
        F = PolynomialField(comps, ("d", "d"), antisymmetric=True, name="F")
        A, Ap = cronstrom_potentials(F, ctx, check=False)
        out.append(MaxwellSolution(F, A, Ap, lorentz=True, ctx=ctx, name=f"poly{degree}_{j}",
                                   meta={"type": "polynomial", "degree": degree, "index": j}))
    return out


# ---------------------------------------------------------------- gauge

def solve_wave_equation(source: Poly) -> Poly:
    """A polynomial ``chi`` with ``box chi = source``."""
    if source.is_zero():
        return Poly()
    deg = source.degree + 2
    unknowns = [e for d in range(deg + 1) for e in _monomials(d)]
    columns = []
    for e in unknowns:
        f = scalar_poly_field(Poly({e: 1}))
        columns.append({k: v for k, v in wave_operator(f).exact()[()].items()})
    keys = sorted({k for c in columns for k in c} | {e for e, _ in source.items()})
    target = dict(source.items())
    mat = sympy.Matrix([[sympy.Rational(c.get(k, 0)) for c in columns] for k in keys])
    rhs = sympy.Matrix([sympy.Rational(target.get(k, 0)) for k in keys])
    try:
        sol, params = mat.gauss_jordan_solve(rhs)
    except ValueError:
        raise SolutionError("wave equation has no polynomial solution of the expected degree") from None
    sol = sol.subs({p: 0 for p in params})
    return Poly({e: Fraction(int(v.p), int(v.q)) for e, v in zip(unknowns, sol) if v != 0})


def regauge_to_lorentz(A: JetField, chi: JetField, points=None, tol: float = 1e-10) -> JetField:
    """``A - D chi`` after checking ``box chi = d.A``."""
    residual = wave_operator(chi) - _div_form(A)
    if residual.backend == POLYNOMIAL and points is None:
        ok = all(p.is_zero() for p in residual.exact().flat)
    else:
        if points is None:
            raise SolutionError("sample points are needed for a non-polynomial check")
        ok = residual_stats(residual, points)["max"] <= tol
    if not ok:
        raise SolutionError("gauge function does not satisfy box chi = d.A")
    grad = total_derivative(chi)
    return A - grad


def lorentz_divergence(A: JetField) -> JetField:
    return _div_form(A)


def gauge_shift(sol: MaxwellSolution, chi: JetField = None, chi_prime: JetField = None) -> MaxwellSolution:
    """``A -> A + D chi``, ``A' -> A' + D chi'``; ``F`` is untouched."""
    A, Ap = sol.A, sol.Aprime
    if chi is not None:
        A = A + total_derivative(chi)
    if chi_prime is not None:
        Ap = Ap + total_derivative(chi_prime)
    return MaxwellSolution(sol.F, A, Ap, lorentz=sol.lorentz, ctx=sol.ctx, name=f"shift({sol.name})")


def scalar_poly_field(p: Poly) -> PolynomialField:
    arr = np.empty((), dtype=object)
    arr[()] = p
    return PolynomialField(arr, ())


def fixtures(max_degree: int = 1, ctx: MetricContext = DEFAULT_CTX) -> list:
    out = []
    for d in range(max_degree + 1):
        out.extend(polynomial_solutions(d, ctx))
    return out


__all__ = [
    "MaxwellSolution", "PlaneWaveSpec", "plane_wave", "catalog_plane_waves", "dual_polarization",
    "polynomial_solutions", "fixtures", "cronstrom_potentials", "cronstrom_series", "homotopy_weight",
    "calibrate_cronstrom_normalization", "CRONSTROM_NORMALIZATION", "regauge_to_lorentz",
    "solve_wave_equation", "gauge_shift", "wave_operator", "lorentz_divergence", "scalar_poly_field",
    "SolutionError", "JetError",
]
