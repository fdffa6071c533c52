"""Geometric symmetries of the joint potential system in Lorentz gauge.

Every generator acts linearly on a potential pair: ``act(A, A') = (Q, Q')``.
The induced action on the field is ``P = D Q``.  Conventions (all contractions
use ``(g.v)_m = g_m^n v_n``):

* scaling ``(A, A')``; duality rotation ``(A', -A)``;
* internal rotation/boost ``(g.A + *g.A', g.A' - *g.A)`` for constant skew ``g``;
* plain conformal ``(L_xi A, L_xi A')`` for homothetic ``xi``, and its dual;
* weighted conformal ``(L^ A + z.A + *z.A', L^ A' + z.A' - *z.A)`` with
  ``L^ = L_xi + Omega/4`` and ``(z, Omega)`` the curl and divergence of ``xi``;
  valid for every conformal Killing vector;
* Killing-Yano ``(q A - *Y.A + Y.A', q A' - *Y.A' - Y.A)`` with
  ``q = 1/3 x_s d_t *Y^{st}``; these only project to (nonlocal) symmetries of
  Maxwell's equations.

Dual variants are the composition with the duality rotation, so the
even-parity relation ``Q'[A, A'] = Q[A', -A]`` holds for all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import (
    CKV_LABELS,
    PAIRS,
    ConformalKilling,
    GeometryError,
    KillingYano,
    ckv_basis,
    ckv_curl_div,
    ckv_eval,
    ky_eval,
    ky_from_ckv,
    skew_basis,
)
from .jetfield import (
    POLYNOMIAL,
    JetField,
    Poly,
    PolynomialField,
    constant_field,
    coordinate_field,
    divergence,
    exterior_D,
    fmap,
    hodge_field,
    lie_derivative,
    materialize,
    residual_stats,
    total_derivative,
)
from .solutions import MaxwellSolution, scalar_poly_field
from .tensor import DEFAULT_CTX, DIM, HALF, MetricContext, dual2, lower, mixed


class SymmetryError(ValueError):
    """A generator was applied outside its domain."""


# ---------------------------------------------------------------- field helpers

def _dot(g: JetField, v: JetField) -> JetField:
    """``g_m^n v_n`` for a 2-tensor field ``g`` (both slots down) and a covector field."""
    return fmap(lambda ga, va: np.dot(mixed(ga), va), g, v, variance=("d",))


def _scale(s: JetField, v: JetField) -> JetField:
    return fmap(lambda sa, va: va * sa[()], s, v, variance=v.variance, antisymmetric=v.antisymmetric)


def _sum(*fields: JetField) -> JetField:
    out = fields[0]
    for f in fields[1:]:
        out = out + f
    return out


def _const2(g, name="") -> PolynomialField:
    return constant_field(np.asarray(g, dtype=object), ("d", "d"), antisymmetric=True, name=name)


def _curl_div_part(zeta: JetField, quarter_omega: JetField, zeta_dual: JetField, A, Ap):
    """``(q A + z.A + *z.A', q A' + z.A' - *z.A)``."""
    Q = _sum(_scale(quarter_omega, A), _dot(zeta, A), _dot(zeta_dual, Ap))
    Qp = _sum(_scale(quarter_omega, Ap), _dot(zeta, Ap), -_dot(zeta_dual, A))
    return Q, Qp


def ky_quarter_omega(y: KillingYano, ctx: MetricContext = DEFAULT_CTX) -> PolynomialField:
    """``1/3 x_s d_t *Y^{st}`` as a polynomial scalar."""
    dY = total_derivative(hodge_field(ky_eval(y, ctx), ctx)).exact()  # [t, s, r] = d_t *Y_{sr}
    x_d = lower(np.array(coordinate_field().exact(), dtype=object))
    total = Poly()
    for s in range(DIM):
        for t in range(DIM):
            # x_s d_t *Y^{st} = x_s eta^{ss} eta^{tt} d_t *Y_{st}
            total = total + x_d[s] * dY[t, s, t] * (-1 if (s == 0) != (t == 0) else 1)
    return scalar_poly_field(total * Fraction(1, 3))


# ---------------------------------------------------------------- generators

@dataclass(frozen=True, eq=False)
class SymmetryGenerator:
    """Base class; subclasses implement :meth:`act`."""

    gauged = True  # symmetry of the joint system itself (not only of its projection)

    @property
    def label(self) -> str:
        raise NotImplementedError

    def act(self, A: JetField, Ap: JetField, ctx: MetricContext = DEFAULT_CTX):
        raise NotImplementedError

    def dual(self) -> "SymmetryGenerator":
        return Composed(DualityRotation(), self)

    def __repr__(self):
        return self.label


@dataclass(frozen=True, eq=False, repr=False)
class Scaling(SymmetryGenerator):
    @property
    def label(self):
        return "scaling"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        return A, Ap


@dataclass(frozen=True, eq=False, repr=False)
class DualityRotation(SymmetryGenerator):
    @property
    def label(self):
        return "duality"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        return Ap, -A


@dataclass(frozen=True, eq=False, repr=False)
class InternalRB(SymmetryGenerator):
    """Constant skew ``gamma_{mn}`` (both indices down)."""

    gamma: np.ndarray = None

    def __post_init__(self):
        g = np.array([[Fraction(v) if not isinstance(v, float) else v for v in r] for r in np.asarray(self.gamma, dtype=object)],
                     dtype=object)
        if g.shape != (DIM, DIM) or any(g[i, j] + g[j, i] != 0 for i in range(DIM) for j in range(DIM)):
            raise SymmetryError("gamma must be an antisymmetric 4x4 array")
        object.__setattr__(self, "gamma", g)

    @property
    def label(self):
        nz = {f"{a}{b}": str(self.gamma[a, b]) for a, b in PAIRS if self.gamma[a, b]}
        return f"rb{nz}"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        g = _const2(self.gamma)
        gd = _const2(dual2(self.gamma, ctx))
        return _dot(g, A) + _dot(gd, Ap), _dot(g, Ap) - _dot(gd, A)


def _require_ckv(xi):
    if not isinstance(xi, ConformalKilling):
        raise SymmetryError("expected a ConformalKilling parameter block")


@dataclass(frozen=True, eq=False, repr=False)
class Conformal(SymmetryGenerator):
    """Plain Lie derivative ``(L_xi A, L_xi A')``; a symmetry for homothetic ``xi``."""

    xi: ConformalKilling = None

    def __post_init__(self):
        _require_ckv(self.xi)
        if not self.xi.homothetic:
            raise SymmetryError("plain conformal generator needs a homothetic vector (k4 = 0); "
                                "use WeightedConformal for inversions")

    @property
    def label(self):
        return f"hX{self.xi!r}"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        v = ckv_eval(self.xi)
        return lie_derivative(v, A), lie_derivative(v, Ap)


@dataclass(frozen=True, eq=False, repr=False)
class ConformalDual(Conformal):
    @property
    def label(self):
        return f"hX'{self.xi!r}"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        v = ckv_eval(self.xi)
        return lie_derivative(v, Ap), -lie_derivative(v, A)


@dataclass(frozen=True, eq=False, repr=False)
class WeightedConformal(SymmetryGenerator):
    xi: ConformalKilling = None

    def __post_init__(self):
        _require_ckv(self.xi)

    @property
    def label(self):
        return f"cX{self.xi!r}"

    def _pair(self, A, Ap, ctx):
        v = ckv_eval(self.xi)
        zeta, omega = ckv_curl_div(self.xi)
        q = materialize(omega * HALF * HALF)
        zd = materialize(hodge_field(zeta, ctx))
        Q, Qp = _curl_div_part(zeta, q, zd, A, Ap)
        return lie_derivative(v, A) + Q, lie_derivative(v, Ap) + Qp

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        return self._pair(A, Ap, ctx)


@dataclass(frozen=True, eq=False, repr=False)
class WeightedConformalDual(WeightedConformal):
    @property
    def label(self):
        return f"cX'{self.xi!r}"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        Q, Qp = self._pair(A, Ap, ctx)
        return Qp, -Q


@dataclass(frozen=True, eq=False, repr=False)
class KY(SymmetryGenerator):
    """Killing-Yano form of the nonlocal Maxwell symmetries."""

    y: KillingYano = None
    gauged = False

    def __post_init__(self):
        if not isinstance(self.y, KillingYano):
            raise SymmetryError("expected a KillingYano parameter block")

    @property
    def label(self):
        return f"XY{self.y!r}"

    def _pair(self, A, Ap, ctx):
        Y = ky_eval(self.y, ctx)
        zeta = materialize(-hodge_field(Y, ctx))
        q = ky_quarter_omega(self.y, ctx)
        return _curl_div_part(zeta, q, Y, A, Ap)

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        return self._pair(A, Ap, ctx)


@dataclass(frozen=True, eq=False, repr=False)
class KYDual(KY):
    @property
    def label(self):
        return f"XY'{self.y!r}"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        Q, Qp = self._pair(A, Ap, ctx)
        return Qp, -Q


@dataclass(frozen=True, eq=False, repr=False)
class Composed(SymmetryGenerator):
    """``outer o inner``: the linear action of ``inner`` followed by ``outer``."""

    outer: SymmetryGenerator = None
    inner: SymmetryGenerator = None

    @property
    def gauged(self):
        return self.outer.gauged and self.inner.gauged

    @property
    def label(self):
        return f"({self.outer.label} o {self.inner.label})"

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        Q, Qp = self.inner.act(A, Ap, ctx)
        return self.outer.act(Q, Qp, ctx)


@dataclass(frozen=True, eq=False, repr=False)
class Combination(SymmetryGenerator):
    """Linear combination ``sum c_i g_i``."""

    terms: tuple = ()

    @property
    def gauged(self):
        return all(g.gauged for _, g in self.terms)

    @property
    def label(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{g.label}" for c, g in self.terms)

    def act(self, A, Ap, ctx=DEFAULT_CTX):
        if not self.terms:
            return A * 0, Ap * 0
        Q = Qp = None
        for c, g in self.terms:
            q, qp = g.act(A, Ap, ctx)
            Q = q * c if Q is None else Q + q * c
            Qp = qp * c if Qp is None else Qp + qp * c
        return Q, Qp


# ---------------------------------------------------------------- actions

@dataclass(frozen=True, eq=False)
class SymmetryAction:
    generator: SymmetryGenerator
    Q: JetField
    Qprime: JetField
    ctx: MetricContext = DEFAULT_CTX

    @property
    def P(self) -> JetField:
        return exterior_D(self.Q)

    @property
    def Pprime(self) -> JetField:
        return exterior_D(self.Qprime)


def apply(gen: SymmetryGenerator, sol: MaxwellSolution) -> SymmetryAction:
    if gen.gauged and not sol.lorentz:
        raise SymmetryError(f"{gen.label} acts on the Lorentz-gauge system; solution is not gauge fixed")
    Q, Qp = gen.act(sol.A, sol.Aprime, sol.ctx)
    return SymmetryAction(gen, Q, Qp, sol.ctx)


def action_from_pair(Q: JetField, Qp: JetField, ctx: MetricContext = DEFAULT_CTX) -> SymmetryAction:
    """Wrap an arbitrary characteristic pair (used for negative controls)."""
    return SymmetryAction(None, Q, Qp, ctx)


def _div_form(a: JetField) -> JetField:
    return divergence(fmap(lambda v: lower(v), a, variance=("u",)))


def determining_residual(act: SymmetryAction, sol: MaxwellSolution = None):
    """``(DQ' - *DQ, d.Q, d.Q')``."""
    ctx = act.ctx if sol is None else sol.ctx
    r1 = act.Pprime - hodge_field(act.P, ctx)
    return r1, _div_form(act.Q), _div_form(act.Qprime)


def residual_summary(fields, points=None) -> dict:
    names = ("r1", "r2", "r3")
    return {n: residual_stats(f, points) for n, f in zip(names, fields)}


def passes(summary: dict, tol: float) -> bool:
    for s in summary.values():
        if s["exact"]:
            if not s["zero"]:
                return False
        elif s["max"] > tol:
            return False
    return True


def check_generator(gen, sol: MaxwellSolution, points=None, tol: float = 1e-9) -> dict:
    pts = None if sol.backend == POLYNOMIAL else points
    summary = residual_summary(determining_residual(apply(gen, sol), sol), pts)
    return {"generator": gen.label, "solution": sol.name, "residuals": summary,
            "pass": passes(summary, tol)}


# ---------------------------------------------------------------- Maxwell projection

_TEST_GAUGES = None


def _harmonic_gauges() -> list:
    """Wave-equation solutions whose gradients probe gauge sensitivity."""
    global _TEST_GAUGES
    if _TEST_GAUGES is None:
        x = [Poly.var(i) for i in range(DIM)]
        polys = [x[a] * x[b] for a, b in PAIRS]
        polys += [x[0] * x[0] + x[i] * x[i] for i in range(1, DIM)]
        polys += [x[1] * x[1] - x[2] * x[2], x[0] * x[1] * x[2], x[1] * x[2] * x[3]]
        _TEST_GAUGES = [total_derivative(scalar_poly_field(p)) for p in polys]
    return _TEST_GAUGES


def is_local(gen: SymmetryGenerator, ctx: MetricContext = DEFAULT_CTX) -> bool:
    """``P`` is local iff it does not change under ``A -> A + D chi`` (or ``A'``) with ``box chi = 0``."""
    zero = constant_field(np.zeros(DIM, dtype=object), ("d",))
    for g in _harmonic_gauges():
        for pair in ((g, zero), (zero, g)):
            Q, _ = gen.act(*pair, ctx=ctx)
            if not all(p.is_zero() for p in exterior_D(Q).exact().flat):
                return False
    return True


@dataclass(frozen=True, eq=False)
class MaxwellProjection:
    P: JetField
    local: bool


def project_to_maxwell(act: SymmetryAction) -> MaxwellProjection:
    local = is_local(act.generator, act.ctx) if act.generator is not None else False
    return MaxwellProjection(act.P, local)


def maxwell_symmetry_residual(P: JetField, sol: MaxwellSolution):
    """``(d^m P_{mn}, d^m *P_{mn})``."""
    def maxwell(f):
        return fmap(lambda a: np.trace(lower(a, [0]), axis1=0, axis2=1), total_derivative(f),
                    variance=("d",))
    return maxwell(P), maxwell(hodge_field(P, sol.ctx))


# ---------------------------------------------------------------- explicit KY form

def _sym_derivative(A: JetField) -> JetField:
    """``S_{ms} = d_(m A_s)``."""
    return fmap(lambda d: (d + d.T) * HALF, total_derivative(A), variance=("d", "d"))


def ky_explicit_P(y: KillingYano, sol: MaxwellSolution, dual: bool = False) -> JetField:
    """The Killing-Yano Maxwell symmetry written directly on ``(F, S, S', A, A')``.

    ``q F + S^s_[m Z_n]s + S'^s_[m Y_n]s + A^s d_s *Y_mn + A'^s d_s Y_mn`` with
    ``Z = -*Y``; the dual form substitutes ``(A, A', F) -> (A', -A, *F)``.
    """
    ctx = sol.ctx
    A, Ap, F = sol.A, sol.Aprime, sol.F
    if dual:
        A, Ap, F = Ap, -A, sol.Fdual
    Y = ky_eval(y, ctx)
    Yd = materialize(hodge_field(Y, ctx))
    dY = materialize(total_derivative(Y))
    dYd = materialize(total_derivative(Yd))
    q = ky_quarter_omega(y, ctx)

    def fn(qa, f, s, sp, a, ap, yy, yd, dy, dyd):
        s_ud = lower(s, [0])  # S^s_m
        sp_ud = lower(sp, [0])
        a_u = lower(a)
        ap_u = lower(ap)
        t1 = np.einsum("sm,ns->mn", s_ud, -yd)
        t2 = np.einsum("sm,ns->mn", sp_ud, yy)
        lin = (t1 - t1.T + t2 - t2.T) * HALF
        deriv = np.tensordot(a_u, dyd, axes=([0], [0])) + np.tensordot(ap_u, dy, axes=([0], [0]))
        return f * qa[()] + lin + deriv

    return fmap(fn, q, F, _sym_derivative(A), _sym_derivative(Ap), A, Ap, Y, Yd, dY, dYd,
                variance=("d", "d"), antisymmetric=True)


def unified_ky_decompose(xi: ConformalKilling, ctx: MetricContext = DEFAULT_CTX) -> KY:
    """The nonlocal part of ``WeightedConformal(xi)`` in Killing-Yano form, ``Y = *zeta``."""
    try:
        y = ky_from_ckv(xi, ctx)
    except GeometryError as exc:
        raise SymmetryError(str(exc)) from None
    return KY(y)


def conformal_remainder(xi: ConformalKilling, dual: bool = False) -> SymmetryGenerator:
    """``WeightedConformal(xi)`` minus the plain Lie-derivative part."""
    class _Remainder(SymmetryGenerator):
        gauged = False

        @property
        def label(self):
            return f"Z{'`' if dual else ''}{xi!r}"

        def act(self, A, Ap, ctx=DEFAULT_CTX):
            zeta, omega = ckv_curl_div(xi)
            q = materialize(omega * HALF * HALF)
            zd = materialize(hodge_field(zeta, ctx))
            Q, Qp = _curl_div_part(zeta, q, zd, A, Ap)
            return (Qp, -Q) if dual else (Q, Qp)

    return _Remainder()


# ---------------------------------------------------------------- the 38-dimensional basis

def rb_basis() -> list:
    return [InternalRB(skew_basis(a, b)) for a, b in PAIRS]


def basis38() -> list:
    """``(id, generator)`` pairs: scaling, duality, 6 rb, 15 cX, 15 cX'."""
    out = [("scaling", Scaling()), ("duality", DualityRotation())]
    out += [(f"rb[{a}{b}]", g) for (a, b), g in zip(PAIRS, rb_basis())]
    cks = ckv_basis()
    out += [(f"cX[{lab}]", WeightedConformal(xi)) for lab, xi in zip(CKV_LABELS, cks)]
    out += [(f"cX'[{lab}]", WeightedConformalDual(xi)) for lab, xi in zip(CKV_LABELS, cks)]
    return out


def nonlocal_basis() -> list:
    """The 20 Killing-Yano generators (10 KY + 10 dual) spanning 14 dimensions."""
    from .geometry import ky_basis
    out = []
    for i, y in enumerate(ky_basis()):
        out.append((f"XY[{i}]", KY(y)))
    for i, y in enumerate(ky_basis()):
        out.append((f"XY'[{i}]", KYDual(y)))
    return out


__all__ = [
    "SymmetryGenerator", "Scaling", "DualityRotation", "InternalRB", "Conformal", "ConformalDual",
    "WeightedConformal", "WeightedConformalDual", "KY", "KYDual", "Composed", "Combination",
    "SymmetryAction", "SymmetryError", "apply", "action_from_pair", "determining_residual",
    "check_generator", "residual_summary", "passes", "is_local", "project_to_maxwell",
    "MaxwellProjection", "maxwell_symmetry_residual", "ky_explicit_P", "ky_quarter_omega",
    "unified_ky_decompose", "conformal_remainder", "rb_basis", "basis38", "nonlocal_basis",
]
