"""Conformal Killing vectors and Killing-Yano tensors of Minkowski space.

Parameter conventions (all exact rationals, indices as stored):

* ``ConformalKilling``: ``k1^m``, ``k2^{mn}`` (antisymmetric), ``k3``, ``k4^m``;
  the field is ``xi^m = k1^m + k2^{mn} x_n + k3 x^m + (k4.x) x^m - 1/2 k4^m (x.x)``.
* ``KillingYano``: ``y1_{mn}`` (antisymmetric), ``c2^s``;
  the field is ``Y_{mn} = y1_{mn} + eps_{mnst} c2^s x^t``.

Curl and divergence of a CKV: ``zeta_{mn} = -1/2 d_[m xi_n]`` (weighted) and
``Omega = 1/2 d_m xi^m``, so that ``L_xi eta = Omega eta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _linalg
from .jetfield import (
    Poly,
    PolynomialField,
    constant_field,
    fmap,
    is_zero_field,
    lie_derivative_coordinate,
    materialize,
    poly_coords,
    total_derivative,
)
from .tensor import DEFAULT_CTX, DIM, HALF, MetricContext, alt, dual2, eps_entries, lower, sym

PAIRS = tuple(combinations(range(DIM), 2))


class GeometryError(ValueError):
    pass


def _frac_array(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=object).reshape(shape)
    out = np.empty(shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, float):
            raise GeometryError("parameters must be exact rationals")
        out[idx] = Fraction(v)
    return out


def _antisym_check(m: np.ndarray, what: str):
    if any(v != 0 for v in (m + m.T).flat):
        raise GeometryError(f"{what} must be antisymmetric")


def skew_basis(a: int, b: int) -> np.ndarray:
    """Antisymmetric matrix with entry +1 at (a, b) and -1 at (b, a)."""
    m = np.array([[Fraction(0)] * DIM for _ in range(DIM)], dtype=object)
    m[a, b] = Fraction(1)
    m[b, a] = Fraction(-1)
    return m


# ---------------------------------------------------------------- CKV

@dataclass(frozen=True, eq=False)
class ConformalKilling:
    k1: np.ndarray = None
    k2: np.ndarray = None
    k3: Fraction = Fraction(0)
    k4: np.ndarray = None

    def __post_init__(self):
        zero4 = [0] * DIM
        object.__setattr__(self, "k1", _frac_array(zero4 if self.k1 is None else self.k1, (DIM,)))
        object.__setattr__(self, "k2", _frac_array(np.zeros((DIM, DIM), dtype=int) if self.k2 is None else self.k2, (DIM, DIM)))
        object.__setattr__(self, "k3", Fraction(self.k3))
        object.__setattr__(self, "k4", _frac_array(zero4 if self.k4 is None else self.k4, (DIM,)))
        _antisym_check(self.k2, "k2")

    def vector(self) -> list:
        """15 coordinates: k1 (4), k2^{ab} for a<b (6), k3, k4 (4)."""
        return list(self.k1) + [self.k2[a, b] for a, b in PAIRS] + [self.k3] + list(self.k4)

    @classmethod
    def from_vector(cls, v) -> "ConformalKilling":
        v = [Fraction(x) for x in v]
        if len(v) != 15:
            raise GeometryError("a CKV has 15 parameters")
        k2 = np.zeros((DIM, DIM), dtype=object)
        k2[:] = Fraction(0)
        for (a, b), c in zip(PAIRS, v[4:10]):
            k2[a, b] = c
            k2[b, a] = -c
        return cls(v[:4], k2, v[10], v[11:15])

    def __add__(self, other: "ConformalKilling") -> "ConformalKilling":
        return ConformalKilling.from_vector([a + b for a, b in zip(self.vector(), other.vector())])

    def __mul__(self, s) -> "ConformalKilling":
        return ConformalKilling.from_vector([a * Fraction(s) for a in self.vector()])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        return isinstance(other, ConformalKilling) and self.vector() == other.vector()

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vector())

    @property
    def homothetic(self) -> bool:
        return all(v == 0 for v in self.k4)

    def to_json(self) -> dict:
        return {"k1": [str(v) for v in self.k1], "k2": [[str(v) for v in r] for r in self.k2],
                "k3": str(self.k3), "k4": [str(v) for v in self.k4]}

    @classmethod
    def from_json(cls, d: dict) -> "ConformalKilling":
        return cls(d.get("k1"), d.get("k2"), Fraction(d.get("k3", 0)), d.get("k4"))

    def __repr__(self):
        nz = {n: v for n, v in zip(CKV_LABELS, self.vector()) if v}
        return f"ConformalKilling({nz})"


CKV_LABELS = tuple(
    [f"k1^{a}" for a in range(DIM)] + [f"k2^{a}{b}" for a, b in PAIRS] + ["k3"] + [f"k4^{a}" for a in range(DIM)]
)


def ckv_basis() -> list:
    return [ConformalKilling.from_vector([int(i == j) for j in range(15)]) for i in range(15)]


def translation(*k1) -> ConformalKilling:
    return ConformalKilling(k1=list(k1))


def rotation(a: int, b: int, c=1) -> ConformalKilling:
    return ConformalKilling(k2=skew_basis(a, b) * Fraction(c))


def dilation(c=1) -> ConformalKilling:
    return ConformalKilling(k3=c)


def inversion(*k4) -> ConformalKilling:
    return ConformalKilling(k4=list(k4))


def ckv_components(xi: ConformalKilling) -> np.ndarray:
    x = poly_coords()
    x_d = lower(np.array(x, dtype=object))
    xx = sum((x[i] * x_d[i] for i in range(DIM)), Poly())
    k4x = sum((xi.k4[i] * x_d[i] for i in range(DIM)), Poly())
    out = np.empty(DIM, dtype=object)
    for m in range(DIM):
        v = Poly.const(xi.k1[m]) + xi.k3 * x[m] + k4x * x[m] - (HALF * xi.k4[m]) * xx
        for n in range(DIM):
            v = v + xi.k2[m, n] * x_d[n]
        out[m] = v
    return out


def ckv_eval(xi: ConformalKilling) -> PolynomialField:
    """The vector field ``xi^m`` as an exact polynomial field."""
    return PolynomialField(ckv_components(xi), ("u",), name="xi")


def ckv_curl_div(xi: ConformalKilling):
    """``(zeta_{mn}, Omega)`` computed by differentiating the field."""
    f = ckv_eval(xi)
    d = total_derivative(f)  # [m, n] = d_m xi^n
    zeta = fmap(lambda a: alt(lower(a, [1]), [0, 1]) * Fraction(-1, 2), d, variance=("d", "d"),
                antisymmetric=True, name="zeta")
    omega = fmap(lambda a: np.trace(a) * HALF, d, variance=(), name="Omega")
    return materialize(zeta), materialize(omega)


def ckv_curl_div_closed_form(xi: ConformalKilling):
    """``zeta = 1/2 k2 - k4_[m x_n]`` and ``Omega = 2 k3 + 2 k4.x`` written out directly."""
    x_d = lower(np.array(poly_coords(), dtype=object))
    k4_d = lower(xi.k4)
    k2_dd = lower(xi.k2)
    zeta = np.empty((DIM, DIM), dtype=object)
    for m in range(DIM):
        for n in range(DIM):
            zeta[m, n] = HALF * k2_dd[m, n] - HALF * (k4_d[m] * x_d[n] - k4_d[n] * x_d[m])
    omega = 2 * xi.k3 + 2 * sum((xi.k4[i] * x_d[i] for i in range(DIM)), Poly())
    return (PolynomialField(zeta, ("d", "d"), antisymmetric=True),
            PolynomialField(np.array(omega, dtype=object).reshape(()), ()))


def conformal_killing_residual(xi_field) -> PolynomialField:
    """``L_xi eta - Omega eta`` for an arbitrary vector field."""
    eta = constant_field(np.diag([-1, 1, 1, 1]), ("d", "d"))
    lie = lie_derivative_coordinate(xi_field, eta)
    omega = fmap(lambda a: np.trace(a) * HALF, total_derivative(xi_field), variance=())
    res = fmap(lambda l, o: l - o * np.diag([-1, 1, 1, 1]).astype(object), lie, omega,
               variance=("d", "d"))
    return materialize(res)


def verify_conformal_killing(xi: ConformalKilling) -> PolynomialField:
    return conformal_killing_residual(ckv_eval(xi))


def ckv_from_components(comps) -> ConformalKilling:
    """Read off CKV parameters from an exact polynomial vector field.

    Raises if the field is not of the 15-parameter form.
    """
    comps = np.asarray(comps, dtype=object)
    k1 = [p.evaluate([0, 0, 0, 0]) for p in comps]
    grad = np.array([[comps[m].diff(n).evaluate([0] * DIM) for n in range(DIM)] for m in range(DIM)],
                    dtype=object)  # d_n xi^m at the origin
    k3 = sum(grad[i, i] for i in range(DIM)) / 4
    k2 = np.empty((DIM, DIM), dtype=object)
    for m in range(DIM):
        for n in range(DIM):
            # d_n xi^m = k2^{m s} eta_{s n} + k3 delta
            k2[m, n] = (grad[m, n] - (k3 if m == n else 0)) * (-1 if n == 0 else 1)
    div = sum((comps[i].diff(i) for i in range(DIM)), Poly())
    # d_m div = 4 k4_m
    k4_d = [div.diff(m).evaluate([0] * DIM) / 4 for m in range(DIM)]
    k4 = lower(np.array(k4_d, dtype=object))
    try:
        xi = ConformalKilling(k1, k2, k3, k4)
    except GeometryError as exc:
        raise GeometryError(f"field is not a conformal Killing vector: {exc}") from None
    if any((a - b) != 0 for a, b in zip(ckv_components(xi), comps)):
        raise GeometryError("field is not a conformal Killing vector")
    return xi


def lie_bracket_field(xi1, xi2):
    """``[xi1, xi2]^m = xi1^s d_s xi2^m - xi2^s d_s xi1^m`` as a field."""
    return fmap(
        lambda a, da, b, db: np.tensordot(a, db, axes=([0], [0])) - np.tensordot(b, da, axes=([0], [0])),
        xi1, total_derivative(xi1), xi2, total_derivative(xi2), variance=("u",),
    )


def ckv_commutator(xi1: ConformalKilling, xi2: ConformalKilling) -> ConformalKilling:
    """Parameters of ``L_{xi1} xi2 = [xi1, xi2]``."""
    field = lie_bracket_field(ckv_eval(xi1), ckv_eval(xi2))
    return ckv_from_components(field.exact())


def ckv_hkv_commutator_formula(ckv: ConformalKilling, hkv: ConformalKilling) -> ConformalKilling:
    """Closed-form ``[xi_ckv, xi_hkv]`` for a proper CKV (k4 only) and an HKV.

    k1 = 0, k2^{mn} = 2 k4^[m k1^n], k3 = -k4.k1, k4^m = -k4^m k3 - k4_n k2^{nm}.
    """
    if any(v != 0 for v in list(ckv.k1) + list(ckv.k2.flat)) or ckv.k3 != 0:
        raise GeometryError("first argument must be a proper CKV (k4 only)")
    if not hkv.homothetic:
        raise GeometryError("second argument must be homothetic")
    k4, k1, k2, k3 = ckv.k4, hkv.k1, hkv.k2, hkv.k3
    k4_d = lower(k4)
    bar2 = np.array([[k4[m] * k1[n] - k4[n] * k1[m] for n in range(DIM)] for m in range(DIM)], dtype=object)
    bar3 = -sum(k4_d[i] * k1[i] for i in range(DIM))
    bar4 = [-k4[m] * k3 - sum(k4_d[n] * k2[n, m] for n in range(DIM)) for m in range(DIM)]
    return ConformalKilling(None, bar2, bar3, bar4)


def skew_commutator(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """``[g1, g2]^{mn} = 2 g1^{s[m} g2^{n]}_s``; inputs and output carry both indices down."""
    g1 = np.asarray(g1, dtype=object)
    g2 = np.asarray(g2, dtype=object)
    _antisym_check(g1, "skew_commutator argument")
    _antisym_check(g2, "skew_commutator argument")
    g1_uu = lower(g1)
    g2_ud = lower(g2, [0])  # g2^n_s
    t = np.einsum("sm,ns->mn", g1_uu, g2_ud)  # g1^{sm} g2^n_s
    out_uu = t - t.T
    return lower(out_uu)


# ---------------------------------------------------------------- Killing-Yano

@dataclass(frozen=True, eq=False)
class KillingYano:
    y1: np.ndarray = None
    c2: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "y1", _frac_array(np.zeros((DIM, DIM), dtype=int) if self.y1 is None else self.y1, (DIM, DIM)))
        object.__setattr__(self, "c2", _frac_array([0] * DIM if self.c2 is None else self.c2, (DIM,)))
        _antisym_check(self.y1, "y1")

    def vector(self) -> list:
        return [self.y1[a, b] for a, b in PAIRS] + list(self.c2)

    @classmethod
    def from_vector(cls, v) -> "KillingYano":
        v = [Fraction(x) for x in v]
        y1 = np.zeros((DIM, DIM), dtype=object)
        y1[:] = Fraction(0)
        for (a, b), c in zip(PAIRS, v[:6]):
            y1[a, b] = c
            y1[b, a] = -c
        return cls(y1, v[6:10])

    @property
    def constant(self) -> bool:
        return all(v == 0 for v in self.c2)

    def __eq__(self, other):
        return isinstance(other, KillingYano) and self.vector() == other.vector()

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vector())

    def to_json(self) -> dict:
        return {"y1": [[str(v) for v in r] for r in self.y1], "c2": [str(v) for v in self.c2]}

    @classmethod
    def from_json(cls, d: dict) -> "KillingYano":
        return cls(d.get("y1"), d.get("c2"))

    def __repr__(self):
        labels = [f"y1_{a}{b}" for a, b in PAIRS] + [f"c2^{a}" for a in range(DIM)]
        return f"KillingYano({ {n: v for n, v in zip(labels, self.vector()) if v} })"


def ky_basis() -> list:
    return [KillingYano.from_vector([int(i == j) for j in range(10)]) for i in range(10)]


def ky_components(y: KillingYano, ctx: MetricContext = DEFAULT_CTX) -> np.ndarray:
    x = poly_coords()
    out = np.empty((DIM, DIM), dtype=object)
    for m in range(DIM):
        for n in range(DIM):
            out[m, n] = Poly.const(y.y1[m, n])
    for (m, n, s, t), v in eps_entries(ctx):
        if y.c2[s]:
            out[m, n] = out[m, n] + (v * y.c2[s]) * x[t]
    return out


def ky_eval(y: KillingYano, ctx: MetricContext = DEFAULT_CTX) -> PolynomialField:
    return PolynomialField(ky_components(y, ctx), ("d", "d"), antisymmetric=True, name="Y")


def killing_yano_residual(y_field) -> PolynomialField:
    """``d_(s Y_m)n`` (weighted symmetrization over the first two slots)."""
    d = total_derivative(y_field)  # [s, m, n]
    return materialize(fmap(lambda a: sym(a, [0, 1]), d, variance=("d", "d", "d")))


def verify_ky(y: KillingYano, ctx: MetricContext = DEFAULT_CTX):
    field = ky_eval(y, ctx)
    return field, killing_yano_residual(field)


def ky_from_ckv(xi: ConformalKilling, ctx: MetricContext = DEFAULT_CTX) -> KillingYano:
    """``Y = *zeta`` for a rotation/boost plus proper-CKV vector field.

    The constant part is ``*(1/2 k2)``; the linear part ``*(-k4_[m x_n])``
    equals ``eps_{mnst} c2^s x^t`` with ``c2 = -1/2 k4``.
    """
    if any(v != 0 for v in xi.k1) or xi.k3 != 0:
        raise GeometryError("Killing-Yano form needs k1 = 0 and k3 = 0")
    y1 = dual2(lower(xi.k2) * HALF, ctx)
    return KillingYano(y1, [-HALF * v for v in xi.k4])


def ckv_from_ky(y: KillingYano, ctx: MetricContext = DEFAULT_CTX) -> ConformalKilling:
    """Inverse of :func:`ky_from_ckv`: ``zeta = -*Y``."""
    zeta_const = -dual2(y.y1, ctx)
    k2 = lower(zeta_const * 2)
    return ConformalKilling(None, k2, 0, [-2 * v for v in y.c2])


# ---------------------------------------------------------------- solution spaces

def _monomials_upto(deg: int) -> list:
    out = []
    for d in range(deg + 1):
        for e0 in range(d + 1):
            for e1 in range(d + 1 - e0):
                for e2 in range(d + 1 - e0 - e1):
                    out.append((e0, e1, e2, d - e0 - e1 - e2))
    return out


def _coefficient_rows(columns) -> tuple:
    """Turn a list of residual coefficient dicts (one per unknown) into matrix rows."""
    keys = sorted({k for col in columns for k in col})
    pos = {k: i for i, k in enumerate(keys)}
    rows = [[Fraction(0)] * len(columns) for _ in keys]
    for j, col in enumerate(columns):
        for k, v in col.items():
            rows[pos[k]][j] = v
    return rows, len(columns)


def _flatten_poly_array(arr: np.ndarray) -> dict:
    out = {}
    for idx, p in np.ndenumerate(arr):
        for e, c in p.items():
            out[(idx, e)] = c
    return out


def conformal_killing_dimension(max_degree: int = 3) -> int:
    """Dimension of the polynomial solution space of the conformal Killing equation."""
    columns = []
    for comp in range(DIM):
        for e in _monomials_upto(max_degree):
            comps = np.array([Poly() for _ in range(DIM)], dtype=object)
            comps[comp] = Poly({e: 1})
            res = conformal_killing_residual(PolynomialField(comps, ("u",)))
            columns.append(_flatten_poly_array(res.exact()))
    rows, n = _coefficient_rows(columns)
    return n - _linalg.rank(rows, n)


def killing_yano_dimension(max_degree: int = 2) -> int:
    """Dimension of the antisymmetric polynomial solutions of the Killing-Yano equation."""
    columns = []
    for a, b in PAIRS:
        for e in _monomials_upto(max_degree):
            comps = np.array([[Poly() for _ in range(DIM)] for _ in range(DIM)], dtype=object)
            comps[a, b] = Poly({e: 1})
            comps[b, a] = Poly({e: -1})
            res = killing_yano_residual(PolynomialField(comps, ("d", "d"), antisymmetric=True))
            columns.append(_flatten_poly_array(res.exact()))
    rows, n = _coefficient_rows(columns)
    return n - _linalg.rank(rows, n)


def is_conformal_killing(xi: ConformalKilling) -> bool:
    return is_zero_field(verify_conformal_killing(xi))
