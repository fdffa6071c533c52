"""Tensor fields with exact access to their partial derivatives.

A field is a lazy map from a coordinate tuple ``x = (x0, x1, x2, x3)`` to an
object array of scalars.  Two scalar algebras back the evaluation:

* :class:`Poly` -- exact multivariate polynomials with rational
  coefficients.  Feeding the polynomial generators ``x_i`` through a field
  yields its exact polynomial components.
* :class:`Jet` -- truncated multivariate Taylor series around a batch of
  points (forward-mode AD).  Feeding seeded jets yields all partial
  derivatives up to the seeded order, for every point at once.

Differentiating a scalar is ``s.diff(i)`` in both algebras, so every field
operator below is written once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from gmpy2 import mpq
from scipy import sparse

from .tensor import DEFAULT_CTX, DIM, HALF, MetricContext, alt, dual2, lower

JET_ORDER_CAP = 3

_BITS = 6
_MASK = (1 << _BITS) - 1
_UNIT = tuple(1 << (_BITS * i) for i in range(DIM))


class JetError(ValueError):
    """Raised when a field cannot be evaluated as requested."""


# ---------------------------------------------------------------- polynomials

def _exps(key: int) -> tuple:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(DIM))


def _key(exps) -> int:
    return sum(e << (_BITS * i) for i, e in enumerate(exps))


_MPQ = type(mpq())


def _rational(c):
    if isinstance(c, _MPQ):
        return c
    if isinstance(c, np.integer):
        return mpq(int(c))
    if isinstance(c, (int, Fraction)):
        return mpq(c)
    raise TypeError(f"polynomial coefficients must be exact, got {type(c).__name__}")


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class Poly:
    """Polynomial in (x0..x3) with exact rational coefficients.

    Coefficients are gmpy2 ``mpq`` internally (an order of magnitude faster
    than ``Fraction``); :meth:`items` hands them out as ``Fraction``.
    Monomials are packed into one int (6 bits per exponent), so multiplying
    monomials is integer addition.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for k, c in (terms or {}).items():
            c = _rational(c)
            if c:
                self.terms[k if isinstance(k, int) else _key(k)] = c

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = _rational(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, i: int) -> "Poly":
        return cls._raw({_UNIT[i]: mpq(1)})

    # arithmetic
    def __add__(self, other):
        if isinstance(other, Poly):
            if len(other.terms) > len(self.terms):
                self, other = other, self
            out = dict(self.terms)
            for k, c in other.terms.items():
                v = out.get(k, 0) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
            return Poly._raw(out)
        if isinstance(other, (Jet, np.ndarray)):
            return NotImplemented
        c = _rational(other)
        if not c:
            return self
        out = dict(self.terms)
        v = out.get(0, 0) + c
        if v:
            out[0] = v
        else:
            out.pop(0, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            a, b = self.terms, other.terms
            if not a or not b:
                return Poly._raw({})
            if len(a) < len(b):
                a, b = b, a
            out = {}
            get = out.get
            for kb, cb in b.items():
                for ka, ca in a.items():
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
            return Poly._raw({k: c for k, c in out.items() if c})
        if isinstance(other, (Jet, np.ndarray)):
            return NotImplemented
        c = _rational(other)
        if not c:
            return Poly._raw({})
        return Poly._raw({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative int")
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other):
        return self * (1 / _rational(other))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        try:
            c = _rational(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({0: c} if c else {})

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for k in sorted(self.terms):
            e = _exps(k)
            mono = "*".join(f"x{i}^{p}" if p > 1 else f"x{i}" for i, p in enumerate(e) if p)
            parts.append(f"{self.terms[k]}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(parts) + ")"

    # calculus
    def diff(self, i: int) -> "Poly":
        shift = _BITS * i
        unit = _UNIT[i]
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - unit] = c * e
        return Poly._raw(out)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(_exps(k)) for k in self.terms), default=-1)

    def items(self):
        """(exponent tuple, coefficient) pairs."""
        return [(_exps(k), to_fraction(c)) for k, c in self.terms.items()]

    def evaluate(self, point):
        """Value at a point; exact (Fraction) if the point is rational."""
        exact = all(isinstance(v, (int, np.integer, Fraction)) for v in point)
        total = Fraction(0) if exact else 0.0
        for k, c in self.terms.items():
            term = to_fraction(c) if exact else float(c)
            for i, e in enumerate(_exps(k)):
                if e:
                    term = term * point[i] ** e
            total = total + term
        return total

    def compose(self, x):
        """Substitute scalars (e.g. jets) for the coordinates."""
        powers = [[1] for _ in range(DIM)]
        total = 0
        for k, c in self.terms.items():
            e = _exps(k)
            term = float(c) if isinstance(x[0], Jet) else c
            for i in range(DIM):
                while len(powers[i]) <= e[i]:
                    powers[i].append(powers[i][-1] * x[i])
                if e[i]:
                    term = powers[i][e[i]] * term
            total = term + total
        return total


# ---------------------------------------------------------------- jets

@lru_cache(maxsize=None)
def monomials(order: int) -> tuple:
    """Multi-indices of total degree <= order, sorted by degree."""
    out = []
    for d in range(order + 1):
        for combo in combinations_with_replacement(range(DIM), d):
            e = [0] * DIM
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(order: int) -> dict:
    return {m: j for j, m in enumerate(monomials(order))}


@lru_cache(maxsize=None)
def _mul_table(order: int):
    monos = monomials(order)
    idx = _index(order)
    ia, ib, ic = [], [], []
    for a, ma in enumerate(monos):
        for b, mb in enumerate(monos):
            m = tuple(p + q for p, q in zip(ma, mb))
            if sum(m) <= order:
                ia.append(a)
                ib.append(b)
                ic.append(idx[m])
    mat = sparse.csr_matrix(
        (np.ones(len(ic)), (np.array(ic), np.arange(len(ic)))), shape=(len(monos), len(ic))
    )
    return np.array(ia), np.array(ib), mat


@lru_cache(maxsize=None)
def _diff_table(order: int, i: int):
    src_idx = _index(order)
    src, fac = [], []
    for m in monomials(order - 1):
        up = list(m)
        up[i] += 1
        src.append(src_idx[tuple(up)])
        fac.append(float(up[i]))
    return np.array(src), np.array(fac)[:, None]


def _nterms(order: int) -> int:
    return math.comb(order + DIM, DIM)


class Jet:
    """Truncated Taylor series in 4 variables, batched over P base points.

    ``c[j, p]`` is the Taylor coefficient of monomial ``monomials(order)[j]``
    at point ``p``; partial derivatives are coefficients times factorials.
    """

    __slots__ = ("c", "order")

    def __init__(self, c: np.ndarray, order: int):
        self.c = c
        self.order = order

    @classmethod
    def seed(cls, points: np.ndarray, order: int) -> tuple:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = _nterms(order)
        out = []
        for i in range(DIM):
            c = np.zeros((n, points.shape[0]))
            c[0] = points[:, i]
            if order >= 1:
                c[1 + i] = 1.0
            out.append(cls(c, order))
        return tuple(out)

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: _nterms(order)], order)

    def _pair(self, other: "Jet"):
        if self.order == other.order:
            return self.c, other.c, self.order
        n = min(self.order, other.order)
        k = _nterms(n)
        return self.c[:k], other.c[:k], n

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, n = self._pair(other)
            return Jet(a + b, n)
        if isinstance(other, (Poly, np.ndarray)):
            return NotImplemented
        c = self.c.copy()
        c[0] += float(other)
        return Jet(c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, n = self._pair(other)
            if n == 0:
                return Jet(a * b, 0)
            ia, ib, mat = _mul_table(n)
            return Jet(mat @ (a[ia] * b[ib]), n)
        if isinstance(other, (Poly, np.ndarray)):
            return NotImplemented
        return Jet(self.c * float(other), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / float(other), self.order)

    def diff(self, i: int) -> "Jet":
        if self.order == 0:
            raise JetError("jet order exhausted")
        src, fac = _diff_table(self.order, i)
        return Jet(self.c[src] * fac, self.order - 1)

    def _compose(self, derivs) -> "Jet":
        # f(a0 + u) = sum_k f^(k)(a0) u^k / k!
        u = Jet(self.c.copy(), self.order)
        u.c[0] = 0.0
        out = Jet(np.zeros_like(self.c), self.order)
        out.c[0] = derivs[0]
        power = None
        for k in range(1, self.order + 1):
            power = u if power is None else power * u
            out = out + Jet(power.c * (derivs[k] / math.factorial(k)), self.order)
        return out

    def sin(self) -> "Jet":
        a = self.c[0]
        cyc = [np.sin(a), np.cos(a), -np.sin(a), -np.cos(a)]
        return self._compose([cyc[k % 4] for k in range(self.order + 1)])

    def cos(self) -> "Jet":
        a = self.c[0]
        cyc = [np.cos(a), -np.sin(a), -np.cos(a), np.sin(a)]
        return self._compose([cyc[k % 4] for k in range(self.order + 1)])

    def exp(self) -> "Jet":
        e = np.exp(self.c[0])
        return self._compose([e] * (self.order + 1))

    def reciprocal(self) -> "Jet":
        a = self.c[0]
        return self._compose([(-1) ** k * math.factorial(k) / a ** (k + 1) for k in range(self.order + 1)])

    def partial(self, multi) -> np.ndarray:
        """``d^|m| f / dx^m`` at every base point, for a derivative multi-index."""
        e = [0] * DIM
        for i in multi:
            e[i] += 1
        if sum(e) > self.order:
            raise JetError("requested derivative exceeds the jet order")
        scale = math.prod(math.factorial(k) for k in e)
        return self.c[_index(self.order)[tuple(e)]] * scale

    def __repr__(self):
        return f"Jet(order={self.order}, points={self.c.shape[1]})"


def sin(s):
    if isinstance(s, Jet):
        return s.sin()
    if isinstance(s, Poly):
        raise JetError("sin is not available on the polynomial backend")
    return math.sin(s)


def cos(s):
    if isinstance(s, Jet):
        return s.cos()
    if isinstance(s, Poly):
        raise JetError("cos is not available on the polynomial backend")
    return math.cos(s)


# ---------------------------------------------------------------- scalar helpers

def _diff_scalar(s, i: int):
    if isinstance(s, (Poly, Jet)):
        return s.diff(i)
    return 0


def diff_array(arr: np.ndarray, i: int) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx, s in np.ndenumerate(arr):
        out[idx] = _diff_scalar(s, i)
    return out


def is_zero_scalar(s) -> bool:
    if isinstance(s, Poly):
        return s.is_zero()
    if isinstance(s, Jet):
        return not np.any(s.c)
    return s == 0


def value_array(arr: np.ndarray, npoints: int) -> np.ndarray:
    """Float values of an array of jets/numbers, shape ``(P,) + arr.shape``."""
    out = np.zeros((npoints,) + arr.shape)
    for idx, s in np.ndenumerate(arr):
        if isinstance(s, Jet):
            out[(slice(None),) + idx] = s.value
        elif isinstance(s, Poly):
            raise JetError("polynomial scalar in a float evaluation")
        else:
            out[(slice(None),) + idx] = float(s)
    return out


@lru_cache(maxsize=1)
def poly_coords() -> tuple:
    return tuple(Poly.var(i) for i in range(DIM))


def jet_coords(points, order: int) -> tuple:
    return Jet.seed(points, order)


# ---------------------------------------------------------------- fields

POLYNOMIAL = "polynomial"
CLOSURE = "closure-AD"


class JetField:
    """Lazy tensor field.

    ``fn(x)`` maps a coordinate tuple to an object array of shape
    ``(4,)*rank``.  ``depth`` counts derivatives already consumed, so
    ``max_order = cap - depth`` is the number still available.  Polynomial
    fields have no cap.
    """

    def __init__(self, fn, variance, *, backend=CLOSURE, depth=0, cap=JET_ORDER_CAP,
                 antisymmetric=False, domain=None, name=""):
        self._fn = fn
        self.variance = tuple(variance)
        self.backend = backend
        self.depth = depth
        self.cap = cap
        self.antisymmetric = antisymmetric
        self.domain = domain
        self.name = name

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def max_order(self):
        if self.backend == POLYNOMIAL:
            return None
        return self.cap - self.depth

    def at(self, x) -> np.ndarray:
        if isinstance(x[0], Poly) and self.backend != POLYNOMIAL:
            raise JetError(f"field {self.name or '?'} has no polynomial representation")
        out = self._fn(x)
        return np.asarray(out, dtype=object).reshape((DIM,) * self.rank)

    # evaluation front ends
    def exact(self) -> np.ndarray:
        """Exact polynomial components (polynomial backend only)."""
        if self.backend != POLYNOMIAL:
            raise JetError("exact components need the polynomial backend")
        out = self.at(poly_coords())
        res = np.empty(out.shape, dtype=object)
        for idx, s in np.ndenumerate(out):
            res[idx] = s if isinstance(s, Poly) else Poly.const(s)
        return res

    def _check_domain(self, points):
        if self.domain is not None and not np.all(self.domain(points)):
            raise JetError(f"evaluation outside the validity domain of {self.name or 'field'}")

    def jets(self, points, order: int = 0) -> np.ndarray:
        """Object array of jets carrying ``order`` further derivatives."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        self._check_domain(points)
        if self.backend != POLYNOMIAL and order > self.max_order:
            raise JetError("requested order exceeds the remaining jet order")
        return self.at(jet_coords(points, self.depth + order))

    def values(self, points) -> np.ndarray:
        """Float values, shape ``(P,) + (4,)*rank``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.backend == POLYNOMIAL:
            comps = self.exact()
            out = np.zeros((points.shape[0],) + comps.shape)
            for idx, p in np.ndenumerate(comps):
                for j, pt in enumerate(points):
                    out[(j,) + idx] = p.evaluate([float(v) for v in pt])
            return out
        return value_array(self.jets(points, 0), points.shape[0])

    def partials(self, point, order: int) -> dict:
        """All partial derivatives up to ``order`` at one point.

        Keys are sorted tuples of derivative indices, values are float arrays
        of the field's shape.
        """
        arr = self.jets(np.asarray(point, dtype=float)[None, :], order) if self.backend != POLYNOMIAL \
            else self.at(jet_coords(np.asarray(point, dtype=float)[None, :], order))
        out = {}
        for k in range(order + 1):
            for multi in combinations_with_replacement(range(DIM), k):
                vals = np.zeros(arr.shape)
                for idx, s in np.ndenumerate(arr):
                    if isinstance(s, Jet):
                        vals[idx] = s.partial(multi)[0]
                    elif k == 0:
                        vals[idx] = float(s)
                out[multi] = vals
        return out

    # algebra
    def _binary(self, other, op):
        if isinstance(other, JetField):
            if other.variance != self.variance:
                raise JetError("fields must share variance")
            return fmap(lambda a, b: op(a, b), self, other, variance=self.variance,
                        antisymmetric=self.antisymmetric and other.antisymmetric)
        if self.backend == POLYNOMIAL and isinstance(other, float):
            # inexact scalars leave the exact backend
            return JetField(lambda x: op(self.at(x), other), self.variance, backend=CLOSURE,
                            depth=self.depth, cap=JET_ORDER_CAP, antisymmetric=self.antisymmetric,
                            name=self.name)
        return fmap(lambda a: op(a, other), self, variance=self.variance,
                    antisymmetric=self.antisymmetric)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, s):
        if isinstance(s, JetField):
            raise JetError("use fmap for products of fields")
        return self._binary(s, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return fmap(lambda a: -a, self, variance=self.variance, antisymmetric=self.antisymmetric)

    def __repr__(self):
        return f"JetField({self.name or '?'}, variance={''.join(self.variance)}, backend={self.backend})"


class PolynomialField(JetField):
    """Field with stored exact polynomial components."""

    def __init__(self, comps, variance, *, antisymmetric=False, name=""):
        comps = np.asarray(comps, dtype=object).reshape((DIM,) * len(tuple(variance)))
        fixed = np.empty(comps.shape, dtype=object)
        for idx, s in np.ndenumerate(comps):
            fixed[idx] = s if isinstance(s, Poly) else Poly.const(s)
        self.comps = fixed
        super().__init__(self._eval, variance, backend=POLYNOMIAL, cap=None,
                         antisymmetric=antisymmetric, name=name)

    def _eval(self, x):
        if isinstance(x[0], Poly):
            return self.comps
        out = np.empty(self.comps.shape, dtype=object)
        for idx, p in np.ndenumerate(self.comps):
            out[idx] = p.compose(x) if p.terms else 0
        return out

    @property
    def degree(self) -> int:
        return max((p.degree for p in self.comps.flat), default=-1)


def fmap(fn, *fields: JetField, variance, antisymmetric=False, name="", extra_depth=0) -> JetField:
    """Pointwise combination of fields; ``fn`` receives their component arrays."""
    poly = all(f.backend == POLYNOMIAL for f in fields)
    depth = max((f.depth for f in fields), default=0) + extra_depth
    caps = [f.cap for f in fields if f.cap is not None]
    cap = min(caps) if caps else JET_ORDER_CAP
    domains = [f.domain for f in fields if f.domain is not None]
    domain = (lambda pts: np.all([d(pts) for d in domains], axis=0)) if domains else None
    return JetField(lambda x: fn(*[f.at(x) for f in fields]), variance,
                    backend=POLYNOMIAL if poly else CLOSURE, depth=depth,
                    cap=None if poly else cap, antisymmetric=antisymmetric,
                    domain=domain, name=name)


def materialize(f: JetField) -> JetField:
    """Precompute a polynomial field's components (other fields are returned as is)."""
    if f.backend != POLYNOMIAL or isinstance(f, PolynomialField):
        return f
    return PolynomialField(f.exact(), f.variance, antisymmetric=f.antisymmetric, name=f.name)


def constant_field(arr, variance, *, antisymmetric=False, name="") -> PolynomialField:
    return PolynomialField(np.asarray(arr, dtype=object), variance,
                           antisymmetric=antisymmetric, name=name)


def coordinate_field() -> PolynomialField:
    """The position vector field ``x^mu``."""
    return PolynomialField(np.array(poly_coords(), dtype=object), ("u",), name="x")


def zero_field(variance) -> PolynomialField:
    return PolynomialField(np.zeros((DIM,) * len(variance), dtype=object), variance)


# ---------------------------------------------------------------- operators

def _require_order(f: JetField):
    if f.max_order is not None and f.max_order < 1:
        raise JetError(f"jet order exhausted for {f.name or 'field'}")


def total_derivative(f: JetField) -> JetField:
    """``D_m f``: new leading down slot, one jet order consumed."""
    _require_order(f)

    def fn(arr):
        return np.stack([diff_array(arr, i) for i in range(DIM)])

    return fmap(fn, f, variance=("d",) + f.variance, extra_depth=1,
                name=f"D({f.name})" if f.name else "")


def exterior_D(q: JetField) -> JetField:
    """Weighted exterior derivative of a form: ``(Dq)_{s m..} = d_[s q_{m..]}``."""
    p = q.rank
    if p > 3:
        raise JetError("exterior derivative of a 4-form")
    if any(v != "d" for v in q.variance):
        raise JetError("exterior derivative expects a form (all slots down)")
    dq = total_derivative(q)
    if p == 0:
        return dq
    return fmap(lambda a: alt(a, range(p + 1)), dq, variance=("d",) * (p + 1),
                antisymmetric=True)


def divergence(v: JetField) -> JetField:
    """``D_m v^m`` of a vector field, or of the first slot of a tensor field."""
    if not v.variance or v.variance[0] != "u":
        raise JetError("divergence expects an upper first slot")
    dv = total_derivative(v)
    return fmap(lambda a: np.trace(a, axis1=0, axis2=1), dv, variance=v.variance[1:])


def gradient_up(f: JetField) -> JetField:
    """``d^m f`` for a scalar field."""
    if f.rank != 0:
        raise JetError("gradient expects a scalar")
    return fmap(lambda a: lower(a), total_derivative(f), variance=("u",))


def box(f: JetField) -> JetField:
    """Wave operator ``d^m d_m``."""
    return divergence(gradient_up(f))


def interior_field(xi: JetField, t: JetField) -> JetField:
    if xi.variance != ("u",) or not t.variance or t.variance[0] != "d":
        raise JetError("interior expects an upper vector and a lower first slot")
    return fmap(lambda a, b: np.tensordot(a, b, axes=([0], [0])), xi, t,
                variance=t.variance[1:], antisymmetric=t.antisymmetric and t.rank > 2)


def hodge_field(f: JetField, ctx: MetricContext = DEFAULT_CTX) -> JetField:
    if f.variance != ("d", "d"):
        raise JetError("Hodge dual expects a rank-2 field with both slots down")
    return fmap(lambda a: dual2(a, ctx), f, variance=("d", "d"), antisymmetric=True)


def lie_derivative_coordinate(xi: JetField, t: JetField) -> JetField:
    """``L_xi t_{a..} = xi^s d_s t_{a..} + sum_slots t_{..s..} d_a xi^s`` for covariant ``t``."""
    if xi.variance != ("u",) or any(v != "d" for v in t.variance):
        raise JetError("Lie derivative expects an upper vector and a covariant tensor")
    p = t.rank

    def fn(x_arr, dx, t_arr, dt):
        out = np.tensordot(x_arr, dt, axes=([0], [0]))
        for slot in range(p):
            # t_{..s..} d_a xi^s with ``a`` placed back in ``slot``
            moved = np.moveaxis(t_arr, slot, -1)
            term = np.tensordot(moved, dx, axes=([-1], [1]))
            out = out + np.moveaxis(term, -1, slot)
        return out

    return fmap(fn, xi, total_derivative(xi), t, total_derivative(t), variance=t.variance,
                antisymmetric=t.antisymmetric)


def lie_derivative_cartan(xi: JetField, t: JetField) -> JetField:
    """Cartan's formula for a p-form with the weighted exterior derivative.

    With ``D`` weighted by ``1/(p+1)!`` relative to the unweighted alternating
    sum, Cartan's identity reads ``L_xi t = (p+1) xi_|Dt + p D(xi_|t)``.
    """
    p = t.rank
    if p == 0:
        return fmap(lambda a, b: np.tensordot(a, b, axes=([0], [0])), xi, total_derivative(t),
                    variance=())
    first = interior_field(xi, exterior_D(t)) * (p + 1)
    second = exterior_D(interior_field(xi, t)) * p
    return fmap(lambda a, b: a + b, first, second, variance=t.variance, antisymmetric=True)


def lie_derivative(xi: JetField, t: JetField) -> JetField:
    """Lie derivative of a covariant field; forms use Cartan's formula."""
    _require_order(t)
    _require_order(xi)
    if t.antisymmetric or t.rank <= 1:
        return lie_derivative_cartan(xi, t)
    return lie_derivative_coordinate(xi, t)


# ---------------------------------------------------------------- checks

def is_zero_field(f: JetField) -> bool:
    """Exact test on the polynomial backend."""
    return all(p.is_zero() for p in f.exact().flat)


def max_abs(f: JetField, points) -> float:
    vals = f.values(points)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def residual_stats(f: JetField, points=None) -> dict:
    """Exact zero test (polynomial) or max/mean absolute value over ``points``."""
    if f.backend == POLYNOMIAL and points is None:
        zero = is_zero_field(f)
        return {"exact": True, "zero": zero, "max": 0.0 if zero else float("inf"), "mean": 0.0 if zero else float("inf")}
    vals = np.abs(f.values(points))
    return {"exact": False, "max": float(vals.max()) if vals.size else 0.0,
            "mean": float(vals.mean()) if vals.size else 0.0}


def finite_difference(f: JetField, points, i: int, h: float = 1e-5) -> np.ndarray:
    """Richardson-extrapolated central difference of ``f`` along ``x^i``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    e = np.zeros(DIM)
    e[i] = 1.0

    def central(step):
        return (f.values(points + step * e) - f.values(points - step * e)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3
