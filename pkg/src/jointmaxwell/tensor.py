"""Dense tensor algebra on 4D Minkowski space.

Index conventions used across the package:

* signature (-, +, +, +), ``ETA = diag(-1, 1, 1, 1)``;
* antisymmetrization is weighted by ``1/p!``;
* the Hodge dual of a 2-form is ``(*f)_{mn} = 1/2 eps_{mnst} f^{st}``;
* ``eps_{0123}`` is the orientation sign of the :class:`MetricContext`.

Two layers live here.  The array helpers (``lower``, ``raise_``, ``dual2``,
``alt`` ...) operate on plain numpy arrays whose entries may be numbers or
field scalars (polynomials, jets); the rest of the package uses them
directly.  :class:`Tensor` wraps an array together with its variance labels
and validates its inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

DIM = 4
HALF = Fraction(1, 2)
SIGNS = (-1, 1, 1, 1)


class TensorError(ValueError):
    """Raised on shape, variance or symmetry violations."""


@dataclass(frozen=True)
class MetricContext:
    """Signature is fixed; only the orientation of epsilon is configurable."""

    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise TensorError("orientation must be +1 or -1")

    @property
    def eta(self) -> np.ndarray:
        return np.diag(SIGNS).astype(object)

    @property
    def eta_inv(self) -> np.ndarray:
        return np.diag(SIGNS).astype(object)

    def epsilon(self, variance: str = "dddd") -> np.ndarray:
        return epsilon_array(self.orientation, variance)


DEFAULT_CTX = MetricContext()


def perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
            elif p[i] == p[j]:
                return 0
    return sign


@lru_cache(maxsize=None)
def _eps_entries(orientation: int, variance: str) -> tuple:
    # nonzero entries of eps with the requested index positions
    out = []
    for p in itertools.permutations(range(DIM)):
        v = orientation * perm_sign(p)
        for slot, i in enumerate(p):
            if variance[slot] == "u":
                v *= SIGNS[i]
        out.append((p, v))
    return tuple(out)


def epsilon_array(orientation: int = 1, variance: str = "dddd") -> np.ndarray:
    eps = np.zeros((DIM,) * 4, dtype=object)
    for idx, v in _eps_entries(orientation, variance):
        eps[idx] = v
    return eps


def eps_entries(ctx: MetricContext, variance: str = "dddd"):
    """Sparse list of ``(index tuple, value)`` for the nonzero eps components."""
    return _eps_entries(ctx.orientation, variance)


# ---------------------------------------------------------------- arrays

def zeros(rank: int) -> np.ndarray:
    return np.zeros((DIM,) * rank, dtype=object)


def _sign_along(rank: int, axis: int) -> np.ndarray:
    shape = [1] * rank
    shape[axis] = DIM
    return np.array(SIGNS, dtype=object).reshape(shape)


def lower(arr: np.ndarray, axes=None) -> np.ndarray:
    """Contract the given axes with eta (defaults to every axis)."""
    rank = arr.ndim
    if axes is None:
        axes = range(rank)
    out = arr
    for ax in axes:
        out = out * _sign_along(rank, ax)
    return out


raise_ = lower  # eta is its own inverse in these coordinates


def dual2(f_dd: np.ndarray, ctx: MetricContext = DEFAULT_CTX) -> np.ndarray:
    """Hodge dual of an antisymmetric array with both slots down."""
    f_uu = lower(f_dd)
    out = zeros(2)
    for (m, n, s, t), v in eps_entries(ctx):
        out[m, n] = out[m, n] + HALF * v * f_uu[s, t]
    return out


def alt(arr: np.ndarray, axes) -> np.ndarray:
    """Weighted alternation over the listed axes."""
    axes = list(axes)
    p = len(axes)
    out = None
    for perm in itertools.permutations(range(p)):
        order = list(range(arr.ndim))
        for i, j in enumerate(perm):
            order[axes[i]] = axes[j]
        term = perm_sign(perm) * np.transpose(arr, order)
        out = term if out is None else out + term
    return out * Fraction(1, math.factorial(p))


def sym(arr: np.ndarray, axes) -> np.ndarray:
    """Weighted symmetrization over the listed axes."""
    axes = list(axes)
    p = len(axes)
    out = None
    for perm in itertools.permutations(range(p)):
        order = list(range(arr.ndim))
        for i, j in enumerate(perm):
            order[axes[i]] = axes[j]
        term = np.transpose(arr, order)
        out = term if out is None else out + term
    return out * Fraction(1, math.factorial(p))


def mixed(g_dd: np.ndarray) -> np.ndarray:
    """``g_m^n`` from ``g_mn``: raise the second slot."""
    return lower(g_dd, [1])


# ---------------------------------------------------------------- Tensor

_MPQ = type(gmpy2.mpq(0))


def _kind(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        raise TensorError("boolean components are not scalars")
    if isinstance(x, (int, np.integer)):
        return "int"
    if isinstance(x, (Fraction, _MPQ)):
        return "rational"
    if isinstance(x, (float, np.floating)):
        return "float"
    return type(x).__name__


def scalar_kind(components: np.ndarray) -> str:
    """Uniform scalar kind of an array; plain ints are compatible with any kind."""
    kinds = {_kind(x) for x in np.asarray(components, dtype=object).flat}
    kinds.discard("int")
    if not kinds:
        return "rational"
    if len(kinds) > 1:
        raise TensorError(f"mixed scalar kinds {sorted(kinds)} in one tensor")
    return kinds.pop()


@dataclass(frozen=True, eq=False)
class Tensor:
    """Component array over {0,1,2,3}^rank plus per-slot variance ('u'/'d')."""

    components: np.ndarray
    variance: tuple

    def __post_init__(self):
        comps = np.array(self.components, dtype=object)
        for idx, v in np.ndenumerate(comps):
            if isinstance(v, _MPQ):
                comps[idx] = Fraction(int(v.numerator), int(v.denominator))
        var = tuple(self.variance)
        if comps.shape != (DIM,) * comps.ndim:
            raise TensorError(f"component array shape {comps.shape} is not (4,)*rank")
        if len(var) != comps.ndim:
            raise TensorError("variance length must equal rank")
        if any(v not in ("u", "d") for v in var):
            raise TensorError("variance flags must be 'u' or 'd'")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variance", var)
        object.__setattr__(self, "kind", scalar_kind(comps))

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __getitem__(self, idx):
        return self.components[idx]

    def _same_shape(self, other: "Tensor"):
        if not isinstance(other, Tensor) or other.variance != self.variance:
            raise TensorError("tensors must share rank and variance")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._same_shape(other)
        return Tensor(self.components + other.components, self.variance)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._same_shape(other)
        return Tensor(self.components - other.components, self.variance)

    def __neg__(self) -> "Tensor":
        return Tensor(-self.components, self.variance)

    def __mul__(self, s) -> "Tensor":
        return Tensor(self.components * s, self.variance)

    __rmul__ = __mul__

    def equals(self, other: "Tensor", tol: float = 0.0) -> bool:
        if not isinstance(other, Tensor) or other.variance != self.variance:
            return False
        diff = self.components - other.components
        if tol == 0.0:
            return all(x == 0 for x in diff.flat)
        return all(abs(float(x)) <= tol for x in diff.flat)

    @classmethod
    def from_list(cls, data, variance) -> "Tensor":
        return cls(np.array(data, dtype=object), tuple(variance))


def metric(ctx: MetricContext = DEFAULT_CTX, variance: str = "dd") -> Tensor:
    return Tensor(ctx.eta, tuple(variance))


def epsilon(ctx: MetricContext = DEFAULT_CTX, variance: str = "dddd") -> Tensor:
    return Tensor(ctx.epsilon(variance), tuple(variance))


def raise_lower(t: Tensor, slot: int, direction: str) -> Tensor:
    if not 0 <= slot < t.rank:
        raise TensorError(f"slot {slot} out of range for rank {t.rank}")
    if direction not in ("u", "d"):
        raise TensorError("direction must be 'u' or 'd'")
    if t.variance[slot] == direction:
        raise TensorError(f"slot {slot} is already '{direction}'")
    var = list(t.variance)
    var[slot] = direction
    return Tensor(lower(t.components, [slot]), tuple(var))


def _is_antisymmetric(c: np.ndarray, tol: float) -> bool:
    d = c + c.T
    if tol == 0.0:
        return all(x == 0 for x in d.flat)
    return all(abs(float(x)) <= tol for x in d.flat)


def _tol_for(t: Tensor) -> float:
    return 1e-12 if t.kind == "float" else 0.0


def hodge_dual2(f: Tensor, ctx: MetricContext = DEFAULT_CTX) -> Tensor:
    if f.variance != ("d", "d"):
        raise TensorError("hodge_dual2 expects a rank-2 tensor with both slots down")
    if not _is_antisymmetric(f.components, _tol_for(f)):
        raise TensorError("hodge_dual2 expects an antisymmetric tensor")
    return Tensor(dual2(f.components, ctx), ("d", "d"))


def duality_rotate(f: Tensor, fdual: Tensor, ctx: MetricContext = DEFAULT_CTX):
    """(f, *f) -> (*f, -f)."""
    if not hodge_dual2(f, ctx).equals(fdual, _tol_for(f)):
        raise TensorError("second argument is not the dual of the first")
    return fdual, -f


def antisymmetrize(t: Tensor, slots) -> Tensor:
    slots = list(slots)
    if any(not 0 <= s < t.rank for s in slots):
        raise TensorError("slot out of range")
    if len({t.variance[s] for s in slots}) > 1:
        raise TensorError("antisymmetrized slots must share variance")
    if len(slots) < 2:
        return t
    return Tensor(alt(t.components, slots), t.variance)


def interior(x: Tensor, t: Tensor) -> Tensor:
    """``(x _| t)_{n...} = x^m t_{mn...}``."""
    if x.variance != ("u",):
        raise TensorError("interior expects a vector with its index up")
    if t.rank == 0:
        raise TensorError("interior of a rank-0 tensor")
    if t.variance[0] != "d":
        raise TensorError("interior contracts into a down slot")
    comps = np.tensordot(x.components, t.components, axes=([0], [0]))
    return Tensor(comps, t.variance[1:])


def contract(t: Tensor, a: int, b: int) -> Tensor:
    if {t.variance[a], t.variance[b]} != {"u", "d"}:
        raise TensorError("contraction needs one up and one down slot")
    comps = np.trace(t.components, axis1=a, axis2=b)
    var = tuple(v for i, v in enumerate(t.variance) if i not in (a, b))
    return Tensor(comps, var)


def outer(a: Tensor, b: Tensor) -> Tensor:
    return Tensor(np.multiply.outer(a.components, b.components), a.variance + b.variance)


def wedge(a: Tensor, b: Tensor) -> Tensor:
    """Wedge of two forms, ``(p+q)!/(p!q!)`` times the weighted alternation."""
    if "u" in a.variance + b.variance:
        raise TensorError("wedge expects forms (all slots down)")
    p, q = a.rank, b.rank
    t = outer(a, b)
    if p + q < 2:
        return t
    factor = Fraction(math.factorial(p + q), math.factorial(p) * math.factorial(q))
    return Tensor(alt(t.components, range(p + q)) * factor, t.variance)
