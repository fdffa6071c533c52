"""Lie algebra of the 38 geometric symmetries of the Lorentz-gauge joint system.

Generators are identified with 38-vectors in the basis of
:func:`jointmaxwell.symmetries.basis38`.  The bracket of two linear
generators with actions ``L1``, ``L2`` has characteristic
``L2(L1 u) - L1(L2 u)`` (the commutator of the corresponding evolutionary
vector fields).  With that convention the table is

    [rb(g1), rb(g2)]   = 2 rb([g2, g1])
    [cX(x1), cX(x2)]   = cX([x2, x1])
    [cX(x1), cX'(x2)]  = cX'([x2, x1])
    [cX'(x1), cX'(x2)] = -cX([x2, x1])

with scaling and duality central and rb commuting with every cX, cX'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _linalg
from .currents import nonlocal_coefficient_blocks
from .geometry import (
    CKV_LABELS,
    PAIRS,
    ConformalKilling,
    ckv_basis,
    ckv_commutator,
    killing_yano_dimension,
    skew_basis,
    skew_commutator,
)
from .jetfield import is_zero_field, materialize, residual_stats, POLYNOMIAL
from .solutions import MaxwellSolution, polynomial_solutions
from .symmetries import (
    Combination,
    Composed,
    DualityRotation,
    InternalRB,
    Scaling,
    SymmetryGenerator,
    WeightedConformal,
    WeightedConformalDual,
    basis38,
    nonlocal_basis,
)

N = 38
IDS = tuple(i for i, _ in basis38())
_INDEX = {i: n for n, i in enumerate(IDS)}
_RB0, _CX0, _CXD0 = 2, 8, 23


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------- coordinates

def _zero() -> list:
    return [Fraction(0)] * N


def _skew_vector(g) -> list:
    return [Fraction(g[a, b]) for a, b in PAIRS]


def _skew_from(v) -> np.ndarray:
    g = np.zeros((4, 4), dtype=object)
    g[:] = Fraction(0)
    for (a, b), c in zip(PAIRS, v):
        g[a, b], g[b, a] = c, -c
    return g


def to_vector(gen: SymmetryGenerator) -> list:
    """Coordinates of a generator in the 38-basis."""
    v = _zero()
    if isinstance(gen, Scaling):
        v[0] = Fraction(1)
    elif isinstance(gen, DualityRotation):
        v[1] = Fraction(1)
    elif isinstance(gen, InternalRB):
        v[_RB0:_RB0 + 6] = _skew_vector(gen.gamma)
    elif isinstance(gen, WeightedConformalDual):
        v[_CXD0:_CXD0 + 15] = gen.xi.vector()
    elif isinstance(gen, WeightedConformal):
        v[_CX0:_CX0 + 15] = gen.xi.vector()
    elif isinstance(gen, Combination):
        for c, g in gen.terms:
            v = [a + Fraction(c) * b for a, b in zip(v, to_vector(g))]
    else:
        raise AlgebraError(f"{gen.label} is outside the 38-dimensional catalog; decompose it first")
    return v


def from_vector(v) -> Combination:
    """A :class:`Combination` with one term per nonzero block."""
    v = [Fraction(x) for x in v]
    if len(v) != N:
        raise AlgebraError("expected 38 coordinates")
    terms = []
    if v[0]:
        terms.append((v[0], Scaling()))
    if v[1]:
        terms.append((v[1], DualityRotation()))
    if any(v[_RB0:_RB0 + 6]):
        terms.append((1, InternalRB(_skew_from(v[_RB0:_RB0 + 6]))))
    if any(v[_CX0:_CX0 + 15]):
        terms.append((1, WeightedConformal(ConformalKilling.from_vector(v[_CX0:_CX0 + 15]))))
    if any(v[_CXD0:_CXD0 + 15]):
        terms.append((1, WeightedConformalDual(ConformalKilling.from_vector(v[_CXD0:_CXD0 + 15]))))
    return Combination(tuple(terms))


def _kind(i: int) -> str:
    if i < _RB0:
        return "central"
    if i < _CX0:
        return "rb"
    if i < _CXD0:
        return "cX"
    return "cX'"


def _basis_bracket(i: int, j: int) -> list:
    """Bracket of basis elements ``i`` and ``j`` from the structure rules."""
    ki, kj = _kind(i), _kind(j)
    out = _zero()
    if "central" in (ki, kj):
        return out
    if ki == "rb" and kj == "rb":
        g1 = skew_basis(*PAIRS[i - _RB0])
        g2 = skew_basis(*PAIRS[j - _RB0])
        out[_RB0:_RB0 + 6] = [2 * c for c in _skew_vector(skew_commutator(g2, g1))]
        return out
    if "rb" in (ki, kj):
        return out
    cks = ckv_basis()
    x1 = cks[(i - _CX0) % 15]
    x2 = cks[(j - _CX0) % 15]
    x3 = ckv_commutator(x2, x1).vector()
    if ki == "cX" and kj == "cX":
        out[_CX0:_CX0 + 15] = x3
    elif ki == "cX'" and kj == "cX'":
        out[_CX0:_CX0 + 15] = [-c for c in x3]
    else:
        out[_CXD0:_CXD0 + 15] = x3
    return out


# ---------------------------------------------------------------- table

@dataclass
class BracketTable:
    """Structure constants: ``entries[(i, j)]`` is the 38-vector of ``[e_i, e_j]``."""

    entries: dict = field(default_factory=dict)

    @classmethod
    def build(cls) -> "BracketTable":
        t = cls()
        for i in range(N):
            for j in range(i + 1, N):
                t.entries[(i, j)] = _basis_bracket(i, j)
        return t

    def basis_bracket(self, i: int, j: int) -> list:
        if i == j:
            return _zero()
        if i < j:
            return list(self.entries[(i, j)])
        return [-c for c in self.entries[(j, i)]]

    def bracket_vectors(self, u, v) -> list:
        out = _zero()
        nz_u = [(i, Fraction(c)) for i, c in enumerate(u) if c]
        nz_v = [(j, Fraction(c)) for j, c in enumerate(v) if c]
        for i, a in nz_u:
            for j, b in nz_v:
                if i == j:
                    continue
                e = self.basis_bracket(i, j)
                for k, c in enumerate(e):
                    if c:
                        out[k] += a * b * c
        return out

    def antisymmetry_holds(self) -> bool:
        for i in range(N):
            for j in range(N):
                s = [a + b for a, b in zip(self.basis_bracket(i, j), self.basis_bracket(j, i))]
                if any(s):
                    return False
        return True

    def jacobi(self, i: int, j: int, k: int) -> list:
        e = [[Fraction(int(n == m)) for m in range(N)] for n in (i, j, k)]
        a, b, c = e
        terms = (self.bracket_vectors(self.bracket_vectors(a, b), c),
                 self.bracket_vectors(self.bracket_vectors(b, c), a),
                 self.bracket_vectors(self.bracket_vectors(c, a), b))
        return [x + y + z for x, y, z in zip(*terms)]

    def jacobi_holds(self) -> bool:
        return all(not any(self.jacobi(i, j, k)) for i, j, k in combinations(range(N), 3))

    def rows(self) -> list:
        """One record per nonredundant pair, with the nonzero coefficients."""
        out = []
        for (i, j), v in sorted(self.entries.items()):
            out.append({"g1": IDS[i], "g2": IDS[j],
                        "bracket": {IDS[k]: str(c) for k, c in enumerate(v) if c}})
        return out

    def ad(self, x) -> list:
        """Matrix of ``ad_x`` (rows: output coordinate, columns: input)."""
        cols = [self.bracket_vectors(x, [Fraction(int(n == m)) for m in range(N)]) for n in range(N)]
        return [[cols[c][r] for c in range(N)] for r in range(N)]


_TABLE = None


def bracket_table() -> BracketTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = BracketTable.build()
    return _TABLE


def bracket(g1: SymmetryGenerator, g2: SymmetryGenerator) -> Combination:
    """The table's prediction for ``[g1, g2]``."""
    return from_vector(bracket_table().bracket_vectors(to_vector(g1), to_vector(g2)))


# ---------------------------------------------------------------- numeric check

def commutator_action(g1: SymmetryGenerator, g2: SymmetryGenerator, A, Ap, ctx):
    """Characteristic of ``[g1, g2]`` by double application: ``L2 L1 u - L1 L2 u``."""
    a = Composed(g2, g1).act(A, Ap, ctx)
    b = Composed(g1, g2).act(A, Ap, ctx)
    return a[0] - b[0], a[1] - b[1]


def verify_bracket_numeric(g1, g2, sol: MaxwellSolution, points=None, predicted=None) -> dict:
    """Residual of the double-application commutator against the table entry.

    ``predicted`` overrides the table (for negative controls).
    """
    pred = bracket(g1, g2) if predicted is None else predicted
    Q, Qp = commutator_action(g1, g2, sol.A, sol.Aprime, sol.ctx)
    R, Rp = pred.act(sol.A, sol.Aprime, sol.ctx)
    r, rp = Q - R, Qp - Rp
    if sol.backend == POLYNOMIAL:
        zero = is_zero_field(materialize(r)) and is_zero_field(materialize(rp))
        return {"exact": True, "zero": zero, "pass": zero}
    if points is None:
        raise AlgebraError("sample points are needed for a non-polynomial solution")
    m = max(residual_stats(r, points)["max"], residual_stats(rp, points)["max"])
    return {"exact": False, "max": m, "pass": m <= 1e-9}


def generic_solution(degrees=(0, 1), seed: int = 0) -> MaxwellSolution:
    """Superposition of all polynomial fixtures of the given degrees with random rational weights."""
    rng = np.random.default_rng(seed)
    out = None
    for d in degrees:
        for s in polynomial_solutions(d):
            w = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50))) * (1 if rng.random() < 0.5 else -1)
            term = s.scaled(w)
            out = term if out is None else out + term
    return out


def verify_all_brackets(sols, points=None) -> dict:
    """Check every nonredundant basis pair; returns counts and the failing pairs."""
    gens = [g for _, g in basis38()]
    failures = []
    count = 0
    for i, j in combinations(range(N), 2):
        count += 1
        for s in sols:
            if not verify_bracket_numeric(gens[i], gens[j], s, points)["pass"]:
                failures.append((IDS[i], IDS[j], s.name))
                break
    return {"pairs": count, "failures": failures}


# ---------------------------------------------------------------- subalgebras

def _restricted_killing_form(table: BracketTable, idx: list) -> list:
    """Killing form of the subalgebra spanned by basis elements ``idx``."""
    ads = []
    for i in idx:
        e = [Fraction(int(n == i)) for n in range(N)]
        full = table.ad(e)
        ads.append([[full[r][c] for c in idx] for r in idx])
    n = len(idx)
    K = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            tr = sum(ads[a][r][c] * ads[b][c][r] for r in range(n) for c in range(n))
            K[a][b] = K[b][a] = tr
    return K


def inertia(sym) -> tuple:
    """``(positive, negative, zero)`` counts of an exact symmetric matrix by congruence."""
    m = [[Fraction(v) for v in row] for row in sym]
    n = len(m)
    pos = neg = 0
    for k in range(n):
        if m[k][k] == 0:
            swap = next((j for j in range(k + 1, n) if m[j][j] != 0), None)
            if swap is not None:
                m[k], m[swap] = m[swap], m[k]
                for row in m:
                    row[k], row[swap] = row[swap], row[k]
            else:
                j = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
                if j is None:
                    continue
                # e_k -> e_k + e_j makes the pivot 2 m_kj
                for c in range(n):
                    m[k][c] += m[j][c]
                for r in range(n):
                    m[r][k] += m[r][j]
        p = m[k][k]
        if p == 0:
            continue
        for r in range(k + 1, n):
            f = m[r][k] / p
            if f:
                for c in range(n):
                    m[r][c] -= f * m[k][c]
        for c in range(k + 1, n):
            m[k][c] = Fraction(0)
            m[c][k] = Fraction(0)
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg, n - pos - neg


def killing_form_signatures() -> dict:
    """Signatures of the Killing forms of the rb (so(3,1)) and cX (so(4,2)) subalgebras."""
    t = bracket_table()
    rb = list(range(_RB0, _RB0 + 6))
    cx = list(range(_CX0, _CX0 + 15))
    return {"rb": inertia(_restricted_killing_form(t, rb)),
            "cX": inertia(_restricted_killing_form(t, cx))}


# ---------------------------------------------------------------- dimension audit

def _flatten_action(Q, Qp) -> dict:
    out = {}
    for tag, f in (("Q", Q), ("Q'", Qp)):
        for idx, p in np.ndenumerate(materialize(f).exact()):
            for e, c in p.items():
                out[(tag, idx, e)] = c
    return out


def _rank_of(dicts) -> int:
    keys = sorted({k for d in dicts for k in d}, key=repr)
    return _linalg.rank([[d.get(k, Fraction(0)) for k in keys] for d in dicts], len(keys))


def symmetry_rank(sol: MaxwellSolution = None) -> int:
    """Rank of the 38 generator actions on a generic exact solution."""
    sol = sol or generic_solution((0, 1, 2))
    return _rank_of([_flatten_action(*g.act(sol.A, sol.Aprime, sol.ctx)) for _, g in basis38()])


def nonlocal_symmetry_rank(sol: MaxwellSolution = None) -> int:
    """Rank of the induced field actions ``P = D Q`` of the 20 Killing-Yano generators."""
    from .jetfield import exterior_D

    sol = sol or generic_solution((0, 1, 2))
    vecs = []
    for _, g in nonlocal_basis():
        Q, Qp = g.act(sol.A, sol.Aprime, sol.ctx)
        P = materialize(exterior_D(Q))
        vecs.append({(idx, e): c for idx, p in np.ndenumerate(P.exact()) for e, c in p.items()})
    return _rank_of(vecs)


def nonlocal_current_rank() -> int:
    return _rank_of([b.vector() for _, b in nonlocal_coefficient_blocks()])


EXPECTED_DIMENSIONS = {"symmetry_algebra": 38, "nonlocal_symmetries": 14, "nonlocal_currents": 15,
                       "killing_yano": 10}


def dimension_audit(sol: MaxwellSolution = None) -> dict:
    found = {
        "symmetry_algebra": symmetry_rank(sol),
        "nonlocal_symmetries": nonlocal_symmetry_rank(sol),
        "nonlocal_currents": nonlocal_current_rank(),
        "killing_yano": killing_yano_dimension(),
    }
    return {k: {"expected": EXPECTED_DIMENSIONS[k], "found": v, "pass": v == EXPECTED_DIMENSIONS[k]}
            for k, v in found.items()}


__all__ = [
    "BracketTable", "AlgebraError", "IDS", "bracket", "bracket_table", "to_vector", "from_vector",
    "commutator_action", "verify_bracket_numeric", "verify_all_brackets", "generic_solution",
    "killing_form_signatures", "inertia", "dimension_audit", "symmetry_rank", "nonlocal_symmetry_rank",
    "nonlocal_current_rank", "EXPECTED_DIMENSIONS",
]
