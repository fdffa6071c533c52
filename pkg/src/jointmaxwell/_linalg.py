"""Exact rank and null space over the rationals (sympy's DomainMatrix)."""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _dm(rows, ncols=None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    data = [[QQ(int(Fraction(v).numerator), int(Fraction(v).denominator)) for v in r] for r in rows]
    return DomainMatrix(data, (len(rows), ncols), QQ)


def rank(rows, ncols=None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return _dm(rows, ncols).rank()


def nullspace(rows, ncols: int) -> list:
    """Basis of ``{v : M v = 0}`` as lists of Fractions (reduced-echelon form)."""
    rows = list(rows)
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = _dm(rows, ncols).nullspace()
    out = []
    for r in ns.to_Matrix().tolist():
        out.append([Fraction(int(v.p), int(v.q)) for v in r])
    return out
