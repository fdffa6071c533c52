"""Conserved charges: integrals of the time component of a current over a slice.

``Q(t) = int Phi^0(t, x) d^3x`` over a box, by tensor-product Gauss-Legendre
quadrature with compensated summation.  Conservation ``Q(t1) = Q(t2)`` needs
the flux through the box faces to cancel, so the box must be a period cell of
the current; :func:`conservation_check` spot-checks that before integrating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .currents import Current
from .solutions import MaxwellSolution, PlaneWaveSpec, plane_wave


class ChargeError(ValueError):
    pass


@dataclass(frozen=True)
class SliceSpec:
    """A constant-time slice ``t`` restricted to ``box = ((lo, hi),) * 3``."""

    t: float
    box: tuple
    resolution: object = 16
    rule: str = "gauss-legendre"

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != 3:
            raise ChargeError("box needs three spatial intervals")
        if any(not hi > lo for lo, hi in box):
            raise ChargeError("box is degenerate")
        res = self.resolution
        res = (int(res),) * 3 if np.isscalar(res) else tuple(int(r) for r in res)
        if len(res) != 3 or min(res) < 4:
            raise ChargeError("resolution must be at least 4 nodes per axis")
        if self.rule != "gauss-legendre":
            raise ChargeError(f"unknown quadrature rule {self.rule!r}")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "resolution", res)

    def nodes(self):
        """Spacetime points and weights of the tensor-product rule."""
        axes = []
        for (lo, hi), n in zip(self.box, self.resolution):
            x, w = np.polynomial.legendre.leggauss(n)
            axes.append((0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w))
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        weights = np.einsum("i,j,k->ijk", *[a[1] for a in axes])
        pts = np.stack([np.full(grids[0].shape, float(self.t))] + list(grids), axis=-1).reshape(-1, 4)
        return pts, weights.reshape(-1)

    def refined(self, factor: int = 2) -> "SliceSpec":
        return SliceSpec(self.t, self.box, tuple(r * factor for r in self.resolution), self.rule)

    def at(self, t) -> "SliceSpec":
        return SliceSpec(t, self.box, self.resolution, self.rule)


def charge(c: Current, slice_: SliceSpec) -> float:
    pts, w = slice_.nodes()
    try:
        vals = c.phi.values(pts)[:, 0]
    except (ValueError, ArithmeticError) as exc:
        raise ChargeError(f"current could not be evaluated on the slice: {exc}") from None
    if not np.all(np.isfinite(vals)):
        raise ChargeError("current is not finite inside the box")
    return math.fsum(vals * w)


def periodicity_residual(c: Current, box, times, samples: int = 8, seed: int = 0) -> float:
    """Largest mismatch of ``Phi`` between opposite faces of the box."""
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in times:
        for axis in range(3):
            pts = np.empty((samples, 4))
            pts[:, 0] = t
            for j, (lo, hi) in enumerate(box):
                pts[:, j + 1] = rng.uniform(lo, hi, samples)
            lo_pts, hi_pts = pts.copy(), pts.copy()
            lo_pts[:, axis + 1] = box[axis][0]
            hi_pts[:, axis + 1] = box[axis][1]
            diff = np.abs(c.phi.values(lo_pts) - c.phi.values(hi_pts))
            worst = max(worst, float(np.max(diff)))
    return worst


def conservation_check(c: Current, t1: float, t2: float, box, resolution=16, tol: float = 1e-6,
                       periodicity_tol: float = 1e-9) -> dict:
    """Compare ``Q(t1)`` and ``Q(t2)`` and report quadrature convergence.

    Raises :class:`ChargeError` when the box is not a period cell of the
    current.  The convergence data are the self-differences
    ``|Q_n - Q_2n|`` and ``|Q_2n - Q_4n|`` at ``t1`` and their ratio.
    """
    per = periodicity_residual(c, box, (t1, t2))
    if per > periodicity_tol:
        raise ChargeError(f"box is not a period cell of the current (face mismatch {per:.3e})")
    s1 = SliceSpec(t1, box, resolution)
    q1, q2 = charge(c, s1), charge(c, s1.at(t2))
    q1_2 = charge(c, s1.refined(2))
    q1_4 = charge(c, s1.refined(4))
    e1, e2 = abs(q1 - q1_2), abs(q1_2 - q1_4)
    ratio = e1 / e2 if e2 > 0 else math.inf
    diff = abs(q1 - q2)
    return {
        "Q(t1)": q1, "Q(t2)": q2, "difference": diff, "periodicity": per,
        "self_difference": [e1, e2], "richardson_ratio": ratio,
        "converged": e2 <= max(e1, 1e-13 * max(abs(q1), 1.0)),
        "pass": diff <= tol * max(abs(q1), 1.0),
    }


def periodic_wave() -> MaxwellSolution:
    """Sum of a circularly polarized wave along ``x^1`` and a second harmonic.

    The current components have period ``2 pi`` in ``x^1`` and are constant in
    ``x^2, x^3``; the duality charge is nonzero.
    """
    w1 = plane_wave(PlaneWaveSpec((1, 1, 0, 0), (0, 0, 1, 0), "sin"))
    w2 = plane_wave(PlaneWaveSpec((1, 1, 0, 0), (0, 0, 0, 1), "cos"))
    w3 = plane_wave(PlaneWaveSpec((2, 2, 0, 0), (0, 0, 1, 0), "sin", Fraction(1, 2)))
    return w1 + w2 + w3


PERIOD_BOX = ((0.0, 2 * math.pi), (0.0, 1.0), (0.0, 1.0))
HALF_PERIOD_BOX = ((0.0, math.pi), (0.0, 1.0), (0.0, 1.0))


__all__ = ["SliceSpec", "ChargeError", "charge", "conservation_check", "periodicity_residual",
           "periodic_wave", "PERIOD_BOX", "HALF_PERIOD_BOX"]
