"""Property-based checks of the structural invariants."""

import math
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from jointmaxwell.algebra import bracket_table, from_vector, generic_solution, to_vector, bracket
from jointmaxwell.charges import PERIOD_BOX, SliceSpec, charge, periodic_wave
from jointmaxwell.currents import (
    BilinearCoefficients,
    curl_current,
    duality_current,
    scaling_coefficients,
    scaling_curl_potential,
    stress_energy,
    triviality_test,
)
from jointmaxwell.geometry import (
    ConformalKilling,
    KillingYano,
    ckv_commutator,
    is_conformal_killing,
    ky_from_ckv,
    skew_commutator,
    translation,
    verify_conformal_killing,
)
from jointmaxwell.jetfield import (
    CLOSURE,
    JetField,
    Poly,
    PolynomialField,
    divergence,
    exterior_D,
    fmap,
    gradient_up,
    is_zero_field,
    total_derivative,
)
from jointmaxwell.solutions import gauge_shift, polynomial_solutions, scalar_poly_field
from jointmaxwell.symmetries import (
    Combination,
    Conformal,
    InternalRB,
    KY,
    WeightedConformal,
    WeightedConformalDual,
    check_generator,
    conformal_remainder,
    unified_ky_decompose,
)
from jointmaxwell.tensor import (
    MetricContext,
    Tensor,
    antisymmetrize,
    dual2,
    duality_rotate,
    hodge_dual2,
)

SLOW = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
FAST = settings(max_examples=60, deadline=None)

small = st.integers(-4, 4)
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
orientations = st.sampled_from([1, -1])
DEG1 = polynomial_solutions(1)


def _skew(vals):
    m = np.empty((4, 4), dtype=object)
    m[:] = Fraction(0)
    k = 0
    for a in range(4):
        for b in range(a + 1, 4):
            m[a, b], m[b, a] = vals[k], -vals[k]
            k += 1
    return m


two_forms = st.lists(rationals, min_size=6, max_size=6).map(lambda v: Tensor(_skew(v), "dd"))
ckvs = st.lists(small, min_size=15, max_size=15).map(ConformalKilling.from_vector)
monomials = st.tuples(*[st.integers(0, 2)] * 4)
polys = st.dictionaries(monomials, st.integers(-3, 3), max_size=5).map(Poly)


def _vec_field(ps):
    return PolynomialField(np.array(ps, dtype=object), ("d",))


one_forms = st.lists(polys, min_size=4, max_size=4).map(_vec_field)


def _closure(pf):
    comps = pf.comps

    def fn(x):
        out = np.empty(comps.shape, dtype=object)
        for idx, p in np.ndenumerate(comps):
            out[idx] = p.compose(x) if p.terms else 0.0
        return out

    return JetField(fn, pf.variance, backend=CLOSURE)


def _same(pair1, pair2):
    return all(is_zero_field(a - b) for a, b in zip(pair1, pair2))


# ---- tensors

@FAST
@given(two_forms, orientations)
def test_double_hodge_is_minus_identity(f, o):
    ctx = MetricContext(o)
    assert hodge_dual2(hodge_dual2(f, ctx), ctx).equals(-f)


@FAST
@given(two_forms, two_forms, rationals)
def test_hodge_is_linear(f, g, s):
    assert hodge_dual2(f * s + g).equals(hodge_dual2(f) * s + hodge_dual2(g))


@FAST
@given(two_forms)
def test_duality_rotation_has_order_four(f):
    pair = (f, hodge_dual2(f))
    for _ in range(4):
        pair = duality_rotate(*pair)
    assert pair[0].equals(f) and pair[1].equals(hodge_dual2(f))


@FAST
@given(st.lists(rationals, min_size=64, max_size=64))
def test_antisymmetrize_is_idempotent(vals):
    t = Tensor(np.array(vals, dtype=object).reshape(4, 4, 4), "ddd")
    once = antisymmetrize(t, [0, 1, 2])
    assert antisymmetrize(once, [0, 1, 2]).equals(once)


# ---- jet calculus

@SLOW
@given(one_forms)
def test_exterior_derivative_squares_to_zero(a):
    assert is_zero_field(exterior_D(exterior_D(a)))


@SLOW
@given(polys, st.lists(polys, min_size=4, max_size=4))
def test_divergence_leibniz(f, vs):
    f = scalar_poly_field(f)
    v = PolynomialField(np.array(vs, dtype=object), ("u",))
    fv = fmap(lambda a, b: b * a[()], f, v, variance=("u",))
    rhs = fmap(lambda a, dv, b, df: dv[()] * a[()] + np.dot(b, df), f, divergence(v), v,
               total_derivative(f), variance=())
    assert is_zero_field(divergence(fv) - rhs)


@SLOW
@given(one_forms, st.integers(0, 2**31 - 1))
def test_polynomial_and_closure_backends_agree(a, seed):
    pts = np.random.default_rng(seed).uniform(-1, 1, (5, 4))
    exact = total_derivative(a).values(pts).astype(float)
    ad = total_derivative(_closure(a)).values(pts).astype(float)
    np.testing.assert_allclose(ad, exact, atol=1e-9, rtol=1e-12)
    grad = gradient_up(scalar_poly_field(a.comps[0]))
    assert grad.variance == ("u",)


# ---- conformal Killing vectors

@SLOW
@given(ckvs)
def test_random_ckv_satisfies_conformal_killing_equation(xi):
    assert is_conformal_killing(xi)
    assert is_zero_field(verify_conformal_killing(xi))


@SLOW
@given(ckvs, ckvs)
def test_ckv_commutator_is_antisymmetric(a, b):
    assert ckv_commutator(a, b) == -ckv_commutator(b, a)


@settings(max_examples=8, deadline=None)
@given(ckvs, ckvs, ckvs)
def test_ckv_commutator_jacobi(a, b, c):
    total = (ckv_commutator(a, ckv_commutator(b, c)) + ckv_commutator(b, ckv_commutator(c, a))
             + ckv_commutator(c, ckv_commutator(a, b)))
    assert total.is_zero()


@FAST
@given(*[st.lists(small, min_size=6, max_size=6).map(_skew)] * 3)
def test_skew_commutator_jacobi(a, b, c):
    total = (skew_commutator(a, skew_commutator(b, c)) + skew_commutator(b, skew_commutator(c, a))
             + skew_commutator(c, skew_commutator(a, b)))
    assert all(v == 0 for v in total.flat)


# ---- solutions

@SLOW
@given(polys, polys)
def test_gauge_shift_keeps_field_strength(chi, chip):
    sol = gauge_shift(DEG1[5], scalar_poly_field(chi), scalar_poly_field(chip))
    res = sol.residual_fields()
    assert is_zero_field(res["F = DA"]) and is_zero_field(res["*F = DA'"])


@SLOW
@given(st.lists(rationals, min_size=len(DEG1), max_size=len(DEG1)))
def test_superpositions_and_duals_are_solutions(weights):
    sol = None
    for w, s in zip(weights, DEG1):
        sol = s.scaled(w) if sol is None else sol + s.scaled(w)
    assert sol.is_valid() and sol.dual().is_valid()


# ---- symmetries

@SLOW
@given(ckvs, st.sampled_from(range(len(DEG1))))
def test_even_parity(xi, i):
    sol = DEG1[i]
    q, qp = WeightedConformal(xi).act(sol.A, sol.Aprime)
    s, _ = WeightedConformal(xi).act(sol.Aprime, -sol.A)
    d, dp = WeightedConformalDual(xi).act(sol.A, sol.Aprime)
    assert is_zero_field(qp - s)
    assert is_zero_field(d - qp) and is_zero_field(dp + q)


@SLOW
@given(ckvs, rationals, st.sampled_from(range(len(DEG1))), st.sampled_from(range(len(DEG1))))
def test_action_is_linear_in_the_solution(xi, s, i, j):
    s1, s2 = DEG1[i], DEG1[j].scaled(s)
    gen = WeightedConformal(xi)
    both = gen.act(s1.A + s2.A, s1.Aprime + s2.Aprime)
    q1, qp1 = gen.act(s1.A, s1.Aprime)
    q2, qp2 = gen.act(s2.A, s2.Aprime)
    assert _same(both, (q1 + q2, qp1 + qp2))


@SLOW
@given(ckvs, st.sampled_from(range(len(DEG1))))
def test_random_weighted_conformal_is_a_symmetry(xi, i):
    assert check_generator(WeightedConformal(xi), DEG1[i])["pass"]


@SLOW
@given(st.lists(small, min_size=6, max_size=6), st.sampled_from(range(len(DEG1))))
def test_constant_ky_matches_internal_rb(vals, i):
    y = KillingYano.from_vector(vals + [0, 0, 0, 0])
    sol = DEG1[i]
    assert _same(KY(y).act(sol.A, sol.Aprime), InternalRB(-dual2(y.y1)).act(sol.A, sol.Aprime))


@SLOW
@given(st.lists(small, min_size=6, max_size=6), st.sampled_from(range(len(DEG1))))
def test_weighted_rotation_splits_into_lie_part_and_rb(vals, i):
    # cX(rotation) = Lie part + internal rotation, with the KY form giving the same internal piece
    xi = ConformalKilling.from_vector([0] * 4 + vals + [0] * 5)
    sol = DEG1[i]
    y = ky_from_ckv(xi)
    combo = Combination(((1, Conformal(xi)), (1, InternalRB(-dual2(y.y1)))))
    assert _same(WeightedConformal(xi).act(sol.A, sol.Aprime), combo.act(sol.A, sol.Aprime))
    assert _same(conformal_remainder(xi).act(sol.A, sol.Aprime),
                 unified_ky_decompose(xi).act(sol.A, sol.Aprime))


# ---- bracket algebra

vectors38 = st.lists(st.integers(-2, 2), min_size=38, max_size=38)


def _br(u, v):
    return to_vector(bracket(from_vector(u), from_vector(v)))


@SLOW
@given(vectors38, vectors38)
def test_bracket_antisymmetry(u, v):
    assert _br(u, v) == [-c for c in _br(v, u)]
    assert _br(u, v) == bracket_table().bracket_vectors(u, v)


@SLOW
@given(vectors38, vectors38, vectors38, small)
def test_bracket_bilinearity(u, v, w, s):
    lhs = _br([a * s + b for a, b in zip(u, w)], v)
    rhs = [a * s + b for a, b in zip(_br(u, v), _br(w, v))]
    assert lhs == rhs


@settings(max_examples=5, deadline=None)
@given(vectors38, vectors38, vectors38)
def test_bracket_jacobi(u, v, w):
    terms = [_br(u, _br(v, w)), _br(v, _br(w, u)), _br(w, _br(u, v))]
    assert all(sum(t) == 0 for t in zip(*terms))


@settings(max_examples=3, deadline=None)
@given(st.lists(st.integers(-1, 1), min_size=38, max_size=38).filter(any))
def test_random_combination_is_a_symmetry(v):
    assert check_generator(from_vector(v), generic_solution((0, 1), seed=4))["pass"]


# ---- currents and charges

@FAST
@given(rationals.filter(bool))
def test_scaled_scaling_coefficients_stay_trivial(s):
    b = scaling_coefficients()
    k1 = np.vectorize(lambda p: p * s, otypes=[object])(b.k1)
    k2 = np.vectorize(lambda p: p * s, otypes=[object])(b.k2)
    res = triviality_test(BilinearCoefficients(k1, k2))
    assert res["trivial"] and res["k"] == s / 2


WAVE = periodic_wave()
DUAL_C = duality_current(WAVE)
ENERGY_C = stress_energy(translation(1, 0, 0, 0), WAVE)
CURL_C = curl_current(scaling_curl_potential(WAVE))


@settings(max_examples=10, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2))
def test_charge_is_linear(t, s):
    sl = SliceSpec(t, PERIOD_BOX)
    both = charge(DUAL_C + ENERGY_C * s, sl)
    assert math.isclose(both, charge(DUAL_C, sl) + s * charge(ENERGY_C, sl), abs_tol=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(-5, 5))
def test_curl_charge_vanishes_on_periodic_box(t):
    assert abs(charge(CURL_C, SliceSpec(t, PERIOD_BOX))) <= 1e-8
