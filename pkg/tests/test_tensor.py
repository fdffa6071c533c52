from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

from jointmaxwell.tensor import (
    DEFAULT_CTX,
    MetricContext,
    Tensor,
    TensorError,
    antisymmetrize,
    contract,
    duality_rotate,
    epsilon,
    hodge_dual2,
    interior,
    metric,
    outer,
    perm_sign,
    raise_lower,
    wedge,
)


def two_form(entries):
    c = np.zeros((4, 4), dtype=object)
    c[:] = Fraction(0)
    for (a, b), v in entries.items():
        c[a, b] = Fraction(v)
        c[b, a] = -Fraction(v)
    return Tensor(c, "dd")


def random_two_form(rng):
    return two_form({(a, b): Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
                     for a in range(4) for b in range(a + 1, 4)})


def brute_dual(f, orientation):
    """1/2 eps_{mnst} f^{st} by summing over all index tuples."""
    eta = [-1, 1, 1, 1]
    out = np.zeros((4, 4), dtype=object)
    out[:] = Fraction(0)
    for m, n, s, t in product(range(4), repeat=4):
        if len({m, n, s, t}) < 4:
            continue
        e = orientation * perm_sign((m, n, s, t))
        out[m, n] += Fraction(1, 2) * e * eta[s] * eta[t] * f[s, t]
    return out


def test_metric_inverse():
    eta = metric().components
    assert (np.dot(eta, eta) == np.eye(4, dtype=int)).all()


def test_lower_then_raise_is_identity():
    t = Tensor(np.arange(16).reshape(4, 4).astype(object), "ud")
    back = raise_lower(raise_lower(t, 0, "d"), 0, "u")
    assert back.equals(t)


def test_lower_timelike_vector():
    v = Tensor([1, 0, 0, 0], "u")
    assert list(raise_lower(v, 0, "d").components) == [-1, 0, 0, 0]


def test_raise_both_slots_of_f01():
    f = two_form({(0, 1): 1})
    up = raise_lower(raise_lower(f, 0, "u"), 1, "u")
    assert up[0, 1] == -1 and up[1, 0] == 1


def test_raise_lower_errors():
    t = Tensor([1, 0, 0, 0], "u")
    with pytest.raises(TensorError):
        raise_lower(t, 0, "u")
    with pytest.raises(TensorError):
        raise_lower(t, 1, "d")


def test_epsilon_orientation_and_antisymmetry():
    for o in (1, -1):
        e = epsilon(MetricContext(o)).components
        assert e[0, 1, 2, 3] == o
        for p in permutations(range(4)):
            assert e[p] == o * perm_sign(p)


def test_hodge_of_zero():
    assert hodge_dual2(two_form({})).equals(two_form({}))


def test_hodge_f01_brute_force():
    f = two_form({(0, 1): 1})
    d = hodge_dual2(f)
    assert (d.components == brute_dual(f.components, 1)).all()
    assert d[2, 3] == -1
    others = [d[a, b] for a in range(4) for b in range(a + 1, 4) if (a, b) != (2, 3)]
    assert all(v == 0 for v in others)


@pytest.mark.parametrize("orientation", [1, -1])
def test_hodge_matches_brute_force_random(orientation):
    rng = np.random.default_rng(orientation + 5)
    ctx = MetricContext(orientation)
    for _ in range(10):
        f = random_two_form(rng)
        assert (hodge_dual2(f, ctx).components == brute_dual(f.components, orientation)).all()


def test_double_dual_is_minus_identity():
    rng = np.random.default_rng(1)
    for _ in range(50):
        f = random_two_form(rng)
        assert hodge_dual2(hodge_dual2(f)).equals(-f)


def test_hodge_rejects_bad_input():
    with pytest.raises(TensorError):
        hodge_dual2(Tensor(np.eye(4, dtype=object), "dd"))
    with pytest.raises(TensorError):
        hodge_dual2(Tensor(two_form({(0, 1): 1}).components, "ud"))


def test_hodge_float_tolerance():
    f = two_form({(0, 1): 1}).components.astype(float)
    f[1, 0] += 1e-14
    hodge_dual2(Tensor(f, "dd"))
    f[1, 0] += 1e-6
    with pytest.raises(TensorError):
        hodge_dual2(Tensor(f, "dd"))


def test_duality_rotate_cycle():
    f = two_form({(0, 1): 2, (1, 3): Fraction(1, 3)})
    fd = hodge_dual2(f)
    a, b = duality_rotate(f, fd)
    assert a.equals(fd) and b.equals(-f)
    a2, b2 = duality_rotate(a, b)
    assert a2.equals(-f) and b2.equals(-fd)
    a4, b4 = duality_rotate(*duality_rotate(a2, b2))
    assert a4.equals(f) and b4.equals(fd)
    with pytest.raises(TensorError):
        duality_rotate(f, f)


def test_antisymmetrize_examples():
    s = Tensor(np.array([[1, 2, 0, 0], [2, 5, 0, 0], [0, 0, 3, 0], [0, 0, 0, 1]], dtype=object), "dd")
    assert antisymmetrize(s, [0, 1]).equals(Tensor(np.zeros((4, 4), dtype=object), "dd"))
    f = two_form({(0, 2): 3})
    assert antisymmetrize(f, [0, 1]).equals(f)
    u = Tensor([1, 2, 0, 3], "d")
    v = Tensor([0, 1, 4, 1], "d")
    got = antisymmetrize(outer(u, v), [0, 1])
    for m in range(4):
        for n in range(4):
            assert got[m, n] == Fraction(u[m] * v[n] - u[n] * v[m], 2)
    with pytest.raises(TensorError):
        antisymmetrize(Tensor(np.zeros((4, 4), dtype=object), "ud"), [0, 1])


def test_interior_examples():
    x = Tensor([1, 0, 0, 0], "u")
    f = two_form({(0, 1): 1})
    assert list(interior(x, f).components) == [0, 1, 0, 0]
    assert list(interior(x, metric()).components) == [-1, 0, 0, 0]
    y = Tensor([2, -1, 3, 5], "u")
    g = two_form({(0, 1): 1, (2, 3): 4, (1, 2): -2})
    assert interior(y, interior(y, g)).components == 0
    with pytest.raises(TensorError):
        interior(x, Tensor(np.array(3, dtype=object), ()))


def test_contract_trace_of_metric():
    mixed = raise_lower(metric(), 0, "u")
    assert contract(mixed, 0, 1).components == 4


def test_wedge_of_one_forms():
    u = Tensor([1, 0, 0, 0], "d")
    v = Tensor([0, 1, 0, 0], "d")
    w = wedge(u, v)
    assert w[0, 1] == 1 and w[1, 0] == -1


def test_mixed_scalar_kinds_rejected():
    with pytest.raises(TensorError):
        Tensor(np.array([Fraction(1), 0.5, 0, 0], dtype=object), "d")


def test_shape_and_variance_checks():
    with pytest.raises(TensorError):
        Tensor(np.zeros((3, 3)), "dd")
    with pytest.raises(TensorError):
        Tensor(np.zeros((4, 4)), "d")
    with pytest.raises(TensorError):
        Tensor(np.zeros(4), "x")
