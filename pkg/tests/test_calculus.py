import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lenode.calculus import (
    DimensionMismatch,
    closed_form_solution,
    delta,
    discrete_integral,
    falling_exp,
    falling_power,
)
from lenode.dyadic import Dyadic


def D(v):
    return Dyadic(v)


def test_delta_examples():
    assert delta(lambda x, p: D(x * x), 3) == 7
    assert delta(lambda x, p: D(5), 11) == 0
    assert delta(lambda x, p: D(2**x), 4) == 16


def test_integral_examples():
    ident = lambda x, p: D(x)  # noqa: E731
    assert discrete_integral(ident, 0, 3) == 3
    assert discrete_integral(ident, 4, 4) == 0
    assert discrete_integral(ident, 3, 0) == -3


def test_falling_power_examples():
    assert falling_power(5, 3) == 60
    assert falling_power(9, 1) == 9
    assert falling_power(3, 5) == 0
    assert falling_power(7, 0) == 1


def test_falling_exp_examples():
    ident = lambda x, p: D(x)  # noqa: E731
    assert falling_exp(ident, 3) == 8
    assert falling_exp(ident, 0) == 1
    assert all(falling_exp(lambda x, p: D(4), n) == 1 for n in range(6))


def test_falling_exp_matrix_order():
    # U' alternates two non-commuting matrices; the product must put the newest on the left
    M0 = np.array([[D(0), D(1)], [D(0), D(0)]], dtype=object)
    M1 = np.array([[D(0), D(0)], [D(1), D(0)]], dtype=object)

    def U(x, p):
        acc = np.array([[D(0), D(0)], [D(0), D(0)]], dtype=object)
        for t in range(x):
            acc = acc + (M0 if t % 2 == 0 else M1)
        return acc

    eye = np.array([[D(1), D(0)], [D(0), D(1)]], dtype=object)
    expected = (eye + M1) @ (eye + M0)
    assert (falling_exp(U, 2) == expected).all()
    assert not (expected == (eye + M0) @ (eye + M1)).all()


def test_falling_exp_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        falling_exp(lambda x, p: np.array([[D(x), D(0), D(1)]], dtype=object), 2)


def test_closed_form_examples():
    one = lambda u, p: D(1)  # noqa: E731
    zero = lambda u, p: D(0)  # noqa: E731
    assert closed_form_solution(one, zero, D(1), 5) == 32
    assert closed_form_solution(one, zero, D(7), 0) == 7
    assert closed_form_solution(zero, lambda u, p: D(u), D(0), 4) == 6


def test_closed_form_dimension_mismatch():
    A = lambda u, p: np.array([[D(1)]], dtype=object)  # noqa: E731
    B = lambda u, p: np.array([D(0), D(0)], dtype=object)  # noqa: E731
    with pytest.raises(DimensionMismatch):
        closed_form_solution(A, B, [D(1), D(2)], 2)


# identities ----------------------------------------------------------------------------

coeffs = st.lists(st.integers(-9, 9), min_size=1, max_size=5)


def poly(cs):
    return lambda x, p: D(sum(c * x**k for k, c in enumerate(cs)))


@given(coeffs, st.integers(-8, 8), st.integers(-8, 8))
def test_fundamental_theorem(cs, a, b):
    F = poly(cs)
    assert discrete_integral(lambda x, p: delta(F, x, p), a, b) == F(b, ()) - F(a, ())


@given(st.integers(0, 20), st.integers(1, 6))
def test_falling_power_derivative(x, m):
    assert falling_power(x + 1, m) - falling_power(x, m) == m * falling_power(x, m - 1)


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.integers(0, 10))
def test_falling_exp_derivative(entries, x):
    # integer matrix-valued U(t) = t*M + t^2*N
    M = np.array([[D(entries[0]), D(entries[1])], [D(entries[2]), D(entries[3])]], dtype=object)
    N = np.array([[D(entries[3]), D(0)], [D(entries[1]), D(entries[0])]], dtype=object)
    U = lambda t, p: M * t + N * (t * t)  # noqa: E731
    lhs = falling_exp(U, x + 1) - falling_exp(U, x)
    rhs = delta(U, x) @ falling_exp(U, x)
    assert (lhs == rhs).all()


@given(
    st.lists(st.integers(-5, 5), min_size=6, max_size=6),
    st.integers(-8, 8),
    st.integers(-2, 2),
    st.integers(-8, 8),
    st.integers(-2, 2),
    st.integers(0, 3),
)
def test_derivation_of_integral(cs, a0, a1, b0, b1, x):
    def f(u, t):
        return D(cs[0] + cs[1] * u + cs[2] * t + cs[3] * u * t + cs[4] * t * t + cs[5] * u * u * t)

    a = lambda u: a0 + a1 * u  # noqa: E731
    b = lambda u: b0 + b1 * u  # noqa: E731

    def F(u, p=()):
        return discrete_integral(lambda t, _p: f(u, t), a(u), b(u))

    lhs = delta(F, x)
    partial = discrete_integral(lambda t, _p: f(x + 1, t) - f(x, t), a(x), b(x))
    lower = discrete_integral(lambda t, _p: f(x + 1, a(x + 1) + t), 0, -(a(x + 1) - a(x)))
    upper = discrete_integral(lambda t, _p: f(x + 1, b(x) + t), 0, b(x + 1) - b(x))
    assert lhs == partial + lower + upper


def _random_system(rng, dim):
    def mat():
        return np.array(
            [[Dyadic(rng.randint(-6, 6), rng.randint(0, 4)) for _ in range(dim)] for _ in range(dim)], dtype=object
        )

    def vec():
        return np.array([Dyadic(rng.randint(-6, 6), rng.randint(0, 4)) for _ in range(dim)], dtype=object)

    return mat, vec


def test_closed_form_vs_unrolled():
    rng = random.Random(7)
    for _ in range(100):
        dim = rng.randint(1, 3)
        mat, vec = _random_system(rng, dim)
        x = rng.randint(0, 20)
        As = [mat() for _ in range(x)]
        Bs = [vec() for _ in range(x)]
        G = vec()
        f = G
        for t in range(x):
            f = f + As[t] @ f + Bs[t]
        got = closed_form_solution(lambda u, p: As[u], lambda u, p: Bs[u], G, x)
        assert list(got) == list(f)
