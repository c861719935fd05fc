"""Finite differences, discrete integrals and closed-form linear discrete ODEs.

Tabulated functions are plain callables ``f(x, params)`` returning a scalar
(``Dyadic`` or ``int``), a vector or a square matrix.  Vectors and matrices
are numpy arrays of ``dtype=object`` so arithmetic stays exact.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

import numpy as np

from .dyadic import Dyadic

__all__ = [
    "DimensionMismatch",
    "TabulatedFn",
    "delta",
    "discrete_integral",
    "falling_power",
    "falling_exp",
    "closed_form_solution",
    "as_exact_array",
]

TabulatedFn = Callable[[int, Sequence[Any]], Any]


class DimensionMismatch(ValueError):
    pass


def as_exact_array(value):
    """Lists become object arrays of Dyadic; scalars become Dyadic."""
    if isinstance(value, np.ndarray) or isinstance(value, (list, tuple)):
        arr = np.array(value, dtype=object)
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            flat[i] = Dyadic(v) if isinstance(v, int) else v
        return arr
    return Dyadic(value) if isinstance(value, int) else value


def _identity_like(v):
    if isinstance(v, np.ndarray):
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {v.shape}")
        eye = np.empty(v.shape, dtype=object)
        for i in range(v.shape[0]):
            for j in range(v.shape[1]):
                eye[i, j] = Dyadic(int(i == j))
        return eye
    return Dyadic(1)


def _mul(a, b):
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        if a.shape[-1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply shapes {a.shape} and {b.shape}")
        return a @ b
    return a * b


def delta(f: TabulatedFn, x: int, params: Sequence[Any] = ()):
    """Discrete derivative ``f(x+1) - f(x)``."""
    return as_exact_array(f(x + 1, params)) - as_exact_array(f(x, params))


def discrete_integral(f: TabulatedFn, a: int, b: int, params: Sequence[Any] = ()):
    """Sum of ``f(x)`` for ``a <= x < b``; zero when ``a == b``; negated when ``a > b``."""
    if a > b:
        return -discrete_integral(f, b, a, params)
    total = None
    for x in range(a, b):
        v = as_exact_array(f(x, params))
        total = v if total is None else total + v
    if total is None:
        probe = as_exact_array(f(a, params))
        return probe * 0
    return total


def falling_power(x: int, m: int) -> int:
    if m < 0:
        raise ValueError("m must be non-negative")
    out = 1
    for k in range(m):
        out *= x - k
    return out


def falling_exp(U: TabulatedFn, x: int, params: Sequence[Any] = ()):
    """Ordered product ``(1 + U'(x-1)) ... (1 + U'(1)) (1 + U'(0))``.

    The newest factor multiplies from the left; ``x == 0`` gives the identity.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    probe = delta(U, 0, params)
    eye = _identity_like(probe)
    out = eye
    for t in range(x):
        out = _mul(eye + delta(U, t, params), out)
    return out


def closed_form_solution(A: TabulatedFn, B: TabulatedFn, G, x: int, params: Sequence[Any] = ()):
    """Solution at ``x`` of ``f' = A f + B`` with ``f(0) = G``, via the sum form

    ``f(x) = sum_{u=-1}^{x-1} (prod_{t=u+1}^{x-1} (1 + A(t))) B(u)`` with
    ``B(-1) = G``.  Products are ordered with larger ``t`` on the left.
    """
    G = as_exact_array(G)
    if x < 0:
        raise ValueError("x must be non-negative")
    vector = isinstance(G, np.ndarray)
    if vector:
        if G.ndim != 1:
            raise DimensionMismatch("initial value must be a vector")
        eye = _identity_like(np.empty((G.shape[0], G.shape[0]), dtype=object))
    else:
        eye = Dyadic(1)

    def coeff(t):
        a = as_exact_array(A(t, params))
        if vector and (not isinstance(a, np.ndarray) or a.shape != eye.shape):
            raise DimensionMismatch(f"A({t}) has the wrong shape")
        return a

    def inhom(u):
        b = as_exact_array(B(u, params))
        if vector and (not isinstance(b, np.ndarray) or b.shape != G.shape):
            raise DimensionMismatch(f"B({u}) has the wrong shape")
        return b

    # walk u downwards so the running product only gains factors on the right
    prod = eye
    total = None
    for u in range(x - 1, -2, -1):
        b = G if u == -1 else inhom(u)
        term = _mul(prod, b)
        total = term if total is None else total + term
        if u >= 0:
            prod = _mul(prod, eye + coeff(u))
    return total
