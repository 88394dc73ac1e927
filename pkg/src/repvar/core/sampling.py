"""Seeded random matrices on either backend, used by tests, the suite and the builder."""

from __future__ import annotations

import random

from .linalg import Mat2
from .scalars import QQi, random_complex, random_qqi


def rand_scalar(rng: random.Random, exact_backend: bool, nonzero: bool = False, num: int = 4, den: int = 3):
    if exact_backend:
        return random_qqi(rng, num, den, nonzero=nonzero)
    while True:
        z = random_complex(rng)
        if not nonzero or abs(z) > 1e-3:
            return z


def random_sl2(rng: random.Random, exact_backend: bool = True, num: int = 4, den: int = 3) -> Mat2:
    """``[[a, b], [c, (1 + bc)/a]]`` with random ``a != 0``, ``b``, ``c``."""
    a = rand_scalar(rng, exact_backend, nonzero=True, num=num, den=den)
    b = rand_scalar(rng, exact_backend, num=num, den=den)
    c = rand_scalar(rng, exact_backend, num=num, den=den)
    return Mat2(a, b, c, (1 + b * c) / a)


def random_upper(rng: random.Random, exact_backend: bool = True) -> Mat2:
    x = rand_scalar(rng, exact_backend, nonzero=True)
    y = rand_scalar(rng, exact_backend)
    return Mat2(x, y, x * 0, 1 / x)


def random_diagonal(rng: random.Random, exact_backend: bool = True, avoid_central: bool = True) -> Mat2:
    while True:
        x = rand_scalar(rng, exact_backend, nonzero=True)
        if not avoid_central or (x != 1 and x != -1):
            return Mat2.diag(x)


def random_triangular_pair(rng: random.Random, exact_backend: bool = True):
    """A random pair sharing the invariant line ``e1``, conjugated by a random G.

    Returns ``(A, B, G)``; the common eigenvector of ``A`` and ``B`` is ``G e1``.
    """
    g = random_sl2(rng, exact_backend)
    gi = g.inv()
    A = g * random_upper(rng, exact_backend) * gi
    B = g * random_upper(rng, exact_backend) * gi
    return A, B, g


def exact_unit(exact_backend: bool):
    return QQi(1) if exact_backend else 1 + 0j
