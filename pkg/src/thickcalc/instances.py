"""Seeded random instances for verification runs.

Coefficients are rationals ``p/q`` with ``|p| <= 9`` and ``1 <= q <= 9``
so that contracted values stay readable.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .series import NO_TRUNCATION, FormalSeries, GeneratingFunction, PolynomialFunction


def random_rational(rng: random.Random, bound: int = 9, nonzero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if v or not nonzero:
            return v


def _monomials(dim: int, degree: int):
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), total):
            exp = [0] * dim
            for i in combo:
                exp[i] += 1
            yield tuple(exp)


def random_polynomial(rng: random.Random, dim: int, degree: int, density: float = 0.7,
                      bound: int = 9) -> PolynomialFunction:
    """A dense-ish polynomial of total degree at most ``degree``."""
    mons = {}
    for exp in _monomials(dim, degree):
        if rng.random() < density:
            mons[exp] = random_rational(rng, bound)
    return PolynomialFunction(dim, mons)


def random_generating_function(rng: random.Random, dim: int, max_order: int,
                               hbar_order: int = 0, base_dim: int = 0, base_degree: int = 1,
                               symmetric: bool = True, density: float = 0.8,
                               bound: int = 9) -> GeneratingFunction:
    """Random ``S(x, q)``; with ``base_dim > 0`` the coefficients are polynomials in ``x``."""
    coeffs = {}
    tuples = (itertools.combinations_with_replacement if symmetric
              else lambda r, m: itertools.product(r, repeat=m))
    for h in range(hbar_order + 1):
        for m in range(max_order + 1):
            for idx in tuples(range(dim), m):
                if rng.random() >= density:
                    continue
                if base_dim:
                    coeffs[(h, idx)] = random_polynomial(rng, base_dim, base_degree, density,
                                                         bound)
                else:
                    coeffs[(h, idx)] = FormalSeries.constant(random_rational(rng, bound),
                                                             NO_TRUNCATION, 0)
    return GeneratingFunction(dim, max_order, coeffs, symmetric, base_dim)


def random_parities(rng: random.Random, dim: int) -> tuple:
    return tuple(rng.randint(0, 1) for _ in range(dim))


def pullback_instance(seed: int, max_dim: int = 3, max_order: int = 4, max_degree: int = 4,
                      hbar_order: int = 0):
    """``(S, g)`` for an oracle comparison, fully determined by ``seed``."""
    rng = random.Random(seed)
    d = rng.randint(1, max_dim)
    S = random_generating_function(rng, d, rng.randint(2, max_order), hbar_order)
    g = random_polynomial(rng, d, rng.randint(1, max_degree))
    return S, g
