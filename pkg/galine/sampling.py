"""
Seeded random draws of rationals, time functions and group elements
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from galine.group import GroupElement
from galine.timealg import DEFAULT_MAX_DEGREE, TimePoly, Vec3Poly

DEFAULT_COEFF_POOL: List[Fraction] = [
    Fraction(n, d) for n in range(-3, 4) for d in (1, 2, 3) if n != 0 or d == 1
]
DEFAULT_B_POOL: List[Fraction] = [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(-3, 2)]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_scalar(rng: np.random.Generator, pool: Sequence[Fraction] = DEFAULT_COEFF_POOL) -> Fraction:
    return pool[int(rng.integers(len(pool)))]


def random_timepoly(
    rng: np.random.Generator,
    degree: int,
    max_degree: int = DEFAULT_MAX_DEGREE,
    pool: Sequence[Fraction] = DEFAULT_COEFF_POOL,
) -> TimePoly:
    return TimePoly([random_scalar(rng, pool) for _ in range(degree + 1)], max_degree)


def random_vec3(
    rng: np.random.Generator,
    degree: int,
    max_degree: int = DEFAULT_MAX_DEGREE,
    pool: Sequence[Fraction] = DEFAULT_COEFF_POOL,
) -> Vec3Poly:
    return Vec3Poly(*(random_timepoly(rng, degree, max_degree, pool) for _ in range(3)))


def random_element(
    rng: np.random.Generator,
    degree: Optional[int] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    pool: Sequence[Fraction] = DEFAULT_COEFF_POOL,
    b_pool: Sequence[Fraction] = DEFAULT_B_POOL,
) -> GroupElement:
    """Random element; degree defaults to a uniform draw in [0, N]"""
    if degree is None:
        degree = int(rng.integers(max_degree + 1))
    a = random_vec3(rng, degree, max_degree, pool)
    return GroupElement(a, random_scalar(rng, b_pool), max_degree)


def random_galilei(
    rng: np.random.Generator,
    max_degree: int = DEFAULT_MAX_DEGREE,
    pool: Sequence[Fraction] = DEFAULT_COEFF_POOL,
    b_pool: Sequence[Fraction] = DEFAULT_B_POOL,
) -> GroupElement:
    return random_element(rng, 1, max_degree, pool, b_pool)


def random_tuple(
    rng: np.random.Generator,
    length: int,
    degree: Optional[int] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> tuple:
    return tuple(random_element(rng, degree, max_degree) for _ in range(length))
