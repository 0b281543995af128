"""
Shared fixtures and hypothesis strategies
"""
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from galine.cocycle import CocycleSpec
from galine.sampling import make_rng
from galine.timealg import TimePoly, Vec3Poly

REPO_ROOT = Path(__file__).resolve().parents[2]
SCENARIO_DIR = REPO_ROOT / "scenarios"
CONFIG_PATH = REPO_ROOT / "config.yaml"

N = 6

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def timepolys(max_len: int = 4, max_degree: int = N):
    return st.lists(rationals, max_size=max_len).map(lambda cs: TimePoly(cs, max_degree))


def vec3polys(max_len: int = 3, max_degree: int = N):
    return st.tuples(*(timepolys(max_len, max_degree) for _ in range(3))).map(lambda cs: Vec3Poly(*cs))


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def canonical_spec():
    """m = 1, γ = (0, 1)"""
    return CocycleSpec((Fraction(1),), (Fraction(0), Fraction(1)), Fraction(0), N)


@pytest.fixture
def general_spec():
    """m = β₀γ₁ − γ₀β₁ = 2·1 − (1/3)(1/2) = 11/6"""
    return CocycleSpec(
        (Fraction(2), Fraction(1, 2)),
        (Fraction(1, 3), Fraction(1), Fraction(1, 4)),
        Fraction(1, 3),
        N,
    )


@pytest.fixture
def massless_spec():
    return CocycleSpec((Fraction(1),), (Fraction(1),), Fraction(0), N)
