"""
Exact arithmetic on polynomial time functions in the Taylor convention
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from numbers import Number
from typing import Iterable, List, Sequence, Tuple, Union

from galine.errors import DegreeBudgetError

logger = logging.getLogger(__name__)

Scalar = Fraction
Coefficient = Union[Fraction, float, int]

DEFAULT_MAX_DEGREE = 8


def parse_scalar(value: Union[str, int, float, Fraction]) -> Fraction:
    """
    Parse a rational from a JSON-friendly value

    Args:
        value: "p/q" string, decimal string, int, float or Fraction

    Returns:
        Exact Fraction (floats are read through their decimal repr)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Boolean is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Cannot parse scalar from {type(value).__name__}")


def format_scalar(value: Coefficient) -> Union[str, float]:
    """Render an exact scalar as "p/q" (floats pass through)"""
    if isinstance(value, float):
        return value
    return str(Fraction(value))


class TimePoly:
    """
    Polynomial a(t) stored as Taylor coefficients a⁽ⁿ⁾ (coefficient of tⁿ/n!)

    Coefficients may be exact Fractions or floats; the exact path is
    authoritative for identity checks.
    """

    __slots__ = ("_coeffs", "_max_degree")

    def __init__(self, coeffs: Iterable[Coefficient] = (), max_degree: int = DEFAULT_MAX_DEGREE):
        """
        Args:
            coeffs: Taylor coefficients, index n holds dⁿa/dtⁿ at t=0
            max_degree: Degree budget N
        """
        values = [c if isinstance(c, (Fraction, float)) else Fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        if len(values) - 1 > max_degree:
            raise DegreeBudgetError(
                f"Degree {len(values) - 1} exceeds budget N={max_degree}"
            )
        self._coeffs: Tuple[Coefficient, ...] = tuple(values)
        self._max_degree = max_degree

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, max_degree: int = DEFAULT_MAX_DEGREE) -> "TimePoly":
        return cls((), max_degree)

    @classmethod
    def constant(cls, value: Coefficient, max_degree: int = DEFAULT_MAX_DEGREE) -> "TimePoly":
        return cls((value,), max_degree)

    @classmethod
    def taylor_basis(cls, k: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "TimePoly":
        """tᵏ/k!"""
        return cls([0] * k + [1], max_degree)

    @classmethod
    def from_power_coeffs(
        cls, power_coeffs: Sequence[Coefficient], max_degree: int = DEFAULT_MAX_DEGREE
    ) -> "TimePoly":
        """Build from ordinary coefficients cₙ of tⁿ"""
        return cls([c * factorial(n) for n, c in enumerate(power_coeffs)], max_degree)

    # -- properties ---------------------------------------------------

    @property
    def coeffs(self) -> Tuple[Coefficient, ...]:
        return self._coeffs

    @property
    def max_degree(self) -> int:
        return self._max_degree

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial"""
        return len(self._coeffs) - 1

    def coeff(self, n: int) -> Coefficient:
        return self._coeffs[n] if 0 <= n < len(self._coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return self.degree <= 0

    def power_coeffs(self) -> List[Coefficient]:
        """Ordinary coefficients of tⁿ"""
        return [c / factorial(n) for n, c in enumerate(self._coeffs)]

    def with_budget(self, max_degree: int) -> "TimePoly":
        return TimePoly(self._coeffs, max_degree)

    def to_float(self) -> "TimePoly":
        return TimePoly([float(c) for c in self._coeffs], self._max_degree)

    # -- operations ---------------------------------------------------

    def shift(self, b: Coefficient) -> "TimePoly":
        """Λ_b p, i.e. t ↦ p(t + b), by re-expanding the Taylor coefficients"""
        if b == 0 or self.is_zero():
            return self
        n_max = len(self._coeffs)
        powers = [Fraction(1) if not isinstance(b, float) else 1.0]
        for k in range(1, n_max):
            powers.append(powers[-1] * b / k)
        shifted = []
        for n in range(n_max):
            total = 0
            for k in range(n_max - n):
                total += self._coeffs[n + k] * powers[k]
            shifted.append(total)
        return TimePoly(shifted, self._max_degree)

    def derivative(self) -> "TimePoly":
        return TimePoly(self._coeffs[1:], self._max_degree)

    def derivative_n(self, n: int) -> "TimePoly":
        return TimePoly(self._coeffs[n:], self._max_degree)

    def evaluate(self, t: Coefficient) -> Coefficient:
        """Horner evaluation of Σ a⁽ⁿ⁾ tⁿ/n!"""
        if not self._coeffs:
            return 0.0 if isinstance(t, float) else Fraction(0)
        acc = self._coeffs[-1]
        for n in range(len(self._coeffs) - 2, -1, -1):
            acc = self._coeffs[n] + acc * t / (n + 1)
        return acc

    def _binary_budget(self, other: "TimePoly") -> int:
        return max(self._max_degree, other._max_degree)

    def __add__(self, other: "TimePoly") -> "TimePoly":
        if isinstance(other, Number):
            other = TimePoly.constant(other, self._max_degree)
        n = max(len(self._coeffs), len(other._coeffs))
        return TimePoly(
            [self.coeff(i) + other.coeff(i) for i in range(n)], self._binary_budget(other)
        )

    __radd__ = __add__

    def __neg__(self) -> "TimePoly":
        return TimePoly([-c for c in self._coeffs], self._max_degree)

    def __sub__(self, other: "TimePoly") -> "TimePoly":
        return self + (-other)

    def __rsub__(self, other: Coefficient) -> "TimePoly":
        return (-self) + other

    def __mul__(self, other: Union["TimePoly", Coefficient]) -> "TimePoly":
        if isinstance(other, TimePoly):
            return self._product(other)
        return TimePoly([c * other for c in self._coeffs], self._max_degree)

    __rmul__ = __mul__

    def __truediv__(self, other: Coefficient) -> "TimePoly":
        if isinstance(other, int):
            other = Fraction(other)
        return TimePoly([c / other for c in self._coeffs], self._max_degree)

    def _product(self, other: "TimePoly") -> "TimePoly":
        # Leibniz rule: (pq)⁽ⁿ⁾ = Σ C(n,k) p⁽ᵏ⁾ q⁽ⁿ⁻ᵏ⁾
        budget = self._max_degree + other._max_degree
        if self.is_zero() or other.is_zero():
            return TimePoly.zero(budget)
        n_max = self.degree + other.degree
        result = []
        for n in range(n_max + 1):
            total = 0
            for k in range(max(0, n - other.degree), min(n, self.degree) + 1):
                total += comb(n, k) * self._coeffs[k] * other._coeffs[n - k]
            result.append(total)
        return TimePoly(result, budget)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Number):
            return self == TimePoly.constant(other)
        if not isinstance(other, TimePoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self._coeffs)
        return f"TimePoly([{terms}], N={self._max_degree})"

    def to_list(self) -> List[Union[str, float]]:
        return [format_scalar(c) for c in self._coeffs]

    @classmethod
    def from_list(cls, values: Sequence, max_degree: int = DEFAULT_MAX_DEGREE) -> "TimePoly":
        return cls([parse_scalar(v) for v in values], max_degree)


def shift(p: TimePoly, b: Coefficient) -> TimePoly:
    """Λ_b p"""
    return p.shift(b)


def derivative(p: TimePoly) -> TimePoly:
    return p.derivative()


def evaluate(p: TimePoly, t: Coefficient) -> Coefficient:
    return p.evaluate(t)


@dataclass(frozen=True)
class Vec3Poly:
    """Three-vector of TimePolys: translations a(t), labels q(t), B(a), C(a)"""

    x: TimePoly
    y: TimePoly
    z: TimePoly

    @classmethod
    def zero(cls, max_degree: int = DEFAULT_MAX_DEGREE) -> "Vec3Poly":
        z = TimePoly.zero(max_degree)
        return cls(z, z, z)

    @classmethod
    def x_only(cls, p: TimePoly) -> "Vec3Poly":
        """1-D embedding: p along x, zero elsewhere"""
        z = TimePoly.zero(p.max_degree)
        return cls(p, z, z)

    @classmethod
    def constant(cls, values: Sequence[Coefficient], max_degree: int = DEFAULT_MAX_DEGREE) -> "Vec3Poly":
        return cls(*(TimePoly.constant(v, max_degree) for v in values))

    @property
    def components(self) -> Tuple[TimePoly, TimePoly, TimePoly]:
        return (self.x, self.y, self.z)

    @property
    def max_degree(self) -> int:
        return max(c.max_degree for c in self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def map(self, fn) -> "Vec3Poly":
        return Vec3Poly(*(fn(c) for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def shift(self, b: Coefficient) -> "Vec3Poly":
        return self.map(lambda c: c.shift(b))

    def derivative(self) -> "Vec3Poly":
        return self.map(TimePoly.derivative)

    def derivative_n(self, n: int) -> "Vec3Poly":
        return self.map(lambda c: c.derivative_n(n))

    def dot(self, other: "Vec3Poly") -> TimePoly:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def evaluate(self, t: Coefficient) -> Tuple[Coefficient, Coefficient, Coefficient]:
        return tuple(c.evaluate(t) for c in self.components)

    def with_budget(self, max_degree: int) -> "Vec3Poly":
        return self.map(lambda c: c.with_budget(max_degree))

    def to_float(self) -> "Vec3Poly":
        return self.map(TimePoly.to_float)

    def __add__(self, other: "Vec3Poly") -> "Vec3Poly":
        return Vec3Poly(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Vec3Poly") -> "Vec3Poly":
        return Vec3Poly(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "Vec3Poly":
        return self.map(lambda c: -c)

    def __mul__(self, scalar: Union[Coefficient, TimePoly]) -> "Vec3Poly":
        return self.map(lambda c: c * scalar)

    __rmul__ = __mul__

    def to_list(self) -> List[List[Union[str, float]]]:
        return [c.to_list() for c in self.components]

    @classmethod
    def from_list(cls, values: Sequence[Sequence], max_degree: int = DEFAULT_MAX_DEGREE) -> "Vec3Poly":
        if len(values) != 3:
            raise ValueError(f"Expected 3 components, got {len(values)}")
        return cls(*(TimePoly.from_list(v, max_degree) for v in values))
