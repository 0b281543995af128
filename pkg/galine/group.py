"""
Rotation-free Galilean line group: elements (a(t), b), composition, inverse
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from galine.errors import DegreeBudgetError, RotationNotSupportedError
from galine.timealg import (
    DEFAULT_MAX_DEGREE,
    Coefficient,
    TimePoly,
    Vec3Poly,
    format_scalar,
    parse_scalar,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupElement:
    """
    Group element g = (a(t), b)

    The second argument of `compose` acts first, so compose(g2, g1)
    evaluates g2's translation at the time shifted by b1.
    """

    a: Vec3Poly
    b: Fraction
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        if self.a.degree > self.max_degree:
            raise DegreeBudgetError(
                f"Translation degree {self.a.degree} exceeds budget N={self.max_degree}"
            )

    @classmethod
    def create(
        cls,
        a: Vec3Poly,
        b: Coefficient = 0,
        rotation: Optional[Any] = None,
        max_degree: Optional[int] = None,
    ) -> "GroupElement":
        """
        Build an element, rejecting anything with a rotation part

        Args:
            a: Time-dependent spatial translation
            b: Time translation
            rotation: Must be None or the identity (nested 3x3 list)
            max_degree: Degree budget, defaults to the translation's budget
        """
        if rotation is not None and not _is_identity_rotation(rotation):
            raise RotationNotSupportedError("Time-dependent rotations are not represented")
        budget = a.max_degree if max_degree is None else max_degree
        return cls(a.with_budget(budget), parse_scalar(b) if not isinstance(b, float) else b, budget)

    @classmethod
    def identity(cls, max_degree: int = DEFAULT_MAX_DEGREE) -> "GroupElement":
        return cls(Vec3Poly.zero(max_degree), Fraction(0), max_degree)

    @classmethod
    def time_translation(cls, b: Coefficient, max_degree: int = DEFAULT_MAX_DEGREE) -> "GroupElement":
        return cls.create(Vec3Poly.zero(max_degree), b, max_degree=max_degree)

    @classmethod
    def space_translation(cls, a: Vec3Poly) -> "GroupElement":
        return cls.create(a, 0)

    @classmethod
    def galilei(
        cls,
        a0: Sequence[Coefficient],
        v: Sequence[Coefficient],
        b: Coefficient = 0,
        max_degree: int = DEFAULT_MAX_DEGREE,
    ) -> "GroupElement":
        """Element with a(t) = a0 + v t"""
        comps = [TimePoly((x, u), max_degree) for x, u in zip(a0, v)]
        return cls.create(Vec3Poly(*comps), b, max_degree=max_degree)

    def is_identity(self) -> bool:
        return self.a.is_zero() and self.b == 0

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a.to_list(), "b": format_scalar(self.b)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], max_degree: int = DEFAULT_MAX_DEGREE) -> "GroupElement":
        extra = set(data) - {"a", "b"}
        if "R" in extra or "rotation" in extra:
            raise RotationNotSupportedError("Group element JSON must not carry a rotation")
        if extra:
            raise ValueError(f"Unknown group element keys: {sorted(extra)}")
        return cls.create(Vec3Poly.from_list(data["a"], max_degree), data.get("b", 0), max_degree=max_degree)


def _is_identity_rotation(rotation: Any) -> bool:
    try:
        return all(
            rotation[i][j] == (1 if i == j else 0) for i in range(3) for j in range(3)
        )
    except (TypeError, IndexError):
        return False


def compose(g2: GroupElement, g1: GroupElement) -> GroupElement:
    """
    Group product g2·g1 = (Λ_{b1} a2 + a1, b1 + b2)

    Raises:
        DegreeBudgetError: if the elements have different budgets
    """
    if g2.max_degree != g1.max_degree:
        raise DegreeBudgetError(
            f"Budget mismatch: N={g2.max_degree} vs N={g1.max_degree}"
        )
    return GroupElement(g2.a.shift(g1.b) + g1.a, g1.b + g2.b, g1.max_degree)


def inverse(g: GroupElement) -> GroupElement:
    """(−Λ_{−b} a, −b)"""
    return GroupElement(-(g.a.shift(-g.b)), -g.b, g.max_degree)


def is_galilei(g: GroupElement) -> bool:
    """True iff a(t) = a0 + v t componentwise"""
    return g.a.degree <= 1


def is_space_translation(g: GroupElement) -> bool:
    return g.b == 0


def is_time_translation(g: GroupElement) -> bool:
    return g.a.is_zero()


def factorize(g: GroupElement) -> Tuple[GroupElement, GroupElement]:
    """
    Split g into a space translation and a time translation

    Returns:
        (s, τ) with s = (Λ_{−b} a, 0), τ = (0, b) and compose(s, τ) == g
    """
    space = GroupElement(g.a.shift(-g.b), Fraction(0), g.max_degree)
    time = GroupElement(Vec3Poly.zero(g.max_degree), g.b, g.max_degree)
    return space, time


Omega = Callable[[GroupElement, GroupElement], TimePoly]


@dataclass(frozen=True)
class ExtendedElement:
    """Element (φ, g) of the extension of the group by scalar time functions"""

    phi: TimePoly
    g: GroupElement

    def compose(self, first: "ExtendedElement", omega: Omega) -> "ExtendedElement":
        """(φ2,g2)(φ1,g1) = (Λ_{b1} φ2 + φ1 + ω(g2,g1), g2 g1)"""
        phi = self.phi.shift(first.g.b) + first.phi + omega(self.g, first.g)
        return ExtendedElement(phi, compose(self.g, first.g))


def extended_associator(
    omega: Omega, e3: ExtendedElement, e2: ExtendedElement, e1: ExtendedElement
) -> TimePoly:
    """Phase difference between (e3 e2) e1 and e3 (e2 e1); zero iff ω is a cocycle there"""
    left = e3.compose(e2, omega).compose(e1, omega)
    right = e3.compose(e2.compose(e1, omega), omega)
    return left.phi - right.phi
