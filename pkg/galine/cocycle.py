"""
The (B, C) two-cocycle family, its constraints and Galilei reduction
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from galine.cohomology import CheckReport, Cochain, _log_report, _witness
from galine.errors import DegreeBudgetError, NotEmbeddableError, SingularSystemError
from galine.group import GroupElement, is_galilei
from galine.sampling import random_scalar
from galine.timealg import (
    DEFAULT_MAX_DEGREE,
    Coefficient,
    TimePoly,
    Vec3Poly,
    format_scalar,
    parse_scalar,
)

logger = logging.getLogger(__name__)

Functional = Callable[[Vec3Poly], Vec3Poly]


@dataclass(frozen=True)
class CocycleSpec:
    """
    Coefficients of B(a) = Σ βₙ a⁽ⁿ⁾ and C(a) = Σ γₙ a⁽ⁿ⁾

    The inertial mass is derived, never given: m = β₀γ₁ − γ₀β₁.
    """

    beta: Tuple[Fraction, ...]
    gamma: Tuple[Fraction, ...]
    w: Fraction = Fraction(0)
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        for name in ("beta", "gamma"):
            values = getattr(self, name)
            if len(values) > self.max_degree + 1:
                raise DegreeBudgetError(
                    f"{name} has {len(values)} entries, budget allows {self.max_degree + 1}"
                )
            object.__setattr__(self, name, tuple(parse_scalar(v) for v in values))
        object.__setattr__(self, "w", parse_scalar(self.w))

    def b(self, n: int) -> Fraction:
        return self.beta[n] if n < len(self.beta) else Fraction(0)

    def g(self, n: int) -> Fraction:
        return self.gamma[n] if n < len(self.gamma) else Fraction(0)

    @property
    def mass(self) -> Fraction:
        return self.b(0) * self.g(1) - self.g(0) * self.b(1)

    @property
    def is_embeddable(self) -> bool:
        return self.mass != 0

    @property
    def is_canonical(self) -> bool:
        return self.b(0) == self.mass and self.g(1) == 1 and self.g(0) == 0

    def require_embeddable(self) -> Fraction:
        if not self.is_embeddable:
            raise NotEmbeddableError(
                f"β₀γ₁ − γ₀β₁ = 0 for beta={self.beta}, gamma={self.gamma}"
            )
        return self.mass

    def truncated(self, order: int = 2) -> "CocycleSpec":
        """Drop βₙ, γₙ for n ≥ order"""
        return replace(self, beta=self.beta[:order], gamma=self.gamma[:order])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": [format_scalar(v) for v in self.beta],
            "gamma": [format_scalar(v) for v in self.gamma],
            "w": format_scalar(self.w),
            "N": self.max_degree,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CocycleSpec":
        return cls(
            beta=tuple(parse_scalar(v) for v in data["beta"]),
            gamma=tuple(parse_scalar(v) for v in data["gamma"]),
            w=parse_scalar(data.get("w", 0)),
            max_degree=int(data.get("N", DEFAULT_MAX_DEGREE)),
        )


def canonical_spec(
    m: Coefficient,
    extra_beta: Optional[Dict[int, Coefficient]] = None,
    extra_gamma: Optional[Dict[int, Coefficient]] = None,
    w: Coefficient = 0,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> CocycleSpec:
    """β₀ = m, γ₁ = 1, γ₀ = 0, plus optional βₙ (n ≥ 1) and γₙ (n ≥ 2)"""
    beta = [Fraction(0)] * (max_degree + 1)
    gamma = [Fraction(0)] * (max_degree + 1)
    beta[0] = parse_scalar(m)
    gamma[1] = Fraction(1)
    for n, v in (extra_beta or {}).items():
        beta[n] = parse_scalar(v)
    for n, v in (extra_gamma or {}).items():
        gamma[n] = parse_scalar(v)
    return CocycleSpec(tuple(beta), tuple(gamma), parse_scalar(w), max_degree)


def _series(coeffs: Sequence[Fraction], a: Union[Vec3Poly, TimePoly]):
    total = a * Fraction(0)
    for n, c in enumerate(coeffs):
        if c != 0:
            total = total + a.derivative_n(n) * c
    return total


def eval_B(spec: CocycleSpec, a: Union[Vec3Poly, TimePoly]):
    """Σ βₙ dⁿa/dtⁿ"""
    return _series(spec.beta, a)


def eval_C(spec: CocycleSpec, a: Union[Vec3Poly, TimePoly]):
    """Σ γₙ dⁿa/dtⁿ"""
    return _series(spec.gamma, a)


def omega_from(B: Functional, C: Functional, g2: GroupElement, g1: GroupElement) -> TimePoly:
    """½(Λ_{b1}B(a2))·C(a1) − ½(Λ_{b1}C(a2))·B(a1) for arbitrary functionals"""
    half = Fraction(1, 2)
    return (
        B(g2.a).shift(g1.b).dot(C(g1.a)) * half
        - C(g2.a).shift(g1.b).dot(B(g1.a)) * half
    )


def omega(spec: CocycleSpec, g2: GroupElement, g1: GroupElement) -> TimePoly:
    return omega_from(lambda a: eval_B(spec, a), lambda a: eval_C(spec, a), g2, g1)


def omega_cochain(spec: CocycleSpec) -> Cochain:
    return Cochain(2, lambda g2, g1: omega(spec, g2, g1), name="omega")


def omega_special(m: Coefficient, g2: GroupElement, g1: GroupElement) -> TimePoly:
    """½m((Λ_{b1}a2)·ȧ1 − (Λ_{b1}ȧ2)·a1)"""
    m = parse_scalar(m)
    a2 = g2.a.shift(g1.b)
    return (a2.dot(g1.a.derivative()) - a2.derivative().dot(g1.a)) * (m / 2)


def corrupted_omega(spec: CocycleSpec) -> Cochain:
    """Negative control: ω plus a₂(0)·a₁(0)·t, which breaks the cocycle condition"""

    def evaluate(g2: GroupElement, g1: GroupElement) -> TimePoly:
        at_zero = sum(
            (c2.coeff(0) * c1.coeff(0) for c2, c1 in zip(g2.a.components, g1.a.components)),
            Fraction(0),
        )
        return omega(spec, g2, g1) + TimePoly.taylor_basis(1, g1.max_degree) * at_zero

    return Cochain(2, evaluate, name="omega_corrupted")


def nonlinear_B(a: Vec3Poly) -> Vec3Poly:
    """Negative control B(a) = a·aₓ(0); shift-covariant only at a(0) = 0, never additive"""
    return a * a.x.coeff(0)


def _record_vec(report: CheckReport, deviation: Vec3Poly, witness: Dict[str, Any]) -> None:
    for comp in deviation.components:
        if not comp.is_zero():
            report.record(comp, {**witness, "deviation": comp.to_list()})
            return
    report.record(deviation.x, witness)


def check_BC_constraints(
    spec: Optional[CocycleSpec],
    samples: Iterable[Tuple[Vec3Poly, Vec3Poly, Fraction]],
    B: Optional[Functional] = None,
    C: Optional[Functional] = None,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Check shift covariance and additivity of B and C

    Args:
        spec: Supplies B and C unless explicit functionals are given
        samples: (a1, a2, b) triples
        B, C: Optional functionals replacing Σβₙa⁽ⁿ⁾ and Σγₙa⁽ⁿ⁾ (negative controls)
    """
    B = B or (lambda a: eval_B(spec, a))
    C = C or (lambda a: eval_C(spec, a))
    report = CheckReport(check="BC_constraints", samples=0, seed=seed)
    for a1, a2, b in samples:
        report.samples += 1
        witness = {"a1": a1.to_list(), "a2": a2.to_list(), "b": format_scalar(b)}
        for name, F in (("B", B), ("C", C)):
            _record_vec(report, F(a1).shift(b) - F(a1.shift(b)), {**witness, "identity": f"shift_{name}"})
            _record_vec(report, F(a2 + a1) - F(a2) - F(a1), {**witness, "identity": f"additive_{name}"})
    _log_report(report)
    return report


def galilei_expected(m: Fraction, g2: GroupElement, g1: GroupElement) -> TimePoly:
    """½m(a₂·v₁ − v₂·a₁ + b₁ v₂·v₁) as a constant"""
    a2 = [c.coeff(0) for c in g2.a.components]
    v2 = [c.coeff(1) for c in g2.a.components]
    a1 = [c.coeff(0) for c in g1.a.components]
    v1 = [c.coeff(1) for c in g1.a.components]
    dot = lambda u, v: sum((x * y for x, y in zip(u, v)), Fraction(0))
    value = m / 2 * (dot(a2, v1) - dot(v2, a1) + g1.b * dot(v2, v1))
    return TimePoly.constant(value, g1.max_degree)


def galilei_reduction_check(
    spec: CocycleSpec,
    pairs: Iterable[Tuple[GroupElement, GroupElement]],
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Compare ω on Galilei pairs with the Galilei cocycle of mass m

    Raises:
        NotEmbeddableError: if m = 0
    """
    m = spec.require_embeddable()
    report = CheckReport(check="galilei_reduction", samples=0, seed=seed)
    for g2, g1 in pairs:
        if not (is_galilei(g2) and is_galilei(g1)):
            raise ValueError("Galilei reduction needs elements with a(t) = a0 + v t")
        report.samples += 1
        value = omega(spec, g2, g1) - galilei_expected(m, g2, g1)
        report.record(value, _witness((g2, g1), value))
    _log_report(report)
    return report


def reduced_independence_check(
    spec: CocycleSpec,
    pairs: Iterable[Tuple[GroupElement, GroupElement]],
    seed: Optional[int] = None,
) -> CheckReport:
    """On Galilei pairs ω does not see βₙ, γₙ for n ≥ 2"""
    low = spec.truncated(2)
    report = CheckReport(check="reduction_independence", samples=0, seed=seed)
    for g2, g1 in pairs:
        report.samples += 1
        value = omega(spec, g2, g1) - omega(low, g2, g1)
        report.record(value, _witness((g2, g1), value))
    return report


def lowest_gamma_index(spec: CocycleSpec) -> int:
    for k, c in enumerate(spec.gamma):
        if c != 0:
            return k
    raise SingularSystemError("All γₙ vanish; C has no inverse")


def solve_aq_component(spec: CocycleSpec, q: TimePoly) -> TimePoly:
    """
    Solve Σₖ γₖ a⁽ⁿ⁺ᵏ⁾ = q⁽ⁿ⁾ from the top degree down, a(0) = 0 gauge

    Raises:
        SingularSystemError: all γ vanish
        DegreeBudgetError: deg q + k₀ exceeds N
    """
    k0 = lowest_gamma_index(spec)
    if q.is_zero():
        return TimePoly.zero(spec.max_degree)
    top = q.degree + k0
    if top > spec.max_degree:
        raise DegreeBudgetError(
            f"a_q needs degree {top}, budget is N={spec.max_degree}"
        )
    a = [Fraction(0)] * (top + 1)
    lead = spec.g(k0)
    for n in range(q.degree, -1, -1):
        rest = sum(
            (spec.g(k) * a[n + k] for k in range(k0 + 1, top - n + 1)),
            Fraction(0) if not isinstance(q.coeff(n), float) else 0.0,
        )
        a[n + k0] = (q.coeff(n) - rest) / lead
    return TimePoly(a, spec.max_degree)


def solve_aq(spec: CocycleSpec, q: Vec3Poly) -> Vec3Poly:
    """Translation a_q with C(a_q) = q"""
    return q.map(lambda c: solve_aq_component(spec, c))


def random_spec(
    rng: np.random.Generator,
    max_degree: int = DEFAULT_MAX_DEGREE,
    order: int = 4,
    canonical: bool = False,
    w: Coefficient = 0,
) -> CocycleSpec:
    """Random embeddable spec with nonzero coefficients up to `order`"""
    while True:
        beta = [random_scalar(rng) for _ in range(order)]
        gamma = [random_scalar(rng) for _ in range(order)]
        if canonical:
            gamma[0], gamma[1] = Fraction(0), Fraction(1)
            beta[0] = abs(beta[0]) or Fraction(1)
        spec = CocycleSpec(tuple(beta), tuple(gamma), parse_scalar(w), max_degree)
        if spec.is_embeddable and spec.gamma[1] != 0:
            return spec
