"""
Cochain calculus for the Galilean line group acting on scalar time functions
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from galine.errors import ArityError
from galine.group import GroupElement, compose
from galine.sampling import random_scalar, random_timepoly
from galine.timealg import DEFAULT_MAX_DEGREE, TimePoly

logger = logging.getLogger(__name__)


class Convention(str, Enum):
    """Placement of the automorphism in the coboundary operator"""

    LINE = "line"  # Λ_{b1} on the leftmost block, tuples written (g_{n+1}, …, g_1)
    LEFT = "left"  # σ(g_1) on the leftmost argument, tuples written (g_1, …, g_{n+1})


class ExtensionType(str, Enum):
    CENTRAL = "central"
    SEMIDIRECT = "semidirect"
    DIRECT = "direct"
    GENERAL = "general"


@dataclass(frozen=True)
class AutomorphismAction:
    """σ(g) = Λ_b, or the identity when trivial"""

    trivial: bool = False

    def apply(self, g: GroupElement, value: TimePoly) -> TimePoly:
        return value if self.trivial else value.shift(g.b)


SHIFT_ACTION = AutomorphismAction()
TRIVIAL_ACTION = AutomorphismAction(trivial=True)


@dataclass(frozen=True)
class Cochain:
    """n-cochain: deterministic map from n-tuples of group elements to TimePoly"""

    arity: int
    evaluator: Callable[..., TimePoly]
    name: str = "cochain"

    def __call__(self, *args: GroupElement) -> TimePoly:
        if len(args) != self.arity:
            raise ArityError(f"{self.name} expects {self.arity} arguments, got {len(args)}")
        return self.evaluator(*args)


@dataclass
class CheckReport:
    """Outcome of a sampled identity check"""

    check: str
    samples: int
    violations: List[Dict[str, Any]] = field(default_factory=list)
    seed: Optional[int] = None
    max_deviation: Union[Fraction, float] = Fraction(0)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, deviation: TimePoly, witness: Dict[str, Any]) -> None:
        size = max((abs(c) for c in deviation.coeffs), default=Fraction(0))
        if size > self.max_deviation:
            self.max_deviation = size
        if not deviation.is_zero():
            self.violations.append(witness)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "samples": self.samples,
            "violations": self.violations,
            "seed": self.seed,
            "max_deviation": float(self.max_deviation),
        }


def _witness(elements: Sequence[GroupElement], deviation: TimePoly) -> Dict[str, Any]:
    return {
        "tuple": [g.to_dict() for g in elements],
        "deviation": deviation.to_list(),
    }


def _zero_like(elements: Sequence[GroupElement]) -> TimePoly:
    budget = elements[0].max_degree if elements else DEFAULT_MAX_DEGREE
    return TimePoly.zero(budget)


def coboundary(
    alpha: Cochain,
    elements: Sequence[GroupElement],
    convention: Convention = Convention.LINE,
    action: AutomorphismAction = SHIFT_ACTION,
) -> TimePoly:
    """
    Evaluate (δ_n α) on an (n+1)-tuple

    Args:
        alpha: n-cochain
        elements: n+1 group elements, ordered per the convention
        convention: LINE (default) or LEFT
        action: automorphism action σ

    Raises:
        ArityError: if the tuple length is not n+1
    """
    n = alpha.arity
    h = tuple(elements)
    if len(h) != n + 1:
        raise ArityError(f"Coboundary of a {n}-cochain needs {n + 1} elements, got {len(h)}")

    total = _zero_like(h)
    if convention == Convention.LINE:
        total = total + action.apply(h[n], alpha(*h[:n]))
        for i in range(1, n + 1):
            j = n - i
            merged = h[:j] + (compose(h[j], h[j + 1]),) + h[j + 2:]
            total = total + (-1) ** i * alpha(*merged)
        total = total + (-1) ** (n + 1) * alpha(*h[1:])
    else:
        total = total + action.apply(h[0], alpha(*h[1:]))
        for i in range(1, n + 1):
            merged = h[: i - 1] + (compose(h[i - 1], h[i]),) + h[i + 1:]
            total = total + (-1) ** i * alpha(*merged)
        total = total + (-1) ** (n + 1) * alpha(*h[:n])
    return total


def coboundary_cochain(
    alpha: Cochain,
    convention: Convention = Convention.LINE,
    action: AutomorphismAction = SHIFT_ACTION,
) -> Cochain:
    return Cochain(
        alpha.arity + 1,
        lambda *gs: coboundary(alpha, gs, convention, action),
        name=f"δ({alpha.name})",
    )


def check_dd_zero(
    alpha: Cochain,
    tuples: Iterable[Sequence[GroupElement]],
    convention: Convention = Convention.LINE,
    seed: Optional[int] = None,
) -> CheckReport:
    """Verify δ_{n+1}δ_n α = 0 on each (n+2)-tuple"""
    d_alpha = coboundary_cochain(alpha, convention)
    report = CheckReport(check=f"dd_zero[{alpha.arity}]", samples=0, seed=seed)
    for elements in tuples:
        report.samples += 1
        value = coboundary(d_alpha, elements, convention)
        report.record(value, _witness(elements, value))
    _log_report(report)
    return report


def cocycle_defect(omega: Cochain, g3: GroupElement, g2: GroupElement, g1: GroupElement) -> TimePoly:
    """Λ_{b1}ω(g3,g2) + ω(g3g2,g1) − ω(g2,g1) − ω(g3,g2g1)"""
    return (
        omega(g3, g2).shift(g1.b)
        + omega(compose(g3, g2), g1)
        - omega(g2, g1)
        - omega(g3, compose(g2, g1))
    )


def two_cocycle_report(
    omega: Cochain,
    triples: Iterable[Tuple[GroupElement, GroupElement, GroupElement]],
    seed: Optional[int] = None,
    check: str = "two_cocycle",
) -> CheckReport:
    report = CheckReport(check=check, samples=0, seed=seed)
    for g3, g2, g1 in triples:
        report.samples += 1
        value = cocycle_defect(omega, g3, g2, g1)
        report.record(value, _witness((g3, g2, g1), value))
    _log_report(report)
    return report


def is_two_cocycle(
    omega: Cochain, triples: Iterable[Tuple[GroupElement, GroupElement, GroupElement]]
) -> bool:
    return all(cocycle_defect(omega, *t).is_zero() for t in triples)


def equivalence_report(
    omega1: Cochain,
    omega2: Cochain,
    alpha1: Cochain,
    pairs: Iterable[Sequence[GroupElement]],
    seed: Optional[int] = None,
) -> CheckReport:
    """Check ω1 − ω2 = δ₁α1 on each sampled pair (g2, g1)"""
    report = CheckReport(check="equivalent_mod_coboundary", samples=0, seed=seed)
    for elements in pairs:
        g2, g1 = elements[0], elements[1]
        report.samples += 1
        value = omega1(g2, g1) - omega2(g2, g1) - coboundary(alpha1, (g2, g1))
        report.record(value, _witness((g2, g1), value))
    return report


def equivalent_mod_coboundary(
    omega1: Cochain,
    omega2: Cochain,
    alpha1: Cochain,
    pairs: Iterable[Sequence[GroupElement]],
) -> bool:
    return equivalence_report(omega1, omega2, alpha1, pairs).passed


def falsify_coboundary(
    omega1: Cochain,
    omega2: Cochain,
    family: Sequence[Cochain],
    pairs: Sequence[Sequence[GroupElement]],
) -> Dict[str, Any]:
    """
    Try every 1-cochain of a finite family as a potential equivalence

    Returns:
        Dict with 'refuted' (all candidates fail) and one witness per candidate
    """
    witnesses = []
    refuted = True
    for alpha in family:
        report = equivalence_report(omega1, omega2, alpha, pairs)
        if report.passed:
            refuted = False
            logger.warning(f"✗ {alpha.name} realizes ω1 − ω2 as a coboundary on all samples")
            witnesses.append({"cochain": alpha.name, "witness": None})
        else:
            witnesses.append({"cochain": alpha.name, "witness": report.violations[0]})
    logger.info(f"Falsification over {len(family)} one-cochains: refuted={refuted}")
    return {"refuted": refuted, "witnesses": witnesses}


def commuting_pair_obstruction(
    omega: Cochain, pairs: Iterable[Tuple[GroupElement, GroupElement]]
) -> Optional[Dict[str, Any]]:
    """
    Look for a commuting pair with ω(g2,g1) ≠ ω(g1,g2)

    On commuting pairs every coboundary δ₁α is symmetric, so such a
    pair shows ω is not a coboundary for any one-cochain.

    Returns:
        Witness dict, or None if no pair is asymmetric
    """
    for g2, g1 in pairs:
        if compose(g2, g1) != compose(g1, g2):
            continue
        asym = omega(g2, g1) - omega(g1, g2)
        if not asym.is_zero():
            return _witness((g2, g1), asym)
    return None


def classify_extension(sigma_trivial: bool, omega_trivial: bool) -> ExtensionType:
    if sigma_trivial and omega_trivial:
        return ExtensionType.DIRECT
    if sigma_trivial:
        return ExtensionType.CENTRAL
    if omega_trivial:
        return ExtensionType.SEMIDIRECT
    return ExtensionType.GENERAL


# -- cochain libraries ------------------------------------------------


def zero_cochain(arity: int, max_degree: int = DEFAULT_MAX_DEGREE) -> Cochain:
    return Cochain(arity, lambda *gs: TimePoly.zero(max_degree), name="zero")


def constant_cochain(value: TimePoly) -> Cochain:
    return Cochain(0, lambda: value, name="constant")


def linear_functional_family(max_degree: int = DEFAULT_MAX_DEGREE) -> List[Cochain]:
    """
    One-cochains linear in the translation derivatives and in b

    Members: g ↦ a_i⁽ⁿ⁾(t), g ↦ a_i⁽ⁿ⁾(0)·1, and g ↦ b·1.
    """
    family: List[Cochain] = []
    for n in range(max_degree + 1):
        for i, axis in enumerate("xyz"):
            family.append(
                Cochain(
                    1,
                    lambda g, n=n, i=i: g.a.components[i].derivative_n(n),
                    name=f"d{n}a_{axis}",
                )
            )
            family.append(
                Cochain(
                    1,
                    lambda g, n=n, i=i: TimePoly.constant(g.a.components[i].coeff(n), g.max_degree),
                    name=f"a_{axis}^({n})(0)",
                )
            )
    family.append(Cochain(1, lambda g: TimePoly.constant(g.b, g.max_degree), name="b"))
    return family


def random_cochain(arity: int, rng: np.random.Generator, max_degree: int = DEFAULT_MAX_DEGREE) -> Cochain:
    """
    Fixed random polynomial cochain (not linear, so δ² checks are non-trivial)
    """
    weights = [random_scalar(rng) for _ in range(4)]
    base = random_timepoly(rng, 2, max_degree)

    if arity == 0:
        return Cochain(0, lambda: base, name="random0")

    def evaluate(*gs: GroupElement) -> TimePoly:
        total = base * TimePoly.constant(weights[0], max_degree)
        for k, g in enumerate(gs):
            comp = g.a.components[k % 3]
            total = total + comp * weights[1] + base * (g.b * weights[2])
        first, last = gs[0], gs[-1]
        total = total + first.a.x.shift(last.b) * last.a.y.derivative() * weights[3]
        return total

    return Cochain(arity, evaluate, name=f"random{arity}")


def _log_report(report: CheckReport) -> None:
    if report.passed:
        logger.info(f"✓ {report.check}: {report.samples} samples, no violations")
    else:
        logger.warning(
            f"✗ {report.check}: {len(report.violations)}/{report.samples} violations, "
            f"first witness {report.violations[0]}"
        )
