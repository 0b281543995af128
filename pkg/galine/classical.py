"""
Classical counterpart: generating functions, canonical transformations to an
accelerated frame, Hamilton's equations and linear generators
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Protocol, Sequence, Union

import numpy as np
import pandas as pd

from galine.cocycle import CocycleSpec, eval_B, eval_C
from galine.errors import IntegrationError
from galine.qrep import boost, commutator, momentum
from galine.timealg import TimePoly, Vec3Poly

logger = logging.getLogger(__name__)

ENERGY_TOLERANCE = 1e-8


def _vec(values: Union[Sequence[float], float]) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 1:
        arr = np.array([arr[0], 0.0, 0.0])
    if arr.shape != (3,):
        raise ValueError(f"Expected a 3-vector or a scalar, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PhaseState:
    """Point (x, p) of phase space at time t"""

    x: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", _vec(self.x))
        object.__setattr__(self, "p", _vec(self.p))
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.p)) and np.isfinite(self.t)):
            raise ValueError("Phase state components must be finite")


# ---------------------------------------------------------------------
# Base Hamiltonians
# ---------------------------------------------------------------------


class BaseHamiltonian(Protocol):
    mass: float

    def value(self, x: np.ndarray, p: np.ndarray) -> float: ...

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray: ...

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray: ...

    def acceleration(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        """ẍ of the inertial motion"""
        ...


@dataclass(frozen=True)
class FreeParticle:
    mass: float = 1.0

    def value(self, x: np.ndarray, p: np.ndarray) -> float:
        return float(p @ p) / (2 * self.mass)

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return np.zeros(3)

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return p / self.mass

    def acceleration(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return np.zeros(3)


@dataclass(frozen=True)
class LinearPotential:
    """p²/2m + m g·x, a uniform field of strength g"""

    mass: float = 1.0
    strength: Sequence[float] = (0.0, 0.0, 0.0)

    def value(self, x: np.ndarray, p: np.ndarray) -> float:
        return float(p @ p) / (2 * self.mass) + self.mass * float(np.dot(self.strength, x))

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self.mass * np.asarray(self.strength, dtype=float)

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return p / self.mass

    def acceleration(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return -np.asarray(self.strength, dtype=float)


# ---------------------------------------------------------------------
# Generating functions
# ---------------------------------------------------------------------


class FrameFunctions:
    """B(a), C(a) and their time derivatives, as float polynomials"""

    def __init__(self, spec: CocycleSpec, frame: Vec3Poly):
        B = eval_B(spec, frame).to_float()
        C = eval_C(spec, frame).to_float()
        self.B, self.B_dot, self.B_ddot = B, B.derivative(), B.derivative_n(2)
        self.C, self.C_dot = C, C.derivative()

    @staticmethod
    def at(poly: Vec3Poly, t: float) -> np.ndarray:
        return np.array(poly.evaluate(float(t)), dtype=float)


class GTerm(Protocol):
    """g(x, z) with z the slots a, ȧ, ä, …; evaluated along the frame"""

    linear: bool

    def grad_x(self, x: np.ndarray, t: float) -> np.ndarray: ...

    def z_rate(self, x: np.ndarray, t: float) -> float: ...


class LinearG:
    """g = x·C(a), so ∂g/∂zₙ = γₙx and Σₙ a⁽ⁿ⁺¹⁾·∂g/∂zₙ = x·Ċ(a)"""

    linear = True

    def __init__(self, frame_fns: FrameFunctions):
        self._fns = frame_fns

    def grad_x(self, x: np.ndarray, t: float) -> np.ndarray:
        return self._fns.at(self._fns.C, t)

    def z_rate(self, x: np.ndarray, t: float) -> float:
        return float(x @ self._fns.at(self._fns.C_dot, t))


class QuadraticG:
    """g = x·C + ½κ(x·C)²; invertibility of the momentum map in x is assumed"""

    linear = False

    def __init__(self, frame_fns: FrameFunctions, kappa: float):
        self._fns = frame_fns
        self.kappa = kappa

    def grad_x(self, x: np.ndarray, t: float) -> np.ndarray:
        C = self._fns.at(self._fns.C, t)
        return C * (1 + self.kappa * float(x @ C))

    def z_rate(self, x: np.ndarray, t: float) -> float:
        C = self._fns.at(self._fns.C, t)
        C_dot = self._fns.at(self._fns.C_dot, t)
        return float(x @ C_dot) * (1 + self.kappa * float(x @ C))


@dataclass
class GeneratingSpec:
    """
    F(x, p′, t) = (x + B(a))·p′ + g(x, z(t)) for the frame translation a(t)

    The default g is the linear x·C(a), which fixes ∂fⱼ/∂(zₖ)ᵢ|₀ = δᵢⱼγₖ.
    """

    spec: CocycleSpec
    frame: Vec3Poly
    kappa: Optional[float] = None
    functions: FrameFunctions = field(init=False, repr=False)
    g: GTerm = field(init=False, repr=False)

    def __post_init__(self):
        self.functions = FrameFunctions(self.spec, self.frame)
        self.g = LinearG(self.functions) if self.kappa is None else QuadraticG(self.functions, self.kappa)

    def expected_acceleration(self, t: float) -> np.ndarray:
        """B̈(a)(t)"""
        return self.functions.at(self.functions.B_ddot, t)


def canonical_transform(gs: GeneratingSpec, s: PhaseState) -> PhaseState:
    """x′ = x + B(a), p′ = p − ∇ₓg"""
    fns = gs.functions
    x_new = s.x + fns.at(fns.B, s.t)
    p_new = s.p - gs.g.grad_x(s.x, s.t)
    return PhaseState(x_new, p_new, s.t)


def inverse_transform(gs: GeneratingSpec, s_prime: PhaseState) -> PhaseState:
    """x = x′ − B(a), p = p′ + ∇ₓg(x)"""
    x = s_prime.x - gs.functions.at(gs.functions.B, s_prime.t)
    return PhaseState(x, s_prime.p + gs.g.grad_x(x, s_prime.t), s_prime.t)


def generating_time_derivative(gs: GeneratingSpec, x: np.ndarray, p_prime: np.ndarray, t: float) -> float:
    """∂F/∂t = Ḃ(a)·p′ + Σₙ a⁽ⁿ⁺¹⁾·∇_{zₙ}g"""
    return float(gs.functions.at(gs.functions.B_dot, t) @ p_prime) + gs.g.z_rate(x, t)


def transformed_hamiltonian(
    gs: GeneratingSpec, s_prime: PhaseState, base: Optional[BaseHamiltonian] = None
) -> float:
    """H′(x′, p′, t) = H(x′ − B, p′ + ∇ₓg) + ∂F/∂t"""
    base = base or FreeParticle(float(gs.spec.mass) if gs.spec.is_embeddable else 1.0)
    original = inverse_transform(gs, s_prime)
    return base.value(original.x, original.p) + generating_time_derivative(gs, original.x, s_prime.p, s_prime.t)


# ---------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------


def _hamilton_rhs(gs: GeneratingSpec, base: BaseHamiltonian, t: float, y: np.ndarray) -> np.ndarray:
    """ẋ′ = ∂H/∂p + Ḃ, ṗ′ = −∂H/∂x − Ċ for the linear g"""
    fns = gs.functions
    x_prime, p_prime = y[:3], y[3:]
    x = x_prime - fns.at(fns.B, t)
    p = p_prime + fns.at(fns.C, t)
    x_dot = base.grad_p(x, p) + fns.at(fns.B_dot, t)
    p_dot = -base.grad_x(x, p) - fns.at(fns.C_dot, t)
    return np.concatenate([x_dot, p_dot])


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    x_dot: np.ndarray
    x_ddot: np.ndarray
    expected: np.ndarray
    energy_residual: float

    def max_acceleration_error(self) -> float:
        return float(np.max(np.abs(self.x_ddot - self.expected)))

    def to_frame(self, axis: int = 0) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.t,
                "x'": self.x[:, axis],
                "p'": self.p[:, axis],
                "xddot": self.x_ddot[:, axis],
                "Bddot": self.expected[:, axis],
            }
        )


def integrate_hamilton(
    gs: GeneratingSpec,
    s0_prime: PhaseState,
    T: float,
    dt: float,
    base: Optional[BaseHamiltonian] = None,
    energy_tolerance: float = ENERGY_TOLERANCE,
) -> Trajectory:
    """
    RK4 integration of Hamilton's equations in the accelerated frame

    ẍ′ = ẍ + B̈(a) is evaluated from the inertial state at each sample.

    Raises:
        ValueError: for a non-positive step or a nonlinear g
        IntegrationError: on non-finite values or drift of the inertial energy
    """
    if dt <= 0:
        raise ValueError("Time step must be positive")
    if not gs.g.linear:
        raise ValueError("Only the linear generating family is integrated")
    base = base or FreeParticle(float(gs.spec.require_embeddable()))

    n_steps = int(round(T / dt))
    t0 = s0_prime.t
    times = t0 + dt * np.arange(n_steps + 1)
    ys = np.empty((n_steps + 1, 6))
    ys[0] = np.concatenate([s0_prime.x, s0_prime.p])

    def energy(k: int) -> float:
        original = inverse_transform(gs, PhaseState(ys[k, :3], ys[k, 3:], times[k]))
        return base.value(original.x, original.p)

    e0 = energy(0)
    scale = max(abs(e0), 1.0)
    rhs = lambda t, y: _hamilton_rhs(gs, base, t, y)
    for k in range(n_steps):
        t, y = times[k], ys[k]
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        ys[k + 1] = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(ys[k + 1])):
            raise IntegrationError(f"Non-finite state at t={times[k + 1]:.4f}")

    residuals = np.array([abs(energy(k) - e0) / scale for k in range(0, n_steps + 1, max(1, n_steps // 100))])
    residual = float(np.max(residuals))
    if residual > energy_tolerance:
        raise IntegrationError(f"Inertial energy drifted by {residual:.2e} (tolerance {energy_tolerance:.1e})")

    x_dot = np.array([rhs(t, y)[:3] for t, y in zip(times, ys)])
    expected = np.array([gs.expected_acceleration(t) for t in times])
    inertial = [inverse_transform(gs, PhaseState(y[:3], y[3:], t)) for t, y in zip(times, ys)]
    x_ddot = np.array([base.acceleration(s.x, s.p) for s in inertial]) + expected
    logger.info(f"Integrated {n_steps} RK4 steps (dt={dt:g}), energy residual {residual:.2e}")
    return Trajectory(times, ys[:, :3], ys[:, 3:], x_dot, x_ddot, expected, residual)


def step_doubling_error(gs: GeneratingSpec, s0_prime: PhaseState, T: float, dt: float) -> float:
    """Final-position difference between steps dt and dt/2"""
    coarse = integrate_hamilton(gs, s0_prime, T, dt)
    fine = integrate_hamilton(gs, s0_prime, T, dt / 2)
    return float(np.max(np.abs(coarse.x[-1] - fine.x[-1])))


def initial_state(
    gs: GeneratingSpec, x: Sequence[float], v: Sequence[float], t: float = 0.0, mass: Optional[float] = None
) -> PhaseState:
    """Transformed state of a particle at x moving with inertial velocity v (p = m v)"""
    m = float(gs.spec.require_embeddable()) if mass is None else float(mass)
    return canonical_transform(gs, PhaseState(x, m * _vec(v), t))


def is_standard_frame(spec: CocycleSpec) -> bool:
    """βₙ = δₙ₀, so that B(a) = a"""
    return spec.b(0) == 1 and all(spec.b(n) == 0 for n in range(1, len(spec.beta)))


def standard_frame_error(gs: GeneratingSpec, trajectory: Trajectory) -> float:
    """max |ẍ′ − ä| along a trajectory"""
    a_ddot = gs.frame.derivative_n(2).to_float()
    actual = np.array([FrameFunctions.at(a_ddot, t) for t in trajectory.t])
    return float(np.max(np.abs(trajectory.x_ddot - actual)))


# ---------------------------------------------------------------------
# Generators and brackets
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class LinearGenerator:
    """A = c_x(t)·x_i + c_p(t)·p_i along one axis"""

    c_x: TimePoly
    c_p: TimePoly
    axis: int = 0

    def at(self, t: float) -> Dict[str, float]:
        return {"c_x": float(self.c_x.evaluate(t)), "c_p": float(self.c_p.evaluate(t))}

    def value(self, s: PhaseState) -> float:
        c = self.at(s.t)
        return c["c_x"] * s.x[self.axis] + c["c_p"] * s.p[self.axis]

    def __mul__(self, scalar) -> "LinearGenerator":
        return LinearGenerator(self.c_x * scalar, self.c_p * scalar, self.axis)

    __rmul__ = __mul__


def generator_A(source: Union[GeneratingSpec, CocycleSpec], n: int, axis: int = 0) -> LinearGenerator:
    """A⁽ⁿ⁾ = x Σₖ γₖ tⁿ⁻ᵏ/(n−k)! + p Σₖ βₖ tⁿ⁻ᵏ/(n−k)!"""
    if n < 0:
        raise ValueError("Generator order must be non-negative")
    if isinstance(source, GeneratingSpec):
        if not source.g.linear:
            raise ValueError("Generators are extracted for the linear family only")
        spec = source.spec
    else:
        spec = source
    N = max(spec.max_degree, n)
    c_x = TimePoly([spec.g(n - j) for j in range(n + 1)], N)
    c_p = TimePoly([spec.b(n - j) for j in range(n + 1)], N)
    return LinearGenerator(c_x, c_p, axis)


def poisson(A: LinearGenerator, B: LinearGenerator) -> TimePoly:
    """
    {A, B} = Σᵢ ∂A/∂xᵢ ∂B/∂pᵢ − ∂A/∂pᵢ ∂B/∂xᵢ as an exact TimePoly

    {A⁽¹⁾, A⁽⁰⁾} is the constant m; higher orders carry powers of t.
    """
    if A.axis != B.axis:
        return TimePoly.zero(A.c_x.max_degree)
    return A.c_x * B.c_p - A.c_p * B.c_x


def bracket_comparison(spec: CocycleSpec) -> Dict[str, Any]:
    """{A⁽¹⁾, A⁽⁰⁾} against the scalar of [K̂⁽¹⁾, P̂]/i"""
    classical_value = poisson(generator_A(spec, 1), generator_A(spec, 0))
    quantum = commutator(boost(spec, 1), momentum(spec))
    scalar = quantum.scalar_part()
    return {
        "classical": classical_value.to_list(),
        "quantum": scalar.im.to_list(),
        "match": quantum.is_scalar() and scalar.re.is_zero() and scalar.im == classical_value,
    }
