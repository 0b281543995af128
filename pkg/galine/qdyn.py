"""
Numeric 1-D realization of the representation on a velocity grid:
wavepackets, U(g), spectral generator checks and time evolution
"""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import spsolve
from tqdm import tqdm

from galine.cocycle import CocycleSpec, eval_B, omega
from galine.errors import InsufficientSamplesError, InterpolationWarning, NormDriftError, SupportEscapeError
from galine.group import GroupElement, compose, inverse, is_space_translation, is_time_translation
from galine.qrep import (
    CanonicalOperator,
    boost,
    cocycle_phase,
    dual_label,
    hamiltonian,
    momentum,
    position,
    space_translation_phase,
    time_translation_phase,
    xi_inverse,
)
from galine.timealg import TimePoly, Vec3Poly, parse_scalar

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-4
DEFECT_FLOOR = 1e-11
NORM_TOLERANCE = 1e-8
UNITARITY_TOLERANCE = 1e-10
SUPPORT_MARGIN = 0.1
SUPPORT_TOLERANCE = 1e-10
MAX_HALVINGS = 4


@dataclass(frozen=True)
class Grid1D:
    """Uniform velocity grid"""

    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError(f"Grid needs at least 8 points, got {self.n_points}")
        if self.q_max <= self.q_min:
            raise ValueError("Grid upper bound must exceed lower bound")

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_points)

    def edge_mask(self, margin: float = SUPPORT_MARGIN) -> np.ndarray:
        """Points within `margin` (fraction of the length) of either boundary"""
        band = margin * (self.q_max - self.q_min)
        q = self.points
        return (q < self.q_min + band) | (q > self.q_max - band)


@dataclass
class WavepacketState:
    """Sampled ψ(q) at evaluation time eval_time"""

    grid: Grid1D
    psi: np.ndarray
    eval_time: float = 0.0
    initial_norm: Optional[float] = None

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (self.grid.n_points,):
            raise ValueError(f"Amplitudes shape {self.psi.shape} does not match grid")
        if self.initial_norm is None:
            self.initial_norm = self.norm()

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2) * self.grid.spacing))

    def inner(self, other: "WavepacketState") -> complex:
        """⟨self|other⟩"""
        return complex(np.sum(np.conj(self.psi) * other.psi) * self.grid.spacing)

    def edge_probability(self, margin: float = SUPPORT_MARGIN) -> float:
        mask = self.grid.edge_mask(margin)
        return float(np.sum(np.abs(self.psi[mask]) ** 2) * self.grid.spacing)

    def evolved(self, psi: np.ndarray, eval_time: float) -> "WavepacketState":
        return WavepacketState(self.grid, psi, eval_time, self.initial_norm)


def gaussian_packet(
    grid: Grid1D,
    center: float,
    width: float,
    momentum_offset: float = 0.0,
    eval_time: float = 0.0,
) -> WavepacketState:
    """
    Normalized Gaussian in q with a plane-wave factor e^{ikq}

    Args:
        grid: Velocity grid
        center: Packet center in q
        width: Standard deviation σ of |ψ|²
        momentum_offset: Wavenumber k conjugate to q (shifts ⟨X̂⟩ by −k/m in canonical form)
        eval_time: Initial evaluation time
    """
    q = grid.points
    psi = np.exp(-((q - center) ** 2) / (4 * width**2) + 1j * momentum_offset * q)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.spacing)
    state = WavepacketState(grid, psi, eval_time)
    check_support(state)
    return state


def check_support(state: WavepacketState, margin: float = SUPPORT_MARGIN, tol: float = SUPPORT_TOLERANCE) -> None:
    """
    Raises:
        SupportEscapeError: if more than `tol` probability sits in the edge bands
    """
    edge = state.edge_probability(margin)
    if edge > tol:
        raise SupportEscapeError(f"Packet reached the grid edge: edge probability {edge:.3e} > {tol:.1e}")


# ---------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class FrameScenario:
    """
    A 1-D frame with constant acceleration g₀

    The frame translation is a(t) = ½g₀t², and the label flows as
    q(t) = q₀ − g₀t so that the expectation value accelerates at +g₀.
    """

    spec: CocycleSpec
    grid: Grid1D
    frame_accel: Fraction = Fraction(0)
    q0: Fraction = Fraction(0)
    horizon: float = 1.0
    dt: float = 1e-3
    name: str = "frame"

    def __post_init__(self):
        object.__setattr__(self, "frame_accel", parse_scalar(self.frame_accel))
        object.__setattr__(self, "q0", parse_scalar(self.q0))
        if self.dt <= 0 or self.horizon <= 0:
            raise ValueError("Horizon and time step must be positive")

    @classmethod
    def inertial(cls, spec: CocycleSpec, grid: Grid1D, **kwargs) -> "FrameScenario":
        return cls(spec, grid, Fraction(0), **kwargs)

    @property
    def is_inertial(self) -> bool:
        return self.frame_accel == 0

    @property
    def frame_translation(self) -> Vec3Poly:
        N = self.spec.max_degree
        return Vec3Poly.x_only(TimePoly((0, 0, self.frame_accel), N))

    @property
    def q_flow(self) -> Vec3Poly:
        N = self.spec.max_degree
        return Vec3Poly.x_only(TimePoly((self.q0, -self.frame_accel), N))

    @property
    def w(self) -> Fraction:
        return self.spec.w

    def with_spec(self, spec: CocycleSpec, name: Optional[str] = None) -> "FrameScenario":
        return replace(self, spec=spec, name=name or self.name)

    def hamiltonian(self) -> CanonicalOperator:
        return hamiltonian(self.spec, self.q_flow, axes=(0,))

    def position_operator(self) -> CanonicalOperator:
        return position(self.spec, 0)

    def momentum_operator(self) -> CanonicalOperator:
        return momentum(self.spec, 0)


# ---------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------


def first_derivative_matrix(grid: Grid1D) -> sparse.csr_matrix:
    """4th-order central difference (−f₊₂ + 8f₊₁ − 8f₋₁ + f₋₂)/12h, zero outside the grid"""
    n, h = grid.n_points, grid.spacing
    offsets = [-2, -1, 1, 2]
    weights = [1.0, -8.0, 8.0, -1.0]
    diagonals = [np.full(n - abs(k), w / (12 * h)) for k, w in zip(offsets, weights)]
    return sparse.diags(diagonals, offsets, shape=(n, n), format="csr")


def second_derivative_matrix(grid: Grid1D) -> sparse.csr_matrix:
    """4th-order central difference (−f₊₂ + 16f₊₁ − 30f₀ + 16f₋₁ − f₋₂)/12h²"""
    n, h = grid.n_points, grid.spacing
    offsets = [-2, -1, 0, 1, 2]
    weights = [-1.0, 16.0, -30.0, 16.0, -1.0]
    diagonals = [np.full(n - abs(k), w / (12 * h**2)) for k, w in zip(offsets, weights)]
    return sparse.diags(diagonals, offsets, shape=(n, n), format="csr")


def _derivative_power(grid: Grid1D, order: int) -> sparse.csr_matrix:
    n = grid.n_points
    if order == 0:
        return sparse.identity(n, format="csr")
    if order == 1:
        return first_derivative_matrix(grid)
    result = second_derivative_matrix(grid)
    for _ in range(order - 2):
        result = first_derivative_matrix(grid) @ result
    return result.tocsr()


def _check_grid_axis(mono: Tuple[int, ...]) -> None:
    if any(mono[1:3]) or any(mono[4:6]):
        raise ValueError(f"Monomial {mono} acts outside the grid axis")


class DiscretizedOperator:
    """
    Grid matrices of a CanonicalOperator's monomials, with the time-dependent
    coefficients evaluated on demand
    """

    def __init__(self, op: CanonicalOperator, grid: Grid1D):
        self.grid = grid
        q = grid.points
        self._pieces: List[Tuple[Any, sparse.csr_matrix]] = []
        for mono, coeff in op.terms.items():
            _check_grid_axis(mono)
            matrix = sparse.diags(q ** mono[0]) @ _derivative_power(grid, mono[3])
            self._pieces.append((coeff, matrix.tocsr()))

    def at(self, t: float, hermitian: bool = False) -> sparse.csr_matrix:
        n = self.grid.n_points
        total = sparse.csr_matrix((n, n), dtype=complex)
        for coeff, matrix in self._pieces:
            total = total + coeff.evaluate(t) * matrix
        if hermitian:
            total = (total + total.conj().T) * 0.5
        return total.tocsr()


def discretize(op: CanonicalOperator, grid: Grid1D, t: float, hermitian: bool = False) -> sparse.csr_matrix:
    """Sparse banded matrix of `op` at time t"""
    return DiscretizedOperator(op, grid).at(t, hermitian)


def spectral_derivative(psi: np.ndarray, grid: Grid1D, order: int = 1) -> np.ndarray:
    """dⁿψ/dqⁿ as (ik)ⁿ in Fourier space, the derivative matching the spectral shift"""
    if order == 0:
        return np.asarray(psi, dtype=complex)
    k = 2 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.spacing)
    return np.fft.ifft((1j * k) ** order * np.fft.fft(psi))


def apply_spectral(op: CanonicalOperator, state: WavepacketState, t: float) -> np.ndarray:
    """Σ c(t) qᵃ Dᵈ ψ with every D taken spectrally"""
    q = state.grid.points
    result = np.zeros(state.grid.n_points, dtype=complex)
    for mono, coeff in op.terms.items():
        _check_grid_axis(mono)
        result += coeff.evaluate(t) * q ** mono[0] * spectral_derivative(state.psi, state.grid, mono[3])
    return result


def expectation(state: WavepacketState, matrix: sparse.spmatrix) -> complex:
    return complex(np.sum(np.conj(state.psi) * (matrix @ state.psi)) * state.grid.spacing)


def phase_between(reference: WavepacketState, other: WavepacketState) -> float:
    """arg⟨reference|other⟩"""
    return float(np.angle(reference.inner(other)))


# ---------------------------------------------------------------------
# Group action
# ---------------------------------------------------------------------


def _spectral_shift(psi: np.ndarray, grid: Grid1D, c: float) -> np.ndarray:
    """ψ(q − c) through the Fourier shift theorem"""
    k = 2 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.spacing)
    return np.fft.ifft(np.fft.fft(psi) * np.exp(-1j * k * c))


def _cubic_shift(psi: np.ndarray, grid: Grid1D, c: float) -> np.ndarray:
    q = grid.points
    re = CubicSpline(q, psi.real, extrapolate=False)(q - c)
    im = CubicSpline(q, psi.imag, extrapolate=False)(q - c)
    return np.nan_to_num(re) + 1j * np.nan_to_num(im)


def _check_one_dimensional(g: GroupElement) -> None:
    if not (g.a.y.is_zero() and g.a.z.is_zero()):
        raise ValueError("Grid realization only carries translations along x")


def transform_phase(spec: CocycleSpec, g: GroupElement, grid: Grid1D, time: float, phase: str = "cocycle") -> np.ndarray:
    """
    Phase ξ(g⁻¹, q) or its cocycle part at `time`, for every grid label

    The cocycle part is affine in q, so it is evaluated once and scaled.
    """
    h = inverse(g)
    if phase == "cocycle":
        N = spec.max_degree
        offset = float(cocycle_phase(spec, h, Vec3Poly.zero(N)).evaluate(time))
        slope = float(eval_B(spec, h.a).x.evaluate(time))
        return offset + slope * grid.points
    if phase == "full":
        N = spec.max_degree
        full = _full_phase(spec, g)
        return np.array([float(full(Vec3Poly.x_only(TimePoly.constant(float(q), N))).evaluate(time)) for q in grid.points])
    raise ValueError(f"Unknown phase mode: {phase}")


def _full_phase(spec: CocycleSpec, g: GroupElement) -> Callable[[Vec3Poly], TimePoly]:
    """ξ(g⁻¹, ·), in closed form for pure translations"""
    if is_time_translation(g):
        return lambda q: -time_translation_phase(spec, g.b, q)
    if is_space_translation(g):
        return lambda q: -space_translation_phase(spec, g.a, q)
    return lambda q: xi_inverse(spec, g, q)


def apply_U(
    scenario: FrameScenario,
    g: GroupElement,
    state: WavepacketState,
    phase: str = "cocycle",
    interpolation: str = "spectral",
) -> WavepacketState:
    """
    (Uψ)(q) = e^{−iξ(g⁻¹,q)} ψ(q̃) with the dual label q̃ = q − Λ_{−b}C(a)

    Both the dual label and the phase are read at τ + b, so the grid shift
    is C(a) at the state's time τ. The result carries eval_time τ + b.
    With the cocycle phase, U(g₂)U(g₁) = e^{iω(g₂,g₁)(τ)} U(g₂g₁).

    Args:
        scenario: Supplies the cocycle spec
        g: Element with translation along x only
        state: Input wavepacket
        phase: "cocycle" or "full" (adds the label gauge term)
        interpolation: "spectral" (exactly unitary) or "cubic"

    Raises:
        SupportEscapeError: if the transformed packet reaches the grid edge
    """
    _check_one_dimensional(g)
    spec, grid = scenario.spec, state.grid
    new_time = state.eval_time + float(g.b)
    c = -float(dual_label(spec, g, Vec3Poly.zero(spec.max_degree)).x.evaluate(new_time))
    if interpolation == "spectral":
        shifted = _spectral_shift(state.psi, grid, c)
    elif interpolation == "cubic":
        shifted = _cubic_shift(state.psi, grid, c)
    else:
        raise ValueError(f"Unknown interpolation: {interpolation}")

    psi = np.exp(-1j * transform_phase(spec, g, grid, new_time, phase)) * shifted
    result = state.evolved(psi, new_time)
    check_support(result)

    drift = abs(result.norm() - state.norm()) / state.norm()
    if drift > UNITARITY_TOLERANCE:
        msg = f"Norm changed by {drift:.2e} under U(g) with {interpolation} interpolation"
        logger.warning(msg)
        warnings.warn(msg, InterpolationWarning)
    return result


def numeric_composition_defect(
    scenario: FrameScenario, g2: GroupElement, g1: GroupElement, state: WavepacketState
) -> float:
    """max |U(g₂)U(g₁)ψ − e^{iω(g₂,g₁)(τ)} U(g₂g₁)ψ|"""
    two_step = apply_U(scenario, g2, apply_U(scenario, g1, state))
    direct = apply_U(scenario, compose(g2, g1), state)
    w = float(omega(scenario.spec, g2, g1).evaluate(state.eval_time))
    return float(np.max(np.abs(two_step.psi - np.exp(1j * w) * direct.psi)))


# ---------------------------------------------------------------------
# Generator checks
# ---------------------------------------------------------------------


@dataclass
class GeneratorReport:
    """
    Defects ‖(U(ε)ψ − U(−ε)ψ)/2iε − Ĝψ‖ at ε, ε/2 and ε/4

    The symmetric quotient converges at second order, so the defect ratio
    between ε and ε/2 sits near 4. A defect at the round-off floor counts as
    converged.
    """

    which: str
    epsilon: float
    defect: float
    defect_half: float
    defect_quarter: float
    self_ratio: float
    floor: float = DEFECT_FLOOR

    @property
    def defect_ratio(self) -> float:
        return _ratio(self.defect, self.defect_half)

    def converges(self, low: float = 3.2, high: float = 4.8) -> bool:
        if max(self.defect, self.defect_half) <= self.floor:
            return True
        return low <= self.defect_ratio <= high

    def to_dict(self) -> Dict[str, Any]:
        return {
            "which": self.which,
            "epsilon": self.epsilon,
            "defect": self.defect,
            "defect_half": self.defect_half,
            "defect_quarter": self.defect_quarter,
            "defect_ratio": self.defect_ratio,
            "self_ratio": self.self_ratio,
            "converged": self.converges(),
        }


def _ratio(coarse: float, fine: float) -> float:
    if fine == 0:
        return float("inf") if coarse else float("nan")
    return float(coarse / fine)


def _parse_which(which: str) -> Tuple[str, int]:
    if which in ("H", "P"):
        return which, 0
    if which.startswith("K(") and which.endswith(")"):
        return "K", int(which[2:-1])
    raise ValueError(f"Unknown generator: {which}")


def _difference_quotient(scenario: FrameScenario, kind: str, n: int, state: WavepacketState, eps: float) -> np.ndarray:
    N = scenario.spec.max_degree
    if kind == "H":
        plus = apply_U(scenario, GroupElement.time_translation(eps, N), state, phase="full")
        minus = apply_U(scenario, GroupElement.time_translation(-eps, N), state, phase="full")
        return 1j * (plus.psi - minus.psi) / (2 * eps)
    basis = TimePoly.taylor_basis(n, N)
    plus = apply_U(scenario, GroupElement.create(Vec3Poly.x_only(basis * eps), 0), state)
    minus = apply_U(scenario, GroupElement.create(Vec3Poly.x_only(basis * (-eps)), 0), state)
    return (plus.psi - minus.psi) / (2j * eps)


def generator_operator(scenario: FrameScenario, which: str) -> CanonicalOperator:
    kind, n = _parse_which(which)
    if kind == "H":
        return scenario.hamiltonian()
    if kind == "P":
        return momentum(scenario.spec, 0)
    return boost(scenario.spec, n, 0)


def richardson_ratio(values: Sequence[np.ndarray]) -> float:
    """|v(ε) − v(ε/2)| / |v(ε/2) − v(ε/4)| in the max norm; 4 for second-order convergence"""
    if len(values) < 3:
        raise InsufficientSamplesError("Richardson ratio needs three refinement levels")
    coarse = np.max(np.abs(values[0] - values[1]))
    fine = np.max(np.abs(values[1] - values[2]))
    if fine == 0:
        return float("inf") if coarse else float("nan")
    return float(coarse / fine)


def generator_check(
    scenario: FrameScenario,
    which: str,
    state: WavepacketState,
    epsilon: float = DEFAULT_EPSILON,
) -> GeneratorReport:
    """
    Compare the symmetric difference quotient of U with the symbolic generator

    P̂ and K̂⁽ⁿ⁾ are −i dU/dε along a(t) = ε tⁿ/n!; Ĥ is i dU/db for the
    time-translation representative and is only checked for inertial frames.
    """
    kind, n = _parse_which(which)
    if kind == "H" and not scenario.is_inertial:
        raise ValueError("Hamiltonian check needs an inertial scenario")

    quotients = [
        _difference_quotient(scenario, kind, n, state, epsilon / 2**k) for k in range(3)
    ]
    target = apply_spectral(generator_operator(scenario, which), state, state.eval_time)
    defects = [float(np.max(np.abs(quotient - target))) for quotient in quotients]
    report = GeneratorReport(
        which=which,
        epsilon=epsilon,
        defect=defects[0],
        defect_half=defects[1],
        defect_quarter=defects[2],
        self_ratio=richardson_ratio(quotients),
    )
    logger.info(
        f"Generator {which}: defect {report.defect:.3e} at ε={epsilon:g}, defect ratio {report.defect_ratio:.3f}"
    )
    return report


# ---------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------


@dataclass
class EvolutionResult:
    """Sampled expectations of one run"""

    name: str
    b: np.ndarray
    norm: np.ndarray
    x: np.ndarray
    p: np.ndarray
    global_phase: np.ndarray
    final_state: WavepacketState
    dt: float

    def acceleration(self) -> np.ndarray:
        return accel_of_expectation(self.x, float(self.b[1] - self.b[0]))

    def mean_acceleration(self) -> float:
        return float(np.mean(self.acceleration()))

    def to_frame(self) -> pd.DataFrame:
        accel = np.full(self.b.shape, np.nan)
        if len(self.b) >= 5:
            accel[1:-1] = self.acceleration()
        return pd.DataFrame(
            {
                "b": self.b,
                "re_norm": self.norm,
                "<X>": self.x,
                "<P>": self.p,
                "d2<X>/db2": accel,
                "global_phase": self.global_phase,
            }
        )

    def summary(self) -> Dict[str, Any]:
        accel = self.acceleration()
        return {
            "name": self.name,
            "dt": self.dt,
            "samples": int(len(self.b)),
            "mean_acceleration": float(np.mean(accel)),
            "max_acceleration_spread": float(np.max(accel) - np.min(accel)),
            "max_norm_drift": float(np.max(np.abs(self.norm - self.norm[0]))),
        }


def accel_of_expectation(values: Sequence[float], spacing: float = 1.0) -> np.ndarray:
    """
    Second-difference estimate of the second derivative, endpoints trimmed

    Raises:
        InsufficientSamplesError: with fewer than five samples
    """
    x = np.asarray(values, dtype=float)
    if x.size < 5:
        raise InsufficientSamplesError(f"Need at least 5 samples, got {x.size}")
    return (x[2:] - 2 * x[1:-1] + x[:-2]) / spacing**2


def _run(
    scenario: FrameScenario,
    state0: WavepacketState,
    dt: float,
    sample_every: int,
    norm_tolerance: float,
) -> EvolutionResult:
    grid = state0.grid
    n_steps = int(round(scenario.horizon / dt))
    H = DiscretizedOperator(scenario.hamiltonian(), grid)
    X = DiscretizedOperator(scenario.position_operator(), grid)
    P = DiscretizedOperator(scenario.momentum_operator(), grid)
    identity = sparse.identity(grid.n_points, dtype=complex, format="csc")

    t0 = state0.eval_time
    state = state0
    norm0 = state0.norm()
    rows: List[Tuple[float, float, float, float, float]] = []

    def sample(step: int) -> None:
        t = t0 + step * dt
        norm = state.norm()
        if abs(norm - norm0) / norm0 > norm_tolerance:
            raise NormDriftError(f"Norm drift {abs(norm - norm0) / norm0:.2e} at b={step * dt:.4f}")
        check_support(state)
        overlap = state0.inner(state)
        rows.append(
            (
                step * dt,
                norm,
                expectation(state, X.at(t)).real,
                expectation(state, P.at(t)).real,
                float(np.angle(overlap)),
            )
        )

    sample(0)
    for step in range(n_steps):
        t_mid = t0 + (step + 0.5) * dt
        M = H.at(t_mid, hermitian=True)
        lhs = (identity + 0.5j * dt * M).tocsc()
        rhs = (identity - 0.5j * dt * M) @ state.psi
        state = state.evolved(spsolve(lhs, rhs), t0 + (step + 1) * dt)
        if (step + 1) % sample_every == 0:
            sample(step + 1)

    data = np.array(rows)
    return EvolutionResult(
        name=scenario.name,
        b=data[:, 0],
        norm=data[:, 1],
        x=data[:, 2],
        p=data[:, 3],
        global_phase=np.unwrap(data[:, 4]),
        final_state=state,
        dt=dt,
    )


def evolve(
    scenario: FrameScenario,
    state0: WavepacketState,
    sample_every: int = 1,
    norm_tolerance: float = NORM_TOLERANCE,
    max_halvings: int = MAX_HALVINGS,
) -> EvolutionResult:
    """
    Crank-Nicolson integration of i∂ψ/∂b = Ĥ(b)ψ with Ĥ read at the step midpoint

    The step is halved when the norm drifts beyond tolerance.

    Raises:
        NormDriftError: if the drift persists after `max_halvings` halvings
        SupportEscapeError: if the packet reaches the grid edge
    """
    dt = scenario.dt
    for attempt in range(max_halvings + 1):
        try:
            result = _run(scenario, state0, dt, sample_every * 2**attempt, norm_tolerance)
            logger.info(
                f"Evolved '{scenario.name}' to b={scenario.horizon} with dt={dt:g} "
                f"({len(result.b)} samples)"
            )
            return result
        except NormDriftError as exc:
            logger.warning(f"{exc}; halving dt={dt:g}")
            dt /= 2
    raise NormDriftError(f"Norm drift persists after {max_halvings} halvings")


# ---------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------


def _evolve_variant(args: Tuple[str, FrameScenario, WavepacketState, int, float, int]) -> Tuple[str, EvolutionResult]:
    key, scenario, state0, sample_every, norm_tolerance, max_halvings = args
    return key, evolve(scenario, state0, sample_every, norm_tolerance, max_halvings)


@dataclass
class ParameterSweep:
    """Independent evolutions keyed by variant name, run in a worker pool"""

    state0: WavepacketState
    workers: int = 1
    sample_every: int = 1
    norm_tolerance: float = NORM_TOLERANCE
    max_halvings: int = MAX_HALVINGS
    variants: Dict[str, FrameScenario] = field(default_factory=dict)

    def add(self, key: str, scenario: FrameScenario) -> "ParameterSweep":
        self.variants[key] = scenario
        return self

    def run(self) -> Dict[str, EvolutionResult]:
        jobs = [
            (key, sc, self.state0, self.sample_every, self.norm_tolerance, self.max_halvings)
            for key, sc in self.variants.items()
        ]
        results: Dict[str, EvolutionResult] = {}
        if self.workers <= 1:
            for job in tqdm(jobs, desc="Sweep", disable=len(jobs) < 2):
                key, result = _evolve_variant(job)
                results[key] = result
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                for key, result in tqdm(pool.map(_evolve_variant, jobs), total=len(jobs), desc="Sweep"):
                    results[key] = result
        return {key: results[key] for key in self.variants}

    @staticmethod
    def compare(results: Dict[str, EvolutionResult], reference: str) -> Dict[str, Any]:
        """Acceleration and final-phase differences of every variant against `reference`"""
        ref = results[reference]
        ref_accel = ref.acceleration()
        comparison = {}
        for key, result in results.items():
            comparison[key] = {
                "mean_acceleration": result.mean_acceleration(),
                "max_acceleration_diff": float(np.max(np.abs(result.acceleration() - ref_accel))),
                "final_phase": phase_between(ref.final_state, result.final_state),
            }
        return {"reference": reference, "variants": comparison}
