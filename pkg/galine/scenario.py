"""
Scenario and run-configuration models
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from galine.classical import GeneratingSpec, PhaseState, initial_state
from galine.cocycle import CocycleSpec
from galine.errors import ScenarioError
from galine.qdyn import FrameScenario, Grid1D, WavepacketState, gaussian_packet
from galine.timealg import DEFAULT_MAX_DEGREE, TimePoly, Vec3Poly, parse_scalar

Scalar = Union[int, str]

DEFAULT_SUITES = ("dd_zero", "cocycle", "reduction", "composition", "commutators")
SUITES = DEFAULT_SUITES + ("numeric",)


def _check_scalar(value):
    try:
        parse_scalar(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValueError(f"Not a rational scalar: {value!r}") from exc
    return value


class SpecModel(BaseModel):
    beta: List[Scalar]
    gamma: List[Scalar]
    w: Scalar = 0
    N: int = Field(DEFAULT_MAX_DEGREE, ge=1, le=32)

    model_config = ConfigDict(extra="forbid")

    @field_validator("beta", "gamma")
    @classmethod
    def _rationals(cls, values):
        return [_check_scalar(v) for v in values]

    @field_validator("w")
    @classmethod
    def _rational(cls, value):
        return _check_scalar(value)

    def to_spec(self) -> CocycleSpec:
        return CocycleSpec.from_dict(self.model_dump())


class FrameModel(BaseModel):
    accel: Scalar = 0
    q0: Scalar = 0
    translation: Optional[List[List[Scalar]]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("accel", "q0")
    @classmethod
    def _rational(cls, value):
        return _check_scalar(value)


class GridModel(BaseModel):
    q_min: float = -4.0
    q_max: float = 8.0
    n_points: int = Field(512, ge=8)

    model_config = ConfigDict(extra="forbid")

    def to_grid(self) -> Grid1D:
        return Grid1D(self.q_min, self.q_max, self.n_points)


class PacketModel(BaseModel):
    center: float = 2.0
    width: float = Field(0.5, gt=0)
    momentum_offset: float = 0.0

    model_config = ConfigDict(extra="forbid")


class IntegratorModel(BaseModel):
    dt: float = Field(1e-3, gt=0)
    horizon: float = Field(1.0, gt=0)
    sample_every: int = Field(5, ge=1)

    model_config = ConfigDict(extra="forbid")


class ClassicalModel(BaseModel):
    dt: float = Field(1e-3, gt=0)
    horizon: float = Field(1.0, gt=0)
    x0: float = 0.0
    v0: float = 0.0
    masses: List[float] = Field(default_factory=lambda: [1.0, 2.7])

    model_config = ConfigDict(extra="forbid")


class VariantModel(BaseModel):
    name: str
    spec: SpecModel

    model_config = ConfigDict(extra="forbid")


class ScenarioModel(BaseModel):
    name: str = "scenario"
    spec: SpecModel
    frame: FrameModel = Field(default_factory=FrameModel)
    grid: GridModel = Field(default_factory=GridModel)
    packet: PacketModel = Field(default_factory=PacketModel)
    integrator: IntegratorModel = Field(default_factory=IntegratorModel)
    classical: ClassicalModel = Field(default_factory=ClassicalModel)
    sweep: List[VariantModel] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    def cocycle_spec(self) -> CocycleSpec:
        return self.spec.to_spec()

    def frame_scenario(self, spec: Optional[CocycleSpec] = None, name: Optional[str] = None) -> FrameScenario:
        spec = spec or self.cocycle_spec()
        return FrameScenario(
            spec=spec,
            grid=self.grid.to_grid(),
            frame_accel=self.uniform_accel(spec.max_degree),
            q0=parse_scalar(self.frame.q0),
            horizon=self.integrator.horizon,
            dt=self.integrator.dt,
            name=name or self.name,
        )

    def uniform_accel(self, max_degree: int) -> Fraction:
        """
        g₀ of a frame translating as ½g₀t² along x

        Raises:
            ScenarioError: the translation is not a uniform acceleration along x,
                or it disagrees with `accel`
        """
        accel = parse_scalar(self.frame.accel)
        if self.frame.translation is None:
            return accel
        a = self.frame_translation(max_degree)
        translated = a.x.derivative_n(2).evaluate(0)
        if a != Vec3Poly.x_only(TimePoly((0, 0, translated), max_degree)):
            raise ScenarioError("The grid evolution only supports a(t) = ½g₀t² along x")
        if accel not in (0, translated):
            raise ScenarioError(f"frame.accel={accel} disagrees with the translation (g₀={translated})")
        return translated

    def initial_packet(self) -> WavepacketState:
        return gaussian_packet(
            self.grid.to_grid(), self.packet.center, self.packet.width, self.packet.momentum_offset
        )

    def frame_translation(self, max_degree: int) -> Vec3Poly:
        """Explicit translation, or ½g₀t² along x"""
        if self.frame.translation is not None:
            return Vec3Poly.from_list(self.frame.translation, max_degree)
        accel = parse_scalar(self.frame.accel)
        return Vec3Poly.x_only(TimePoly((0, 0, accel), max_degree))

    def generating_spec(self, spec: Optional[CocycleSpec] = None) -> GeneratingSpec:
        spec = spec or self.cocycle_spec()
        return GeneratingSpec(spec, self.frame_translation(spec.max_degree))

    def classical_start(self, gs: GeneratingSpec, mass: Optional[float] = None) -> PhaseState:
        return initial_state(gs, self.classical.x0, self.classical.v0, mass=mass)


def load_scenario(path: Union[str, Path]) -> ScenarioModel:
    """
    Raises:
        FileNotFoundError, json.JSONDecodeError, pydantic.ValidationError
    """
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return ScenarioModel.model_validate(data)


class RunConfig(BaseModel):
    """One CLI invocation"""

    scenario: Optional[Path] = None
    seed: int = Field(0, ge=0, lt=2**64)
    out: Path = Path("outputs")
    suites: List[str] = Field(default_factory=lambda: list(DEFAULT_SUITES))
    tol: Optional[float] = Field(None, gt=0)
    negative_control: bool = False
    sweep: bool = False
    config: Path = Path("config.yaml")

    model_config = ConfigDict(extra="forbid")

    @field_validator("suites")
    @classmethod
    def _known_suites(cls, values):
        unknown = sorted(set(values) - set(SUITES))
        if unknown:
            raise ValueError(f"Unknown suites: {unknown}")
        return values


def mass_variant(spec: CocycleSpec, mass) -> CocycleSpec:
    """Canonical spec with β₀ replaced by the requested mass"""
    beta = (parse_scalar(mass),) + spec.beta[1:]
    return CocycleSpec(beta, spec.gamma, spec.w, spec.max_degree)
