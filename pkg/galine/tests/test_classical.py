"""
Unit tests for the classical frame transformation and Hamilton's equations
"""
from fractions import Fraction

import numpy as np
import pytest

from galine.classical import (
    FreeParticle,
    GeneratingSpec,
    LinearPotential,
    PhaseState,
    bracket_comparison,
    canonical_transform,
    generator_A,
    initial_state,
    integrate_hamilton,
    inverse_transform,
    is_standard_frame,
    poisson,
    standard_frame_error,
    step_doubling_error,
    transformed_hamiltonian,
)
from galine.cocycle import canonical_spec as make_canonical
from galine.cocycle import random_spec
from galine.errors import NotEmbeddableError
from galine.tests.conftest import N
from galine.timealg import TimePoly, Vec3Poly

G0 = Fraction(1, 2)


def accelerated_frame(accel=G0) -> Vec3Poly:
    """a(t) = ½g₀t²"""
    return Vec3Poly.x_only(TimePoly.from_power_coeffs([0, 0, Fraction(accel) / 2], N))


@pytest.fixture
def frame():
    return accelerated_frame()


class TestPhaseState:
    def test_scalar_is_x_axis(self):
        s = PhaseState(1.5, 2.0)
        np.testing.assert_array_equal(s.x, [1.5, 0.0, 0.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            PhaseState([np.nan, 0, 0], 0.0)
        with pytest.raises(ValueError):
            PhaseState(0.0, 0.0, t=np.inf)

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            PhaseState([1.0, 2.0], 0.0)


class TestCanonicalTransform:
    """Test the generated transformation and its inverse"""

    def test_round_trip(self, general_spec, frame):
        gs = GeneratingSpec(general_spec, frame)
        s = PhaseState([0.3, -1.0, 2.0], [1.0, 0.5, -0.25], t=0.7)
        back = inverse_transform(gs, canonical_transform(gs, s))
        np.testing.assert_allclose(back.x, s.x, atol=1e-12)
        np.testing.assert_allclose(back.p, s.p, atol=1e-12)

    def test_canonical_shift(self, canonical_spec, frame):
        """B(a) = a and C(a) = ȧ for the canonical spec"""
        gs = GeneratingSpec(canonical_spec, frame)
        s = canonical_transform(gs, PhaseState(0.0, 0.0, t=2.0))
        assert s.x[0] == pytest.approx(1.0)
        assert s.p[0] == pytest.approx(-1.0)

    def test_quadratic_family_round_trip(self, canonical_spec, frame):
        gs = GeneratingSpec(canonical_spec, frame, kappa=0.1)
        s = PhaseState(0.4, 1.0, t=0.5)
        back = inverse_transform(gs, canonical_transform(gs, s))
        np.testing.assert_allclose(back.p, s.p, atol=1e-12)

    def test_transformed_hamiltonian_at_rest(self, canonical_spec, frame):
        """Particle at rest at t = 0: H′ = 0 + Ḃ·p′ + x·Ċ = 0"""
        gs = GeneratingSpec(canonical_spec, frame)
        assert transformed_hamiltonian(gs, PhaseState(0.0, 0.0, 0.0)) == pytest.approx(0.0)


class TestHamiltonIntegration:
    """ẍ′ = B̈(a) in the accelerated frame"""

    @pytest.mark.parametrize("spec_name, expected", [("canonical_spec", 0.5), ("general_spec", 1.0)])
    def test_frame_acceleration(self, request, frame, spec_name, expected):
        spec = request.getfixturevalue(spec_name)
        gs = GeneratingSpec(spec, frame)
        trajectory = integrate_hamilton(gs, initial_state(gs, [0.5, 0, 0], [0.25, 0, 0]), T=2.0, dt=1e-2)
        assert trajectory.max_acceleration_error() <= 1e-9
        np.testing.assert_allclose(trajectory.x_ddot[:, 0], expected, atol=1e-9)

    def test_mass_independence(self, frame):
        """β = (1, 3/10): the particle mass never enters x′(t)"""
        spec = make_canonical(1, extra_beta={1: "3/10"}, max_degree=N)
        gs = GeneratingSpec(spec, frame)
        paths = []
        for mass in (1.0, 2.7):
            start = initial_state(gs, 0.5, 0.25, mass=mass)
            trajectory = integrate_hamilton(gs, start, T=1.0, dt=1e-3, base=FreeParticle(mass))
            np.testing.assert_allclose(trajectory.x_ddot[:, 0], 0.5, atol=1e-9)
            paths.append(trajectory.x)
        np.testing.assert_allclose(paths[0], paths[1], atol=1e-9)

    def test_standard_frame_recovery(self, canonical_spec, frame, general_spec):
        """βₙ = δₙ₀ gives ẍ′ = ä"""
        assert is_standard_frame(canonical_spec)
        assert not is_standard_frame(general_spec)
        gs = GeneratingSpec(canonical_spec, frame)
        trajectory = integrate_hamilton(gs, initial_state(gs, 0.0, 1.0), T=1.0, dt=1e-2)
        assert standard_frame_error(gs, trajectory) <= 1e-9

    def test_higher_degree_frames(self, rng):
        """a = ¼t² + t⁴ for random specs: x′(t) = x + vt + B(a)(t) and ẍ′ = B̈(a)"""
        frame = Vec3Poly.x_only(TimePoly.from_power_coeffs([0, 0, Fraction(1, 4), 0, 1], N))
        times = np.linspace(0.0, 1.0, 101)
        for _ in range(6):
            gs = GeneratingSpec(random_spec(rng, max_degree=N), frame)
            start = initial_state(gs, 0.5, 0.25, mass=1.0)
            trajectory = integrate_hamilton(gs, start, T=1.0, dt=1e-2, base=FreeParticle(1.0))
            assert trajectory.max_acceleration_error() <= 1e-9
            B = np.array([gs.functions.at(gs.functions.B, t)[0] for t in times])
            np.testing.assert_allclose(trajectory.x[:, 0], 0.5 + 0.25 * times + B, rtol=1e-9, atol=1e-9)

    def test_inertial_energy_conserved(self, canonical_spec):
        gs = GeneratingSpec(canonical_spec, Vec3Poly.zero(N))
        trajectory = integrate_hamilton(gs, initial_state(gs, 0.0, 1.0), T=1.0, dt=1e-2)
        assert trajectory.energy_residual <= 1e-12
        assert trajectory.x[-1, 0] == pytest.approx(1.0)

    def test_linear_potential(self, canonical_spec, frame):
        gs = GeneratingSpec(canonical_spec, frame)
        base = LinearPotential(mass=1.0, strength=(0.2, 0.0, 0.0))
        trajectory = integrate_hamilton(gs, initial_state(gs, 0.0, 0.0), T=1.0, dt=1e-2, base=base)
        np.testing.assert_allclose(trajectory.x_ddot[:, 0], 0.5 - 0.2, atol=1e-9)

    def test_to_frame(self, canonical_spec, frame):
        gs = GeneratingSpec(canonical_spec, frame)
        trajectory = integrate_hamilton(gs, initial_state(gs, 0.0, 0.0), T=0.1, dt=1e-2)
        table = trajectory.to_frame()
        assert list(table.columns) == ["t", "x'", "p'", "xddot", "Bddot"]
        assert len(table) == 11

    def test_step_doubling(self, canonical_spec, frame):
        gs = GeneratingSpec(canonical_spec, frame)
        assert step_doubling_error(gs, initial_state(gs, 0.5, 0.25), T=1.0, dt=1e-2) <= 1e-10

    def test_invalid_inputs(self, canonical_spec, frame, massless_spec):
        gs = GeneratingSpec(canonical_spec, frame)
        with pytest.raises(ValueError):
            integrate_hamilton(gs, PhaseState(0.0, 0.0), T=1.0, dt=0.0)
        with pytest.raises(ValueError):
            integrate_hamilton(GeneratingSpec(canonical_spec, frame, kappa=0.1), PhaseState(0.0, 0.0), T=1.0, dt=1e-2)
        with pytest.raises(NotEmbeddableError):
            initial_state(GeneratingSpec(massless_spec, frame), 0.0, 0.0)


class TestGenerators:
    """Linear generators and their Poisson brackets"""

    @pytest.mark.parametrize("spec_name", ["canonical_spec", "general_spec"])
    def test_bracket_is_mass(self, request, spec_name):
        spec = request.getfixturevalue(spec_name)
        bracket = poisson(generator_A(spec, 1), generator_A(spec, 0))
        assert isinstance(bracket, TimePoly)
        assert bracket == TimePoly.constant(spec.mass, N)

    def test_bracket_depends_on_time(self, canonical_spec):
        """{A⁽²⁾, A⁽⁰⁾} = t·m for the canonical spec"""
        bracket = poisson(generator_A(canonical_spec, 2), generator_A(canonical_spec, 0))
        assert bracket == TimePoly.from_power_coeffs([0, 1], N)
        assert bracket.degree == 1

    def test_generator_coefficients(self, general_spec):
        """A⁽¹⁾ = (γ₁ + γ₀t)x + (β₁ + β₀t)p"""
        A1 = generator_A(general_spec, 1)
        assert A1.c_x == TimePoly.from_power_coeffs([1, Fraction(1, 3)], N)
        assert A1.c_p == TimePoly.from_power_coeffs([Fraction(1, 2), 2], N)
        assert A1.value(PhaseState(1.0, 1.0, t=0.0)) == pytest.approx(1.5)

    def test_different_axes_commute(self, canonical_spec):
        assert poisson(generator_A(canonical_spec, 1, axis=0), generator_A(canonical_spec, 0, axis=1)).is_zero()

    def test_scaling(self, canonical_spec):
        A = 2 * generator_A(canonical_spec, 0)
        assert A.c_p == 2

    def test_quantum_comparison(self, general_spec):
        result = bracket_comparison(general_spec)
        assert result["match"]
        assert result["classical"] == ["11/6"]

    def test_negative_order(self, canonical_spec):
        with pytest.raises(ValueError):
            generator_A(canonical_spec, -1)

    def test_quadratic_family_rejected(self, canonical_spec, frame):
        with pytest.raises(ValueError):
            generator_A(GeneratingSpec(canonical_spec, frame, kappa=0.1), 1)


def test_free_particle_energy():
    assert FreeParticle(2.0).value(np.zeros(3), np.array([2.0, 0.0, 0.0])) == pytest.approx(1.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
