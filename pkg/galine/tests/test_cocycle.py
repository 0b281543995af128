"""
Unit tests for the (B, C) cocycle family and the Galilei reduction
"""
from fractions import Fraction

import pytest

from galine.cocycle import (
    CocycleSpec,
    canonical_spec as make_canonical,
    check_BC_constraints,
    corrupted_omega,
    eval_B,
    eval_C,
    galilei_expected,
    galilei_reduction_check,
    lowest_gamma_index,
    nonlinear_B,
    omega,
    omega_cochain,
    omega_special,
    random_spec,
    reduced_independence_check,
    solve_aq,
    solve_aq_component,
)
from galine.cohomology import two_cocycle_report
from galine.errors import DegreeBudgetError, NotEmbeddableError, SingularSystemError
from galine.group import GroupElement
from galine.sampling import random_galilei, random_scalar, random_tuple, random_vec3
from galine.tests.conftest import N
from galine.timealg import TimePoly, Vec3Poly


def x_poly(*power_coeffs) -> Vec3Poly:
    return Vec3Poly.x_only(TimePoly.from_power_coeffs(power_coeffs, N))


class TestCocycleSpec:
    """Test spec construction and derived mass"""

    def test_mass_canonical(self, canonical_spec):
        assert canonical_spec.mass == 1
        assert canonical_spec.is_canonical
        assert canonical_spec.is_embeddable

    def test_mass_general(self, general_spec):
        assert general_spec.mass == Fraction(11, 6)
        assert not general_spec.is_canonical

    def test_massless(self, massless_spec):
        assert massless_spec.mass == 0
        with pytest.raises(NotEmbeddableError):
            massless_spec.require_embeddable()

    def test_budget(self):
        with pytest.raises(DegreeBudgetError):
            CocycleSpec(tuple(range(6)), (0, 1), 0, max_degree=3)

    def test_dict_round_trip(self, general_spec):
        data = general_spec.to_dict()
        assert data["beta"] == ["2", "1/2"]
        assert CocycleSpec.from_dict(data) == general_spec

    def test_canonical_constructor(self):
        spec = make_canonical(Fraction(5, 2), extra_beta={1: "3/10"}, extra_gamma={2: "1/5"}, max_degree=N)
        assert spec.mass == Fraction(5, 2)
        assert spec.is_canonical
        assert spec.b(1) == Fraction(3, 10)
        assert spec.g(2) == Fraction(1, 5)
        assert spec.b(N + 3) == 0


class TestFunctionals:
    """Test B and C on explicit translations"""

    def test_eval_on_quadratic(self, general_spec):
        """a = t²: B = 2t² + ½·2t, C = ⅓t² + 2t + ¼·2"""
        a = x_poly(0, 0, 1)
        assert eval_B(general_spec, a).x == TimePoly.from_power_coeffs([0, 1, 2], N)
        assert eval_C(general_spec, a).x == TimePoly.from_power_coeffs([Fraction(1, 2), 2, Fraction(1, 3)], N)

    def test_constraints_hold(self, rng, general_spec):
        samples = [
            (random_vec3(rng, 3, N), random_vec3(rng, 3, N), random_scalar(rng))
            for _ in range(20)
        ]
        report = check_BC_constraints(general_spec, samples)
        assert report.passed
        assert report.samples == 20

    def test_nonlinear_B_breaks_additivity(self, canonical_spec):
        samples = [(x_poly(1, 1), x_poly(2), Fraction(1))]
        report = check_BC_constraints(canonical_spec, samples, B=nonlinear_B)
        assert not report.passed
        assert any(v["identity"] == "additive_B" for v in report.violations)


class TestOmega:
    """Test the two-cocycle ω"""

    @pytest.mark.parametrize("spec_name", ["canonical_spec", "general_spec"])
    def test_cocycle_condition(self, request, rng, spec_name):
        spec = request.getfixturevalue(spec_name)
        triples = [random_tuple(rng, 3, max_degree=N) for _ in range(20)]
        assert two_cocycle_report(omega_cochain(spec), triples).passed

    def test_random_specs_are_cocycles(self, rng):
        for _ in range(3):
            spec = random_spec(rng, N, order=4)
            triples = [random_tuple(rng, 3, degree=2, max_degree=N) for _ in range(5)]
            assert two_cocycle_report(omega_cochain(spec), triples).passed

    def test_corrupted_omega_fails(self, canonical_spec):
        """The extra a₂(0)·a₁(0)·t term leaves a defect of 1 once b₁ = 1"""
        g = GroupElement.create(x_poly(1), 0, max_degree=N)
        g1 = GroupElement.create(x_poly(1), 1, max_degree=N)
        report = two_cocycle_report(corrupted_omega(canonical_spec), [(g, g, g1)])
        assert report.max_deviation == 1
        assert not report.passed
        assert report.violations[0]["tuple"][0]["a"][0] == ["1"]

    def test_special_form_matches(self, rng):
        spec = make_canonical(3, max_degree=N)
        for g2, g1 in (random_tuple(rng, 2, max_degree=N) for _ in range(10)):
            assert omega(spec, g2, g1) == omega_special(3, g2, g1)

    def test_antisymmetric_on_translations(self, general_spec):
        g2 = GroupElement.create(x_poly(1, 2), 0, max_degree=N)
        g1 = GroupElement.create(x_poly(0, 0, 3), 0, max_degree=N)
        assert omega(general_spec, g2, g1) == -omega(general_spec, g1, g2)


class TestGalileiReduction:
    """Test restriction to Galilei elements"""

    def test_hand_value(self, canonical_spec):
        """a2 = 1, v1 = 1, b1 = 0: ½m(a₂v₁) = ½"""
        g2 = GroupElement.galilei((1, 0, 0), (0, 0, 0), 0, max_degree=N)
        g1 = GroupElement.galilei((0, 0, 0), (1, 0, 0), 0, max_degree=N)
        assert omega(canonical_spec, g2, g1) == Fraction(1, 2)
        assert galilei_expected(Fraction(1), g2, g1) == Fraction(1, 2)

    @pytest.mark.parametrize("spec_name", ["canonical_spec", "general_spec"])
    def test_reduction(self, request, rng, spec_name):
        spec = request.getfixturevalue(spec_name)
        pairs = [(random_galilei(rng, N), random_galilei(rng, N)) for _ in range(30)]
        assert galilei_reduction_check(spec, pairs).passed
        assert reduced_independence_check(spec, pairs).passed

    def test_higher_coefficients_invisible(self, rng):
        base = make_canonical(2, max_degree=N)
        rich = make_canonical(2, extra_beta={1: "3/10", 3: -1}, extra_gamma={2: "1/5"}, max_degree=N)
        for _ in range(10):
            g2, g1 = random_galilei(rng, N), random_galilei(rng, N)
            assert omega(base, g2, g1) == omega(rich.truncated(2), g2, g1)
            assert galilei_expected(Fraction(2), g2, g1) == omega(rich, g2, g1)

    def test_massless_rejected(self, rng, massless_spec):
        pairs = [(random_galilei(rng, N), random_galilei(rng, N))]
        with pytest.raises(NotEmbeddableError):
            galilei_reduction_check(massless_spec, pairs)

    def test_non_galilei_rejected(self, canonical_spec):
        g = GroupElement.create(x_poly(0, 0, 1), 0, max_degree=N)
        with pytest.raises(ValueError):
            galilei_reduction_check(canonical_spec, [(g, g)])


class TestSolveAq:
    """Test the inverse of C"""

    def test_canonical_integrates(self, canonical_spec):
        """C(a) = ȧ, so a_q for q = 1 + t is t + t²/2"""
        a = solve_aq_component(canonical_spec, TimePoly.from_power_coeffs([1, 1], N))
        assert a == TimePoly.from_power_coeffs([0, 1, Fraction(1, 2)], N)

    def test_inverts_C(self, general_spec):
        q = x_poly(Fraction(1, 2), -1, 2)
        assert eval_C(general_spec, solve_aq(general_spec, q)) == q

    def test_singular(self):
        spec = CocycleSpec((1,), (0, 0), 0, N)
        with pytest.raises(SingularSystemError):
            lowest_gamma_index(spec)

    def test_budget(self, canonical_spec):
        with pytest.raises(DegreeBudgetError):
            solve_aq_component(canonical_spec, TimePoly.taylor_basis(N, N))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
