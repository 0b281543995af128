"""
Command-line driver for the verification suites and simulations
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from tqdm import tqdm

from galine.classical import FreeParticle, bracket_comparison, integrate_hamilton, is_standard_frame, standard_frame_error
from galine.cocycle import (
    CocycleSpec,
    check_BC_constraints,
    corrupted_omega,
    galilei_reduction_check,
    lowest_gamma_index,
    omega_cochain,
    reduced_independence_check,
)
from galine.cohomology import (
    CheckReport,
    check_dd_zero,
    commuting_pair_obstruction,
    random_cochain,
    two_cocycle_report,
)
from galine.config import get_config, reset_config
from galine.errors import GalineError, ScenarioError
from galine.group import GroupElement, factorize
from galine.qdyn import ParameterSweep, generator_check, numeric_composition_defect
from galine.qrep import (
    CanonicalOperator,
    ComplexPoly,
    boost,
    commutator,
    composition_defect,
    ehrenfest_rhs,
    format_operator,
    gauge_composition_defect,
    hamiltonian,
    hamiltonian_report,
    momentum,
    operator_to_dict,
    position,
)
from galine.sampling import DEFAULT_B_POOL, make_rng, random_element, random_galilei, random_scalar, random_tuple, random_vec3
from galine.scenario import SUITES, RunConfig, ScenarioModel, load_scenario, mass_variant
from galine.timealg import TimePoly, format_scalar, parse_scalar
from galine.utils import load_json, save_csv, save_json, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

SMALL_POOL = (Fraction(-1, 2), Fraction(0), Fraction(1, 2))


class GalinePipeline:
    """Runs suites and simulations for one RunConfig"""

    def __init__(self, run: RunConfig):
        self.run = run
        self.config = get_config(str(run.config))

        setup_logging(
            level=self.config.get("logging.level", "INFO"),
            log_file=self.config.get("logging.file"),
        )

        logger.info("=" * 80)
        logger.info("Galine Verification Engine Initialized")
        logger.info("=" * 80)

        self.scenario: Optional[ScenarioModel] = None
        if run.scenario is not None:
            self.scenario = load_scenario(run.scenario)
            logger.info(f"Scenario: {self.scenario.name} ({run.scenario})")
        self.out = Path(run.out)
        self.rng = make_rng(run.seed)

    # -- helpers ------------------------------------------------------

    def _require_scenario(self) -> ScenarioModel:
        if self.scenario is None:
            raise ScenarioError("This command needs --scenario")
        return self.scenario

    def _samples(self, key: str, default: int) -> int:
        return int(self.config.get(f"sampling.{key}", default))

    def _tolerance(self, key: str, default: float) -> float:
        if self.run.tol is not None:
            return self.run.tol
        return float(self.config.get(f"tolerances.{key}", default))

    def _spec(self) -> CocycleSpec:
        return self._require_scenario().cocycle_spec()

    def _write(self, name: str, report: Dict[str, Any]) -> Path:
        path = self.out / name
        save_json(report, str(path))
        logger.info(f"Report written to {path}")
        return path

    # -- suites -------------------------------------------------------

    def _suite_dd_zero(self, spec: CocycleSpec) -> List[CheckReport]:
        N = spec.max_degree
        count = self._samples("cochain_samples", 50)
        reports = []
        for arity in range(3):
            alpha = random_cochain(arity, self.rng, N)
            tuples = [random_tuple(self.rng, arity + 2, max_degree=N) for _ in range(count)]
            reports.append(check_dd_zero(alpha, tuples, seed=self.run.seed))
        return reports

    def _suite_cocycle(self, spec: CocycleSpec) -> List[CheckReport]:
        N = spec.max_degree
        count = self._samples("cocycle_triples", 50)
        omega = corrupted_omega(spec) if self.run.negative_control else omega_cochain(spec)
        triples = [tuple(random_tuple(self.rng, 3, max_degree=N)) for _ in range(count)]
        samples = [
            (random_vec3(self.rng, 3, N), random_vec3(self.rng, 3, N), random_scalar(self.rng, DEFAULT_B_POOL))
            for _ in range(count)
        ]
        return [
            two_cocycle_report(omega, triples, seed=self.run.seed),
            check_BC_constraints(spec, samples, seed=self.run.seed),
        ]

    def _suite_reduction(self, spec: CocycleSpec) -> List[CheckReport]:
        N = spec.max_degree
        count = self._samples("reduction_pairs", 100)
        pairs = [(random_galilei(self.rng, N), random_galilei(self.rng, N)) for _ in range(count)]
        return [
            galilei_reduction_check(spec, pairs, seed=self.run.seed),
            reduced_independence_check(spec, pairs, seed=self.run.seed),
        ]

    def _suite_composition(self, spec: CocycleSpec) -> List[CheckReport]:
        N = spec.max_degree
        count = self._samples("composition_draws", 100)
        report = CheckReport(check="composition_defect", samples=0, seed=self.run.seed)
        for _ in range(count):
            g2, g1 = random_tuple(self.rng, 2, max_degree=N)
            q = random_vec3(self.rng, int(self.rng.integers(N + 1)), N)
            report.samples += 1
            value = composition_defect(spec, g2, g1, q)
            report.record(value, {"g2": g2.to_dict(), "g1": g1.to_dict(), "q": q.to_list(), "deviation": value.to_list()})
        if not any(c != 0 for c in spec.gamma):
            logger.info("All γₙ vanish; skipping the full-phase composition check")
            return [report]

        # ξ needs a_q, so labels and translations stay below N − k₀
        degree = N - lowest_gamma_index(spec)
        gauge = CheckReport(check="gauge_composition_defect", samples=0, seed=self.run.seed)
        for _ in range(count):
            s2, s1 = (factorize(g)[0] for g in random_tuple(self.rng, 2, degree=degree, max_degree=N))
            q = random_vec3(self.rng, int(self.rng.integers(degree + 1)), N)
            gauge.samples += 1
            value = gauge_composition_defect(spec, s2, s1, q)
            gauge.record(value, {"g2": s2.to_dict(), "g1": s1.to_dict(), "q": q.to_list(), "deviation": value.to_list()})
        return [report, gauge]

    def _suite_commutators(self, spec: CocycleSpec) -> List[CheckReport]:
        m = spec.require_embeddable()
        N = spec.max_degree
        report = CheckReport(check="commutators", samples=0, seed=self.run.seed)
        i_m = CanonicalOperator.scalar(ComplexPoly.imag(TimePoly.constant(m, N)), N)
        i_one = CanonicalOperator.imaginary_unit(N)
        for i in range(3):
            for j in range(3):
                expected = i_m if i == j else CanonicalOperator.zero(N)
                for name, value, target in (
                    ("[K1,P]", commutator(boost(spec, 1, i), momentum(spec, j)), expected),
                    ("[X,P]", commutator(position(spec, i), momentum(spec, j)), i_one if i == j else CanonicalOperator.zero(N)),
                ):
                    report.samples += 1
                    if value != target:
                        report.violations.append({"commutator": name, "i": i, "j": j, "value": format_operator(value)})
        return [report]

    def _suite_numeric(self, spec: CocycleSpec) -> List[CheckReport]:
        scenario = self._require_scenario()
        spec.require_embeddable()
        N = spec.max_degree
        frame = scenario.frame_scenario(spec)
        state = scenario.initial_packet()
        count = self._samples("numeric_pairs", 5)

        composition = CheckReport(check="numeric_composition", samples=0, seed=self.run.seed)
        tol = self._tolerance("numeric_composition", 1e-8)
        for _ in range(count):
            g2, g1 = (
                GroupElement.galilei(
                    (random_scalar(self.rng, SMALL_POOL), 0, 0),
                    (random_scalar(self.rng, SMALL_POOL), 0, 0),
                    random_scalar(self.rng, SMALL_POOL),
                    max_degree=N,
                )
                for _ in range(2)
            )
            composition.samples += 1
            defect = numeric_composition_defect(frame, g2, g1, state)
            composition.max_deviation = max(composition.max_deviation, defect)
            if defect > tol:
                composition.violations.append({"g2": g2.to_dict(), "g1": g1.to_dict(), "defect": defect})

        generators = CheckReport(check="generators", samples=0, seed=self.run.seed)
        epsilon = float(self.config.get("tolerances.generator_epsilon", 1e-4))
        low = float(self.config.get("tolerances.richardson_low", 3.2))
        high = float(self.config.get("tolerances.richardson_high", 4.8))
        limit = self._tolerance("generator_defect", 1e-4)
        inertial = replace(frame, frame_accel=Fraction(0))
        for which in ("P", "K(1)", "H"):
            gen = generator_check(inertial, which, state, epsilon)
            generators.samples += 1
            generators.max_deviation = max(generators.max_deviation, gen.defect)
            if not gen.converges(low, high) or gen.defect > limit:
                generators.violations.append(gen.to_dict())
        return [composition, generators]

    SUITE_RUNNERS: Dict[str, Callable] = {
        "dd_zero": _suite_dd_zero,
        "cocycle": _suite_cocycle,
        "reduction": _suite_reduction,
        "composition": _suite_composition,
        "commutators": _suite_commutators,
        "numeric": _suite_numeric,
    }

    # -- commands -----------------------------------------------------

    def verify(self) -> int:
        spec = self._spec()
        results: Dict[str, Any] = {}
        passed = True
        for suite in tqdm(self.run.suites, desc="Suites"):
            logger.info(f"Suite: {suite}")
            reports = self.SUITE_RUNNERS[suite](self, spec)
            suite_passed = all(r.passed for r in reports)
            passed = passed and suite_passed
            results[suite] = {"passed": suite_passed, "checks": [r.to_dict() for r in reports]}
        report = {
            "command": "verify",
            "scenario": self.scenario.name,
            "seed": self.run.seed,
            "negative_control": self.run.negative_control,
            "spec": spec.to_dict(),
            "suites": results,
            "passed": passed,
        }
        self._write(f"verify_{self.scenario.name}.json", report)
        self._print_verdict("verify", passed)
        return EXIT_OK if passed else EXIT_FAIL

    def cocycle_check(self) -> int:
        spec = self._spec()
        reports = self._suite_cocycle(spec)
        if spec.is_embeddable:
            reports += self._suite_reduction(spec)
        N = spec.max_degree
        still = (Fraction(0),)
        pairs = [
            (random_element(self.rng, max_degree=N, b_pool=still), random_element(self.rng, max_degree=N, b_pool=still))
            for _ in range(self._samples("cocycle_triples", 50))
        ]
        witness = commuting_pair_obstruction(omega_cochain(spec), pairs)
        passed = spec.is_embeddable and all(r.passed for r in reports)
        if not spec.is_embeddable:
            logger.warning(f"Cocycle is not Galilei-embeddable: m = {format_scalar(spec.mass)}")
        report = {
            "command": "cocycle-check",
            "seed": self.run.seed,
            "spec": spec.to_dict(),
            "mass": format_scalar(spec.mass),
            "embeddable": spec.is_embeddable,
            "checks": [r.to_dict() for r in reports],
            "nontrivial_witness": witness,
            "passed": passed,
        }
        self._write(f"cocycle_{self._require_scenario().name}.json", report)
        self._print_verdict("cocycle-check", passed)
        return EXIT_OK if passed else EXIT_FAIL

    def commutators(self) -> int:
        scenario = self._require_scenario()
        spec = self._spec()
        frame = scenario.frame_scenario(spec)
        H = hamiltonian(spec, frame.q_flow, axes=(0,))
        X, P = position(spec, 0), momentum(spec, 0)
        velocity = ehrenfest_rhs(H, X)
        operators = {
            "[K1,P]": commutator(boost(spec, 1), P),
            "[X,P]": commutator(X, P),
            "H": H,
            "dP/db": ehrenfest_rhs(H, P),
            "dX/db": velocity,
            "d2X/db2": ehrenfest_rhs(H, velocity),
        }
        for name, op in operators.items():
            print(f"  {name} = {format_operator(op)}")
        brackets = bracket_comparison(spec)
        print(f"  {{A1, A0}} = {brackets['classical']} (quantum {brackets['quantum']})")
        acceleration = operators["d2X/db2"]
        expected = CanonicalOperator.scalar(-frame.q_flow.x.derivative(), spec.max_degree)
        report = {
            "command": "commutators",
            "operators": {name: operator_to_dict(op) for name, op in operators.items()},
            "bracket": brackets,
            "hamiltonian": hamiltonian_report(spec, frame.q_flow),
            "acceleration_matches_frame": acceleration == expected,
            "passed": bool(brackets["match"]) and acceleration == expected,
        }
        self._write("commutators_report.json", report)
        self._print_verdict("commutators", report["passed"])
        return EXIT_OK if report["passed"] else EXIT_FAIL

    def _evolve_variants(self, scenario: ScenarioModel) -> Dict[str, Any]:
        spec = scenario.cocycle_spec()
        variants = {"reference": scenario.frame_scenario(spec, "reference")}
        if self.run.sweep:
            for variant in scenario.sweep:
                variants[variant.name] = scenario.frame_scenario(variant.spec.to_spec(), variant.name)
            if spec.is_canonical:
                for mass in scenario.classical.masses:
                    key = f"mass_{mass:g}"
                    variants[key] = scenario.frame_scenario(mass_variant(spec, mass), key)
        return variants

    def evolve(self) -> int:
        scenario = self._require_scenario()
        tol = self._tolerance("accel", 1e-3)
        sweep = ParameterSweep(
            scenario.initial_packet(),
            workers=int(self.config.get("sweep.workers", 1)),
            sample_every=scenario.integrator.sample_every,
            norm_tolerance=float(self.config.get("integrator.norm_tolerance", 1e-8)),
            max_halvings=int(self.config.get("integrator.max_halvings", 4)),
        )
        for key, frame in self._evolve_variants(scenario).items():
            sweep.add(key, frame)
        results = sweep.run()

        expected = float(scenario.uniform_accel(scenario.spec.N))
        summaries = {}
        for key, result in results.items():
            save_csv(result.to_frame(), str(self.out / f"evolve_{scenario.name}_{key}.csv"))
            summary = result.summary()
            summary["expected_acceleration"] = expected
            summary["acceleration_ok"] = abs(summary["mean_acceleration"] - expected) <= tol
            summaries[key] = summary
        comparison = ParameterSweep.compare(results, "reference")
        ep_ok = all(v["max_acceleration_diff"] <= tol for v in comparison["variants"].values())
        passed = all(s["acceleration_ok"] for s in summaries.values()) and ep_ok
        report = {
            "command": "evolve",
            "scenario": scenario.name,
            "tolerance": tol,
            "runs": summaries,
            "comparison": comparison,
            "ep_expectation_match": ep_ok,
            "passed": passed,
        }
        self._write(f"evolve_{scenario.name}_summary.json", report)
        self._print_verdict("evolve", passed)
        return EXIT_OK if passed else EXIT_FAIL

    def classical(self) -> int:
        scenario = self._require_scenario()
        spec = scenario.cocycle_spec()
        tol = self._tolerance("classical_accel", 1e-9)
        specs: List[Tuple[str, CocycleSpec]] = [("reference", spec)]
        if self.run.sweep:
            specs += [(v.name, v.spec.to_spec()) for v in scenario.sweep]
        runs, trajectories = {}, {}
        for name, variant in specs:
            gs = scenario.generating_spec(variant)
            for mass in scenario.classical.masses:
                key = f"{name}_m{mass:g}"
                traj = integrate_hamilton(
                    gs,
                    scenario.classical_start(gs, mass),
                    scenario.classical.horizon,
                    scenario.classical.dt,
                    base=FreeParticle(mass),
                    energy_tolerance=float(self.config.get("classical.energy_tolerance", 1e-8)),
                )
                save_csv(traj.to_frame(), str(self.out / f"classical_{scenario.name}_{key}.csv"))
                error = traj.max_acceleration_error()
                runs[key] = {
                    "max_acceleration_error": error,
                    "energy_residual": traj.energy_residual,
                    "acceleration_ok": error <= tol,
                }
                if is_standard_frame(variant):
                    recovery = standard_frame_error(gs, traj)
                    runs[key]["standard_frame_error"] = recovery
                    runs[key]["acceleration_ok"] = runs[key]["acceleration_ok"] and recovery <= tol
                trajectories.setdefault(name, []).append(traj.x)
        spread = {
            name: float(max(np.max(np.abs(x - xs[0])) for x in xs)) for name, xs in trajectories.items()
        }
        mass_ok = all(v <= tol for v in spread.values())
        passed = all(r["acceleration_ok"] for r in runs.values()) and mass_ok
        report = {
            "command": "classical",
            "scenario": scenario.name,
            "tolerance": tol,
            "runs": runs,
            "mass_spread": spread,
            "mass_independent": mass_ok,
            "passed": passed,
        }
        self._write(f"classical_{scenario.name}_summary.json", report)
        self._print_verdict("classical", passed)
        return EXIT_OK if passed else EXIT_FAIL

    def report(self) -> int:
        merged = {}
        for path in sorted(self.out.glob("*.json")):
            if path.name == "summary.json":
                continue
            merged[path.name] = load_json(str(path))
        verdicts = {name: bool(data.get("passed", False)) for name, data in merged.items()}
        passed = bool(verdicts) and all(verdicts.values())
        self._write("summary.json", {"reports": verdicts, "passed": passed})
        print(f"\n📊 Reports in {self.out}:")
        for name, ok in verdicts.items():
            print(f"  {'✓' if ok else '✗'} {name}")
        self._print_verdict("report", passed)
        return EXIT_OK if passed else EXIT_FAIL

    @staticmethod
    def _print_verdict(command: str, passed: bool) -> None:
        print(f"\n{'✅' if passed else '❌'} {command}: {'PASS' if passed else 'FAIL'}")


COMMANDS = {
    "verify": GalinePipeline.verify,
    "evolve": GalinePipeline.evolve,
    "classical": GalinePipeline.classical,
    "cocycle-check": GalinePipeline.cocycle_check,
    "commutators": GalinePipeline.commutators,
    "report": GalinePipeline.report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="Scenario JSON path")
    common.add_argument("--seed", type=int, default=0, help="Random seed (u64)")
    common.add_argument("--out", default="outputs", help="Output directory")
    common.add_argument("--tol", type=float, help="Tolerance override")
    common.add_argument("--suite", help="Comma-separated suites: " + ",".join(SUITES))
    common.add_argument("--negative-control", action="store_true", help="Corrupt ω to exercise failure reporting")
    common.add_argument("--sweep", action="store_true", help="Run the scenario's variant and mass sweep")
    common.add_argument("--config", default="config.yaml", help="Config file path")

    parser = argparse.ArgumentParser(prog="galine", description="Galilean line group cocycle verification engine")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    data: Dict[str, Any] = {
        "scenario": args.scenario,
        "seed": args.seed,
        "out": args.out,
        "tol": args.tol,
        "negative_control": args.negative_control,
        "sweep": args.sweep,
        "config": args.config,
    }
    if args.suite:
        data["suites"] = [s.strip() for s in args.suite.split(",") if s.strip()]
    return RunConfig.model_validate(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns 0 on pass, 1 on failure, 2 on usage errors"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    reset_config()
    try:
        run = _run_config(args)
        pipeline = GalinePipeline(run)
    except (ValidationError, ScenarioError, json.JSONDecodeError, FileNotFoundError) as exc:
        logging.getLogger(__name__).error(f"Configuration error: {exc}")
        print(f"❌ Configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](pipeline)
    except ScenarioError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_USAGE
    except GalineError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
