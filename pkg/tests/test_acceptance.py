"""
End-to-end acceptance checks on the worked examples: closed forms, spectra,
embedded levels, zero-counting properties, intertwining, round trips, the
eigensolver oracle and the classifier regression.

These run at full resolution and take a while; run_tests.py --fast skips them.
"""
import math
import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from catalog import example, example_ids, seed_potential
from classifier import CaseLabel, classify, count_zeros, pt_check
from core.closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from core.grid import BoundaryProblem, Grid, GridFunction, zero_potential
from core.integrator import solve_ivp
from darboux import TransformationSpec, reverse_transform, second_order_map, second_order_potential
from errors import NoConvergence
from spectral import (
    TridiagonalOperator,
    characteristic_roots,
    compute_spectrum,
    discretize,
    eig_complex_tridiagonal,
    intertwining_residual,
    l2_tail_check,
    refine_eigenvalue,
    shoot_mismatch,
    stable_levels,
)


def partner(run):
    return second_order_potential(seed_potential(run.spec.grid), run.spec)


def clear_of(result, width=8):
    """Nodes more than width steps away from every zero of W, endpoints included"""
    W = result.W
    x, h = W.x, W.grid.h
    zeros = list(result.singular_x) + [x[i] for i in (0, -1) if abs(W.values[i]) <= 1e-12 * W.scale]
    kept = np.ones(x.size, dtype=bool)
    for s in zeros:
        kept &= np.abs(x - s) > width * h
    return kept


def fourier_potential(grid, c, d):
    x = grid.x
    j = np.arange(1, len(c) + 1)[:, None]
    values = (c[:, None] * np.cos(j * x) + d[:, None] * np.sin(j * x)).sum(axis=0)
    derivs = (j * (d[:, None] * np.cos(j * x) - c[:, None] * np.sin(j * x))).sum(axis=0)
    return GridFunction(grid, values, derivs, exact=True)


def random_fourier(grid, rng, terms=3):
    return fourier_potential(grid, rng.uniform(-1, 1, size=terms), rng.uniform(-1, 1, size=terms))


class TestClosedFormEquivalence(unittest.TestCase):

    def test_examples_with_exact_inputs(self):
        for case_id in ("1", "2", "3", "3b", "4", "5", "6", "7", "8"):
            run = example(case_id, n=None if case_id == "7" else 1025)
            with self.subTest(example=case_id):
                result = partner(run)
                engine, closed = result.V1.values, run.closed_form.values
                kept = np.isfinite(engine) & np.isfinite(closed) & clear_of(result)
                gap = np.abs(engine[kept] - closed[kept]) / (1 + np.abs(closed[kept]))
                self.assertLessEqual(gap.max(), 1e-8)

    def test_example_one_with_integrated_input(self):
        run = example("1", n=2049)
        grid = run.spec.grid
        u1 = solve_ivp(zero_potential(grid), 1.0, 0.0, 0.0, 1.0)
        spec = TransformationSpec.non_confluent(u1, run.spec.u2)
        engine = second_order_potential(zero_potential(grid), spec).V1.values
        closed = run.closed_form.values
        both = np.isfinite(engine) & np.isfinite(closed)
        gap = np.abs(engine[both] - closed[both]) / (1 + np.abs(closed[both]))
        self.assertLessEqual(gap.max(), 1e-6)

    def test_sinh_against_integrator(self):
        grid = Grid(-2.0, 2.0, 2001)
        a = 1 + 1j
        closed = make_closed_form(ClosedForm(ClosedFormKind.SINH_A, a), grid)
        integrated = solve_ivp(zero_potential(grid), -a * a, 0.0, 0.0, a)
        self.assertAlmostEqual(abs(closed.at(1.0) - np.sinh(a)), 0.0, places=14)
        self.assertLessEqual(abs(integrated.at(1.0) - closed.at(1.0)) / abs(closed.at(1.0)), 1e-8)

    def test_step_halving(self):
        rng = np.random.default_rng(3)
        coarse_grid, fine_grid = Grid(-2.0, 2.0, 1001), Grid(-2.0, 2.0, 2001)
        c, d = rng.uniform(-1, 1, size=3), rng.uniform(-1, 1, size=3)
        V_coarse, V_fine = fourier_potential(coarse_grid, c, d), fourier_potential(fine_grid, c, d)
        E = 2.0 + 0.7j
        coarse = solve_ivp(V_coarse, E, 0.0, 1.0, 0.3j)
        fine = solve_ivp(V_fine, E, 0.0, 1.0, 0.3j)
        gap = np.max(np.abs(coarse.values - fine.values[::2]))
        self.assertLessEqual(gap, 1e-7 * coarse.scale)


class TestSpectra(unittest.TestCase):

    def test_seed_box(self):
        problem = BoundaryProblem.finite(-math.pi, math.pi)
        T = discretize(zero_potential(problem.grid(2049)), problem, 2000)
        low = eig_complex_tridiagonal(T)[:4]
        np.testing.assert_allclose(low.real, [0.25, 1.0, 2.25, 4.0], atol=5e-4)
        self.assertLessEqual(np.max(np.abs(low.imag)), 1e-10)

    def test_example_one_spectrum(self):
        run = example("1", n=4001)
        spectrum = compute_spectrum(partner(run).V1, run.problem, 4, 4000)
        found = np.asarray(spectrum.eigenvalues)
        np.testing.assert_allclose(found.real, [1 / 9, 0.25, 2.25, 4.0], atol=1e-3)
        self.assertFalse(np.any(np.abs(found - 1.0) <= 1e-2))
        self.assertLessEqual(np.max(np.abs(found.imag)), 1e-6)

    def test_refine_added_level(self):
        run = example("1", n=2049)
        level = refine_eigenvalue(partner(run).V1, 0.11, run.problem)
        self.assertLessEqual(abs(level.energy - 1 / 9), 1e-8)

    def test_singular_origin_does_not_refine(self):
        run = example("4", n=2049)
        with self.assertRaises(NoConvergence):
            refine_eigenvalue(partner(run).V1, 1.0, run.problem)

    def test_example_two_isospectral(self):
        run = example("2", n=2049)
        V1 = partner(run).V1
        spectrum = compute_spectrum(V1, run.problem, 4, 2000)
        found = np.asarray(spectrum.eigenvalues)
        np.testing.assert_allclose(found.real, [0.25, 1.0, 2.25, 4.0], atol=1e-3)
        self.assertLessEqual(np.max(np.abs(found.imag)), 1e-6)
        self.assertLessEqual(pt_check(V1), 1e-10 * V1.scale)

    def test_example_eight_complex_levels(self):
        run = example("8")
        a1, a2 = run.params["a1"], run.params["a2"]
        h = run.spec.grid.h

        def build(problem):
            n = int(round((problem.b - problem.a) / h)) + 1
            other = example("8", params={**run.params, "L": problem.L}, n=n)
            return partner(other).V1

        stability = stable_levels(build, run.problem, 4, 1e-3, 2000)
        for target in (-a1 * a1, -a2 * a2):
            self.assertTrue(any(abs(E - target) <= 1e-4 for E in stability.stable), msg=f"{target}")


class TestEmbeddedLevel(unittest.TestCase):

    def test_example_seven(self):
        run = example("7")
        result = partner(run)
        spec = run.spec
        k0 = run.params["k0"].real
        psi = make_closed_form(ClosedForm(ClosedFormKind.COS_KC, k0), spec.grid)
        phi = second_order_map(psi, spec.alpha, spec, result.W)

        fit = l2_tail_check(phi, run.problem)
        self.assertTrue(fit)
        self.assertGreaterEqual(fit.exponent, 0.8)
        self.assertLessEqual(fit.exponent, 1.2)
        self.assertLessEqual(abs(shoot_mismatch(result.V1, k0 ** 2, run.problem)), 1e-6)


class TestZeroProperties(unittest.TestCase):

    def setUp(self):
        self.problem = BoundaryProblem.finite(0.0, 3.0)
        self.grid = self.problem.grid(1501)

    def test_complex_energy_at_most_one_zero(self):
        rng = np.random.default_rng(1)
        for trial in range(200):
            V0 = random_fourier(self.grid, rng)
            alpha = complex(rng.uniform(-2, 10), rng.choice([-1, 1]) * rng.uniform(0.2, 2))
            u = solve_ivp(V0, alpha, 0.0, 0.0, 1.0)
            self.assertLessEqual(count_zeros(u, self.problem).total, 1, msg=f"trial {trial}, alpha={alpha}")

    def test_real_energy_is_real_up_to_phase(self):
        rng = np.random.default_rng(2)
        for trial in range(200):
            V0 = random_fourier(self.grid, rng)
            alpha = rng.uniform(-2, 10)
            slope = complex(*rng.normal(size=2))
            u = solve_ivp(V0, alpha, 0.0, 0.0, slope).scaled(1 / slope)
            self.assertLessEqual(np.max(np.abs(u.values.imag)), 1e-8 * max(u.scale, 1.0), msg=f"trial {trial}")


class TestIntertwiningAndRoundTrip(unittest.TestCase):

    def test_intertwining(self):
        rng = np.random.default_rng(4)
        # the five-point residual falls as h^4; these grids keep it under 1e-6
        grids = {"1": 8193, "2": 8193, "7": 16385, "8": 16385}
        for case_id, n in grids.items():
            run = example(case_id, n=n)
            V0 = seed_potential(run.spec.grid)
            result = second_order_potential(V0, run.spec)
            energies = rng.uniform(-1, 3, size=10) + 1j * rng.uniform(-0.5, 0.5, size=10)
            with self.subTest(example=case_id):
                self.assertLessEqual(intertwining_residual(V0, result, energies), 1e-6)

    def test_round_trip(self):
        for case_id in ("1", "2", "8"):
            result = partner(example(case_id))
            with self.subTest(example=case_id):
                self.assertTrue(result.regular)
                recovered = reverse_transform(result)
                self.assertLessEqual(np.nanmax(np.abs(recovered.values)), 1e-6)


class TestEigensolverOracle(unittest.TestCase):

    def test_random_tridiagonals(self):
        rng = np.random.default_rng(10)
        for trial in range(100):
            n = int(rng.integers(2, 17))
            T = TridiagonalOperator(diag=rng.normal(size=n) + 1j * rng.normal(size=n),
                                    off=rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
            found = eig_complex_tridiagonal(T)
            roots = characteristic_roots(T)
            scale = 1 + np.max(np.abs(roots))
            gap = max(max(min(abs(x - y) for y in roots) for x in found),
                      max(min(abs(x - y) for y in found) for x in roots))
            self.assertLessEqual(gap, 1e-8 * scale, msg=f"trial {trial}, n={n}")


class TestClassifierRegression(unittest.TestCase):

    def test_fixture_verdicts(self):
        stated = {
            "1": (CaseLabel.FIN_C, True, True),
            "2": (CaseLabel.FIN_D, True, True),
            "3": (CaseLabel.FIN_CONFLUENT, True, True),
            "5": (CaseLabel.HL_B, True, True),
            "8": (CaseLabel.WL_NONCONFLUENT, True, False),
        }
        for case_id in example_ids():
            run = example(case_id)
            verdict = classify(run.spec, run.problem)
            with self.subTest(example=case_id):
                self.assertTrue(verdict.agrees_with(run.expected))
                if case_id in stated:
                    label, irreducible, real = stated[case_id]
                    self.assertEqual(verdict.case_label, label)
                    self.assertEqual(verdict.irreducible, irreducible)
                    self.assertEqual(verdict.real_spectrum, real)
                if case_id == "3":
                    self.assertTrue(verdict.prediction.isospectral)
                if case_id == "8":
                    self.assertEqual(len(verdict.prediction.complex_levels), 2)

    def test_whole_line_no_go(self):
        rng = np.random.default_rng(12)
        problem = BoundaryProblem.whole_line(15)
        grid = problem.grid(3001)
        options = (ClosedFormKind.SINH_A, ClosedFormKind.COSH_AC, ClosedFormKind.EXP_A)
        for trial in range(100):
            kinds = [options[i] for i in rng.integers(0, len(options), size=2)]
            params = [complex(rng.uniform(0.6, 1.5), rng.uniform(-0.5, 0.5)) * rng.choice([-1, 1])
                      for _ in range(2)]
            if abs(params[0] ** 2 - params[1] ** 2) < 1e-3:
                continue
            u1, u2 = (make_closed_form(ClosedForm(k, p, p * rng.uniform(-1, 1)), grid)
                      for k, p in zip(kinds, params))
            verdict = classify(TransformationSpec.non_confluent(u1, u2), problem)
            with self.subTest(trial=trial):
                self.assertEqual(verdict.case_label, CaseLabel.WL_NONCONFLUENT)
                self.assertFalse(verdict.irreducible and verdict.real_spectrum and verdict.complex_potential)
                if verdict.real_spectrum and verdict.complex_potential:
                    self.assertIn("WL: a complex V1 with a real spectrum always splits into two regular first-order steps",
                                  verdict.notes)


if __name__ == "__main__":
    unittest.main()
