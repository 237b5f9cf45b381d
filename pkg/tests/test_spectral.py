"""
Tests for the finite-difference operator, the complex QL eigensolver,
shooting refinement, spectrum comparison and the consistency checks.
"""
import math
import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from catalog import example, seed_potential
from classifier import SpectrumPrediction
from core.closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from core.grid import BoundaryProblem, Grid, GridFunction, zero_potential
from darboux import TransformationSpec, second_order_potential
from errors import GridMismatch, ResampleError
from spectral import (
    TridiagonalOperator,
    characteristic_roots,
    compare_spectra,
    compute_spectrum,
    discretize,
    eig_complex_tridiagonal,
    intertwining_residual,
    l2_tail_check,
    refine_eigenvalue,
    seed_levels,
    shoot_mismatch,
    stable_levels,
)


def levels(*values):
    return [complex(v) for v in values]


def nearest_distance(a, b):
    return max(min(abs(x - y) for y in b) for x in a)


def sech_well(problem):
    """V = -2 sech^2 x at spacing 0.05; one bound state at E = -1"""
    grid = problem.grid(int(round(20 * (problem.b - problem.a))) + 1)
    s = 1 / np.cosh(grid.x)
    return GridFunction(grid, -2 * s * s, 4 * s * s * np.tanh(grid.x), exact=True)


class TestDiscretize(unittest.TestCase):

    def test_free_operator(self):
        problem = BoundaryProblem.finite(0.0, math.pi)
        T = discretize(zero_potential(problem.grid(101)), problem, 99)
        h = math.pi / 100
        self.assertAlmostEqual(T.h, h, places=15)
        np.testing.assert_allclose(T.diag, 2 / h ** 2)
        np.testing.assert_allclose(T.off, -1 / h ** 2)
        self.assertAlmostEqual(T.x[0], h, places=15)

    def test_resampled_window(self):
        problem = BoundaryProblem.finite(-1.0, 1.0)
        grid = Grid(-1.0, 1.0, 201)
        V = GridFunction(grid, grid.x ** 2, 2 * grid.x, exact=True)
        T = discretize(V, problem, 150)
        np.testing.assert_allclose(T.diag - 2 / T.h ** 2, T.x ** 2, atol=1e-9)

    def test_too_few_nodes(self):
        problem = BoundaryProblem.finite(0.0, 1.0)
        with self.assertRaises(ValueError):
            discretize(zero_potential(problem.grid(11)), problem, 9)

    def test_window_outside_grid(self):
        V = zero_potential(Grid(0.0, 1.0, 101))
        with self.assertRaises(ResampleError):
            discretize(V, BoundaryProblem.finite(-1.0, 1.0), 50)

    def test_singular_nodes(self):
        grid = Grid(-math.pi, math.pi, 101)
        values = np.zeros(grid.n, dtype=complex)
        values[50] = np.nan
        V = GridFunction(grid, values, np.zeros(grid.n))
        problem = BoundaryProblem.finite(-math.pi, math.pi)
        with self.assertRaises(ResampleError):
            discretize(V, problem, 99)
        with self.assertRaises(ResampleError):
            discretize(V, problem, 60)

    def test_operator_shape(self):
        T = TridiagonalOperator(diag=np.ones(4), off=-1.0)
        self.assertEqual(T.off.shape, (3,))
        with self.assertRaises(ValueError):
            TridiagonalOperator(diag=np.ones(4), off=np.ones(4))


class TestEigensolver(unittest.TestCase):
    """Complex QL iteration against closed forms and independent solvers."""

    def test_diagonal(self):
        T = TridiagonalOperator(diag=[3.0, 1 + 1j, 2.0], off=np.zeros(2))
        np.testing.assert_array_equal(eig_complex_tridiagonal(T), [1 + 1j, 2.0, 3.0])

    def test_two_by_two(self):
        a, b, c = 1 + 1j, 2.0 + 0j, 0.5j
        T = TridiagonalOperator(diag=[a, b], off=[c])
        root = np.sqrt(((a - b) / 2) ** 2 + c * c)
        expected = sorted([(a + b) / 2 + root, (a + b) / 2 - root], key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(eig_complex_tridiagonal(T), expected, atol=1e-12)

    def test_random_matrices(self):
        rng = np.random.default_rng(5)
        for n in range(2, 13):
            diag = rng.normal(size=n) + 1j * rng.normal(size=n)
            off = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
            T = TridiagonalOperator(diag=diag, off=off)
            found = eig_complex_tridiagonal(T)
            reference = np.linalg.eigvals(T.dense())
            scale = 1 + np.max(np.abs(reference))
            with self.subTest(n=n):
                self.assertEqual(found.size, n)
                self.assertLessEqual(nearest_distance(found, reference), 1e-8 * scale)
                if n <= 8:
                    self.assertLessEqual(nearest_distance(found, characteristic_roots(T)), 1e-8 * scale)

    def test_free_box_levels(self):
        problem = BoundaryProblem.finite(-math.pi, math.pi)
        T = discretize(zero_potential(problem.grid(1001)), problem, 400)
        low = eig_complex_tridiagonal(T)[:4]
        np.testing.assert_allclose(low.real, [0.25, 1.0, 2.25, 4.0], atol=1e-3)
        self.assertLessEqual(np.max(np.abs(low.imag)), 1e-12)

    def test_second_order_convergence(self):
        problem = BoundaryProblem.finite(0.0, math.pi)
        V = zero_potential(problem.grid(1001))
        coarse = eig_complex_tridiagonal(discretize(V, problem, 100))[0].real
        fine = eig_complex_tridiagonal(discretize(V, problem, 201))[0].real
        ratio = (1.0 - coarse) / (1.0 - fine)
        self.assertGreater(ratio, 3.9)
        self.assertLess(ratio, 4.1)


class TestShooting(unittest.TestCase):

    def setUp(self):
        self.problem = BoundaryProblem.finite(0.0, math.pi)
        self.V = zero_potential(self.problem.grid(2001))

    def test_mismatch_at_eigenvalue(self):
        self.assertLess(abs(shoot_mismatch(self.V, 4.0, self.problem)), 1e-8)

    def test_mismatch_off_eigenvalue(self):
        # u = sin(sqrt(2) x)/sqrt(2) peaks inside the interval
        mismatch = shoot_mismatch(self.V, 2.0, self.problem)
        self.assertAlmostEqual(mismatch.real, math.sin(math.sqrt(2) * math.pi), delta=1e-4)
        self.assertLess(abs(mismatch.imag), 1e-12)

    def test_grid_must_span_problem(self):
        with self.assertRaises(GridMismatch):
            shoot_mismatch(self.V, 1.0, BoundaryProblem.finite(0.0, 2 * math.pi))

    def test_refine_ground_state(self):
        problem = BoundaryProblem.finite(0.0, 2 * math.pi)
        V = zero_potential(problem.grid(2001))
        level = refine_eigenvalue(V, 0.2499, problem)
        self.assertAlmostEqual(abs(level.energy - 0.25), 0.0, places=8)
        self.assertLess(abs(level.mismatch), 1e-6)
        self.assertGreaterEqual(level.iterations, 1)


class TestSpectrum(unittest.TestCase):

    def test_free_box(self):
        problem = BoundaryProblem.finite(0.0, math.pi)
        spectrum = compute_spectrum(zero_potential(problem.grid(2001)), problem, 3, 400)
        np.testing.assert_allclose(np.real(spectrum.eigenvalues), [1.0, 4.0, 9.0], atol=1e-6)
        self.assertTrue(all(spectrum.refined))
        self.assertTrue(all(r < 1e-6 for r in spectrum.residuals))
        self.assertEqual(len(spectrum.qr_values), 3)

    def test_all_levels_matched(self):
        prediction = SpectrumPrediction(base="box", base_levels=levels(1, 4, 9))
        report = compare_spectra([9.0003, 1.0001, 4.0002], prediction, 3, 1e-3)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.matched), 3)
        self.assertEqual(report.eigenvalues[0], 1.0001)

    def test_missing_level(self):
        prediction = SpectrumPrediction(base="box", base_levels=levels(1, 4, 9))
        report = compare_spectra([1.0, 9.0, 16.0], prediction, 3, 1e-3)
        self.assertFalse(report.passed)
        self.assertEqual(report.unmatched_expected, [4])
        self.assertEqual(report.unmatched_found, [16])

    def test_removed_and_added(self):
        prediction = SpectrumPrediction(base="box", base_levels=levels(0.25, 1, 2.25, 4),
                                        removed=levels(1), added=levels(1 / 9))
        report = compare_spectra([1 / 9, 0.25, 2.25], prediction, 3, 1e-3)
        self.assertTrue(report.passed)

    def test_embedded_levels_left_out(self):
        prediction = SpectrumPrediction(base="continuum", continuum_start=0.0, added=levels(1.0),
                                        embedded_flags=[(1 + 0j, True)])
        report = compare_spectra([0.3, 0.8, 1.0004], prediction, 3, 1e-3)
        self.assertTrue(report.passed)
        self.assertEqual(report.matched, [])
        self.assertTrue(report.notes)


class TestChecks(unittest.TestCase):

    def test_decaying_tail(self):
        problem = BoundaryProblem.half_line(15)
        grid = problem.grid(1501)
        phi = GridFunction(grid, np.exp(-grid.x), -np.exp(-grid.x))
        fit = l2_tail_check(phi, problem)
        self.assertTrue(fit)
        self.assertGreater(fit.exponent, 0.5)

    def test_oscillating_tail(self):
        problem = BoundaryProblem.half_line(100)
        grid = problem.grid(20001)
        phi = GridFunction(grid, np.sin(grid.x), np.cos(grid.x))
        fit = l2_tail_check(phi, problem)
        self.assertFalse(fit)
        self.assertFalse(fit.sublinear)

    def test_tail_needs_unbounded_problem(self):
        problem = BoundaryProblem.finite(0.0, 1.0)
        with self.assertRaises(ValueError):
            l2_tail_check(zero_potential(problem.grid(11)), problem)

    def test_intertwining_trivial_pair(self):
        grid = Grid(-2.0, 2.0, 1001)
        V0 = zero_potential(grid)
        spec = TransformationSpec.non_confluent(
            make_closed_form(ClosedForm(ClosedFormKind.EXP_A, 1.0), grid),
            make_closed_form(ClosedForm(ClosedFormKind.EXP_A, 2.0), grid),
        )
        result = second_order_potential(V0, spec)
        self.assertLessEqual(intertwining_residual(V0, result, [1.0, 2 + 0.5j]), 1e-8)

    def test_intertwining_example_one(self):
        run = example("1", n=8193)
        V0 = seed_potential(run.spec.grid)
        result = second_order_potential(V0, run.spec)
        self.assertLessEqual(intertwining_residual(V0, result, [0.7, 3 + 0.5j]), 1e-6)

    def test_stable_levels(self):
        problem = BoundaryProblem.whole_line(15)
        stability = stable_levels(sech_well, problem, 4, 1e-3, 600)
        self.assertTrue(any(abs(E + 1) <= 1e-3 for E in stability.stable))
        self.assertTrue(stability.unstable)
        self.assertEqual(stability.L, 15.0)

    def test_seed_levels(self):
        problem = BoundaryProblem.whole_line(15)
        seed = seed_levels(sech_well(problem), problem, 4, 600)
        self.assertEqual(len(seed.levels), 1)
        self.assertAlmostEqual(seed.levels[0].real, -1.0, places=3)
        self.assertEqual(seed.continuum_start, 0.0)


if __name__ == "__main__":
    unittest.main()
