"""
Tests for the Wronskian, first- and second-order transformations, the
confluent integral, the reverse transformation and the chain split.
"""
import math
import os
import sys
import unittest
from dataclasses import replace

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from catalog import example, seed_potential
from core.closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from core.grid import Grid, GridFunction, zero_potential
from core.integrator import schrodinger_residual
from darboux import (
    TransformationSpec,
    chain_split,
    confluent_wc,
    first_order_map,
    first_order_potential,
    reverse_transform,
    second_order_map,
    second_order_potential,
    wronskian2,
)
from errors import GridMismatch, KernelInput, TransformError


def form(grid, kind, param, shift=0j):
    return make_closed_form(ClosedForm(kind, param, shift), grid)


class TestWronskian(unittest.TestCase):
    """W(u, v) = u v' - u' v."""

    def setUp(self):
        self.grid = Grid(-math.pi, math.pi, 4001)

    def test_sine_cosine(self):
        s = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        c = form(self.grid, ClosedFormKind.COS_KC, 1.0)
        W = wronskian2(s, c)
        np.testing.assert_allclose(W.values, -1.0, atol=1e-14)
        np.testing.assert_allclose(W.derivs, 0.0, atol=1e-14)

    def test_antisymmetry(self):
        u = form(self.grid, ClosedFormKind.SINH_A, 1 + 0.3j)
        self.assertLess(np.max(np.abs(wronskian2(u, u).values)), 1e-12 * u.scale * np.max(np.abs(u.derivs)))

    def test_derivative_identity(self):
        u1 = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        u2 = form(self.grid, ClosedFormKind.COSH_AC, 0.5)
        W = wronskian2(u1, u2)
        np.testing.assert_allclose(W.derivs, 1.25 * u1.values * u2.values, rtol=1e-14)
        numeric = np.gradient(W.values, self.grid.h, edge_order=2)
        self.assertLess(np.max(np.abs(numeric - W.derivs)), 1e-5 * W.scale)

    def test_same_energy_is_constant(self):
        u = form(self.grid, ClosedFormKind.SIN_K, 2.0, 0.3j)
        v = form(self.grid, ClosedFormKind.COS_KC, 2.0, 0.1)
        W = wronskian2(u, v).values
        self.assertLess(np.std(W) / abs(np.mean(W)), 1e-8)

    def test_finite_difference_fallback(self):
        u = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        v = GridFunction(self.grid, np.cos(self.grid.x), -np.sin(self.grid.x))
        W = wronskian2(u, v)
        self.assertTrue(np.all(np.isfinite(W.derivs)))
        self.assertLess(np.max(np.abs(W.derivs)), 1e-6)

    def test_grid_mismatch(self):
        u = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        v = form(Grid(0.0, 1.0, 11), ClosedFormKind.SIN_K, 1.0)
        with self.assertRaises(GridMismatch):
            wronskian2(u, v)


class TestFirstOrder(unittest.TestCase):
    """Intermediate potential and first-order map."""

    def setUp(self):
        self.grid = Grid(-5.0, 5.0, 2001)
        self.V0 = zero_potential(self.grid)

    def test_exponential_keeps_zero(self):
        u1 = form(self.grid, ClosedFormKind.EXP_A, 2.0)
        V = first_order_potential(self.V0, u1)
        np.testing.assert_allclose(V.values, 0.0, atol=1e-10)
        self.assertIsNone(V.flags)

    def test_cosh_gives_sech_well(self):
        u1 = form(self.grid, ClosedFormKind.COSH_AC, 1.0)
        V = first_order_potential(self.V0, u1)
        self.assertAlmostEqual(V.at(0.0).real, -2.0, places=12)
        np.testing.assert_allclose(V.values, -2 / np.cosh(self.grid.x) ** 2, atol=1e-12)

    def test_node_is_flagged(self):
        u1 = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        V = first_order_potential(self.V0, u1)
        i = self.grid.index_of(0.0)
        self.assertTrue(V.flagged[i])
        self.assertTrue(np.isnan(V.values[i]))
        self.assertFalse(V.flagged[i + 50])

    def test_kernel(self):
        u1 = form(self.grid, ClosedFormKind.EXP_A, 0.5)
        mapped = first_order_map(u1, u1)
        self.assertLess(np.max(np.abs(mapped.values)), 1e-10 * u1.scale)

    def test_map_of_sine(self):
        u1 = form(self.grid, ClosedFormKind.EXP_A, 0.7)
        psi = form(self.grid, ClosedFormKind.SIN_K, 2.0)
        mapped = first_order_map(psi, u1)
        self.assertAlmostEqual(mapped.at(0.0).real, -2.0, places=12)
        np.testing.assert_allclose(mapped.values, -2 * np.cos(2 * self.grid.x) + 0.7 * np.sin(2 * self.grid.x),
                                   atol=1e-12)

    def test_map_solves_intermediate_equation(self):
        u1 = form(self.grid, ClosedFormKind.COSH_AC, 1.0)
        psi = form(self.grid, ClosedFormKind.SIN_K, 2.0)
        V = first_order_potential(self.V0, u1)
        mapped = first_order_map(psi, u1)
        self.assertLess(schrodinger_residual(mapped, V, 4.0), 1e-6)

    def test_needs_energy(self):
        u1 = GridFunction(self.grid, np.cosh(self.grid.x), np.sinh(self.grid.x))
        with self.assertRaises(TransformError):
            first_order_potential(self.V0, u1)


class TestSecondOrder(unittest.TestCase):
    """Partner potentials, maps, confluent integral and the reverse transformation."""

    def setUp(self):
        self.grid = Grid(-3.0, 3.0, 601)
        self.V0 = zero_potential(self.grid)

    def exponential_pair(self):
        u1 = form(self.grid, ClosedFormKind.EXP_A, 1.0)
        u2 = form(self.grid, ClosedFormKind.EXP_A, 2.0)
        return TransformationSpec.non_confluent(u1, u2)

    def test_exponential_pair_is_trivial(self):
        result = second_order_potential(self.V0, self.exponential_pair())
        self.assertTrue(result.regular)
        np.testing.assert_allclose(result.V1.values, 0.0, atol=1e-9)
        np.testing.assert_allclose(result.W.values, np.exp(3 * self.grid.x), rtol=1e-13)

    def test_spec_validation(self):
        u = form(self.grid, ClosedFormKind.SIN_K, 1.0)
        v = form(self.grid, ClosedFormKind.COS_KC, 1.0)
        with self.assertRaises(TransformError):
            TransformationSpec.non_confluent(u, v)
        with self.assertRaises(TransformError):
            TransformationSpec.non_confluent(u, form(self.grid, ClosedFormKind.EXP_A, 1.0), alpha1=2.0)
        with self.assertRaises(TransformError):
            TransformationSpec.confluent(u, 0.5j, x_anchor=0.001)

    def test_swapped(self):
        spec = self.exponential_pair()
        swapped = spec.swapped()
        self.assertEqual(swapped.alpha1, spec.alpha2)
        self.assertIs(swapped.u1, spec.u2)
        self.assertEqual(spec.to_dict()["mode"], "NonConfluent")

    def test_singular_wronskian(self):
        grid = Grid(-math.pi, math.pi, 1001)
        spec = TransformationSpec.non_confluent(form(grid, ClosedFormKind.SIN_K, 1.0),
                                                form(grid, ClosedFormKind.SIN_K, 2.0))
        result = second_order_potential(zero_potential(grid), spec)
        self.assertFalse(result.regular)
        self.assertEqual(len(result.singular_x), 1)
        self.assertAlmostEqual(result.singular_x[0], 0.0, places=9)
        with self.assertRaises(TransformError):
            reverse_transform(result)

    def test_confluent_integral(self):
        grid = Grid(-math.pi, math.pi, 2001)
        u = form(grid, ClosedFormKind.SIN_K, 1.0)
        W = confluent_wc(u, 0.3j, 0.0)
        x = grid.x
        np.testing.assert_allclose(W.values, 0.3j + x / 2 - np.sin(2 * x) / 4, atol=1e-9)
        self.assertAlmostEqual(abs(W.at(math.pi) - (0.3j + math.pi / 2)), 0.0, places=9)
        np.testing.assert_array_equal(W.derivs, u.values * u.values)

    def test_confluent_integral_error_is_smooth(self):
        # the partner map differentiates W_c twice on the grid
        grid = Grid(0.0, 20 * math.pi, 8193)
        u = form(grid, ClosedFormKind.SIN_K, 1.0)
        W = confluent_wc(u, 0.3j, 0.0)
        err = W.values - (0.3j + grid.x / 2 - np.sin(2 * grid.x) / 4)
        curvature = (err[:-2] - 2 * err[1:-1] + err[2:]) / grid.h ** 2
        self.assertLess(np.max(np.abs(curvature)), 1e-6)

    def test_confluent_integral_of_zero(self):
        u = GridFunction(self.grid, np.zeros(self.grid.n), np.zeros(self.grid.n), energy=1.0)
        W = confluent_wc(u, 0.5j, 0.0)
        np.testing.assert_array_equal(W.values, 0.5j)

    def test_confluent_rederivative(self):
        grid = Grid(-math.pi, math.pi, 4001)
        u = form(grid, ClosedFormKind.COS_KC, 1.5)
        W = confluent_wc(u, 0.5j, 0.0)
        numeric = np.gradient(W.values, grid.h, edge_order=2)
        self.assertLess(np.max(np.abs(numeric - W.derivs)[2:-2]), 1e-5)

    def test_kernel_input(self):
        run = example("1", n=1025)
        spec = run.spec
        result = second_order_potential(seed_potential(spec.grid), spec)
        with self.assertRaises(KernelInput) as ctx:
            second_order_map(spec.u1, spec.alpha1, spec, result.W)
        self.assertEqual(np.max(np.abs(ctx.exception.image.values)), 0.0)
        zero = second_order_map(spec.u2, spec.alpha2, spec, result.W, on_kernel="zero")
        self.assertEqual(zero.scale, 0.0)

    def test_kernel_energy_image(self):
        run = example("1", n=1025)
        spec = run.spec
        result = second_order_potential(seed_potential(spec.grid), spec)
        other = form(spec.grid, ClosedFormKind.COS_KC, 1.0)
        image = second_order_map(other, spec.alpha1, spec, result.W)
        quotient = spec.u2.values / result.W.values
        # image is u2/W up to a constant
        ratio = image.values[np.abs(quotient) > 1e-3] / quotient[np.abs(quotient) > 1e-3]
        self.assertLess(np.max(np.abs(ratio - ratio[0])), 1e-10 * abs(ratio[0]))

    def test_two_forms_agree(self):
        run = example("1", n=1025)
        spec = run.spec
        result = second_order_potential(seed_potential(spec.grid), spec)
        k = np.sqrt(2.0 + 0.5j)
        psi = form(spec.grid, ClosedFormKind.SIN_K, k, 0.3)
        first = second_order_map(psi, k * k, spec, result.W, form="first")
        second = second_order_map(psi, k * k, spec, result.W, form="second")
        self.assertLess(np.max(np.abs(first.values - second.values)), 1e-9 * first.scale)
        with self.assertRaises(ValueError):
            second_order_map(psi, k * k, spec, result.W, form="third")

    def test_map_solves_partner_equation(self):
        run = example("1", n=8193)
        spec = run.spec
        result = second_order_potential(seed_potential(spec.grid), spec)
        psi = form(spec.grid, ClosedFormKind.SIN_K, 0.5, math.pi / 2)
        phi = second_order_map(psi, 0.25, spec, result.W)
        self.assertLess(schrodinger_residual(phi.scaled(1 / phi.scale), result.V1, 0.25), 1e-6)

    def test_reverse_exponential_pair(self):
        result = second_order_potential(self.V0, self.exponential_pair())
        np.testing.assert_allclose(reverse_transform(result).values, 0.0, atol=1e-8)

    def test_reverse_example_one(self):
        run = example("1", n=1025)
        result = second_order_potential(seed_potential(run.spec.grid), run.spec)
        self.assertTrue(result.regular)
        recovered = reverse_transform(result)
        self.assertLess(np.max(np.abs(recovered.values)), 1e-6)

    def test_reverse_confluent(self):
        run = example("3", n=2049)
        result = second_order_potential(seed_potential(run.spec.grid), run.spec)
        recovered = reverse_transform(result)
        self.assertLess(np.max(np.abs(recovered.values)), 1e-6)

    def test_reverse_needs_nonzero_c(self):
        grid = Grid(-math.pi, math.pi, 1001)
        spec = TransformationSpec.confluent(form(grid, ClosedFormKind.COS_KC, 0.5), 0.0, 0.0)
        result = second_order_potential(zero_potential(grid), spec)
        # c = 0 puts a zero of W_c on the anchor; force the flag to reach the c check
        self.assertFalse(result.regular)
        with self.assertRaises(TransformError):
            reverse_transform(replace(result, regular=True))


class TestChainSplit(unittest.TestCase):
    """First-order splittings of a second-order transformation."""

    def test_example_one_does_not_split(self):
        run = example("1", n=2049)
        split = chain_split(seed_potential(run.spec.grid), run.spec, run.problem)
        self.assertFalse(split.splits)
        u1_first, u2_first = split.steps
        self.assertEqual(u1_first.order, "u1_first")
        self.assertFalse(u1_first.intermediate_regular)
        self.assertAlmostEqual(u1_first.singular_x[0], 0.0, places=9)
        self.assertTrue(u2_first.intermediate_regular)
        self.assertFalse(u2_first.dirichlet_kept)
        self.assertFalse(u2_first.intermediate_real)
        self.assertEqual(len(split.notes()), 2)

    def test_confluent_has_one_step(self):
        run = example("3", n=1025)
        split = chain_split(seed_potential(run.spec.grid), run.spec, run.problem)
        self.assertEqual([s.order for s in split.steps], ["u"])
        self.assertFalse(split.splits)
        self.assertIn("splits", split.to_dict())


if __name__ == "__main__":
    unittest.main()
