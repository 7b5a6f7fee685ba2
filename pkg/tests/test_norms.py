import sys
from pathlib import Path
import math
import os
import unittest
from concurrent.futures import ThreadPoolExecutor
from unittest import mock

import numpy as np
import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from riemannflat.core.errors import BudgetExceededError, InvalidArgumentError, TruncationError
from riemannflat.core.norms import (
    NormMethod,
    NormRequest,
    check_truncation,
    exact_grid_size,
    increment_split_l4,
    l2_squared_exact,
    l4_fourth,
    l4_fourth_exact,
    lp_power_grid,
    snap_to_grid,
    square_function_ratio,
    structure_function,
    structure_function_shifted,
    structure_table,
    validate_exponent,
)
from riemannflat.core.series_core import TrigPolynomial, gauss_sum_coefficients, riemann_coefficients


class TestExactNorms(unittest.TestCase):
    def test_l2_of_riemann_series(self):
        self.assertAlmostEqual(l2_squared_exact(riemann_coefficients(10 ** 6)), 1.0823232333783046, delta=1e-12)

    def test_l4_of_gauss_sums(self):
        for n_terms, expected in ((2, 6), (3, 15), (64, 12804), (128, 57436)):
            self.assertAlmostEqual(l4_fourth_exact(gauss_sum_coefficients(n_terms)), expected, delta=1e-9 * expected)

    def test_l4_dense_path_matches_grid(self):
        poly = riemann_coefficients(4096)
        exact = l4_fourth_exact(poly)
        self.assertAlmostEqual(exact, 1.339106442833, delta=1e-11)
        self.assertAlmostEqual(lp_power_grid(poly, 4), exact, delta=1e-12)

    def test_l4_sparse_path(self):
        poly = TrigPolynomial.from_mapping({1: 1.0, 5_000_000: 1.0})
        self.assertAlmostEqual(l4_fourth_exact(poly), 6.0, delta=1e-12)

    def test_pair_budget(self):
        with self.assertRaises(BudgetExceededError):
            l4_fourth_exact(gauss_sum_coefficients(5), pair_budget=10)
        self.assertAlmostEqual(l4_fourth_exact(gauss_sum_coefficients(4), pair_budget=10), 28.0, delta=1e-12)

    def test_empty_polynomial(self):
        empty = TrigPolynomial.empty()
        self.assertEqual(l2_squared_exact(empty), 0.0)
        self.assertEqual(l4_fourth_exact(empty), 0.0)
        self.assertEqual(l4_fourth(empty), 0.0)
        self.assertEqual(lp_power_grid(empty, 3), 0.0)


def random_polynomial(seed, size=150, top=3000):
    rng = np.random.default_rng(seed)
    freqs = np.sort(rng.choice(np.arange(-top, top + 1), size=size, replace=False))
    return TrigPolynomial(freqs, rng.standard_normal(size) + 1j * rng.standard_normal(size))


class TestNormInequalities(unittest.TestCase):
    def test_homogeneity(self):
        poly = riemann_coefficients(4096)
        l2, l4 = l2_squared_exact(poly), l4_fourth_exact(poly)
        for c in (2.0, -0.5, 3 - 4j):
            scaled = poly.scaled(c)
            self.assertAlmostEqual(l2_squared_exact(scaled) / l2, abs(c) ** 2, delta=1e-12 * abs(c) ** 2)
            self.assertAlmostEqual(l4_fourth_exact(scaled) / l4, abs(c) ** 4, delta=1e-12 * abs(c) ** 4)

    def test_fourth_power_dominates_squared_l2(self):
        polys = [riemann_coefficients(4096), gauss_sum_coefficients(50)]
        polys += [random_polynomial(seed) for seed in range(3)]
        for poly in polys:
            self.assertGreaterEqual(l4_fourth_exact(poly), l2_squared_exact(poly) ** 2)

    def test_triangle_inequality(self):
        for seed in range(4):
            f, g = random_polynomial(2 * seed), random_polynomial(2 * seed + 1)
            total = f + g
            self.assertLessEqual(
                l2_squared_exact(total) ** 0.5,
                l2_squared_exact(f) ** 0.5 + l2_squared_exact(g) ** 0.5 + 1e-12,
            )
            self.assertLessEqual(
                l4_fourth_exact(total) ** 0.25,
                l4_fourth_exact(f) ** 0.25 + l4_fourth_exact(g) ** 0.25 + 1e-12,
            )


class TestGridQuadrature(unittest.TestCase):
    def test_even_power_is_exact(self):
        self.assertAlmostEqual(lp_power_grid(gauss_sum_coefficients(16), 6), 55084.0, delta=1e-7)

    def test_exact_grid_size(self):
        self.assertEqual(exact_grid_size(gauss_sum_coefficients(16), 6), 1024)
        self.assertEqual(exact_grid_size(TrigPolynomial.from_mapping({1: 1.0}), 2), 4)
        with self.assertRaises(InvalidArgumentError):
            exact_grid_size(gauss_sum_coefficients(4), 3)

    def test_non_integer_exponent_between_neighbours(self):
        poly = gauss_sum_coefficients(3)
        value = lp_power_grid(poly, 3, grid_size=4096)
        lower = 3 ** 1.5
        upper = math.sqrt(3) * math.sqrt(l4_fourth_exact(poly))
        self.assertGreater(value, lower)
        self.assertLess(value, upper)

    def test_exponent_range(self):
        for p in (0.5, 12.5, -1):
            with self.assertRaises(InvalidArgumentError):
                validate_exponent(p)
        self.assertEqual(validate_exponent(12), 12.0)


class TestNormRequest(unittest.TestCase):
    def test_default_methods(self):
        self.assertIs(NormRequest.default_for(2).method, NormMethod.EXACT_PARSEVAL)
        self.assertIs(NormRequest.default_for(4).method, NormMethod.EXACT_CONVOLUTION)
        self.assertIs(NormRequest.default_for(3).method, NormMethod.GRID_QUADRATURE)

    def test_method_exponent_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            NormRequest(3, "parseval")
        with self.assertRaises(InvalidArgumentError):
            NormRequest(2, "convolution")
        with self.assertRaises(InvalidArgumentError):
            NormRequest(4, "convolution", grid_size=1024)

    def test_methods_agree(self):
        poly = gauss_sum_coefficients(12)
        self.assertAlmostEqual(
            NormRequest(4, NormMethod.GRID_QUADRATURE).compute(poly),
            NormRequest.default_for(4).compute(poly),
            delta=1e-9,
        )
        self.assertAlmostEqual(NormRequest(2, "grid", grid_size=512).compute(poly), 12.0, delta=1e-11)


class TestStructureFunction(unittest.TestCase):
    def test_half_scale_closed_form(self):
        value = structure_function(riemann_coefficients(10 ** 6), 2, 0.5)
        self.assertAlmostEqual(value, 4.058712125750114, delta=1e-12)
        self.assertAlmostEqual(value, math.pi ** 4 / 24, delta=1e-9)

    def test_exact_and_shifted_paths_agree(self):
        poly = riemann_coefficients(4096)
        for p in (2, 4):
            exact = structure_function(poly, p, 2 ** -5, grid_size=1 << 14)
            shifted = structure_function_shifted(poly, p, 2 ** -5, grid_size=1 << 14)
            self.assertAlmostEqual(shifted / exact, 1.0, delta=1e-10)

    def test_mirror_symmetry(self):
        poly = riemann_coefficients(1 << 16)
        for ell in (2 ** -6, 3 * 2 ** -8):
            self.assertAlmostEqual(
                structure_function(poly, 4, ell) / structure_function(poly, 4, 1 - ell), 1.0, delta=1e-12
            )

    def test_scale_is_snapped(self):
        poly = riemann_coefficients(4096)
        self.assertEqual(
            structure_function(poly, 2, 0.3001, grid_size=1024),
            structure_function(poly, 2, 307 / 1024, grid_size=1024),
        )

    def test_scale_outside_unit_interval(self):
        poly = riemann_coefficients(64)
        for ell in (0.0, 1.0, 2.0):
            with self.assertRaises(InvalidArgumentError):
                structure_function(poly, 2, ell)

    def test_table_is_sorted(self):
        poly = riemann_coefficients(4096)
        table = structure_table(poly, [4, 2], [2 ** -4, 2 ** -6], grid_size=1 << 14, threads=2)
        self.assertEqual(len(table), 4)
        self.assertEqual([(r.p, r.ell) for r in table.rows], [(2, 2 ** -6), (2, 2 ** -4), (4, 2 ** -6), (4, 2 ** -4)])
        self.assertEqual(len(table.for_exponent(4)), 2)
        self.assertEqual(table.metadata["grid_size"], 1 << 14)

    def test_empty_table(self):
        self.assertEqual(len(structure_table(riemann_coefficients(64), [2], [])), 0)


class TestIncrementSplit(unittest.TestCase):
    def test_triangle_sandwich(self):
        poly = riemann_coefficients(1 << 14)
        for ell in (2 ** -4, 2 ** -6, 2 ** -8):
            split = increment_split_l4(poly, ell)
            self.assertEqual(split.cutoff, int(1 / (2 * ell)))
            self.assertTrue(split.triangle_holds())
            self.assertGreater(split.high, 0.0)


class TestTruncationCheck(unittest.TestCase):
    def test_scale_requirement(self):
        check = check_truncation(1 << 20, reference=1.0, ell_min=2 ** -16)
        self.assertEqual(check.required_k_max, 1 << 20)
        self.assertTrue(check.adequate)

        check = check_truncation(1 << 20, reference=1.0, ell_min=2 ** -17)
        self.assertFalse(check.resolves_scales)
        with self.assertRaises(TruncationError):
            check.raise_if_inadequate()

    def test_cutoff_requirement(self):
        self.assertTrue(check_truncation(1 << 20, reference=1.0, n_max=1 << 16).resolves_scales)
        self.assertFalse(check_truncation(1 << 20, reference=1.0, n_max=(1 << 16) + 1).resolves_scales)

    def test_tail_against_reference(self):
        check = check_truncation(1 << 20, reference=1e-9)
        self.assertGreater(check.tail_ratio, 0.1)
        with self.assertRaises(TruncationError):
            check.raise_if_inadequate()
        self.assertEqual(check_truncation(1024, reference=0.0).tail_ratio, math.inf)

    def test_to_dict(self):
        data = check_truncation(4096, reference=1.0).to_dict()
        self.assertEqual(set(data), {"k_max", "required_k_max", "tail_bound", "reference", "tail_ratio", "tolerance", "adequate"})


def test_square_function_ratio_p2_is_one():
    assert square_function_ratio(riemann_coefficients(4096), 2.0, p=2) == pytest.approx(1.0, rel=1e-12)


def test_square_function_ratio_p4():
    assert square_function_ratio(riemann_coefficients(4096), 2.0, p=4) == pytest.approx(0.96710963, abs=1e-7)


def test_square_function_ratio_of_zero_polynomial():
    with pytest.raises(InvalidArgumentError):
        square_function_ratio(TrigPolynomial.empty())


def test_snap_to_grid():
    assert snap_to_grid(0.3, 1024) == (307, 307 / 1024)
    assert snap_to_grid(1e-9, 1024) == (1, 1 / 1024)
    assert snap_to_grid(1 - 1e-9, 1024) == (1023, 1023 / 1024)
    with pytest.raises(InvalidArgumentError):
        snap_to_grid(0.0, 1024)
    with pytest.raises(InvalidArgumentError):
        snap_to_grid(0.5, 1000)


def test_shifted_path_on_random_polynomial():
    rng = np.random.default_rng(7)
    freqs = np.arange(1, 200)
    poly = TrigPolynomial(freqs, rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size))
    exact = structure_function(poly, 4, 0.125, grid_size=1024)
    assert structure_function_shifted(poly, 4, 0.125, grid_size=1024) == pytest.approx(exact, rel=1e-10)


def test_structure_table_defaults_to_every_core():
    with mock.patch("riemannflat.core.norms.ThreadPoolExecutor", wraps=ThreadPoolExecutor) as pool:
        structure_table(riemann_coefficients(64), [2.0], [0.25], grid_size=1024)
    assert pool.call_args.kwargs["max_workers"] == os.cpu_count()
