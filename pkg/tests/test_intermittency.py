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

from riemannflat.core.errors import InvalidArgumentError, UndefinedFlatnessError
from riemannflat.core.intermittency import (
    Axis,
    Quantity,
    ScalingTable,
    default_p_grid,
    detect_log_correction,
    fit_power_law,
    flatness_filter,
    flatness_structure,
    high_pass_part,
    jaffard_spectrum,
    jaffard_zeta,
    legendre_spectrum,
    spectrum_rows,
    sweep,
)
from riemannflat.core.norms import l2_squared_exact
from riemannflat.core.series_core import TrigPolynomial, gauss_sum_coefficients, riemann_coefficients


def power_table(exponent, scales, prefactor=3.0, log_power=0.0, axis=Axis.INCREMENT_SCALE):
    rows = [(s, prefactor * s ** exponent * abs(math.log(s)) ** log_power) for s in scales]
    return ScalingTable(rows=tuple(rows), axis=axis, quantity="synthetic")


DYADIC_SCALES = [2.0 ** -k for k in range(6, 17)]


class TestScalingTable(unittest.TestCase):
    def test_scales_must_be_monotone(self):
        with self.assertRaises(InvalidArgumentError):
            ScalingTable(rows=((0.1, 1.0), (0.3, 1.0), (0.2, 1.0)), axis="l", quantity="S2")

    def test_scales_and_values_positive(self):
        with self.assertRaises(InvalidArgumentError):
            ScalingTable(rows=((0.0, 1.0), (0.1, 1.0)), axis="l", quantity="S2")
        with self.assertRaises(InvalidArgumentError):
            ScalingTable(rows=((0.1, 0.0), (0.2, 1.0)), axis="l", quantity="S2")
        table = ScalingTable(rows=((0.1, 0.0),), axis="l", quantity="x", positive_values=False)
        self.assertEqual(len(table), 1)

    def test_window_and_reciprocal(self):
        table = power_table(1.5, [2.0 ** -k for k in range(1, 9)])
        sub = table.window((2.0 ** -6, 2.0 ** -3))
        np.testing.assert_array_equal(sub.scales, [2.0 ** -k for k in range(3, 7)])
        np.testing.assert_array_equal(table.reciprocal().scales, [2.0 ** k for k in range(1, 9)])
        self.assertIs(table.window(None), table)

    def test_normalized_and_spread(self):
        table = power_table(1.0, [1.0, 2.0, 4.0], prefactor=1.0, axis=Axis.FILTER_CUTOFF)
        self.assertEqual(table.spread(), 4.0)
        flat = table.normalized(table.scales, "flat")
        self.assertEqual(flat.spread(), 1.0)
        self.assertEqual(flat.quantity, "flat")


class TestPowerLawFit(unittest.TestCase):
    def test_exact_power_law(self):
        fit = fit_power_law(power_table(1.5, DYADIC_SCALES))
        self.assertAlmostEqual(fit.exponent, 1.5, delta=1e-12)
        self.assertAlmostEqual(math.exp(fit.intercept), 3.0, delta=1e-10)
        self.assertAlmostEqual(fit.r_squared, 1.0, delta=1e-12)
        self.assertTrue(fit.stable)
        self.assertFalse(fit.curvature_flagged)
        self.assertEqual(len(fit.residuals), len(DYADIC_SCALES))

    def test_window_restricts_rows(self):
        fit = fit_power_law(power_table(2.0, DYADIC_SCALES), window=(2.0 ** -12, 2.0 ** -8))
        self.assertAlmostEqual(fit.window[0], 2.0 ** -12, delta=1e-15)
        self.assertAlmostEqual(fit.window[1], 2.0 ** -8, delta=1e-15)
        self.assertEqual(len(fit.residuals), 5)

    def test_too_few_rows(self):
        with self.assertRaises(InvalidArgumentError):
            fit_power_law(power_table(1.0, [0.5, 0.25, 0.125]))

    def test_log_factor_shows_as_curvature(self):
        fit = fit_power_law(power_table(3.0, DYADIC_SCALES, log_power=1.0))
        self.assertTrue(fit.curvature_flagged)
        self.assertLess(fit.exponent, 3.0)

    def test_to_dict(self):
        data = fit_power_law(power_table(1.5, DYADIC_SCALES)).to_dict()
        self.assertIsNone(data["log_correction"])
        self.assertTrue(data["stable"])


class TestLogCorrection(unittest.TestCase):
    def test_detects_log_factor(self):
        fit = detect_log_correction(power_table(3.0, DYADIC_SCALES, log_power=1.0), exponent=3.0)
        correction = fit.log_correction
        self.assertTrue(correction.enabled)
        self.assertAlmostEqual(correction.r2_with_log, 1.0, delta=1e-12)
        self.assertEqual(correction.r2_power_only, 0.0)
        self.assertGreater(correction.log_coefficient, 0.0)

    def test_pure_power_law_keeps_correction_off(self):
        correction = detect_log_correction(power_table(3.0, DYADIC_SCALES), exponent=3.0).log_correction
        self.assertFalse(correction.enabled)
        self.assertEqual(correction.r2_power_only, 1.0)
        self.assertEqual(correction.log_coefficient, 0.0)

    def test_decreasing_compensation_is_not_a_log_factor(self):
        table = power_table(3.0, DYADIC_SCALES, log_power=-1.0)
        self.assertFalse(detect_log_correction(table, exponent=3.0).log_correction.enabled)

    def test_margin_is_respected(self):
        table = power_table(3.0, DYADIC_SCALES, log_power=1.0)
        self.assertFalse(detect_log_correction(table, exponent=3.0, margin=1.5).log_correction.enabled)


class TestFlatness(unittest.TestCase):
    def test_gauss_sum_flatness(self):
        self.assertAlmostEqual(flatness_filter(gauss_sum_coefficients(64), 1), 12804 / 64 ** 2, delta=1e-12)

    def test_single_mode_has_unit_flatness(self):
        self.assertAlmostEqual(flatness_filter(riemann_coefficients(100), 100), 1.0, delta=1e-15)

    def test_empty_high_pass_part(self):
        with self.assertRaises(UndefinedFlatnessError):
            flatness_filter(riemann_coefficients(100), 101)

    def test_vanishing_increment(self):
        with self.assertRaises(UndefinedFlatnessError):
            flatness_structure(TrigPolynomial.from_mapping({2: 1.0}), 0.5)

    def test_cutoff_validation(self):
        poly = riemann_coefficients(100)
        for cutoff in (0, -4, 2.5):
            with self.assertRaises(InvalidArgumentError):
                high_pass_part(poly, cutoff)

    def test_high_pass_norm_is_piecewise_constant(self):
        poly = riemann_coefficients(1 << 20)
        self.assertEqual(l2_squared_exact(high_pass_part(poly, 15)), l2_squared_exact(high_pass_part(poly, 16)))
        self.assertGreater(l2_squared_exact(high_pass_part(poly, 16)), l2_squared_exact(high_pass_part(poly, 17)))

    def test_structure_flatness_exceeds_one(self):
        poly = riemann_coefficients(1 << 16)
        for ell in (2.0 ** -4, 2.0 ** -8):
            self.assertGreater(flatness_structure(poly, ell), 1.0)

    def test_flatness_ignores_coefficient_scaling(self):
        poly = riemann_coefficients(1 << 16)
        f_ref = flatness_filter(poly, 64)
        g_ref = flatness_structure(poly, 2.0 ** -8)
        for c in (1e-3, -2.0, 1 + 1j):
            scaled = poly.scaled(c)
            self.assertAlmostEqual(flatness_filter(scaled, 64) / f_ref, 1.0, delta=1e-12)
            self.assertAlmostEqual(flatness_structure(scaled, 2.0 ** -8) / g_ref, 1.0, delta=1e-10)


class TestSweep(unittest.TestCase):
    def test_axis_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            sweep(riemann_coefficients(64), Axis.FILTER_CUTOFF, [4, 8], Quantity.S2)
        with self.assertRaises(InvalidArgumentError):
            sweep(riemann_coefficients(64), "l", [0.25], "F")

    def test_scales_are_snapped(self):
        table = sweep(riemann_coefficients(4096), "l", [0.3001, 0.1], "S2", grid_size=1024)
        np.testing.assert_array_equal(table.scales, [307 / 1024, 102 / 1024])
        self.assertEqual(table.metadata["requested_scales"], [0.3001, 0.1])

    def test_filter_flatness_grows(self):
        table = sweep(riemann_coefficients(1 << 20), "N", [2 ** k for k in range(4, 13)], "F", threads=4)
        self.assertAlmostEqual(table.values[0], 1.68640, delta=1e-5)
        self.assertAlmostEqual(table.values[-1], 2.33829, delta=1e-5)
        self.assertTrue(np.all(np.diff(table.values) > 0))

    def test_threads_default_to_every_core(self):
        with mock.patch("riemannflat.core.intermittency.ThreadPoolExecutor", wraps=ThreadPoolExecutor) as pool:
            sweep(riemann_coefficients(1024), "N", [4, 8], "l2")
        self.assertEqual(pool.call_args.kwargs["max_workers"], os.cpu_count())
        with mock.patch("riemannflat.core.intermittency.ThreadPoolExecutor", wraps=ThreadPoolExecutor) as pool:
            sweep(riemann_coefficients(1024), "N", [4, 8], "l2", threads=2)
        self.assertEqual(pool.call_args.kwargs["max_workers"], 2)


class TestMultifractal(unittest.TestCase):
    def test_scaling_exponents(self):
        self.assertEqual(jaffard_zeta(2), 1.5)
        self.assertEqual(jaffard_zeta(4), 3.0)
        self.assertEqual(jaffard_zeta(6), 4.0)
        with self.assertRaises(InvalidArgumentError):
            jaffard_zeta(0.5)

    def test_closed_form_spectrum(self):
        self.assertAlmostEqual(jaffard_spectrum(0.6), 0.4, delta=1e-15)
        self.assertEqual(jaffard_spectrum(1.5), 0.0)
        self.assertEqual(jaffard_spectrum(1.0), -math.inf)
        self.assertEqual(jaffard_spectrum(0.4), -math.inf)

    def test_p_grid_contains_four(self):
        grid = default_p_grid(12.0, 0.03)
        self.assertIn(4.0, grid.tolist())
        self.assertEqual(grid[0], 1.0)
        self.assertEqual(grid[-1], 12.0)

    def test_legendre_matches_closed_form(self):
        for alpha in np.round(np.arange(0.50, 0.7501, 0.01), 2):
            self.assertAlmostEqual(legendre_spectrum(jaffard_zeta, alpha), 4 * alpha - 2, delta=1e-6)

    def test_legendre_adds_four_to_coarse_grid(self):
        self.assertAlmostEqual(legendre_spectrum(jaffard_zeta, 0.6, [1.0, 3.0, 5.0]), 0.4, delta=1e-12)

    def test_empty_grid(self):
        with self.assertRaises(InvalidArgumentError):
            legendre_spectrum(jaffard_zeta, 0.6, [])


def test_spectrum_rows_are_concave_and_bounded():
    alphas = np.round(np.arange(0.50, 0.7501, 0.05), 2)
    rows = spectrum_rows(alphas)
    values = np.array([legendre for _, legendre, _ in rows])
    assert values.max() <= 1.0
    assert np.all(np.diff(values, 2) <= 1e-9)
    for _, legendre, closed in rows:
        assert legendre == pytest.approx(closed, abs=1e-6)
