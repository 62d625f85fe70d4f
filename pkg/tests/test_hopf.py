#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Тесты классификации бифуркации Андронова-Хопфа.
"""

import math
import unittest

import numpy as np

from lab.hopf import (PlanarFamily, antisymmetric_coords, curve_slope, find_hopf_candidates,
                      hopf_classify, hopf_report, lyapunov_quantity, track_fixed_curve)
from lab.polyjet import PolyMap
from utils.error_handler import InputError
from utils.input_processor import load_family
from utils.seeding import task_generator


def random_family(seed: int) -> PlanarFamily:
    """
    Случайное семейство с кандидатом (mu, x, y) = (0, 0, 0): линейная часть
    с нулевым следом и det = omega^2, плюс члены, зависящие только от mu.
    """
    rng = task_generator(seed, "hopf_tests")
    a = rng.uniform(-1.0, 1.0)
    b = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
    omega = rng.uniform(0.5, 1.5)
    c = -(a * a + omega * omega) / b
    linear = np.array([[a, b], [c, -a]])
    coefficients = {
        (0, 1, 0): linear[:, 0],
        (0, 0, 1): linear[:, 1],
        (1, 0, 0): rng.normal(size=2),
        (2, 0, 0): rng.normal(size=2),
        (1, 1, 0): rng.normal(size=2),
        (1, 0, 1): rng.normal(size=2),
    }
    for alpha in [(0, 2, 0), (0, 1, 1), (0, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3)]:
        coefficients[alpha] = rng.normal(size=2)
    return PlanarFamily(PolyMap(3, 2, coefficients), name=f"random-{seed}")


def transformed_family(family: PlanarFamily, matrix: np.ndarray, output: np.ndarray) -> PlanarFamily:
    """Семейство output f(mu, matrix z)."""
    substitution = np.eye(3)
    substitution[1:, 1:] = matrix
    return PlanarFamily(family.f.compose_affine(substitution).transform_output(output), family.name)


class TestNormalForm(unittest.TestCase):
    def test_builtin_families(self):
        """Тест классификации нормальных форм s = -1, 0, +1"""
        expected = {
            "normal-form-super": "nondegenerate-supercritical",
            "normal-form-sub": "nondegenerate-subcritical",
            "normal-form-linear": "degenerate-d",
        }
        for name, classification in expected.items():
            with self.subTest(family=name):
                reports = hopf_classify(load_family(name))
                self.assertEqual(len(reports), 1)
                report = reports[0]
                self.assertAlmostEqual(report.mu0, 0.0, places=9)
                np.testing.assert_allclose(report.x0, [0.0, 0.0], atol=1e-9)
                self.assertAlmostEqual(report.omega, 1.0, places=9)
                self.assertAlmostEqual(report.trace_mu_derivative, 2.0, places=9)
                self.assertEqual(report.classification, classification)

    def test_lyapunov_quantity_of_normal_form(self):
        """Тест: ляпуновская величина нормальной формы равна 16 s"""
        report = hopf_classify(load_family("normal-form-super"))[0]
        self.assertAlmostEqual(report.lyapunov_quantity, -16.0, places=9)
        self.assertTrue(report.is_nondegenerate)

    def test_lyapunov_sign_follows_cubic_coefficient(self):
        """Тест: знак ляпуновской величины равен знаку s, при s = 0 величина меньше 1e-10"""
        for name, sign in (("normal-form-super", -1.0), ("normal-form-sub", 1.0)):
            with self.subTest(family=name):
                value = lyapunov_quantity(load_family(name), 0.0, (0.0, 0.0))
                self.assertEqual(math.copysign(1.0, value), sign)
        self.assertLess(abs(lyapunov_quantity(load_family("normal-form-linear"), 0.0, (0.0, 0.0))), 1e-10)

    def test_report_notes_label_convention(self):
        """Тест: отчет поясняет, что метка зависит только от знака ляпуновской величины"""
        report = hopf_classify(load_family("normal-form-super"))[0]
        self.assertIn("lyapunov", report.note)
        self.assertIn("trace_mu_deriv", report.note)

    def test_shifted_family(self):
        """Тест: сдвиг параметра переносит кандидата в mu0 = 1"""
        reports = hopf_classify(load_family("normal-form-shifted"))
        self.assertEqual(len(reports), 1)
        self.assertAlmostEqual(reports[0].mu0, 1.0, places=9)
        self.assertEqual(reports[0].classification, "nondegenerate-supercritical")

    def test_family_without_candidates(self):
        """Тест: у поля (x, y) кандидатов нет"""
        family = PlanarFamily(PolyMap(3, 2, {(0, 1, 0): [1.0, 0.0], (0, 0, 1): [0.0, 1.0]}))
        self.assertEqual(find_hopf_candidates(family), [])
        self.assertEqual(hopf_classify(family), [])

    def test_not_hopf_point(self):
        """Тест: точка вне кривой неподвижных точек не является кандидатом"""
        report = hopf_report(load_family("normal-form-super"), 0.0, (0.5, 0.0))
        self.assertEqual(report.classification, "not-hopf")

    def test_wrong_dimensions(self):
        """Тест ошибки размерности семейства"""
        with self.assertRaises(InputError):
            PlanarFamily(PolyMap.zero(2, 2))

    def test_fixed_curve_of_normal_form(self):
        """Тест продолжения кривой неподвижных точек"""
        curve = track_fixed_curve(load_family("normal-form-super"), 0.0, (0.0, 0.0), delta=0.1, step=0.01)
        self.assertFalse(curve.truncated)
        self.assertEqual(curve.mus.shape[0], 21)
        np.testing.assert_allclose(curve.points, 0.0, atol=1e-12)
        self.assertEqual(curve.slope, (0.0, 0.0))


class TestAntisymmetricCoordinates(unittest.TestCase):
    def test_examples(self):
        """Тест приведения матриц к антисимметричной форме"""
        for matrix in ([[0.0, -1.0], [1.0, 0.0]], [[1.0, -2.0], [1.0, -1.0]], [[0.5, 3.0], [-1.0, -0.5]]):
            with self.subTest(matrix=matrix):
                a = np.array(matrix)
                transform, omega = antisymmetric_coords(a)
                self.assertAlmostEqual(omega, math.sqrt(np.linalg.det(a)), places=12)
                self.assertAlmostEqual(abs(np.linalg.det(transform)), 1.0, places=12)
                conjugated = np.linalg.solve(transform, a @ transform)
                np.testing.assert_allclose(conjugated, [[0.0, -omega], [omega, 0.0]], atol=1e-12)

    def test_rejects_nonzero_trace(self):
        """Тест: ненулевой след"""
        with self.assertRaises(InputError):
            antisymmetric_coords(np.array([[0.1, -1.0], [1.0, 0.0]]))

    def test_rejects_negative_determinant(self):
        """Тест: отрицательный определитель"""
        with self.assertRaises(InputError):
            antisymmetric_coords(np.array([[1.0, 0.0], [0.0, -1.0]]))


class TestRandomFamilies(unittest.TestCase):
    def test_trace_derivative_matches_finite_differences(self):
        """Тест производной следа против конечной разности вдоль кривой неподвижных точек"""
        h = 1e-4
        for seed in range(50):
            with self.subTest(seed=seed):
                family = random_family(seed)
                report = hopf_report(family, 0.0, (0.0, 0.0))
                self.assertNotEqual(report.classification, "not-hopf")
                curve = track_fixed_curve(family, 0.0, (0.0, 0.0), delta=h, step=h)
                self.assertEqual(curve.mus.shape[0], 3)
                traces = [float(family.trace_map.eval([mu, x, y])[0])
                          for mu, (x, y) in zip(curve.mus, curve.points)]
                oracle = (traces[2] - traces[0]) / (curve.mus[2] - curve.mus[0])
                self.assertAlmostEqual(report.trace_mu_derivative, oracle, delta=1e-4 * max(1.0, abs(oracle)))

    def test_curve_slope_solves_implicit_equation(self):
        """Тест наклона кривой неподвижных точек"""
        family = random_family(42)
        slope = np.array(curve_slope(family, 0.0, (0.0, 0.0)))
        jac = family.state_jacobian(0.0, (0.0, 0.0))
        np.testing.assert_allclose(jac @ slope, -family.parameter_derivative(0.0, (0.0, 0.0)), atol=1e-12)

    def test_lyapunov_invariant_under_rotation(self):
        """Тест: ляпуновская величина не меняется при повороте координат"""
        for seed in range(5):
            with self.subTest(seed=seed):
                family = random_family(seed)
                theta = 0.3 + seed
                rotation = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
                rotated = transformed_family(family, rotation.T, rotation)
                original = lyapunov_quantity(family, 0.0, (0.0, 0.0))
                self.assertAlmostEqual(lyapunov_quantity(rotated, 0.0, (0.0, 0.0)), original,
                                       delta=1e-9 * max(1.0, abs(original)))

    def test_lyapunov_scales_quadratically(self):
        """Тест: при растяжении координат ляпуновская величина умножается на c^2"""
        family = random_family(7)
        original = lyapunov_quantity(family, 0.0, (0.0, 0.0))
        for c in (0.5, 2.0, 3.0):
            with self.subTest(c=c):
                scaled = transformed_family(family, c * np.eye(2), np.eye(2) / c)
                self.assertAlmostEqual(lyapunov_quantity(scaled, 0.0, (0.0, 0.0)), c * c * original,
                                       delta=1e-9 * max(1.0, abs(c * c * original)))

    def test_lyapunov_scales_under_time_rescaling(self):
        """Тест: при замене f на c f ляпуновская величина умножается на c^2, производная следа на c"""
        for seed in range(5):
            family = random_family(seed)
            original = hopf_report(family, 0.0, (0.0, 0.0))
            for c in (0.5, 2.0, 3.0):
                with self.subTest(seed=seed, c=c):
                    scaled = hopf_report(transformed_family(family, np.eye(2), c * np.eye(2)), 0.0, (0.0, 0.0))
                    expected = c * c * original.lyapunov_quantity
                    self.assertAlmostEqual(scaled.lyapunov_quantity, expected, delta=1e-9 * max(1.0, abs(expected)))
                    self.assertAlmostEqual(scaled.trace_mu_derivative, c * original.trace_mu_derivative,
                                           delta=1e-9 * max(1.0, abs(c * original.trace_mu_derivative)))
                    self.assertAlmostEqual(scaled.omega, c * original.omega, places=9)
                    self.assertEqual(scaled.classification, original.classification)

    def test_classification_stable_under_tiny_perturbations(self):
        """Тест: возмущение коэффициентов на 1e-12 не меняет классификацию"""
        for seed in range(20):
            family = random_family(seed)
            rng = np.random.default_rng(seed)
            coefficients = {alpha: vec + rng.uniform(-1e-12, 1e-12, size=2)
                            for alpha, vec in family.f.coefficients.items()}
            coefficients[(0, 0, 0)] = rng.uniform(-1e-12, 1e-12, size=2)
            perturbed = PlanarFamily(PolyMap(3, 2, coefficients), family.name)
            with self.subTest(seed=seed):
                original = hopf_report(family, 0.0, (0.0, 0.0))
                self.assertTrue(original.is_nondegenerate)
                self.assertEqual(hopf_report(perturbed, 0.0, (0.0, 0.0)).classification, original.classification)

    def test_fixed_curve_of_linear_drift(self):
        """Тест: для f = A z + mu b кривая неподвижных точек z(mu) = -mu A^-1 b"""
        a = np.array([[1.0, 2.0], [-1.0, 1.0]])
        b = np.array([1.0, -2.0])
        family = PlanarFamily(PolyMap(3, 2, {(0, 1, 0): a[:, 0], (0, 0, 1): a[:, 1], (1, 0, 0): b}))
        expected_slope = -np.linalg.solve(a, b)
        curve = track_fixed_curve(family, 0.0, (0.0, 0.0), delta=0.1, step=0.01)
        self.assertFalse(curve.truncated)
        self.assertEqual(curve.mus.shape[0], 21)
        np.testing.assert_allclose(curve.slope, expected_slope, atol=1e-12)
        np.testing.assert_allclose(curve.points, curve.mus[:, None] * expected_slope[None, :], atol=1e-12)
        self.assertLess(float(np.max(curve.residuals)), 1e-9)


if __name__ == '__main__':
    unittest.main()
