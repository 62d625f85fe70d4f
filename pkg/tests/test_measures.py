#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Тесты дискретных мер, множеств интервалов и плотностей.
"""

import math
import unittest
from fractions import Fraction

import numpy as np

from lab.measures import (DiscreteMeasure, IntervalSet, binary_shift_limit, binary_shift_set,
                          binary_shift_union, binary_shift_union_measure, box_indicator, convolve,
                          convolve_sequence, density_report, empty_set, full_space,
                          liouville_neighborhood, liouville_set, lower_density, measure, measure_of,
                          set_ops, shifted, translate_scan_measure, uniform_interval_measure,
                          upper_density)
from utils.error_handler import InputError, RangeError
from utils.input_processor import dyadic_measures


def random_measure(rng: np.random.Generator, d: int) -> DiscreteMeasure:
    """Нормированная мера со случайными атомами в R^d."""
    count = int(rng.integers(1, 8))
    weights = rng.uniform(0.1, 1.0, size=count)
    return DiscreteMeasure(rng.normal(size=(count, d)), weights / weights.sum())


def union_of(indicators):
    """Индикатор объединения множеств."""
    return lambda points: np.any([indicator(points) for indicator in indicators], axis=0)


def complement_of(indicator):
    """Индикатор дополнения множества."""
    return lambda points: ~indicator(points)


class TestDiscreteMeasures(unittest.TestCase):
    def setUp(self):
        """Подготовка случайных мер на плоскости"""
        rng = np.random.default_rng(11)
        self.mu = DiscreteMeasure(rng.normal(size=(7, 2)), rng.uniform(0.1, 1.0, size=7))
        self.nu = DiscreteMeasure(rng.normal(size=(5, 2)), rng.uniform(0.1, 1.0, size=5))

    def test_atoms_are_merged(self):
        """Тест слияния совпадающих атомов"""
        mu = DiscreteMeasure([[0.0], [1.0], [0.0]], [0.25, 0.5, 0.25])
        self.assertEqual(len(mu), 2)
        np.testing.assert_allclose(mu.weights, [0.5, 0.5])

    def test_invalid_weights(self):
        """Тест отклонения отрицательных весов"""
        with self.assertRaises(InputError):
            DiscreteMeasure([[0.0], [1.0]], [0.5, -0.5])

    def test_convolution_mass_is_product(self):
        """Тест: масса свертки равна произведению масс"""
        self.assertAlmostEqual(convolve(self.mu, self.nu).total_mass,
                               self.mu.total_mass * self.nu.total_mass, places=12)

    def test_convolution_satisfies_fubini(self):
        """Тест: (mu * nu)(S) равно обеим повторным суммам на 200 случайных тройках"""
        for seed in range(200):
            rng = np.random.default_rng(seed)
            d = int(rng.integers(1, 3))
            mu = random_measure(rng, d)
            nu = random_measure(rng, d)
            center = rng.normal(size=d)
            box = box_indicator(center - rng.uniform(0.2, 1.5, size=d), center + rng.uniform(0.2, 1.5, size=d))
            with self.subTest(seed=seed):
                direct = measure_of(convolve(mu, nu), box)
                over_mu = math.fsum(w * measure_of(nu, shifted(box, -x)) for x, w in mu.atoms)
                over_nu = math.fsum(w * measure_of(mu, shifted(box, -y)) for y, w in nu.atoms)
                self.assertAlmostEqual(direct, over_mu, places=12)
                self.assertAlmostEqual(direct, over_nu, places=12)

    def test_dirac_convolution(self):
        """Тест: delta_a * delta_b = delta_{a+b}"""
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = rng.normal(size=3), rng.normal(size=3)
            result = convolve(DiscreteMeasure.dirac(a), DiscreteMeasure.dirac(b))
            self.assertEqual(len(result), 1)
            np.testing.assert_array_equal(result.points[0], a + b)
            self.assertEqual(result.weights.tolist(), [1.0])

    def test_convolution_commutative_and_associative(self):
        """Тест коммутативности и ассоциативности свертки"""
        for seed in range(30):
            rng = np.random.default_rng(100 + seed)
            mu, nu, eta = (random_measure(rng, 2) for _ in range(3))
            with self.subTest(seed=seed):
                self.assertTrue(convolve(mu, nu).allclose(convolve(nu, mu)))
                self.assertTrue(convolve(convolve(mu, nu), eta).allclose(convolve(mu, convolve(nu, eta))))

    def test_convolution_dimension_mismatch(self):
        """Тест ошибки размерности свертки"""
        with self.assertRaises(InputError):
            convolve(self.mu, DiscreteMeasure.dirac([0.0]))

    def test_dyadic_convolution_is_uniform_grid(self):
        """Тест: свертка двухатомных мер дает равномерную сетку k / 2^N"""
        result = convolve_sequence(dyadic_measures(10), 10)
        self.assertEqual(len(result), 1024)
        np.testing.assert_allclose(result.points[:, 0], np.arange(1024) / 1024.0, atol=1e-12)
        np.testing.assert_allclose(result.weights, np.full(1024, 2.0 ** -10))

    def test_convolution_sequence_checks_diameter(self):
        """Тест проверки диаметра n-й меры"""
        measures = dyadic_measures(3)
        measures[1] = DiscreteMeasure.uniform([[0.0], [0.5]])
        with self.assertRaises(InputError):
            convolve_sequence(measures, 3)

    def test_uniform_interval_measure(self):
        """Тест равномерной меры на отрезке"""
        mu = uniform_interval_measure(-1.0, 1.0, 201)
        self.assertTrue(mu.is_normalized())
        self.assertAlmostEqual(measure_of(mu, box_indicator([-0.005], [0.495])), 50 / 201, places=12)


class TestIntervalSets(unittest.TestCase):
    def setUp(self):
        """Подготовка множеств интервалов"""
        self.a = IntervalSet([(0.1, 0.3), (0.25, 0.5), (0.7, 0.8)])
        self.b = IntervalSet([(0.2, 0.75)])

    def test_normalization_merges_overlaps(self):
        """Тест слияния пересекающихся интервалов"""
        self.assertEqual(self.a.intervals, [(0.1, 0.5), (0.7, 0.8)])
        self.assertAlmostEqual(self.a.measure(), 0.5, places=12)

    def test_set_operations(self):
        """Тест объединения, пересечения и дополнения"""
        ops = set_ops(self.a, self.b)
        self.assertAlmostEqual(ops["union"].measure(), 0.7, places=12)
        self.assertAlmostEqual(ops["intersection"].measure(), 0.35, places=12)
        self.assertAlmostEqual(ops["complement_a"].measure(), 0.5, places=12)
        self.assertAlmostEqual(ops["union"].measure() + ops["intersection"].measure(),
                               self.a.measure() + self.b.measure(), places=12)
        self.assertEqual(measure(self.a), self.a.measure())
        self.assertAlmostEqual(self.a.difference(self.b).measure(), 0.15, places=12)

    def test_contains(self):
        """Тест индикатора"""
        inside = self.a.contains(np.array([0.0, 0.1, 0.45, 0.5, 0.75, 0.95]))
        self.assertEqual(inside.tolist(), [False, True, True, False, True, False])

    def test_overlap_with_segments(self):
        """Тест меры пересечения с отрезками"""
        overlap = self.a.overlap(np.array([0.0, 0.3, 0.5, 0.75]), np.array([0.2, 0.6, 0.7, 1.0]))
        np.testing.assert_allclose(overlap, [0.1, 0.2, 0.0, 0.05], atol=1e-15)
        self.assertEqual(self.a.overlap(np.array([0.55]), np.array([0.65])).tolist(), [0.0])
        self.assertEqual(IntervalSet([]).measure_below(np.array([0.5])).tolist(), [0.0])

    def test_outside_ambient(self):
        """Тест ошибки выхода за объемлющий отрезок"""
        with self.assertRaises(InputError):
            IntervalSet([(-0.5, 0.5)])


class TestBinaryShiftSets(unittest.TestCase):
    def test_u_n_measure_is_exact(self):
        """Тест: мера U_n равна 2^-n"""
        for n in range(1, 21):
            with self.subTest(n=n):
                u = binary_shift_set(n)
                self.assertEqual(len(u), 2 ** n)
                self.assertEqual(u.measure(), 2.0 ** (-n))

    def test_u_n_range(self):
        """Тест ограничения n <= 25"""
        with self.assertRaises(RangeError):
            binary_shift_set(26)
        with self.assertRaises(RangeError):
            binary_shift_union(20, 6)

    def test_small_union_by_hand(self):
        """Тест: U_2 U U_3 имеет меру 5/16"""
        self.assertEqual(binary_shift_union_measure(1, 2), Fraction(5, 16))
        self.assertAlmostEqual(binary_shift_union(1, 2).measure(), 5 / 16, places=15)

    def test_exact_measure_matches_explicit_union(self):
        """Тест: рекурсивная мера совпадает с явным объединением"""
        for m, depth in [(1, 8), (2, 9), (4, 7)]:
            with self.subTest(m=m, depth=depth):
                explicit = binary_shift_union(m, depth).measure()
                self.assertAlmostEqual(explicit, float(binary_shift_union_measure(m, depth)), places=12)

    def test_v_m_below_bound(self):
        """Тест: мера V_m строго меньше 2^-m"""
        for m in range(1, 11):
            with self.subTest(m=m):
                self.assertLess(binary_shift_union_measure(m), Fraction(1, 2 ** m))

    def test_limit_set_shrinks(self):
        """Тест: пересечение V_1..V_k убывает"""
        measures = [binary_shift_limit(k, 12).measure() for k in range(1, 5)]
        for previous, current in zip(measures, measures[1:]):
            self.assertLessEqual(current, previous + 1e-15)
        self.assertLess(measures[-1], 2.0 ** -4)


class TestLiouville(unittest.TestCase):
    def test_neighborhood_below_union_bound(self):
        """Тест: мера окрестности не больше суммы длин интервалов"""
        c, power, qmax = 0.01, 3, 100
        bound = sum((q + 1) * 2.0 * c / q ** power for q in range(1, qmax + 1))
        result = liouville_neighborhood(c, power, qmax)
        self.assertGreater(result.measure(), 0.0)
        self.assertLessEqual(result.measure(), bound + 1e-12)

    def test_intersection_is_smaller(self):
        """Тест: пересечение окрестностей вложено в каждую"""
        single = liouville_neighborhood(0.1, 3, 200)
        both = liouville_set([0.1], [3, 5], 200)
        self.assertLessEqual(both.measure(), single.measure())
        self.assertAlmostEqual(both.difference(single).measure(), 0.0, places=15)

    def test_invalid_parameters(self):
        """Тест ошибок параметров"""
        with self.assertRaises(RangeError):
            liouville_neighborhood(0.1, 2, 100)
        with self.assertRaises(RangeError):
            liouville_neighborhood(0.0, 3, 100)


class TestDensity(unittest.TestCase):
    def setUp(self):
        """Семейство равномерных мер и сетка сдвигов"""
        self.family = [uniform_interval_measure(-w, w, 2001) for w in (10.0, 100.0)]
        self.translations = np.linspace(-102.0, 102.0, 4001)

    def test_sandwich(self):
        """Тест: 0 <= rho- <= rho+ <= 1"""
        for indicator in (full_space, empty_set, box_indicator([0.0], [1.0])):
            report = density_report(indicator, self.family, self.translations)
            self.assertTrue(report.consistent)
            self.assertLessEqual(0.0, report.lower)
            self.assertLessEqual(report.lower, report.upper)
            self.assertLessEqual(report.upper, 1.0)

    def test_sandwich_on_random_configurations(self):
        """Тест: исходные оценки удовлетворяют rho- <= rho+ на 50 случайных конфигурациях"""
        for seed in range(50):
            rng = np.random.default_rng(seed)
            lows = rng.uniform(-5.0, 4.0, size=int(rng.integers(1, 4)))
            union = union_of([box_indicator([a], [a + rng.uniform(0.1, 1.0)]) for a in lows])
            indicator = union if seed % 2 == 0 else complement_of(union)
            widths = rng.uniform(5.0, 50.0, size=int(rng.integers(1, 4)))
            family = [uniform_interval_measure(-w, w, int(rng.integers(50, 400))) for w in widths]
            reach = widths.max() + 10.0
            translations = np.linspace(-reach, reach, int(rng.integers(50, 500)))
            with self.subTest(seed=seed):
                report = density_report(indicator, family, translations)
                self.assertTrue(report.consistent)
                self.assertLessEqual(0.0, report.raw_lower)
                self.assertLessEqual(report.raw_lower, report.raw_upper)
                self.assertLessEqual(report.raw_upper, 1.0)
                self.assertEqual((report.lower, report.upper), (report.raw_lower, report.raw_upper))

    def test_full_and_empty(self):
        """Тест плотностей всего пространства и пустого множества"""
        full = density_report(full_space, self.family, self.translations)
        empty = density_report(empty_set, self.family, self.translations)
        self.assertAlmostEqual(full.lower, 1.0, places=12)
        self.assertAlmostEqual(full.upper, 1.0, places=12)
        self.assertEqual((empty.lower, empty.upper), (0.0, 0.0))

    def test_unit_interval_upper_density_small(self):
        """Тест: верхняя плотность [0, 1) по мере ширины 100 не больше 0.011"""
        report = density_report(box_indicator([0.0], [1.0]), self.family[1:], self.translations)
        self.assertLessEqual(report.upper, 0.011)
        self.assertEqual(report.lower, 0.0)

    def test_translate_scan_values(self):
        """Тест значений mu(S + v) вдоль сетки сдвигов"""
        mu = DiscreteMeasure.dirac([0.0])
        values = translate_scan_measure(mu, box_indicator([-1.0], [1.0]), [0.0, 0.5, 5.0])
        self.assertEqual(values.tolist(), [1.0, 1.0, 0.0])

    def test_coarse_grid_is_reported_inconsistent(self):
        """Тест: при rho- > rho+ верхняя оценка поднимается до нижней, исходные сохраняются"""
        family = [DiscreteMeasure.dirac([0.0]), DiscreteMeasure.dirac([100.0])]
        indicator = box_indicator([-10.0], [10.0])
        report = density_report(indicator, family, [0.0, 1.0])
        self.assertFalse(report.consistent)
        self.assertEqual((report.lower, report.upper), (1.0, 1.0))
        self.assertEqual((report.raw_lower, report.raw_upper), (1.0, 0.0))
        self.assertEqual(lower_density(indicator, family, [0.0, 1.0]), 1.0)
        self.assertEqual(upper_density(indicator, family, [0.0, 1.0]), 1.0)

    def test_empty_family(self):
        """Тест ошибки пустого семейства"""
        with self.assertRaises(InputError):
            density_report(full_space, [], self.translations)


if __name__ == '__main__':
    unittest.main()
