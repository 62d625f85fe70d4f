#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Тесты текстовых форматов: многочлены, последовательности, меры,
интервалы, пробы и файлы экспериментов.
"""

import unittest

import numpy as np

from lab.measures import DiscreteMeasure, IntervalSet
from lab.polyjet import PolyMap
from lab.probes import harmonic_probe, polynomial_probe
from utils.error_handler import InputError
from utils.text_parser import (format_intervals, format_measure, format_polymap, format_probe,
                               parse_config_text, parse_element, parse_intervals, parse_measure,
                               parse_number_list, parse_polymap, parse_probe, parse_probe_spec,
                               parse_scalar, parse_sequence)


class TestPolynomialFormat(unittest.TestCase):
    def test_parse_polymap(self):
        """Тест разбора `poly n m` с комментариями и повторным мономом"""
        text = "# логистическое\npoly 1 1\n1 : 3.0\n2 : -3.2\n1 : 0.2  # добавка\n"
        f = parse_polymap(text)
        np.testing.assert_allclose(f.univariate_coefficients(), [0.0, 3.2, -3.2])

    def test_family_header(self):
        """Тест: семейство должно иметь размерности 3 и 2"""
        self.assertEqual(parse_polymap("family 3 2\n0 1 0 : 1 0\n").range_dim, 2)
        with self.assertRaises(InputError):
            parse_polymap("family 2 2\n1 0 : 1 0\n")

    def test_malformed_terms(self):
        """Тест ошибок формата строк мономов"""
        for text in ("poly 1 1\n1 3.0\n", "poly 2 1\n1 : 3.0\n", "poly 1\n", "poly 1 1\nx : 1\n", ""):
            with self.subTest(text=text):
                with self.assertRaises(InputError):
                    parse_polymap(text)

    def test_written_polymap_reads_back_exactly(self):
        """Тест: запись через repr сохраняет коэффициенты без потерь"""
        f = PolyMap(2, 2, {(1, 0): [0.1, 1.0 / 3.0], (0, 2): [-2.5e-17, 7.0]})
        self.assertTrue(parse_polymap(format_polymap(f)).allclose(f, atol=0.0))


class TestSequenceAndElement(unittest.TestCase):
    def test_parse_sequence_over_lines(self):
        """Тест последовательности, записанной в несколько строк"""
        values = parse_sequence("seq 4 1 0.5\n0.25 0.125\n")
        np.testing.assert_allclose(values, [1.0, 0.5, 0.25, 0.125])

    def test_sequence_length_checked(self):
        """Тест несовпадения длины"""
        with self.assertRaises(InputError):
            parse_sequence("seq 3 1 2\n")

    def test_parse_element_dispatch(self):
        """Тест выбора формата по заголовку"""
        self.assertIsInstance(parse_element("seq 2 1 2\n"), np.ndarray)
        self.assertIsInstance(parse_element("poly 1 1\n0 : 1\n"), PolyMap)


class TestMeasureAndIntervalFormats(unittest.TestCase):
    def test_parse_measure(self):
        """Тест разбора `measure d k`"""
        mu = parse_measure("measure 2 2\n0 0 : 0.5\n1 1 : 0.5\n")
        self.assertEqual((mu.dim, len(mu)), (2, 2))
        self.assertTrue(mu.is_normalized())

    def test_measure_errors(self):
        """Тест ошибок числа атомов и координат"""
        with self.assertRaises(InputError):
            parse_measure("measure 1 2\n0 : 1\n")
        with self.assertRaises(InputError):
            parse_measure("measure 2 1\n0 : 1\n")

    def test_measure_written_and_read(self):
        """Тест записи меры"""
        mu = DiscreteMeasure([[0.1], [0.7]], [0.25, 0.75])
        self.assertTrue(parse_measure(format_measure(mu)).allclose(mu, atol=0.0))

    def test_parse_intervals(self):
        """Тест разбора `intervals k` со слиянием"""
        interval_set = parse_intervals("intervals 2\n0.1 0.3\n0.2 0.4\n")
        self.assertEqual(interval_set.intervals, [(0.1, 0.4)])
        self.assertEqual(parse_intervals(format_intervals(interval_set)).intervals, interval_set.intervals)

    def test_reversed_interval(self):
        """Тест интервала с a >= b"""
        with self.assertRaises(InputError):
            parse_intervals("intervals 1\n0.5 0.2\n")

    def test_empty_interval_set(self):
        """Тест пустого множества"""
        self.assertEqual(len(parse_intervals("intervals 0\n")), 0)
        self.assertEqual(format_intervals(IntervalSet([])), "intervals 0\n")


class TestProbeFormats(unittest.TestCase):
    def test_probe_shorthand(self):
        """Тест краткой записи проб"""
        self.assertEqual(parse_probe_spec("constant:2").q, 2)
        self.assertEqual(parse_probe_spec("polynomial:1,1,3", box_radius=0.5).box_radius, 0.5)
        self.assertEqual(parse_probe_spec("harmonic:16").ambient, "sequence(16)")
        for spec in ("constant", "cubic:1", "linear:1", "polynomial:1,1"):
            with self.subTest(spec=spec):
                with self.assertRaises(InputError):
                    parse_probe_spec(spec)

    def test_polynomial_probe_file(self):
        """Тест записи и чтения пробы многочленов"""
        probe = polynomial_probe(1, 1, 2, box_radius=0.5)
        restored = parse_probe(format_probe(probe))
        self.assertEqual((restored.q, restored.ambient, restored.box_radius), (3, probe.ambient, 0.5))
        for g, h in zip(probe.basis, restored.basis):
            self.assertTrue(g.allclose(h, atol=0.0))

    def test_sequence_probe_file(self):
        """Тест записи и чтения гармонической пробы"""
        probe = harmonic_probe(8)
        restored = parse_probe(format_probe(probe))
        np.testing.assert_array_equal(restored.basis[0], probe.basis[0])

    def test_probe_count_checked(self):
        """Тест несовпадения числа элементов"""
        with self.assertRaises(InputError):
            parse_probe("probe 2 1.0 sequence(2)\nseq 2 1 0.5\n")


class TestExperimentFiles(unittest.TestCase):
    def test_parse_config_text(self):
        """Тест файла `key = value` с комментариями и дефисами"""
        values = parse_config_text("command = tongues\n# comment\nomega-grid = 2000\nout = runs/t1\n")
        self.assertEqual(values, {"command": "tongues", "omega_grid": "2000", "out": "runs/t1"})

    def test_config_errors(self):
        """Тест строки без знака равенства и повторного ключа"""
        with self.assertRaises(InputError):
            parse_config_text("command tongues\n")
        with self.assertRaises(InputError):
            parse_config_text("seed = 1\nseed = 2\n")

    def test_scalars_and_lists(self):
        """Тест приведения значений"""
        self.assertEqual(parse_scalar("12"), 12)
        self.assertEqual(parse_scalar("0.5"), 0.5)
        self.assertIs(parse_scalar("yes"), True)
        self.assertEqual(parse_scalar("half_space"), "half_space")
        self.assertEqual(parse_number_list("1, 2 3", "levels"), [1.0, 2.0, 3.0])
        self.assertEqual(parse_number_list(4, "levels"), [4.0])
        with self.assertRaises(InputError):
            parse_number_list("", "levels")


if __name__ == '__main__':
    unittest.main()
