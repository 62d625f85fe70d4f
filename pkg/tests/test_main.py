#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Тесты командной строки: коды завершения, выходные файлы и конфигурация.
"""

import os
import logging
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from main import collect_raw_config, main, setup_argument_parser
from utils.error_handler import InputError
from utils.validator import validate_config


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        """Временный рабочий каталог: prevlab.log пишется в текущий каталог"""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.old_cwd = os.getcwd()
        os.chdir(self.temp_dir.name)
        self.root = Path(self.temp_dir.name)

    def tearDown(self):
        """Очистка после тестов"""
        for handler in logging.getLogger().handlers:
            handler.close()
        logging.getLogger().handlers = []
        os.chdir(self.old_cwd)
        self.temp_dir.cleanup()

    def test_sets_binary_shift(self):
        """Тест команды sets: отчет и CSV со схемой"""
        prefix = self.root / "vm5"
        code = main(["sets", "--example", "binary-shift", "--m", "5", "--out", str(prefix)])
        self.assertEqual(code, 0)
        csv_lines = (self.root / "vm5.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(csv_lines[0], "# schema=1 command=sets")
        self.assertEqual(csv_lines[1], "a,b")
        self.assertGreater(len(csv_lines), 2)
        report = (self.root / "vm5.report.txt").read_text(encoding="utf-8")
        self.assertIn("command = sets", report)
        self.assertIn("below_bound = true", report)
        self.assertTrue((self.root / "prevlab.log").exists())

    @patch('sys.argv', ['main.py', 'hopf', '--family', 'normal-form-super', '--out', 'hopf'])
    def test_hopf_from_sys_argv(self):
        """Тест команды hopf с аргументами из sys.argv"""
        self.assertEqual(main(), 0)
        text = (self.root / "hopf.csv").read_text(encoding="utf-8")
        self.assertIn("nondegenerate-supercritical", text)
        report = (self.root / "hopf.report.txt").read_text(encoding="utf-8")
        self.assertIn("label_note = ", report)
        self.assertIn("trace_mu_deriv", report)

    def test_density_reports_raw_estimates(self):
        """Тест команды density: исходные оценки rho- и rho+ в отчете"""
        prefix = self.root / "dens"
        code = main(["density", "--set", "interval:0,1", "--widths", "10,100", "--atoms", "201",
                     "--grid-count", "401", "--out", str(prefix)])
        self.assertEqual(code, 0)
        report = (self.root / "dens.report.txt").read_text(encoding="utf-8")
        self.assertIn("raw_lower = ", report)
        self.assertIn("raw_upper = ", report)
        self.assertIn("consistent = true", report)

    def test_unknown_subcommand(self):
        """Тест: неизвестная подкоманда завершает argparse с кодом 2"""
        with self.assertRaises(SystemExit) as context:
            main(["shynes"])
        self.assertEqual(context.exception.code, 2)

    def test_unknown_command_in_config(self):
        """Тест: неизвестная команда в файле эксперимента, файлы не создаются"""
        config = self.root / "experiment.txt"
        config.write_text("command = tongue\nepsilon = 0.3\n", encoding="utf-8")
        code = main(["--config", str(config), "--out", str(self.root / "bad")])
        self.assertEqual(code, 2)
        self.assertFalse((self.root / "bad.csv").exists())
        self.assertFalse((self.root / "bad.report.txt").exists())

    def test_epsilon_out_of_range(self):
        """Тест: eps вне [0, 1) дает код 2"""
        code = main(["tongues", "--epsilon", "1.5", "--out", str(self.root / "t")])
        self.assertEqual(code, 2)
        self.assertFalse((self.root / "t.csv").exists())

    def test_degenerate_cloud_is_numerical_error(self):
        """Тест: облако из одной точки дает вырожденную регрессию и код 3"""
        cloud = self.root / "cloud.csv"
        cloud.write_text("# x,y\n" + "0.5,0.5\n" * 1000, encoding="utf-8")
        code = main(["dimension", "--cloud", str(cloud), "--scales", "0.5,0.1,0.05,0.01",
                     "--out", str(self.root / "dim")])
        self.assertEqual(code, 3)

    def test_csv_independent_of_workers(self):
        """Тест: CSV побайтно совпадает при разном числе потоков"""
        texts = []
        for workers in ("1", "4"):
            prefix = self.root / f"shy-{workers}"
            code = main(["shyness", "--base", "zero", "--probe", "constant:1", "--predicate", "half_space",
                         "--samples", "1000", "--seed", "7", "--workers", workers, "--out", str(prefix)])
            self.assertEqual(code, 0)
            texts.append((self.root / f"shy-{workers}.csv").read_bytes())
        self.assertEqual(texts[0], texts[1])


class TestConfiguration(unittest.TestCase):
    def setUp(self):
        """Подготовка временного каталога"""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.config_path = Path(self.temp_dir.name) / "experiment.txt"
        self.config_path.write_text("# эксперимент\nepsilon = 0.1\nseed = 3\nomega-grid = 2000\n",
                                    encoding="utf-8")

    def tearDown(self):
        """Очистка после тестов"""
        self.temp_dir.cleanup()

    def test_flags_override_config_file(self):
        """Тест: флаги имеют приоритет над файлом эксперимента"""
        args = setup_argument_parser().parse_args(
            ["tongues", "--config", str(self.config_path), "--epsilon", "0.2"])
        raw = collect_raw_config(args)
        self.assertEqual(raw["epsilon"], "0.2")
        self.assertEqual(raw["seed"], "3")
        self.assertEqual(raw["omega_grid"], "2000")
        config = validate_config(raw)
        self.assertEqual(config.command, "tongues")
        self.assertEqual(config.seed, 3)
        self.assertEqual(config.get("epsilon"), 0.2)
        self.assertEqual(config.get("omega_grid"), 2000)

    def test_predicate_parameters(self):
        """Тест: параметры свойства через --param"""
        args = setup_argument_parser().parse_args(
            ["shyness", "--base", "zero", "--probe", "constant:1", "--predicate", "half_space",
             "--param", "threshold=0.25"])
        raw = collect_raw_config(args)
        self.assertEqual(raw["param.threshold"], "0.25")
        self.assertEqual(validate_config(raw).get("param.threshold"), 0.25)

    def test_malformed_parameter(self):
        """Тест ошибки формата --param"""
        args = setup_argument_parser().parse_args(
            ["shyness", "--base", "zero", "--probe", "constant:1", "--predicate", "half_space",
             "--param", "threshold"])
        with self.assertRaises(InputError):
            collect_raw_config(args)

    def test_unknown_command_suggestion(self):
        """Тест подсказки ближайшей команды"""
        with self.assertRaises(InputError) as context:
            validate_config({"command": "tongue", "epsilon": "0.3"})
        self.assertIn("tongues", str(context.exception))

    def test_missing_required_key(self):
        """Тест пропущенного обязательного ключа"""
        with self.assertRaises(InputError):
            validate_config({"command": "tongues"})

    def test_negative_seed(self):
        """Тест отрицательного зерна"""
        with self.assertRaises(InputError):
            validate_config({"command": "tongues", "epsilon": "0.3", "seed": "-1"})


if __name__ == '__main__':
    unittest.main()
