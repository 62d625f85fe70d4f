#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Главный модуль лаборатории превалентности: пакетный интерфейс командной строки.

Команды: shyness, tongues, hopf, sets, convolve, density, dimension.
Каждый запуск пишет `<out>.report.txt` и `<out>.csv`; коды завершения:
0 успех, 2 ошибка валидации, 3 численная ошибка.
"""

import sys
import math
import logging
import argparse
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.reference_data import CSV_SCHEMAS, CSV_SCHEMA_VERSION, DEFAULTS
from lab.dynamics import CLOUD_GENERATORS, box_counting_dimension, injectivity_check, tongue_measure
from lab.engine import build_predicate, estimate_failure_measure, failure_density_profile
from lab.hopf import LABEL_NOTE, hopf_classify
from lab.measures import (binary_shift_limit, binary_shift_set, binary_shift_union,
                          binary_shift_union_measure, box_indicator, convolution_tail_bound,
                          convolve, convolve_sequence, density_report, empty_set, full_space,
                          liouville_neighborhood, uniform_interval_measure)
from utils.error_handler import EXIT_OK, InputError, handle_errors
from utils.input_processor import (load_cloud, load_config_file, load_element, load_family,
                                   load_interval_set, load_measures, read_text)
from utils.output_formatter import write_outputs
from utils.seeding import task_generator
from utils.text_parser import parse_probe, parse_probe_spec
from utils.validator import ExperimentConfig, validate_config

logger = logging.getLogger(__name__)

Fields = List[Tuple[str, Any]]
Rows = List[Dict[str, Any]]

SUPERCRITICAL_NOTE = "negative lyapunov quantity = supercritical (stable cycle), positive = subcritical"

# Флаги команд: имя флага -> справка
COMMAND_FLAGS: Dict[str, Dict[str, str]] = {
    "shyness": {
        "base": "Базовый элемент: встроенное имя или файл poly/seq",
        "probe": "Проба: constant:m, harmonic:N, polynomial:n,m,k, linear:n,m или файл",
        "predicate": "Свойство из реестра",
        "samples": "Размер выборки N (по умолчанию 10000)",
        "box-radius": "Радиус коробки R (по умолчанию 1)",
        "levels": "Уровни профиля плотности через запятую (q <= 2)",
    },
    "tongues": {
        "epsilon": "Амплитуда eps в [0, 1)",
        "omega-grid": "Число узлов сетки omega (по умолчанию 4000)",
        "q-max": "Наибольший проверяемый период (по умолчанию 32)",
        "burn-in": "Число итераций прогрева",
    },
    "hopf": {
        "family": "Семейство: встроенное имя или файл `family 3 2`",
        "box": "Полуширина области поиска кандидатов",
        "grid": "Число узлов сетки по каждой оси",
    },
    "sets": {
        "example": "binary-shift, binary-shift-limit, liouville или file",
        "m": "Номер множества V_m",
        "n": "Номер множества U_n",
        "depth": "Число объединяемых множеств U_n",
        "c": "Константа окрестности Лиувилля",
        "power": "Показатель окрестности Лиувилля",
        "qmax": "Наибольший знаменатель",
        "intervals": "Файл `intervals k` для example=file",
    },
    "convolve": {
        "measures": "Файлы `measure d k` через запятую или dyadic:N",
        "count": "Число мер в усеченной бесконечной свертке",
    },
    "density": {
        "set": "Множество: interval:a,b, full, empty или intervals:ФАЙЛ",
        "widths": "Полуширины W равномерных мер через запятую",
        "atoms": "Число атомов каждой меры",
        "grid-count": "Число узлов сетки сдвигов",
    },
    "dimension": {
        "cloud": "Облако: cantor, dust, square, segment или CSV файл",
        "scales": "Масштабы ящиков через запятую",
        "target-dim": "Размерность образа для проверки инъективности",
        "delta": "Порог разделения для проверки инъективности",
    },
}


def setup_logging(verbose: bool = False) -> None:
    """
    Настройка системы логирования с консольным и файловым выводом.

    Args:
        verbose (bool): Включить подробное логирование
    """
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers = []

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    root_logger.addHandler(console_handler)

    # В файл всегда пишутся подробные логи
    file_handler = logging.FileHandler('prevlab.log', encoding='utf-8')
    file_handler.setFormatter(formatter)
    file_handler.setLevel(logging.DEBUG)
    root_logger.addHandler(file_handler)

    for logger_name in ['matplotlib', 'numba', 'urllib3']:
        logging.getLogger(logger_name).setLevel(logging.WARNING)


def _schema_help(command: str) -> str:
    return f"CSV (schema={CSV_SCHEMA_VERSION}): " + ",".join(CSV_SCHEMAS[command])


def setup_argument_parser() -> argparse.ArgumentParser:
    """
    Настройка парсера аргументов командной строки.

    Все флаги имеют значение по умолчанию SUPPRESS, чтобы значения из
    файла эксперимента переопределялись только явно заданными флагами.

    Returns:
        argparse.ArgumentParser: Настроенный парсер аргументов
    """
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help='Файл эксперимента `key = value`')
    common.add_argument('--seed', type=int, help='Главное зерно (по умолчанию 0)')
    common.add_argument('--workers', type=int, help='Число потоков (не влияет на результат)')
    common.add_argument('--out', help='Префикс выходных файлов (по умолчанию prevlab)')
    common.add_argument('-v', '--verbose', action='store_true', help='Включить подробное логирование')

    parser = argparse.ArgumentParser(
        description='Лаборатория превалентности: численные эксперименты с «почти всеми» отображениями',
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    for command, flags in COMMAND_FLAGS.items():
        sub = subparsers.add_parser(command, parents=[common], argument_default=argparse.SUPPRESS,
                                    help=f"Команда {command}", description=_schema_help(command))
        for flag, help_text in flags.items():
            sub.add_argument(f'--{flag}', dest=flag.replace('-', '_'), help=help_text)
        if command == "shyness":
            sub.add_argument('--param', action='append', metavar='KEY=VALUE',
                             help='Параметр свойства (можно повторять)')
    return parser


def collect_raw_config(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Объединение файла эксперимента и флагов: флаги имеют приоритет.

    Raises:
        InputError: При некорректном параметре --param
    """
    values = dict(vars(args))
    raw: Dict[str, Any] = {}
    config_path = values.pop('config', None)
    if config_path:
        raw.update(load_config_file(config_path))
    for item in values.pop('param', None) or []:
        if '=' not in item:
            raise InputError(f"Параметр свойства должен иметь вид KEY=VALUE: {item!r}")
        key, value = item.split('=', 1)
        raw[f"param.{key.strip()}"] = value.strip()
    values.pop('verbose', None)
    raw.update({key: value for key, value in values.items() if value is not None})
    return raw


# ----------------------------------------------------------------------
# Команды
# ----------------------------------------------------------------------

def run_shyness(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    base = load_element(str(config.get("base")))
    radius = float(config.get("box_radius", DEFAULTS["box_radius"]))
    probe_ref = str(config.get("probe"))
    try:
        probe = parse_probe_spec(probe_ref, radius)
    except InputError:
        probe = parse_probe(read_text(probe_ref)).with_radius(radius)
    params = {key[len("param."):]: value for key, value in config.parameters.items() if key.startswith("param.")}
    predicate = build_predicate(str(config.get("predicate")), params)
    samples = int(config.get("samples", DEFAULTS["samples"]))

    report = estimate_failure_measure(base, probe, predicate, samples, config.seed, config.workers,
                                      base_name=str(config.get("base")))
    low, high = report.confidence_interval
    fields: Fields = [
        ("base", report.base), ("probe", report.probe), ("predicate", report.predicate),
        ("samples", report.samples), ("holds", report.holds), ("fails", report.fails),
        ("undecided", report.undecided), ("failure_fraction", report.failure_fraction),
        ("ci_low", low), ("ci_high", high), ("seed", report.seed), ("box_radius", report.box_radius),
        ("note", report.note),
    ]
    if "levels" in config.parameters:
        profile = failure_density_profile(predicate, probe, base, config.get("levels"), config.workers)
        for level, fraction, coverage in profile.rows():
            fields.append((f"profile_level_{level}", (fraction, coverage)))
    return fields, [report.csv_row()]


def run_tongues(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    scan = tongue_measure(float(config.get("epsilon")),
                          int(config.get("omega_grid", DEFAULTS["omega_grid"])),
                          int(config.get("q_max", DEFAULTS["q_max"])),
                          int(config.get("burn_in", DEFAULTS["tongue_burn_in"])),
                          config.seed, config.workers)
    fields: Fields = [
        ("epsilon", scan.epsilon), ("omega_grid", int(scan.omegas.shape[0])), ("q_max", scan.q_max),
        ("measure", scan.measure), ("locked", int(np.count_nonzero(scan.locked))),
        ("undecided", scan.undecided_count),
        ("per_period", ",".join(f"{q}:{c}" for q, c in sorted(scan.per_period.items())) or "none"),
        ("truncation_note", scan.truncation_note), ("seed", scan.seed),
    ]
    rows = [{"omega": float(w), "locked": bool(l), "period": int(p), "multiplier": float(mult)}
            for w, l, p, mult in zip(scan.omegas, scan.locked, scan.period, scan.multiplier)]
    return fields, rows


def run_hopf(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    family = load_family(str(config.get("family")))
    reports = hopf_classify(family, float(config.get("box", DEFAULTS["hopf_box"])),
                            int(config.get("grid", DEFAULTS["hopf_grid"])), config.workers)
    fields: Fields = [("family", family.name), ("candidates", len(reports)),
                      ("convention", SUPERCRITICAL_NOTE), ("label_note", LABEL_NOTE)]
    rows = []
    for index, report in enumerate(reports):
        fields.append((f"candidate_{index}", f"mu0={report.mu0!r} {report.classification} margin={report.margin!r}"))
        rows.append({"mu0": report.mu0, "x": report.x0[0], "y": report.x0[1], "omega": report.omega,
                     "trace_mu_deriv": report.trace_mu_derivative, "lyapunov": report.lyapunov_quantity,
                     "classification": report.classification})
    return fields, rows


def run_sets(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    example = str(config.get("example"))
    fields: Fields = [("example", example)]
    if example == "binary-shift":
        if "n" in config.parameters and "m" not in config.parameters:
            n = int(config.get("n"))
            result = binary_shift_set(n)
            fields += [("n", n), ("exact_measure", 2.0 ** (-n))]
        else:
            m = int(config.get("m", 1))
            depth = int(config.get("depth", min(10, 25 - m)))
            result = binary_shift_union(m, depth)
            exact: Fraction = binary_shift_union_measure(m)
            fields += [("m", m), ("depth", depth), ("exact_measure_depth_25", float(exact)),
                       ("bound", 2.0 ** (-m)), ("below_bound", exact < Fraction(1, 2 ** m))]
    elif example == "binary-shift-limit":
        m = int(config.get("m", 2))
        depth = int(config.get("depth", 12))
        result = binary_shift_limit(m, depth)
        fields += [("m_max", m), ("depth", depth)]
    elif example == "liouville":
        c, power, qmax = float(config.get("c", 0.01)), int(config.get("power", 3)), int(config.get("qmax", 100))
        result = liouville_neighborhood(c, power, qmax)
        union_bound = math.fsum((q + 1) * 2.0 * c / q ** power for q in range(1, qmax + 1))
        fields += [("c", c), ("power", power), ("qmax", qmax), ("union_bound", union_bound)]
    elif example == "file":
        if "intervals" not in config.parameters:
            raise InputError("example=file требует ключ intervals")
        result = load_interval_set(str(config.get("intervals")))
    else:
        raise InputError(f"Неизвестный пример множества: {example}")
    fields += [("intervals", len(result)), ("measure", result.measure())]
    return fields, [{"a": a, "b": b} for a, b in result.intervals]


def run_convolve(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    references = [r.strip() for r in str(config.get("measures")).split(",") if r.strip()]
    measures = load_measures(references)
    fields: Fields = [("inputs", len(measures))]
    if "count" in config.parameters:
        count = int(config.get("count"))
        result = convolve_sequence(measures, count)
        fields += [("count", count), ("tail_bound", convolution_tail_bound(count))]
    else:
        result = measures[0]
        for mu in measures[1:]:
            result = convolve(result, mu)
    fields += [("atoms", len(result)), ("total_mass", result.total_mass), ("dim", result.dim)]
    rows = [{"point": " ".join(repr(float(x)) for x in point), "weight": float(weight)}
            for point, weight in result.atoms]
    return fields, rows


def _density_indicator(description: str):
    if description == "full":
        return full_space
    if description == "empty":
        return empty_set
    if description.startswith("interval:"):
        try:
            a, b = (float(v) for v in description.split(":", 1)[1].split(","))
        except ValueError:
            raise InputError(f"Ожидалось interval:a,b, получено {description!r}")
        return box_indicator([a], [b])
    if description.startswith("intervals:"):
        return load_interval_set(description.split(":", 1)[1]).indicator()
    raise InputError(f"Неизвестное описание множества: {description!r}")


def run_density(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    indicator = _density_indicator(str(config.get("set")))
    widths = [float(w) for w in config.get("widths")]
    atoms = int(config.get("atoms", 2001))
    grid_count = int(config.get("grid_count", 4001))
    reach = max(widths) + 2.0
    translations = np.linspace(-reach, reach, grid_count).reshape(-1, 1)

    family = [uniform_interval_measure(-w, w, atoms) for w in widths]
    rows = []
    for width, mu in zip(widths, family):
        single = density_report(indicator, [mu], translations)
        rows.append({"width": width, "lower": single.lower, "upper": single.upper})
    overall = density_report(indicator, family, translations)
    fields: Fields = [
        ("set", str(config.get("set"))), ("widths", widths), ("atoms", atoms), ("grid_count", grid_count),
        ("lower", overall.lower), ("upper", overall.upper), ("raw_lower", overall.raw_lower),
        ("raw_upper", overall.raw_upper), ("consistent", overall.consistent),
        ("note", overall.note),
    ]
    return fields, rows


def run_dimension(config: ExperimentConfig) -> Tuple[Fields, Rows]:
    cloud_ref = str(config.get("cloud"))
    if cloud_ref in CLOUD_GENERATORS:
        points = CLOUD_GENERATORS[cloud_ref](config.seed)
    else:
        points = load_cloud(cloud_ref)
    if "scales" in config.parameters:
        scales = [float(s) for s in config.get("scales")]
    elif cloud_ref == "cantor":
        scales = [3.0 ** (-k) for k in range(2, 8)]
    elif cloud_ref == "dust":
        scales = [3.0 ** (-k) for k in range(2, 7)]
    else:
        scales = [2.0 ** (-k) for k in range(2, 7)]

    result = box_counting_dimension(points, scales)
    fields: Fields = [("cloud", cloud_ref), ("points", int(points.shape[0])), ("ambient_dim", int(points.shape[1])),
                      ("dimension", result.dimension)]
    if "target_dim" in config.parameters:
        rng = task_generator(config.seed, "dimension", 0)
        linear_map = rng.standard_normal((int(config.get("target_dim")), points.shape[1]))
        verdict = injectivity_check(points, linear_map, float(config.get("delta", 1e-3)))
        fields += [("injective", verdict.injective), ("collisions", verdict.collisions)]
    rows = [{"scale": s, "count": c} for s, c in zip(result.scales, result.counts)]
    return fields, rows


COMMANDS = {
    "shyness": run_shyness,
    "tongues": run_tongues,
    "hopf": run_hopf,
    "sets": run_sets,
    "convolve": run_convolve,
    "density": run_density,
    "dimension": run_dimension,
}


def run(config: ExperimentConfig) -> int:
    """
    Выполнение эксперимента и запись `<out>.report.txt` и `<out>.csv`.

    Args:
        config (ExperimentConfig): Проверенная конфигурация

    Returns:
        int: Код завершения (0 при успехе)
    """
    logger.info(f"Команда {config.command}: начало (seed={config.seed})")
    fields, rows = COMMANDS[config.command](config)
    write_outputs(config.output, config.command, fields, rows)
    logger.info(f"Команда {config.command}: завершено")
    return EXIT_OK


@handle_errors
def main(argv: Optional[Sequence[str]] = None) -> int:
    """Основная функция приложения."""
    parser = setup_argument_parser()
    args = parser.parse_args(argv)
    setup_logging(getattr(args, 'verbose', False))
    config = validate_config(collect_raw_config(args))
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
