#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль валидации конфигурации эксперимента.

Вся проверка выполняется до начала вычислений: при ошибке валидации
никакие выходные файлы не создаются.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from config.reference_data import COMMAND_REQUIRED_KEYS, DEFAULTS, suggest_command
from utils.error_handler import InputError, RangeError
from utils.text_parser import parse_number_list, parse_scalar

logger = logging.getLogger(__name__)

# Ключи, общие для всех команд
COMMON_KEYS = ("command", "seed", "out", "workers", "config", "verbose")

# Числовые параметры: (тип, нижняя граница, верхняя граница)
NUMERIC_RANGES: Dict[str, tuple] = {
    "samples": (int, 100, 10_000_000),
    "box_radius": (float, 1e-12, 1e6),
    "epsilon": (float, 0.0, 1.0 - 1e-12),
    "omega_grid": (int, 1000, 1_000_000),
    "q_max": (int, 1, 256),
    "burn_in": (int, 0, 100_000),
    "m": (int, 1, 24),
    "n": (int, 1, 25),
    "depth": (int, 1, 24),
    "c": (float, 1e-300, 1e6),
    "power": (int, 3, 64),
    "qmax": (int, 1, 10_000),
    "count": (int, 1, 1000),
    "atoms": (int, 1, 100_000),
    "grid_count": (int, 1, 1_000_000),
    "box": (float, 1e-12, 1e6),
    "grid": (int, 1, 50),
    "target_dim": (int, 1, 10),
    "delta": (float, 1e-300, 1e6),
    "levels": (int, 0, 16),
}


@dataclass
class ExperimentConfig:
    """Полностью проверенное описание эксперимента."""

    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    inputs: List[str] = field(default_factory=list)
    seed: int = DEFAULTS["seed"]
    output: str = DEFAULTS["out"]
    workers: Optional[int] = None

    def get(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(key, default)


def _check_number(key: str, value: Any) -> Any:
    kind, low, high = NUMERIC_RANGES[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"Параметр {key} должен быть числом, получено {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise InputError(f"Параметр {key} должен быть целым, получено {value!r}")
        value = int(value)
    else:
        value = float(value)
    if not low <= value <= high:
        raise RangeError(f"Параметр {key}={value} вне диапазона [{low}, {high}]")
    return value


def validate_config(raw: Dict[str, Any]) -> ExperimentConfig:
    """
    Проверка сырой конфигурации (объединение файла эксперимента и флагов).

    Args:
        raw (Dict[str, Any]): Ключи и значения (строки или уже приведенные значения)

    Returns:
        ExperimentConfig: Проверенная конфигурация

    Raises:
        InputError: Неизвестная команда, пропущенные ключи, некорректные значения
        RangeError: Числовой параметр вне диапазона
    """
    values = {key: parse_scalar(v) if isinstance(v, str) else v for key, v in raw.items() if v is not None}
    command = str(values.get("command", "")).strip()
    if command not in COMMAND_REQUIRED_KEYS:
        suggestion = suggest_command(command)
        hint = f" Возможно, имелось в виду: {suggestion}" if suggestion else ""
        raise InputError(f"Неизвестная команда {command!r}.{hint}")

    missing = [key for key in COMMAND_REQUIRED_KEYS[command] if key not in values or values[key] == ""]
    if missing:
        raise InputError(f"Команда {command}: отсутствуют обязательные ключи {', '.join(missing)}")

    parameters: Dict[str, Any] = {}
    for key, value in values.items():
        if key in COMMON_KEYS:
            continue
        if key in NUMERIC_RANGES and key != "levels":
            value = _check_number(key, value)
        parameters[key] = value

    if "levels" in parameters:
        parameters["levels"] = [_check_number("levels", v) for v in parse_number_list(parameters["levels"], "levels")]
    for key in ("widths", "scales"):
        if key in parameters:
            numbers = parse_number_list(parameters[key], key)
            if any(v <= 0 for v in numbers):
                raise RangeError(f"Все значения {key} должны быть положительными")
            parameters[key] = numbers

    seed = values.get("seed", DEFAULTS["seed"])
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise InputError(f"Зерно должно быть неотрицательным целым, получено {seed!r}")
    workers = values.get("workers")
    if workers is not None and (isinstance(workers, bool) or not isinstance(workers, int) or workers < 1):
        raise InputError(f"Число потоков должно быть положительным целым, получено {workers!r}")
    output = str(values.get("out", DEFAULTS["out"]))
    if not output:
        raise InputError("Префикс выходных файлов не может быть пустым")

    inputs = [str(values[key]) for key in ("base", "family", "cloud") if key in values]
    config = ExperimentConfig(command, parameters, inputs, seed, output, workers)
    logger.debug(f"Конфигурация проверена: {config}")
    return config
