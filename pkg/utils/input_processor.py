#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль загрузки входных данных: файлы в текстовых форматах лаборатории,
встроенные элементы по имени и облака точек в CSV.
"""

import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from config.reference_data import BUILTIN_BASES, BUILTIN_FAMILIES, LIMITS
from lab.hopf import PlanarFamily
from lab.measures import DiscreteMeasure, IntervalSet
from lab.probes import Element
from utils.error_handler import InputError, RangeError
from utils.text_parser import (parse_config_text, parse_element, parse_intervals, parse_measure,
                               parse_polymap)

logger = logging.getLogger(__name__)


def read_text(file_path: Union[str, Path]) -> str:
    """
    Чтение текстового файла.

    Args:
        file_path (Union[str, Path]): Путь к файлу

    Returns:
        str: Содержимое файла

    Raises:
        InputError: Если файл не существует или не читается
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        logger.error(f"Файл не найден: {file_path}")
        raise InputError(f"Файл не найден: {file_path}")
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Ошибка при чтении файла {file_path}: {str(e)}")
        raise InputError(f"Ошибка при чтении файла {file_path}: {str(e)}")
    logger.debug(f"Прочитан файл {file_path} ({len(text)} символов)")
    return text


def load_config_file(file_path: Union[str, Path]) -> Dict[str, str]:
    """Загрузка файла эксперимента `key = value`."""
    values = parse_config_text(read_text(file_path))
    logger.info(f"Загружен файл эксперимента {file_path}")
    return values


def load_element(reference: str) -> Element:
    """
    Базовый элемент: имя встроенного элемента или путь к файлу.

    Raises:
        InputError: Если ссылка не является ни встроенным именем, ни файлом
    """
    if reference in BUILTIN_BASES:
        return parse_element(BUILTIN_BASES[reference])
    if not Path(reference).is_file():
        raise InputError(f"Неизвестный базовый элемент {reference!r}. "
                         f"Встроенные: {', '.join(sorted(BUILTIN_BASES))}")
    return parse_element(read_text(reference))


def load_family(reference: str) -> PlanarFamily:
    """Семейство векторных полей: встроенное имя или файл `family 3 2`."""
    if reference in BUILTIN_FAMILIES:
        return PlanarFamily(parse_polymap(BUILTIN_FAMILIES[reference]), name=reference)
    if not Path(reference).is_file():
        raise InputError(f"Неизвестное семейство {reference!r}. "
                         f"Встроенные: {', '.join(sorted(BUILTIN_FAMILIES))}")
    return PlanarFamily(parse_polymap(read_text(reference)), name=Path(reference).stem)


def dyadic_measures(count: int) -> List[DiscreteMeasure]:
    """Равномерные меры на {0, 2^-n} при n = 1..count."""
    return [DiscreteMeasure.uniform([[0.0], [2.0 ** (-n)]]) for n in range(1, count + 1)]


def load_measures(references: List[str]) -> List[DiscreteMeasure]:
    """
    Меры из файлов `measure d k`; ссылка `dyadic:N` раскрывается в N
    равномерных двухатомных мер.
    """
    measures: List[DiscreteMeasure] = []
    for reference in references:
        if reference.startswith("dyadic:"):
            try:
                count = int(reference.split(":", 1)[1])
            except ValueError:
                raise InputError(f"Некорректная ссылка {reference!r}: ожидалось dyadic:N")
            if not 1 <= count <= 40:
                raise RangeError(f"dyadic:N допускает 1 <= N <= 40, получено {count}")
            measures.extend(dyadic_measures(count))
        else:
            measures.append(parse_measure(read_text(reference)))
    if not measures:
        raise InputError("Не задано ни одной меры")
    return measures


def load_interval_set(file_path: Union[str, Path]) -> IntervalSet:
    return parse_intervals(read_text(file_path))


def load_cloud(file_path: Union[str, Path]) -> np.ndarray:
    """
    Облако точек из CSV: строка на точку, координаты через запятую,
    строки-комментарии начинаются с `#`.

    Raises:
        InputError: При нечисловых данных
        RangeError: Если точек больше 10^5
    """
    read_text(file_path)
    try:
        points = np.loadtxt(file_path, delimiter=',', comments='#', ndmin=2)
    except ValueError as e:
        logger.error(f"Ошибка при разборе облака {file_path}: {str(e)}")
        raise InputError(f"Ошибка при разборе облака {file_path}: {str(e)}")
    if points.shape[0] > LIMITS["max_cloud_points"]:
        raise RangeError(f"Облако содержит {points.shape[0]} точек, предел {LIMITS['max_cloud_points']}")
    logger.info(f"Загружено облако {file_path}: {points.shape[0]} точек в R^{points.shape[1]}")
    return points
