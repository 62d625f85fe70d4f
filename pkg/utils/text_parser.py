#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль разбора текстовых форматов лаборатории.

Поддерживаемые форматы:
- многочленное отображение: заголовок `poly n m` (или `family 3 2`), затем
  строки `e1 ... en : c1 ... cm`;
- усеченная последовательность: `seq N v1 ... vN`;
- дискретная мера: `measure d k`, затем k строк `x1 ... xd : w`;
- множество интервалов: `intervals k`, затем k строк `a b`;
- проба: `probe q R ambient`, затем q элементов в своих форматах;
- файл эксперимента: строки `key = value`, комментарии после `#`.

Пример использования:
    from utils.text_parser import parse_polymap

    f = parse_polymap("poly 1 1\\n1 : 1\\n2 : -1\\n")
"""

import re
import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from lab.measures import DiscreteMeasure, IntervalSet
from lab.polyjet import PolyMap
from lab.probes import (Element, Probe, constant_probe, harmonic_probe, linear_probe,
                        polynomial_probe, sequence_ambient)
from utils.error_handler import InputError

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(r'^(poly|family|seq|measure|intervals|probe)\b\s*(.*)$')
TERM_PATTERN = re.compile(r'^([\d\s]+):(.+)$')
CONFIG_PATTERN = re.compile(r'^([A-Za-z_][\w.\-]*)\s*=\s*(.*)$')
PROBE_SPEC_PATTERN = re.compile(r'^(constant|harmonic|polynomial|linear)(?::([\d,\s]+))?$')


def _clean_lines(text: str) -> List[str]:
    """Строки без комментариев и пустых строк."""
    lines = []
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def _floats(tokens: Sequence[str], where: str) -> List[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise InputError(f"Ожидались числа в {where}: {' '.join(tokens)}")


def _ints(tokens: Sequence[str], where: str) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"Ожидались целые числа в {where}: {' '.join(tokens)}")


def _header(line: str, expected: Sequence[str]) -> Tuple[str, List[str]]:
    match = HEADER_PATTERN.match(line)
    if not match or match.group(1) not in expected:
        raise InputError(f"Ожидался заголовок {' или '.join(expected)}, получено: {line!r}")
    return match.group(1), match.group(2).split()


# ----------------------------------------------------------------------
# Многочлены и последовательности
# ----------------------------------------------------------------------

def _parse_terms(lines: Sequence[str], n: int, m: int) -> Dict[Tuple[int, ...], List[float]]:
    table: Dict[Tuple[int, ...], List[float]] = {}
    for number, line in enumerate(lines, 1):
        match = TERM_PATTERN.match(line)
        if not match:
            raise InputError(f"Строка {number}: ожидалось `e1 ... en : c1 ... cm`, получено {line!r}")
        exps = _ints(match.group(1).split(), f"строке {number}")
        coeffs = _floats(match.group(2).split(), f"строке {number}")
        if len(exps) != n or len(coeffs) != m:
            raise InputError(f"Строка {number}: нужно {n} показателей и {m} коэффициентов")
        key = tuple(exps)
        if key in table:
            table[key] = [a + b for a, b in zip(table[key], coeffs)]
        else:
            table[key] = coeffs
    return table


def parse_polymap(text: str) -> PolyMap:
    """
    Разбор многочленного отображения в формате `poly n m` / `family 3 2`.

    Args:
        text (str): Текст

    Returns:
        PolyMap: Отображение

    Raises:
        InputError: При нарушении формата
    """
    lines = _clean_lines(text)
    if not lines:
        raise InputError("Пустое описание многочлена")
    kind, args = _header(lines[0], ("poly", "family"))
    if len(args) != 2:
        raise InputError(f"Заголовок {kind} требует две размерности: {lines[0]!r}")
    n, m = _ints(args, "заголовке")
    if kind == "family" and (n, m) != (3, 2):
        raise InputError(f"Семейство должно иметь заголовок `family 3 2`, получено `family {n} {m}`")
    return PolyMap(n, m, _parse_terms(lines[1:], n, m))


def format_polymap(f: PolyMap, header: str = "poly") -> str:
    """Текст отображения; коэффициенты записываются через repr для точного чтения."""
    lines = [f"{header} {f.domain_dim} {f.range_dim}"]
    for alpha, vec in f.coefficients.items():
        lines.append(" ".join(str(e) for e in alpha) + " : " + " ".join(repr(float(c)) for c in vec))
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> np.ndarray:
    """Разбор последовательности `seq N v1 ... vN` (значения могут идти по нескольким строкам)."""
    lines = _clean_lines(text)
    if not lines:
        raise InputError("Пустое описание последовательности")
    _, args = _header(lines[0], ("seq",))
    tokens = args + " ".join(lines[1:]).split()
    if not tokens:
        raise InputError("Заголовок seq требует длину")
    length = _ints(tokens[:1], "заголовке seq")[0]
    values = _floats(tokens[1:], "последовательности")
    if len(values) != length:
        raise InputError(f"Ожидалось {length} значений, получено {len(values)}")
    return np.array(values)


def format_sequence(values: Sequence[float]) -> str:
    values = np.asarray(values, dtype=float)
    return f"seq {values.shape[0]} " + " ".join(repr(float(v)) for v in values) + "\n"


def parse_element(text: str) -> Element:
    """Многочлен или последовательность в зависимости от заголовка."""
    lines = _clean_lines(text)
    if lines and lines[0].startswith("seq"):
        return parse_sequence(text)
    return parse_polymap(text)


def format_element(element: Element) -> str:
    if isinstance(element, PolyMap):
        return format_polymap(element)
    return format_sequence(element)


# ----------------------------------------------------------------------
# Меры и множества интервалов
# ----------------------------------------------------------------------

def parse_measure(text: str) -> DiscreteMeasure:
    """
    Разбор дискретной меры `measure d k`.

    Raises:
        InputError: При нарушении формата или числа атомов
    """
    lines = _clean_lines(text)
    if not lines:
        raise InputError("Пустое описание меры")
    _, args = _header(lines[0], ("measure",))
    if len(args) != 2:
        raise InputError(f"Заголовок measure требует d и k: {lines[0]!r}")
    d, k = _ints(args, "заголовке measure")
    if len(lines) - 1 != k:
        raise InputError(f"Ожидалось {k} атомов, получено {len(lines) - 1}")
    points, weights = [], []
    for number, line in enumerate(lines[1:], 1):
        if ':' not in line:
            raise InputError(f"Атом {number}: ожидалось `x1 ... xd : w`")
        left, right = line.split(':', 1)
        point = _floats(left.split(), f"атоме {number}")
        weight = _floats(right.split(), f"атоме {number}")
        if len(point) != d or len(weight) != 1:
            raise InputError(f"Атом {number}: нужно {d} координат и один вес")
        points.append(point)
        weights.append(weight[0])
    return DiscreteMeasure(points, weights)


def format_measure(mu: DiscreteMeasure) -> str:
    lines = [f"measure {mu.dim} {len(mu)}"]
    for point, weight in mu.atoms:
        lines.append(" ".join(repr(float(x)) for x in point) + " : " + repr(float(weight)))
    return "\n".join(lines) + "\n"


def parse_intervals(text: str, ambient: Tuple[float, float] = (0.0, 1.0)) -> IntervalSet:
    """Разбор множества интервалов `intervals k`."""
    lines = _clean_lines(text)
    if not lines:
        raise InputError("Пустое описание множества интервалов")
    _, args = _header(lines[0], ("intervals",))
    k = _ints(args[:1], "заголовке intervals")[0] if args else 0
    if len(lines) - 1 != k:
        raise InputError(f"Ожидалось {k} интервалов, получено {len(lines) - 1}")
    intervals = []
    for number, line in enumerate(lines[1:], 1):
        bounds = _floats(line.split(), f"интервале {number}")
        if len(bounds) != 2 or not bounds[0] < bounds[1]:
            raise InputError(f"Интервал {number}: нужно `a b` с a < b")
        intervals.append((bounds[0], bounds[1]))
    return IntervalSet(intervals, ambient)


def format_intervals(interval_set: IntervalSet) -> str:
    lines = [f"intervals {len(interval_set)}"]
    lines += [f"{a!r} {b!r}" for a, b in interval_set.intervals]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Пробы
# ----------------------------------------------------------------------

def parse_probe_spec(spec: str, box_radius: float = 1.0) -> Probe:
    """
    Проба по краткому описанию: `constant:m`, `harmonic:N`,
    `polynomial:n,m,k` или `linear:n,m`.

    Raises:
        InputError: Если описание не распознано
    """
    match = PROBE_SPEC_PATTERN.match(spec.strip())
    if not match:
        raise InputError(f"Неизвестное описание пробы: {spec!r}")
    kind = match.group(1)
    args = _ints([a for a in (match.group(2) or "").replace(',', ' ').split()], "описании пробы")
    builders = {
        "constant": (constant_probe, (1, 2)),
        "harmonic": (harmonic_probe, (1, 1)),
        "polynomial": (polynomial_probe, (3, 3)),
        "linear": (linear_probe, (2, 2)),
    }
    builder, (low, high) = builders[kind]
    if not low <= len(args) <= high:
        raise InputError(f"Проба {kind} требует от {low} до {high} целых аргументов")
    return builder(*args, box_radius=box_radius)


def format_probe(probe: Probe) -> str:
    """Текст пробы: заголовок `probe q R ambient` и элементы базиса."""
    parts = [f"probe {probe.q} {probe.box_radius!r} {probe.ambient}"]
    parts += [format_element(g).rstrip("\n") for g in probe.basis]
    return "\n".join(parts) + "\n"


def parse_probe(text: str) -> Probe:
    """Разбор пробы, записанной format_probe."""
    lines = _clean_lines(text)
    if not lines:
        raise InputError("Пустое описание пробы")
    _, args = _header(lines[0], ("probe",))
    if len(args) != 3:
        raise InputError(f"Заголовок probe требует q, R и пространство: {lines[0]!r}")
    q = _ints(args[:1], "заголовке probe")[0]
    radius = _floats(args[1:2], "заголовке probe")[0]
    ambient = args[2]

    blocks: List[List[str]] = []
    for line in lines[1:]:
        if HEADER_PATTERN.match(line):
            blocks.append([line])
        elif blocks:
            blocks[-1].append(line)
        else:
            raise InputError(f"Строка вне элемента пробы: {line!r}")
    if len(blocks) != q:
        raise InputError(f"Ожидалось {q} элементов пробы, получено {len(blocks)}")
    basis = tuple(parse_element("\n".join(block)) for block in blocks)
    if ambient.startswith("sequence") and ambient != sequence_ambient(len(basis[0])):
        raise InputError(f"Пространство {ambient} не совпадает с длиной элементов")
    return Probe(ambient, basis, radius, name=f"file:{ambient}")


# ----------------------------------------------------------------------
# Файлы экспериментов
# ----------------------------------------------------------------------

def parse_scalar(value: str) -> Any:
    """Число, логическое значение или строка."""
    lowered = value.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def parse_number_list(value: Any, where: str) -> List[float]:
    """Список чисел через запятую."""
    if isinstance(value, (int, float)):
        return [float(value)]
    tokens = [t for t in str(value).replace(',', ' ').split() if t]
    if not tokens:
        raise InputError(f"Пустой список в {where}")
    return _floats(tokens, where)


def parse_config_text(text: str) -> Dict[str, str]:
    """
    Разбор файла эксперимента `key = value`.

    Raises:
        InputError: При строке без знака равенства или повторном ключе
    """
    values: Dict[str, str] = {}
    for number, line in enumerate(_clean_lines(text), 1):
        match = CONFIG_PATTERN.match(line)
        if not match:
            raise InputError(f"Строка {number} файла эксперимента: ожидалось `key = value`, получено {line!r}")
        key, value = match.group(1).replace('-', '_'), match.group(2).strip()
        if key in values:
            raise InputError(f"Повторный ключ {key!r} в файле эксперимента")
        values[key] = value
    logger.debug(f"Файл эксперимента: {len(values)} ключей")
    return values
