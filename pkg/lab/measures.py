#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль мер: дискретные меры с компактным носителем и их свертки,
конечные объединения интервалов с точной мерой Лебега и оценка
относительных плотностей rho-/rho+ по конечному семейству мер.

Множества в R^d задаются индикаторами: функция, принимающая массив
точек формы (k, d) и возвращающая булев массив длины k.
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.reference_data import LIMITS, TOLERANCES
from utils.error_handler import InputError, RangeError

logger = logging.getLogger(__name__)

SetIndicator = Callable[[np.ndarray], np.ndarray]

MERGE_TOL = TOLERANCES["atom_merge"]


# ----------------------------------------------------------------------
# Дискретные меры
# ----------------------------------------------------------------------

def _merge_atoms(points: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Канонизация атомов: лексикографическая сортировка и слияние соседей ближе tol."""
    order = np.lexsort(points.T[::-1])
    points = points[order]
    weights = weights[order]
    if points.shape[0] <= 1:
        return points, weights
    close = np.all(np.abs(np.diff(points, axis=0)) <= tol, axis=1)
    group = np.concatenate([[0], np.cumsum(~close)])
    merged_weights = np.zeros(group[-1] + 1)
    np.add.at(merged_weights, group, weights)
    first = np.concatenate([[True], ~close])
    return points[first], merged_weights


class DiscreteMeasure:
    """
    Конечная сумма взвешенных точечных масс в R^d.

    Атомы хранятся в каноническом порядке (лексикографически), совпадающие
    с точностью 1e-12 точки слиты.
    """

    __slots__ = ("_points", "_weights", "_mass")

    def __init__(self, points: Sequence[Sequence[float]], weights: Sequence[float]):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if points.shape[0] < 1:
            raise InputError("Мера должна содержать хотя бы один атом")
        if points.shape[0] != weights.shape[0]:
            raise InputError(f"Число точек {points.shape[0]} не совпадает с числом весов {weights.shape[0]}")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InputError("Веса атомов должны быть неотрицательными и конечными")
        points, weights = _merge_atoms(points, weights)
        points.flags.writeable = False
        weights.flags.writeable = False
        self._points = points
        self._weights = weights
        self._mass = math.fsum(weights)

    @classmethod
    def dirac(cls, point: Sequence[float]) -> "DiscreteMeasure":
        point = np.atleast_1d(np.asarray(point, dtype=float))
        return cls(point.reshape(1, -1), [1.0])

    @classmethod
    def uniform(cls, points: Sequence[Sequence[float]]) -> "DiscreteMeasure":
        points = np.asarray(points, dtype=float)
        count = points.shape[0]
        return cls(points, np.full(count, 1.0 / count))

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def total_mass(self) -> float:
        return self._mass

    @property
    def atoms(self) -> List[Tuple[np.ndarray, float]]:
        return list(zip(self._points, self._weights))

    def __len__(self) -> int:
        return self._points.shape[0]

    def is_normalized(self, tol: float = MERGE_TOL) -> bool:
        return abs(self._mass - 1.0) <= tol

    def diameter(self) -> float:
        """Диаметр носителя (евклидов)."""
        if len(self) == 1:
            return 0.0
        diffs = self._points[:, None, :] - self._points[None, :, :]
        return float(np.sqrt(np.max(np.sum(diffs ** 2, axis=-1))))

    def translate(self, v: Sequence[float]) -> "DiscreteMeasure":
        return DiscreteMeasure(self._points + np.asarray(v, dtype=float).reshape(1, -1), self._weights)

    def allclose(self, other: "DiscreteMeasure", atol: float = MERGE_TOL) -> bool:
        return (self._points.shape == other._points.shape
                and np.allclose(self._points, other._points, rtol=0.0, atol=atol)
                and np.allclose(self._weights, other._weights, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"DiscreteMeasure(d={self.dim}, atoms={len(self)}, mass={self._mass:.12g})"


def uniform_interval_measure(a: float, b: float, count: int) -> DiscreteMeasure:
    """Равномерная дискретная мера на count узлах отрезка [a, b]."""
    if count < 1:
        raise InputError(f"Число атомов должно быть >= 1: {count}")
    points = np.linspace(a, b, count) if count > 1 else np.array([(a + b) / 2.0])
    return DiscreteMeasure.uniform(points.reshape(-1, 1))


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """
    Свертка мер: атомы x + y с весами w_x w_y.

    Raises:
        InputError: При несовпадении размерностей
    """
    if mu.dim != nu.dim:
        raise InputError(f"Несовпадение размерностей мер: {mu.dim} и {nu.dim}")
    points = (mu.points[:, None, :] + nu.points[None, :, :]).reshape(-1, mu.dim)
    weights = np.outer(mu.weights, nu.weights).reshape(-1)
    return DiscreteMeasure(points, weights)


def measure_of(mu: DiscreteMeasure, indicator: SetIndicator) -> float:
    """Мера множества: сумма весов атомов, попавших в множество."""
    inside = np.asarray(indicator(mu.points), dtype=bool)
    return math.fsum(mu.weights[inside])


def convolution_tail_bound(count: int) -> float:
    """Смещение носителя отброшенным хвостом: sum_{n > N} 2^-n = 2^-N."""
    return 2.0 ** (-count)


def convolve_sequence(measures: Sequence[DiscreteMeasure], count: int) -> DiscreteMeasure:
    """
    Усеченная бесконечная свертка первых N мер.

    Требования к n-й мере (нумерация с 1): масса 1, диаметр носителя
    не больше 2^-n, атом в нуле. Отброшенный хвост смещает носитель
    не более чем на 2^-N (см. convolution_tail_bound).

    Raises:
        InputError: С номером меры, нарушившей требования
    """
    if count < 1 or count > len(measures):
        raise InputError(f"Нужно 1 <= N <= {len(measures)}, получено {count}")
    result: Optional[DiscreteMeasure] = None
    for index, mu in enumerate(measures[:count], start=1):
        if not mu.is_normalized():
            raise InputError(f"Мера {index} не нормирована: масса {mu.total_mass}")
        if mu.diameter() > 2.0 ** (-index) + MERGE_TOL:
            raise InputError(f"Мера {index} имеет диаметр носителя {mu.diameter()} > 2^-{index}")
        if not np.any(np.all(np.abs(mu.points) <= MERGE_TOL, axis=1)):
            raise InputError(f"Носитель меры {index} не содержит начало координат")
        result = mu if result is None else convolve(result, mu)
    logger.debug(f"Свертка {count} мер: {len(result)} атомов, хвост <= {convolution_tail_bound(count)}")
    return result


# ----------------------------------------------------------------------
# Индикаторы множеств
# ----------------------------------------------------------------------

def full_space(points: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[0], dtype=bool)


def empty_set(points: np.ndarray) -> np.ndarray:
    return np.zeros(points.shape[0], dtype=bool)


def box_indicator(lower: Sequence[float], upper: Sequence[float]) -> SetIndicator:
    """Индикатор полуоткрытой коробки [lower, upper)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    def indicator(points: np.ndarray) -> np.ndarray:
        return np.all((points >= lower) & (points < upper), axis=1)
    return indicator


def shifted(indicator: SetIndicator, v: Sequence[float]) -> SetIndicator:
    """Индикатор сдвига S + v: x принадлежит S + v, если x - v принадлежит S."""
    v = np.asarray(v, dtype=float).reshape(1, -1)

    def translated(points: np.ndarray) -> np.ndarray:
        return indicator(points - v)
    return translated


def translate_scan_measure(mu: DiscreteMeasure, indicator: SetIndicator,
                           translations: Sequence[Sequence[float]]) -> np.ndarray:
    """Значения mu(S + v) для каждого сдвига v сетки."""
    translations = np.asarray(translations, dtype=float)
    if translations.ndim == 1:
        translations = translations.reshape(-1, 1)
    return np.array([measure_of(mu, shifted(indicator, v)) for v in translations])


# ----------------------------------------------------------------------
# Конечные объединения интервалов
# ----------------------------------------------------------------------

def _normalize_intervals(starts: np.ndarray, ends: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Сортировка и слияние пересекающихся или касающихся интервалов (sweep-line)."""
    keep = ends > starts
    starts, ends = starts[keep], ends[keep]
    if starts.size == 0:
        return starts, ends
    order = np.argsort(starts, kind="stable")
    starts, ends = starts[order], ends[order]
    reach = np.maximum.accumulate(ends)
    new_group = np.concatenate([[True], starts[1:] > reach[:-1]])
    last = np.concatenate([new_group[1:], [True]])
    return starts[new_group], reach[last]


class IntervalSet:
    """
    Дизъюнктное конечное объединение интервалов внутри объемлющего отрезка.

    Концы не различаются (открытые/замкнутые), одиночные точки не хранятся.
    """

    __slots__ = ("_starts", "_ends", "_ambient")

    def __init__(self, intervals: Sequence[Tuple[float, float]] = (), ambient: Tuple[float, float] = (0.0, 1.0)):
        lo, hi = float(ambient[0]), float(ambient[1])
        if not lo < hi:
            raise InputError(f"Некорректный объемлющий отрезок: {ambient}")
        data = np.asarray(list(intervals), dtype=float).reshape(-1, 2)
        starts, ends = data[:, 0], data[:, 1]
        if np.any(starts < lo) or np.any(ends > hi):
            raise InputError(f"Интервалы выходят за объемлющий отрезок [{lo}, {hi}]")
        self._init_arrays(starts, ends, (lo, hi))

    def _init_arrays(self, starts: np.ndarray, ends: np.ndarray, ambient: Tuple[float, float]) -> None:
        starts, ends = _normalize_intervals(np.asarray(starts, dtype=float), np.asarray(ends, dtype=float))
        starts.flags.writeable = False
        ends.flags.writeable = False
        self._starts = starts
        self._ends = ends
        self._ambient = ambient

    @classmethod
    def from_arrays(cls, starts: np.ndarray, ends: np.ndarray, ambient: Tuple[float, float] = (0.0, 1.0)) -> "IntervalSet":
        """Построение без промежуточных кортежей (для больших множеств); концы обрезаются по объемлющему отрезку."""
        obj = cls.__new__(cls)
        lo, hi = float(ambient[0]), float(ambient[1])
        obj._init_arrays(np.clip(starts, lo, hi), np.clip(ends, lo, hi), (lo, hi))
        return obj

    @property
    def ambient(self) -> Tuple[float, float]:
        return self._ambient

    @property
    def starts(self) -> np.ndarray:
        return self._starts

    @property
    def ends(self) -> np.ndarray:
        return self._ends

    @property
    def intervals(self) -> List[Tuple[float, float]]:
        return list(zip(self._starts.tolist(), self._ends.tolist()))

    def __len__(self) -> int:
        return self._starts.shape[0]

    def measure(self) -> float:
        return math.fsum(self._ends - self._starts)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Индикатор множества на точках (одномерных)."""
        x = np.asarray(points, dtype=float).reshape(-1)
        idx = np.searchsorted(self._starts, x, side="right") - 1
        valid = idx >= 0
        result = np.zeros(x.shape[0], dtype=bool)
        result[valid] = x[valid] < self._ends[idx[valid]]
        return result

    def interior_contains(self, points: np.ndarray) -> np.ndarray:
        """Принадлежность внутренности: концы интервалов не входят."""
        x = np.asarray(points, dtype=float).reshape(-1)
        idx = np.searchsorted(self._starts, x, side="left") - 1
        valid = idx >= 0
        result = np.zeros(x.shape[0], dtype=bool)
        result[valid] = x[valid] < self._ends[idx[valid]]
        return result

    def measure_below(self, points: np.ndarray) -> np.ndarray:
        """Мера пересечения множества с полуосью (-inf, t] для каждого t."""
        t = np.asarray(points, dtype=float).reshape(-1)
        if not len(self):
            return np.zeros(t.shape[0])
        before = np.concatenate([[0.0], np.cumsum(self._ends - self._starts)])
        idx = np.searchsorted(self._starts, t, side="right")
        last = np.maximum(idx - 1, 0)
        partial = np.clip(np.minimum(t, self._ends[last]) - self._starts[last], 0.0, None)
        return np.where(idx > 0, before[last] + partial, 0.0)

    def overlap(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
        """Мера пересечения множества с каждым отрезком [lower_i, upper_i]."""
        return self.measure_below(upper) - self.measure_below(lower)

    def indicator(self) -> SetIndicator:
        return lambda points: self.contains(np.asarray(points)[:, 0] if np.ndim(points) == 2 else points)

    def _check_ambient(self, other: "IntervalSet") -> None:
        if self._ambient != other._ambient:
            raise InputError(f"Несовпадение объемлющих отрезков: {self._ambient} и {other._ambient}")

    def union(self, other: "IntervalSet") -> "IntervalSet":
        self._check_ambient(other)
        return IntervalSet.from_arrays(np.concatenate([self._starts, other._starts]),
                                       np.concatenate([self._ends, other._ends]), self._ambient)

    def complement(self) -> "IntervalSet":
        lo, hi = self._ambient
        starts = np.concatenate([[lo], self._ends])
        ends = np.concatenate([self._starts, [hi]])
        return IntervalSet.from_arrays(starts, ends, self._ambient)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        self._check_ambient(other)
        return self.complement().union(other.complement()).complement()

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    __or__ = union
    __and__ = intersection

    def __invert__(self) -> "IntervalSet":
        return self.complement()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (self._ambient == other._ambient and np.array_equal(self._starts, other._starts)
                and np.array_equal(self._ends, other._ends))

    __hash__ = None

    def __repr__(self) -> str:
        return f"IntervalSet(intervals={len(self)}, measure={self.measure():.12g}, ambient={self._ambient})"


def set_ops(a: IntervalSet, b: IntervalSet) -> Dict[str, IntervalSet]:
    """Объединение, пересечение и дополнения пары множеств."""
    return {
        "union": a.union(b),
        "intersection": a.intersection(b),
        "complement_a": a.complement(),
        "complement_b": b.complement(),
    }


def measure(a: IntervalSet) -> float:
    return a.measure()


def binary_shift_set(n: int) -> IntervalSet:
    """
    Множество U_n = {x in [0,1] : 0 < 2^n x (mod 1) < 2^-n}:
    2^n интервалов (k 2^-n, k 2^-n + 2^-2n), мера ровно 2^-n.

    Raises:
        RangeError: Если n вне 1..25
    """
    if not 1 <= n <= LIMITS["max_shift_n"]:
        raise RangeError(f"n должно быть в диапазоне 1..{LIMITS['max_shift_n']}, получено {n}")
    starts = np.arange(2 ** n, dtype=float) * 2.0 ** (-n)
    return IntervalSet.from_arrays(starts, starts + 2.0 ** (-2 * n))


def binary_shift_union(m: int, depth: int) -> IntervalSet:
    """
    Явное объединение V_m = U_{m+1} U ... U U_{m+depth}.

    Raises:
        RangeError: Если m + depth > 25
    """
    if m < 1 or depth < 1:
        raise RangeError(f"Нужно m >= 1 и depth >= 1, получено m={m}, depth={depth}")
    if m + depth > LIMITS["max_shift_n"]:
        raise RangeError(f"Явное построение требует m + depth <= {LIMITS['max_shift_n']}")
    result = IntervalSet()
    for n in range(m + 1, m + depth + 1):
        result = result.union(binary_shift_set(n))
    return result


def _uncovered_count(top: int, m: int) -> int:
    """
    Число интервалов U_top, не покрытых объединением U_n при m < n < top.

    Интервал U_top с началом k 2^-top либо целиком лежит в интервале U_n,
    либо пересекает U_n лишь по мере нуль; покрытие равносильно условию
    (k mod 2^a) < max(1, 2^(2a - top)) при a = top - n. Счет ведется
    рекурсией по младшим битам k.
    """
    bits = top - m - 1
    if bits <= 0:
        return 2 ** top

    def threshold(a: int) -> int:
        return 2 ** (2 * a - top) if 2 * a >= top else 1

    @lru_cache(maxsize=None)
    def above(a: int, t: int) -> int:
        # Число допустимых остатков r по модулю 2^a, удовлетворяющих ограничениям уровней 1..a и r >= t
        if a == 0:
            return 1 if t <= 0 else 0
        half = 2 ** (a - 1)
        if t > half:
            return above(a - 1, t - half)
        return above(a - 1, max(t, threshold(a))) + above(a - 1, 0)

    return above(bits, 0) * 2 ** (top - bits)


def binary_shift_union_measure(m: int, depth: int = LIMITS["max_shift_n"]) -> Fraction:
    """
    Точная мера V_m = U_{m+1} U ... U U_{m+depth} без явного построения интервалов.

    Returns:
        Fraction: Мера объединения (рациональное число)
    """
    if m < 1 or depth < 1:
        raise RangeError(f"Нужно m >= 1 и depth >= 1, получено m={m}, depth={depth}")
    total = Fraction(0)
    for top in range(m + 1, m + depth + 1):
        total += Fraction(_uncovered_count(top, m), 4 ** top)
    return total


def binary_shift_limit(m_max: int, depth: int) -> IntervalSet:
    """Пересечение V_1 ∩ ... ∩ V_{m_max} при явной глубине (множество нулевой меры в пределе)."""
    result = binary_shift_union(1, depth)
    for m in range(2, m_max + 1):
        result = result.intersection(binary_shift_union(m, depth - (m - 1)))
    return result


def liouville_neighborhood(c: float, n: int, qmax: int) -> IntervalSet:
    """
    Объединение интервалов |x - p/q| < c / q^n по 1 <= q <= qmax, 0 <= p <= q,
    обрезанных по [0, 1].

    Несократимые дроби достаточно: интервал вокруг p/q с НОД > 1 лежит
    внутри интервала вокруг сокращенной дроби.

    Raises:
        RangeError: Если c <= 0, n < 3 или qmax вне 1..10^4
    """
    if not c > 0 or n < 3 or not 1 <= qmax <= LIMITS["max_liouville_q"]:
        raise RangeError(f"Требуется c > 0, n >= 3, 1 <= qmax <= {LIMITS['max_liouville_q']}")
    result = IntervalSet()
    block = 256
    for q_start in range(1, qmax + 1, block):
        starts, ends = [], []
        for q in range(q_start, min(q_start + block, qmax + 1)):
            p = np.arange(q + 1)
            p = p[np.gcd(p, q) == 1]
            centers = p / q
            radius = c / float(q) ** n
            starts.append(centers - radius)
            ends.append(centers + radius)
        result = result.union(IntervalSet.from_arrays(np.concatenate(starts), np.concatenate(ends)))
    return result


def liouville_set(c_values: Sequence[float], n_values: Sequence[int], qmax: int) -> IntervalSet:
    """Пересечение окрестностей Лиувилля по всем парам (c, n): конечное приближение множества чисел Лиувилля."""
    result = IntervalSet([(0.0, 1.0)])
    for c in c_values:
        for n in n_values:
            result = result.intersection(liouville_neighborhood(c, n, qmax))
    return result


# ----------------------------------------------------------------------
# Относительные плотности
# ----------------------------------------------------------------------

@dataclass
class DensityReport:
    """Эвристические оценки rho- и rho+ по конечному семейству и сетке сдвигов."""

    lower: float
    upper: float
    per_measure: List[Tuple[float, float]] = field(default_factory=list)
    family_size: int = 0
    grid_size: int = 0
    consistent: bool = True
    note: str = "heuristic: sup/inf restricted to the given family and translation grid"
    raw_lower: Optional[float] = None
    raw_upper: Optional[float] = None

    def __post_init__(self):
        if self.raw_lower is None:
            self.raw_lower = self.lower
        if self.raw_upper is None:
            self.raw_upper = self.upper


def _density_table(indicator: SetIndicator, family: Sequence[DiscreteMeasure],
                   translations: Sequence[Sequence[float]]) -> List[Tuple[float, float]]:
    if not family:
        raise InputError("Семейство мер пусто")
    table = []
    for index, mu in enumerate(family):
        if not mu.is_normalized():
            raise InputError(f"Мера {index} семейства не нормирована: масса {mu.total_mass}")
        values = translate_scan_measure(mu, indicator, translations)
        table.append((float(values.min()), float(values.max())))
    return table


def density_report(indicator: SetIndicator, family: Sequence[DiscreteMeasure],
                   translations: Sequence[Sequence[float]]) -> DensityReport:
    """
    Оценки rho^-(S) = max_mu min_v mu(S+v) и rho^+(S) = min_mu max_v mu(S+v).

    Если грубая сетка дает rho^- > rho^+, верхняя оценка поднимается до
    нижней, а отчет помечается как несогласованный; исходные оценки
    остаются в raw_lower и raw_upper.
    """
    table = _density_table(indicator, family, translations)
    raw_lower = max(low for low, _ in table)
    raw_upper = min(high for _, high in table)
    consistent = raw_lower <= raw_upper
    upper = raw_upper
    if not consistent:
        logger.warning(f"Сетка сдвигов слишком груба: rho- {raw_lower:.6g} > rho+ {raw_upper:.6g}")
        upper = raw_lower
    return DensityReport(raw_lower, upper, table, len(family), len(np.asarray(translations)), consistent,
                         raw_lower=raw_lower, raw_upper=raw_upper)


def lower_density(indicator: SetIndicator, family: Sequence[DiscreteMeasure],
                  translations: Sequence[Sequence[float]]) -> float:
    return density_report(indicator, family, translations).lower


def upper_density(indicator: SetIndicator, family: Sequence[DiscreteMeasure],
                  translations: Sequence[Sequence[float]]) -> float:
    return density_report(indicator, family, translations).upper
