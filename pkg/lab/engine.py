#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль оценки «застенчивости» свойств методом Монте-Карло.

Параметр lambda выбирается равномерно в коробке пробы, свойство
проверяется на возмущенном элементе f + sum lambda_i g_i. Неопределенные
вердикты учитываются отдельно и никогда не засчитываются как нарушения.

Нулевая доля нарушений означает лишь статистическую неотличимость меры
множества нарушений от нуля при данных N и коробке: метод Монте-Карло
не доказывает нулевую меру.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate, stats
from typing_extensions import Literal

from config.reference_data import DEFAULTS, TOLERANCES
from lab.dynamics import SeedSpec, hyperbolicity, real_fixed_points, search_periodic_orbits
from lab.measures import IntervalSet, binary_shift_union
from lab.polyjet import PolyMap
from lab.probes import Element, Probe, ambient_of
from utils.error_handler import DegeneracyError, InputError, PrevlabError, RangeError
from utils.seeding import chunk_ranges, derive_seed, flatten, parallel_map, task_generator

logger = logging.getLogger(__name__)

Outcome = Literal["holds", "fails", "undecided"]
OUTCOMES: Tuple[str, ...] = ("holds", "fails", "undecided")

SAMPLE_BLOCK = 256
CERTIFICATION_NOTE = ("failure fraction statistically indistinguishable from 0 at the chosen N and box "
                      "is the only certificate of 'almost every'")


@dataclass(frozen=True)
class PropertyPredicate:
    """
    Именованное свойство элемента функционального пространства.

    Вызов тотален: любая ошибка вычисления превращается в вердикт undecided.
    Свойство с on_parameters=True проверяется на самом параметре lambda,
    failure_set задает явное множество нарушений для координаты элемента.
    """

    name: str
    evaluate: Callable[[Element], str] = field(compare=False)
    params: Tuple[Tuple[str, Any], ...] = ()
    on_parameters: bool = False
    failure_set: Optional[IntervalSet] = field(default=None, compare=False, repr=False)

    def __call__(self, element: Element) -> str:
        try:
            outcome = self.evaluate(element)
        except (PrevlabError, np.linalg.LinAlgError, FloatingPointError, ValueError) as e:
            logger.debug(f"Свойство {self.name}: ошибка вычисления, вердикт undecided ({str(e)})")
            return "undecided"
        if outcome not in OUTCOMES:
            raise InputError(f"Свойство {self.name} вернуло недопустимый вердикт {outcome!r}")
        return outcome

    def verdict(self, probe: Probe, base: Element, lam: np.ndarray) -> str:
        """Вердикт в точке lambda коробки пробы."""
        if self.on_parameters:
            return self(np.asarray(lam, dtype=float))
        return self(probe.perturb(base, lam))

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v}" for k, v in self.params) + ")"


# ----------------------------------------------------------------------
# Доверительный интервал
# ----------------------------------------------------------------------

def wilson_interval(failures: int, samples: int, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Интервал Уилсона для доли failures / samples.

    На границе (0 или samples нарушений) соответствующий конец заменяется
    точной биномиальной границей 1 - (alpha/2)^(1/N).

    Args:
        failures (int): Число нарушений
        samples (int): Число испытаний
        confidence (float): Уровень доверия

    Returns:
        Tuple[float, float]: Нижняя и верхняя границы
    """
    if samples <= 0:
        raise InputError(f"Число испытаний должно быть положительным: {samples}")
    alpha = 1.0 - confidence
    z = float(stats.norm.ppf(1.0 - alpha / 2.0))
    p = failures / samples
    denominator = 1.0 + z * z / samples
    center = (p + z * z / (2.0 * samples)) / denominator
    half = z * math.sqrt(p * (1.0 - p) / samples + z * z / (4.0 * samples * samples)) / denominator
    low, high = max(0.0, center - half), min(1.0, center + half)
    exact = 1.0 - (alpha / 2.0) ** (1.0 / samples)
    if failures == 0:
        low, high = 0.0, exact
    elif failures == samples:
        low, high = 1.0 - exact, 1.0
    return low, high


@dataclass(frozen=True)
class ShynessReport:
    """Отчет об оценке меры множества нарушений вдоль пробы."""

    base: str
    probe: str
    predicate: str
    samples: int
    holds: int
    fails: int
    undecided: int
    seed: int
    box_radius: float

    @property
    def failure_fraction(self) -> float:
        return self.fails / self.samples

    @property
    def confidence_interval(self) -> Tuple[float, float]:
        return wilson_interval(self.fails, self.samples)

    @property
    def note(self) -> str:
        return CERTIFICATION_NOTE

    def csv_row(self) -> Dict[str, Any]:
        low, high = self.confidence_interval
        return {
            "predicate": self.predicate,
            "probe": self.probe,
            "samples": self.samples,
            "holds": self.holds,
            "fails": self.fails,
            "undecided": self.undecided,
            "failure_fraction": self.failure_fraction,
            "ci_low": low,
            "ci_high": high,
            "seed": self.seed,
            "box_radius": self.box_radius,
        }


def _count_outcomes(outcomes: Sequence[str]) -> Dict[str, int]:
    counts = {name: 0 for name in OUTCOMES}
    for outcome in outcomes:
        counts[outcome] += 1
    return counts


def estimate_failure_measure(base: Element, probe: Probe, predicate: PropertyPredicate,
                             samples: int = DEFAULTS["samples"], seed: int = DEFAULTS["seed"],
                             workers: Optional[int] = None, base_name: str = "base") -> ShynessReport:
    """
    Несмещенная оценка равномерной меры множества нарушений в коробке пробы.

    Выборка разбита на блоки фиксированного размера; генератор блока
    определяется (seed, номер блока), поэтому результат не зависит от
    числа потоков.

    Args:
        base (Element): Базовый элемент f
        probe (Probe): Проба
        predicate (PropertyPredicate): Свойство
        samples (int): Размер выборки N >= 100
        seed (int): Главное зерно
        workers (Optional[int]): Число потоков
        base_name (str): Имя базового элемента для отчета

    Returns:
        ShynessReport: Счета и доля нарушений

    Raises:
        InputError: Если пространство пробы не совпадает с пространством элемента
        RangeError: Если N < 100
    """
    if not probe.accepts(base):
        raise InputError(f"Проба {probe.ambient} несовместима с элементом из {ambient_of(base)}")
    if samples < 100:
        raise RangeError(f"Размер выборки должен быть не меньше 100: {samples}")

    blocks = chunk_ranges(samples, -(-samples // SAMPLE_BLOCK))

    def run(index_block: Tuple[int, range]) -> List[str]:
        index, block = index_block
        rng = task_generator(seed, "engine", index)
        return [predicate.verdict(probe, base, probe.sample(rng)) for _ in block]

    outcomes = flatten(parallel_map(run, list(enumerate(blocks)), workers))
    counts = _count_outcomes(outcomes)
    report = ShynessReport(base_name, probe.name, predicate.label, samples, counts["holds"], counts["fails"],
                           counts["undecided"], seed, probe.box_radius)
    if report.undecided:
        logger.warning(f"{report.undecided} из {samples} вердиктов не определены и учтены отдельно")
    logger.info(f"{predicate.label} на пробе {probe.name}: доля нарушений {report.failure_fraction:.6g}")
    return report


@dataclass
class TranslateScan:
    reports: List[ShynessReport]

    @property
    def fractions(self) -> List[float]:
        return [r.failure_fraction for r in self.reports]

    @property
    def max_fraction(self) -> float:
        return max(self.fractions, default=0.0)


def translate_scan(predicate: PropertyPredicate, probe: Probe, bases: Sequence[Element],
                   samples: int = DEFAULTS["samples"], seed: int = DEFAULTS["seed"],
                   workers: Optional[int] = None) -> TranslateScan:
    """
    Оценка доли нарушений для каждого сдвига f из конечного набора.

    Каждый сдвиг получает собственное подзерно (seed, "translate", номер).
    """
    reports = []
    for index, base in enumerate(bases):
        sub_seed = derive_seed(seed, "translate", index)
        reports.append(estimate_failure_measure(base, probe, predicate, samples, sub_seed, workers,
                                                base_name=f"translate-{index}"))
    scan = TranslateScan(reports)
    logger.info(f"Сканирование {len(bases)} сдвигов: максимальная доля {scan.max_fraction:.6g}")
    return scan


@dataclass
class DensityProfile:
    """Доли нарушений и покрытие ячеек на вложенных сетках шага 2^-l."""

    levels: List[int]
    fractions: List[float]
    coverage: List[float]

    def rows(self) -> List[Tuple[int, float, float]]:
        return list(zip(self.levels, self.fractions, self.coverage))


def _cell_centers(level: int, q: int, radius: float) -> np.ndarray:
    cells = 2 ** level
    axis = -radius + (np.arange(cells) + 0.5) * (2.0 * radius / cells)
    mesh = np.meshgrid(*([axis] * q), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _value_line(predicate: PropertyPredicate, probe: Probe, base: Element) -> Optional[Tuple[float, float]]:
    """При q = 1 и явном множестве нарушений координата f + lambda g равна v0 + lambda s."""
    if predicate.failure_set is None or predicate.on_parameters or probe.q != 1:
        return None
    slope = _leading_value(probe.basis[0])
    if slope == 0.0:
        return None
    return _leading_value(base), slope


def failure_density_profile(predicate: PropertyPredicate, probe: Probe, base: Element,
                            levels: Sequence[int], workers: Optional[int] = None,
                            refine: int = DEFAULTS["density_refine"]) -> DensityProfile:
    """
    Профиль «мера против плотности» на вложенных сетках коробки пробы.

    Для уровня l коробка делится на 2^(l q) ячеек; доля нарушений берется
    по центрам ячеек уровня l. Покрытие равно доле ячеек уровня l,
    пересекающих множество нарушений по положительной мере. Для свойства с
    явным множеством интервалов при q = 1 пересечение считается точно,
    иначе ячейка проверяется на подсетке на refine уровней мельче самого
    мелкого уровня (не более 2^16 узлов).

    Raises:
        RangeError: Если q > 2 или самая мелкая сетка больше 2^16 узлов
    """
    q = probe.q
    levels = sorted(int(l) for l in levels)
    if q > 2:
        raise RangeError(f"Профиль плотности определен для q <= 2, получено q={q}")
    if not levels or levels[0] < 0:
        raise InputError("Нужен хотя бы один неотрицательный уровень")
    if refine < 0:
        raise InputError(f"Глубина подсетки должна быть неотрицательной: {refine}")
    finest = levels[-1]
    if finest * q > 16:
        raise RangeError(f"Сетка уровня {finest} для q={q} слишком велика")

    def failing(points: np.ndarray) -> np.ndarray:
        outcomes = parallel_map(lambda lam: predicate.verdict(probe, base, lam), list(points), workers)
        return np.array([o == "fails" for o in outcomes], dtype=bool)

    radius = probe.box_radius
    line = _value_line(predicate, probe, base)
    resolution = max(finest, min(finest + refine, 16 // q))
    fine_fail = None
    if line is None:
        fine_fail = failing(_cell_centers(resolution, q, radius)).reshape((2 ** resolution,) * q)

    fractions, coverage = [], []
    for level in levels:
        if fine_fail is not None and level == resolution:
            fails = fine_fail
        else:
            fails = failing(_cell_centers(level, q, radius))
        fractions.append(float(np.mean(fails)))
        if line is not None:
            v0, slope = line
            edges = v0 + slope * (-radius + np.arange(2 ** level + 1) * (2.0 * radius / 2 ** level))
            lower = np.minimum(edges[:-1], edges[1:])
            upper = np.maximum(edges[:-1], edges[1:])
            covered = predicate.failure_set.overlap(lower, upper) > 0.0
        else:
            factor = 2 ** (resolution - level)
            shape = []
            for _ in range(q):
                shape += [2 ** level, factor]
            covered = fine_fail.reshape(shape).any(axis=tuple(range(1, 2 * q, 2)))
        coverage.append(float(np.mean(covered)))
    logger.info(f"Профиль плотности {predicate.label}: уровни {levels}, покрытие {coverage}")
    return DensityProfile(levels, fractions, coverage)


# ----------------------------------------------------------------------
# Реестр свойств
# ----------------------------------------------------------------------

def _leading_value(element: Element, index: int = 0) -> float:
    """Координата элемента: f(0)_index для многочлена, a_index для последовательности."""
    if isinstance(element, PolyMap):
        return float(element.eval(np.zeros(element.domain_dim))[index])
    return float(np.asarray(element)[index])


def always_holds() -> PropertyPredicate:
    return PropertyPredicate("always_holds", lambda element: "holds")


def always_fails() -> PropertyPredicate:
    return PropertyPredicate("always_fails", lambda element: "fails")


def half_space(index: int = 0, threshold: float = 0.0) -> PropertyPredicate:
    """Нарушение при координате > threshold (полупространство, не застенчиво)."""
    def evaluate(element: Element) -> str:
        return "fails" if _leading_value(element, index) > threshold else "holds"
    return PropertyPredicate("half_space", evaluate, (("index", index), ("threshold", threshold)))


def parameter_half_space(index: int = 0, threshold: float = 0.0) -> PropertyPredicate:
    """Нарушение при lambda_index > threshold: свойство параметров пробы, а не элемента."""
    def evaluate(lam: np.ndarray) -> str:
        if not 0 <= index < lam.shape[0]:
            raise InputError(f"Индекс параметра {index} вне диапазона 0..{lam.shape[0] - 1}")
        return "fails" if float(lam[index]) > threshold else "holds"
    return PropertyPredicate("parameter_half_space", evaluate, (("index", index), ("threshold", threshold)),
                             on_parameters=True)


def in_interval_set(interval_set: IntervalSet, name: str = "in_interval_set") -> PropertyPredicate:
    """Нарушение, если координата элемента лежит внутри одного из интервалов."""
    def evaluate(element: Element) -> str:
        value = _leading_value(element)
        return "fails" if bool(interval_set.interior_contains(np.array([value]))[0]) else "holds"
    return PropertyPredicate(name, evaluate, failure_set=interval_set)


def binary_shift_predicate(m: int, depth: int = 10) -> PropertyPredicate:
    """Нарушение на V_m = U_{m+1} U ... U U_{m+depth}."""
    predicate = in_interval_set(binary_shift_union(m, depth))
    return PropertyPredicate("binary_shift", predicate.evaluate, (("m", m), ("depth", depth)),
                             failure_set=predicate.failure_set)


def integral_nonzero(nodes: int = DEFAULTS["quadrature_nodes"]) -> PropertyPredicate:
    """
    Свойство: интеграл f по [0, 1] отличен от нуля (больше 1e-10 по модулю).

    Многочлен интегрируется квадратурой Гаусса-Лежандра, последовательность
    рассматривается как значения на равномерной сетке [0, 1].
    """
    x, w = legendre.leggauss(nodes)
    x, w = 0.5 * (x + 1.0), 0.5 * w

    def evaluate(element: Element) -> str:
        if isinstance(element, PolyMap):
            if element.domain_dim != 1:
                raise InputError("Интеграл по [0, 1] определен для функций одной переменной")
            value = float(w @ element.eval(x.reshape(-1, 1))[:, 0])
        else:
            values = np.asarray(element, dtype=float)
            value = float(integrate.trapezoid(values, np.linspace(0.0, 1.0, values.shape[0])))
        return "holds" if abs(value) > TOLERANCES["integral_zero"] else "fails"
    return PropertyPredicate("integral_nonzero", evaluate, (("nodes", nodes),))


def series_diverges() -> PropertyPredicate:
    """
    Свойство: ряд sum a_n расходится.

    По второй половине усеченной последовательности n a_n приближается
    моделью c + d/n; ряд считается расходящимся при |c| > 1e-9.
    """
    def evaluate(element: Element) -> str:
        if isinstance(element, PolyMap):
            raise InputError("Свойство расходимости определено для последовательностей")
        values = np.asarray(element, dtype=float)
        n = np.arange(1, values.shape[0] + 1, dtype=float)
        tail = slice(values.shape[0] // 2, None)
        design = np.column_stack([np.ones_like(n[tail]), 1.0 / n[tail]])
        (limit, _), *_ = np.linalg.lstsq(design, n[tail] * values[tail], rcond=None)
        return "holds" if abs(limit) > TOLERANCES["series_flat"] else "fails"
    return PropertyPredicate("series_diverges", evaluate)


def _roots_in_window(coeffs: np.ndarray, window: Tuple[float, float]) -> np.ndarray:
    nonzero = np.nonzero(coeffs)[0]
    if nonzero.size == 0 or nonzero[-1] == 0:
        return np.zeros(0)
    roots = np.roots(coeffs[:nonzero[-1] + 1][::-1])
    scale = max(1.0, float(np.max(np.abs(roots))))
    real = roots[np.abs(roots.imag) <= 1e-7 * scale].real
    return real[(real >= window[0]) & (real <= window[1])]


def jet_transversal(k: int = 2, window: Tuple[float, float] = (-1.0, 1.0)) -> PropertyPredicate:
    """
    Свойство: в каждой точке окна обращается в нуль не больше одной из
    f, f', ..., f^(k) (многочлены одной переменной).

    Общие корни ищутся по корням каждой производной; значение второй
    производной в корне ниже 1e-9 дает нарушение, ниже 1e-6 дает undecided.
    """
    def evaluate(element: Element) -> str:
        if not isinstance(element, PolyMap) or (element.domain_dim, element.range_dim) != (1, 1):
            raise InputError("Трансверсальность струй проверяется для многочленов R -> R")
        derivatives = [element.d(*([0] * i)).univariate_coefficients() for i in range(k + 1)]
        flat = [not np.any(c) for c in derivatives]
        if sum(flat) >= 2:
            return "fails"
        verdict = "holds"
        for i, coeffs in enumerate(derivatives):
            roots = _roots_in_window(coeffs, window)
            for j, other in enumerate(derivatives):
                if j == i:
                    continue
                if flat[j] and roots.size:
                    return "fails"
                if flat[j] or not roots.size:
                    continue
                smallest = float(np.min(np.abs(np.polyval(other[::-1], roots))))
                if smallest < TOLERANCES["jet_zero"]:
                    return "fails"
                if smallest < 1e-6:
                    verdict = "undecided"
        return verdict
    return PropertyPredicate("jet_transversal", evaluate, (("k", k), ("window", window)))


def periodic_hyperbolic(period: int = 1, all_periods: bool = False,
                        box: float = DEFAULTS["orbit_box"]) -> PropertyPredicate:
    """
    Свойство: все периодические точки периода period (или всех периодов
    <= period) в коробке [-box, box]^n гиперболичны.
    """
    def orbits_of(f: PolyMap, p: int):
        if f.domain_dim == 1 and p == 1:
            return real_fixed_points(f, box)
        orbits = search_periodic_orbits(f, p, SeedSpec(box=box), workers=1).orbits
        return [o for o in orbits if np.max(np.abs(o.points)) <= box]

    def evaluate(element: Element) -> str:
        if not isinstance(element, PolyMap):
            raise InputError("Гиперболичность определена для многочленных отображений")
        periods = range(1, period + 1) if all_periods else [period]
        verdict = "holds"
        for p in periods:
            try:
                orbits = orbits_of(element, p)
            except DegeneracyError:
                return "fails"
            for orbit in orbits:
                result = hyperbolicity(orbit).verdict
                if result == "nonhyperbolic":
                    return "fails"
                if result == "undecided":
                    verdict = "undecided"
        return verdict
    return PropertyPredicate("periodic_hyperbolic", evaluate,
                             (("period", period), ("all_periods", all_periods), ("box", box)))


def union_predicate(*predicates: PropertyPredicate) -> PropertyPredicate:
    """Объединение множеств нарушений: fails, если нарушено хотя бы одно свойство."""
    if not predicates:
        raise InputError("Нужно хотя бы одно свойство")
    if len({p.on_parameters for p in predicates}) > 1:
        raise InputError("Нельзя объединять свойства параметров и свойства элементов")

    def evaluate(element: Element) -> str:
        outcomes = [p(element) for p in predicates]
        if "fails" in outcomes:
            return "fails"
        return "undecided" if "undecided" in outcomes else "holds"
    return PropertyPredicate("union(" + ",".join(p.label for p in predicates) + ")", evaluate,
                             on_parameters=predicates[0].on_parameters)


PREDICATES: Dict[str, Callable[..., PropertyPredicate]] = {
    "always_holds": always_holds,
    "always_fails": always_fails,
    "half_space": half_space,
    "parameter_half_space": parameter_half_space,
    "binary_shift": binary_shift_predicate,
    "integral_nonzero": integral_nonzero,
    "series_diverges": series_diverges,
    "jet_transversal": jet_transversal,
    "periodic_hyperbolic": periodic_hyperbolic,
}


def build_predicate(name: str, params: Optional[Dict[str, Any]] = None) -> PropertyPredicate:
    """
    Построение свойства по имени из реестра.

    Raises:
        InputError: Если имя неизвестно или параметры не подходят
    """
    if name not in PREDICATES:
        raise InputError(f"Неизвестное свойство: {name}. Доступны: {', '.join(sorted(PREDICATES))}")
    try:
        return PREDICATES[name](**(params or {}))
    except TypeError as e:
        raise InputError(f"Некорректные параметры свойства {name}: {str(e)}")
