#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль динамики многочленных отображений.

Содержит:
- поиск периодических орбит методом Ньютона для отображения
  G(x_1, ..., x_p) = (f(x_1) - x_2, ..., f(x_p) - x_1);
- вердикт гиперболичности по собственным числам мультипликатора;
- подсчет лучей t M_i, на которых произведение имеет собственное число
  на единичной окружности;
- число вращения и меру языков Арнольда для x + omega + eps sin x;
- оценку размерности подсчетом ящиков и проверку инъективности
  линейных проекций на облаке точек.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import cKDTree
from typing_extensions import Literal

from config.reference_data import DEFAULTS, LIMITS, TOLERANCES
from lab.polyjet import PolyMap
from utils.error_handler import DegeneracyError, InputError, RangeError
from utils.seeding import chunk_ranges, parallel_map, task_generator

logger = logging.getLogger(__name__)

Verdict = Literal["hyperbolic", "nonhyperbolic", "undecided"]

TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------
# Периодические орбиты
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PeriodicOrbit:
    """Периодическая орбита: точки в порядке обхода, мультипликатор, невязка."""

    period: int
    points: np.ndarray
    multiplier_matrix: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class HyperbolicityVerdict:
    eigenvalue_moduli: Tuple[float, ...]
    margin: float
    verdict: Verdict
    diagnostic: str = ""


@dataclass
class SeedSpec:
    """
    Правило выбора начальных точек Ньютона: равномерная сетка в коробке
    [-box, box]^n плюс точки траекторий из узлов сетки.
    """

    box: float = DEFAULTS["orbit_box"]
    grid: int = DEFAULTS["orbit_grid"]
    trajectory_steps: int = 0
    max_iter: int = DEFAULTS["newton_max_iter"]

    def points(self, n: int) -> np.ndarray:
        axis = np.linspace(-self.box, self.box, self.grid)
        mesh = np.meshgrid(*([axis] * n), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass
class OrbitSearchReport:
    orbits: List[PeriodicOrbit] = field(default_factory=list)
    seeds_tried: int = 0
    abandoned_singular: int = 0
    not_converged: int = 0
    lower_period: int = 0


def _orbit_residual(f: PolyMap, points: np.ndarray) -> float:
    images = f.eval(points)
    targets = np.roll(points, -1, axis=0)
    return float(np.max(np.abs(images - targets)))


def multiplier_matrix(f: PolyMap, points: np.ndarray) -> np.ndarray:
    """Произведение Df(x_p) ... Df(x_1) в порядке обхода орбиты."""
    n = f.domain_dim
    product = np.eye(n)
    columns = f.jacobian_map()
    for x in points:
        jac = np.column_stack([col.eval(x) for col in columns])
        product = jac @ product
    return product


def _canonical_rotation(points: np.ndarray, tol: float) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Лексикографически минимальный циклический сдвиг точек, округленный до tol."""
    best_key: Optional[Tuple[int, ...]] = None
    best = points
    for r in range(points.shape[0]):
        rolled = np.roll(points, -r, axis=0)
        key = tuple(int(v) for v in np.round(rolled / tol).reshape(-1))
        if best_key is None or key < best_key:
            best_key, best = key, rolled
    return best, best_key


def _is_distinct(points: np.ndarray, tol: float) -> bool:
    p = points.shape[0]
    for a in range(p):
        for b in range(a + 1, p):
            if np.max(np.abs(points[a] - points[b])) <= tol:
                return False
    return True


def make_orbit(f: PolyMap, points: np.ndarray) -> PeriodicOrbit:
    """
    Сборка и проверка орбиты.

    Raises:
        DegeneracyError: Если невязка превышает 1e-9
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    residual = _orbit_residual(f, points)
    if residual > TOLERANCES["orbit_residual"]:
        raise DegeneracyError(f"Невязка орбиты {residual:.3e} превышает допуск")
    return PeriodicOrbit(points.shape[0], points, multiplier_matrix(f, points), residual)


def _newton_orbit(f: PolyMap, start: np.ndarray, p: int, max_iter: int) -> Tuple[Optional[np.ndarray], str]:
    """
    Метод Ньютона для G с демпфированием шага 1/2 при росте невязки.

    Returns:
        Tuple[Optional[np.ndarray], str]: Точки орбиты (p, n) или None и причина
    """
    n = f.domain_dim
    columns = f.jacobian_map()
    x = start.copy()

    def residual_vector(z: np.ndarray) -> np.ndarray:
        return (f.eval(z) - np.roll(z, -1, axis=0)).reshape(-1)

    g = residual_vector(x)
    norm = float(np.max(np.abs(g)))
    for _ in range(max_iter):
        if norm <= 1e-13:
            break
        jac = np.zeros((n * p, n * p))
        for i in range(p):
            block = np.column_stack([col.eval(x[i]) for col in columns])
            jac[i * n:(i + 1) * n, i * n:(i + 1) * n] = block
            j = (i + 1) % p
            jac[i * n:(i + 1) * n, j * n:(j + 1) * n] -= np.eye(n)
        try:
            if np.linalg.cond(jac) > 1e14:
                return None, "singular"
            step = np.linalg.solve(jac, -g).reshape(p, n)
        except np.linalg.LinAlgError:
            return None, "singular"

        scale = 1.0
        candidate = x + step
        candidate_g = residual_vector(candidate)
        candidate_norm = float(np.max(np.abs(candidate_g)))
        halvings = 0
        while not candidate_norm <= norm and halvings < 10:
            scale *= 0.5
            candidate = x + scale * step
            candidate_g = residual_vector(candidate)
            candidate_norm = float(np.max(np.abs(candidate_g)))
            halvings += 1
        x, g, norm = candidate, candidate_g, candidate_norm
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e8:
            return None, "diverged"
    if norm > TOLERANCES["orbit_residual"]:
        return None, "diverged"
    return x, "ok"


def search_periodic_orbits(f: PolyMap, p: int, seeds: Optional[Union[SeedSpec, np.ndarray]] = None,
                           workers: Optional[int] = None) -> OrbitSearchReport:
    """
    Поиск орбит минимального периода p методом Ньютона из набора начальных точек.

    Args:
        f (PolyMap): Отображение R^n -> R^n
        p (int): Период
        seeds: Правило выбора начальных точек или явный массив точек (k, n)
        workers (Optional[int]): Число потоков (на результат не влияет)

    Returns:
        OrbitSearchReport: Орбиты в каноническом порядке и счетчики неудач

    Raises:
        InputError: Если отображение не квадратное
        RangeError: Если n > 4 или p > 6
    """
    n = f.domain_dim
    if f.range_dim != n:
        raise InputError(f"Нужно отображение R^n -> R^n, получено R^{n} -> R^{f.range_dim}")
    if n > LIMITS["max_orbit_dim"] or not 1 <= p <= LIMITS["max_period"]:
        raise RangeError(f"Поиск орбит ограничен n <= {LIMITS['max_orbit_dim']}, p <= {LIMITS['max_period']}")

    spec = seeds if isinstance(seeds, SeedSpec) else SeedSpec()
    starts = np.atleast_2d(np.asarray(seeds, dtype=float)) if isinstance(seeds, np.ndarray) else spec.points(n)
    if spec.trajectory_steps > 0:
        extra = starts.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(spec.trajectory_steps):
                extra = f.eval(extra)
        bounded = np.all(np.isfinite(extra), axis=1) & (np.max(np.abs(extra), axis=1) <= 10 * spec.box)
        starts = np.vstack([starts, extra[bounded]])

    def run(start: np.ndarray) -> Tuple[Optional[np.ndarray], str]:
        chain = np.zeros((p, n))
        chain[0] = start
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(1, p):
                chain[i] = f.eval(chain[i - 1])
        if not np.all(np.isfinite(chain)):
            chain = np.tile(start, (p, 1))
        return _newton_orbit(f, chain, p, spec.max_iter)

    outcomes = parallel_map(run, list(starts), workers)

    report = OrbitSearchReport(seeds_tried=len(starts))
    found: Dict[Tuple[int, ...], PeriodicOrbit] = {}
    for points, status in outcomes:
        if status == "singular":
            report.abandoned_singular += 1
            continue
        if points is None:
            report.not_converged += 1
            continue
        if p > 1 and not _is_distinct(points, TOLERANCES["orbit_distinct"]):
            report.lower_period += 1
            continue
        canonical, key = _canonical_rotation(points, TOLERANCES["orbit_dedup"])
        if key in found:
            continue
        try:
            found[key] = make_orbit(f, canonical)
        except DegeneracyError:
            report.not_converged += 1
    report.orbits = [found[key] for key in sorted(found)]
    if report.abandoned_singular:
        logger.warning(f"Брошено {report.abandoned_singular} начальных точек из-за вырожденной матрицы Якоби")
    logger.debug(f"Период {p}: найдено {len(report.orbits)} орбит из {report.seeds_tried} начальных точек")
    return report


def find_periodic_orbits(f: PolyMap, p: int, seeds: Optional[Union[SeedSpec, np.ndarray]] = None,
                         workers: Optional[int] = None) -> List[PeriodicOrbit]:
    """Орбиты минимального периода p (см. search_periodic_orbits)."""
    return search_periodic_orbits(f, p, seeds, workers).orbits


def real_fixed_points(f: PolyMap, box: float = DEFAULTS["orbit_box"]) -> List[PeriodicOrbit]:
    """
    Все вещественные неподвижные точки многочлена одной переменной в [-box, box]
    как корни f(x) - x (собственные числа матрицы-компаньона) с уточнением Ньютоном.

    Raises:
        InputError: Если отображение не R -> R
        DegeneracyError: Если f(x) = x тождественно
    """
    if (f.domain_dim, f.range_dim) != (1, 1):
        raise InputError("Перечисление корней определено только для отображений R -> R")
    coeffs = f.univariate_coefficients()
    coeffs = np.pad(coeffs, (0, max(0, 2 - coeffs.shape[0])))
    coeffs[1] -= 1.0
    nonzero = np.nonzero(coeffs)[0]
    if nonzero.size == 0:
        raise DegeneracyError("f(x) = x тождественно: неподвижные точки не изолированы")
    coeffs = coeffs[:nonzero[-1] + 1]
    if coeffs.shape[0] == 1:
        return []

    roots = npoly.polyroots(coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))))
    derivative = npoly.polyder(coeffs)
    orbits = []
    values = []
    for root in roots:
        if abs(root.imag) > 1e-7 * scale:
            continue
        x = float(root.real)
        for _ in range(3):
            slope = npoly.polyval(x, derivative)
            if slope == 0.0:
                break
            x -= npoly.polyval(x, coeffs) / slope
        if abs(x) > box or any(abs(x - v) <= TOLERANCES["orbit_dedup"] for v in values):
            continue
        values.append(x)
    for x in sorted(values):
        try:
            orbits.append(make_orbit(f, np.array([[x]])))
        except DegeneracyError:
            logger.debug(f"Корень {x} не прошел проверку невязки")
    return orbits


def hyperbolicity(orbit: PeriodicOrbit, tol_lo: float = TOLERANCES["hyperbolic_lo"],
                  tol_hi: float = TOLERANCES["hyperbolic_hi"]) -> HyperbolicityVerdict:
    """
    Вердикт гиперболичности: нет собственных чисел мультипликатора по модулю 1.

    hyperbolic при запасе > tol_hi, nonhyperbolic при запасе < tol_lo,
    иначе undecided.
    """
    try:
        eigenvalues = np.linalg.eigvals(orbit.multiplier_matrix)
    except np.linalg.LinAlgError as e:
        logger.warning(f"Собственные числа не найдены: {str(e)}")
        return HyperbolicityVerdict((), float("nan"), "undecided", f"eigen-solver failure: {str(e)}")
    moduli = tuple(sorted(float(v) for v in np.abs(eigenvalues)))
    margin = min(abs(v - 1.0) for v in moduli)
    if margin > tol_hi:
        verdict = "hyperbolic"
    elif margin < tol_lo:
        verdict = "nonhyperbolic"
    else:
        verdict = "undecided"
    return HyperbolicityVerdict(moduli, margin, verdict)


def ray_unit_circle_hits(matrices: Sequence[np.ndarray]) -> List[float]:
    """
    Значения t > 0, при которых произведение (t M_p) ... (t M_1) имеет
    собственное число на единичной окружности: t = |lambda|^(-1/p) по
    ненулевым собственным числам произведения. Их не больше n.

    Raises:
        RangeError: Если p * n^2 > 64
    """
    matrices = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
    if not matrices:
        raise InputError("Нужна хотя бы одна матрица")
    n = matrices[0].shape[0]
    p = len(matrices)
    if any(m.shape != (n, n) for m in matrices):
        raise InputError("Все матрицы должны быть квадратными одного размера")
    if p * n * n > LIMITS["max_ray_entries"]:
        raise RangeError(f"p * n^2 = {p * n * n} превышает {LIMITS['max_ray_entries']}")
    product = np.eye(n)
    for m in matrices:
        product = m @ product
    moduli = np.abs(np.linalg.eigvals(product))
    scale = max(1.0, float(np.max(moduli)))
    hits: List[float] = []
    for modulus in sorted(moduli, reverse=True):
        if modulus <= 1e-14 * scale:
            continue
        t = float(modulus ** (-1.0 / p))
        if not any(abs(t - h) <= 1e-12 * max(1.0, h) for h in hits):
            hits.append(t)
    return sorted(hits)


# ----------------------------------------------------------------------
# Отображение окружности Арнольда
# ----------------------------------------------------------------------

def circle_map_step(x: np.ndarray, omega: np.ndarray, eps: float) -> np.ndarray:
    """Шаг поднятия x -> x + omega + eps sin x (без взятия по модулю)."""
    return x + omega + eps * np.sin(x)


def rotation_number(omega: Union[float, np.ndarray], eps: float, iters: int = DEFAULTS["tongue_iters"],
                    burn_in: int = DEFAULTS["tongue_burn_in"], x0: Union[float, np.ndarray] = 0.0) -> Union[float, np.ndarray]:
    """
    Число вращения (x_N - x_0) / N по поднятию после прогрева (в радианах за шаг).

    Raises:
        RangeError: Если omega вне [0, 2pi] или eps вне [0, 1)
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0) or np.any(omega_arr > TWO_PI) or not 0 <= eps < 1:
        raise RangeError("Требуется 0 <= omega <= 2pi и 0 <= eps < 1")
    if iters < 1:
        raise InputError(f"Число итераций должно быть >= 1: {iters}")
    x = np.broadcast_to(np.asarray(x0, dtype=float), omega_arr.shape).copy()
    for _ in range(burn_in):
        x = circle_map_step(x, omega_arr, eps)
    start = x.copy()
    for _ in range(iters):
        x = circle_map_step(x, omega_arr, eps)
    result = (x - start) / iters
    return float(result) if np.ndim(result) == 0 else result


@dataclass
class TongueScan:
    """Результат сканирования языков Арнольда."""

    epsilon: float
    omegas: np.ndarray
    locked: np.ndarray
    period: np.ndarray
    multiplier: np.ndarray
    undecided: np.ndarray
    q_max: int
    seed: int
    per_period: Dict[int, int] = field(default_factory=dict)

    @property
    def measure(self) -> float:
        return float(np.count_nonzero(self.locked)) / self.omegas.shape[0]

    @property
    def undecided_count(self) -> int:
        return int(np.count_nonzero(self.undecided & ~self.locked))

    @property
    def truncation_note(self) -> str:
        return (f"periods above q_max={self.q_max} are not tested; "
                f"tongues of larger period are counted as unlocked")


def _lock_block(omegas: np.ndarray, x0: np.ndarray, eps: float, q_max: int, burn_in: int,
                newton_iter: int = 30) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Векторизованная проверка захвата для блока значений omega."""
    tol = TOLERANCES["tongue_stability"]
    x = x0.copy()
    for _ in range(burn_in):
        x = circle_map_step(x, omegas, eps)
    trajectory = [x]
    for _ in range(q_max):
        trajectory.append(circle_map_step(trajectory[-1], omegas, eps))

    size = omegas.shape[0]
    locked = np.zeros(size, dtype=bool)
    undecided = np.zeros(size, dtype=bool)
    period = np.zeros(size, dtype=int)
    multiplier = np.full(size, np.nan)

    for q in range(1, q_max + 1):
        active = ~locked
        if not np.any(active):
            break
        om = omegas[active]
        winding = np.round((trajectory[q][active] - trajectory[0][active]) / TWO_PI)
        y = trajectory[0][active].copy()
        ok = np.ones(om.shape[0], dtype=bool)
        for _ in range(newton_iter):
            z = y.copy()
            deriv = np.ones_like(y)
            for _ in range(q):
                deriv *= 1.0 + eps * np.cos(z)
                z = circle_map_step(z, om, eps)
            g = z - y - TWO_PI * winding
            dg = deriv - 1.0
            singular = np.abs(dg) < 1e-14
            ok &= ~singular
            step = np.where(singular, 0.0, g / np.where(singular, 1.0, dg))
            y = y - np.clip(step, -math.pi, math.pi)

        z = y.copy()
        deriv = np.ones_like(y)
        for _ in range(q):
            deriv *= np.abs(1.0 + eps * np.cos(z))
            z = circle_map_step(z, om, eps)
        converged = ok & (np.abs(z - y - TWO_PI * winding) < 1e-9)
        stable = converged & (deriv < 1.0 - tol)
        neutral = converged & (np.abs(deriv - 1.0) <= tol)

        index = np.nonzero(active)[0]
        locked[index[stable]] = True
        period[index[stable]] = q
        multiplier[index[stable]] = deriv[stable]
        undecided[index[neutral]] = True
    return locked, period, multiplier, undecided


def tongue_measure(eps: float, omega_grid: int = DEFAULTS["omega_grid"], q_max: int = DEFAULTS["q_max"],
                   burn_in: int = DEFAULTS["tongue_burn_in"], seed: int = DEFAULTS["seed"],
                   workers: Optional[int] = None) -> TongueScan:
    """
    Доля omega в [0, 2pi], при которых отображение окружности имеет устойчивую
    периодическую орбиту периода q <= q_max (мультипликатор < 1 - 1e-6).

    Узлами сетки служат середины ячеек; начальная фаза каждой ячейки берется
    из собственного подзерна, поэтому результат не зависит от числа потоков.

    Raises:
        RangeError: Если eps вне [0, 1) или сетка меньше 10^3
    """
    if not 0 <= eps < 1:
        raise RangeError(f"eps должно быть в [0, 1): {eps}")
    if omega_grid < 1000:
        raise RangeError(f"Сетка omega должна содержать не меньше 1000 узлов: {omega_grid}")
    omegas = (np.arange(omega_grid) + 0.5) * TWO_PI / omega_grid
    phases = np.array([task_generator(seed, "tongues", i).uniform(0.0, TWO_PI) for i in range(omega_grid)])

    blocks = chunk_ranges(omega_grid, 8)

    def run(block: range):
        idx = np.arange(block.start, block.stop)
        return _lock_block(omegas[idx], phases[idx], eps, q_max, burn_in)

    parts = parallel_map(run, blocks, workers)
    locked = np.concatenate([part[0] for part in parts])
    period = np.concatenate([part[1] for part in parts])
    multiplier = np.concatenate([part[2] for part in parts])
    undecided = np.concatenate([part[3] for part in parts])
    per_period = {int(q): int(np.count_nonzero(period[locked] == q)) for q in np.unique(period[locked])}
    scan = TongueScan(float(eps), omegas, locked, period, multiplier, undecided, q_max, seed, per_period)
    logger.info(f"Языки Арнольда eps={eps}: мера {scan.measure:.4f}, неопределенных {scan.undecided_count}")
    return scan


# ----------------------------------------------------------------------
# Размерность и инъективность
# ----------------------------------------------------------------------

@dataclass
class BoxCountingResult:
    dimension: float
    scales: List[float]
    counts: List[int]
    intercept: float = 0.0


def box_counting_dimension(points: np.ndarray, scales: Sequence[float],
                           origin: Optional[Sequence[float]] = None) -> BoxCountingResult:
    """
    Наклон регрессии log N(delta) по log(1/delta).

    Сетка ящиков привязана к кратному наибольшего масштаба, не
    превосходящему минимум облака (если origin не задан явно).

    Raises:
        InputError: Если точек меньше 10^3 или масштабы не охватывают декаду
        DegeneracyError: Если все счета одинаковы
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    scales = [float(s) for s in scales]
    if points.shape[0] < 1000:
        raise InputError(f"Нужно не меньше 1000 точек, получено {points.shape[0]}")
    if len(scales) < 4 or min(scales) <= 0 or max(scales) / min(scales) < 10:
        raise InputError("Нужно не меньше 4 положительных масштабов, охватывающих декаду")
    if origin is None:
        origin = np.floor(points.min(axis=0) / max(scales)) * max(scales)
    origin = np.asarray(origin, dtype=float)

    counts = []
    for delta in scales:
        cells = np.floor((points - origin) / delta).astype(np.int64)
        counts.append(int(np.unique(cells, axis=0).shape[0]))
    if len(set(counts)) == 1:
        raise DegeneracyError(f"Вырожденная регрессия: все счета равны {counts[0]}")
    slope, intercept = np.polyfit(np.log(1.0 / np.array(scales)), np.log(np.array(counts, dtype=float)), 1)
    return BoxCountingResult(float(slope), scales, counts, float(intercept))


@dataclass
class InjectivityVerdict:
    injective: bool
    collisions: int
    example: Optional[Tuple[int, int]] = None


def injectivity_check(points: np.ndarray, linear_map: np.ndarray, delta: float) -> InjectivityVerdict:
    """
    Поиск почти-коллизий: пар с |x - y| > delta и |Lx - Ly| <= delta / 100.

    Образ индексируется k-d деревом; кандидатами служат пары образов ближе delta / 100.

    Raises:
        RangeError: При n, m > 10 или облаке больше 10^5 точек
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    linear_map = np.atleast_2d(np.asarray(linear_map, dtype=float))
    m, n = linear_map.shape
    if n != points.shape[1]:
        raise InputError(f"Отображение {linear_map.shape} несовместимо с облаком размерности {points.shape[1]}")
    if max(m, n) > LIMITS["max_injectivity_dim"] or points.shape[0] > LIMITS["max_cloud_points"]:
        raise RangeError("Проверка инъективности ограничена m, n <= 10 и 10^5 точками")
    if not delta > 0:
        raise InputError(f"Порог разделения должен быть положительным: {delta}")

    image = points @ linear_map.T
    pairs = cKDTree(image).query_pairs(r=delta / 100.0, output_type="ndarray")
    if pairs.shape[0] == 0:
        return InjectivityVerdict(True, 0)
    separation = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
    bad = pairs[separation > delta]
    if bad.shape[0] == 0:
        return InjectivityVerdict(True, 0)
    first = tuple(int(i) for i in sorted(map(tuple, bad.tolist()))[0])
    return InjectivityVerdict(False, int(bad.shape[0]), first)


# ----------------------------------------------------------------------
# Генераторы облаков точек
# ----------------------------------------------------------------------

def cantor_sample(depth: int = 12) -> np.ndarray:
    """Середины 2^depth отрезков канторова множества глубины depth, форма (2^depth, 1)."""
    left = np.zeros(1)
    length = 1.0
    for _ in range(depth):
        length /= 3.0
        left = np.concatenate([left, left + 2.0 * length])
    return np.sort(left + length / 2.0).reshape(-1, 1)


def cantor_dust(depth: int = 6) -> np.ndarray:
    """Произведение двух канторовых множеств в R^2 (размерность log 4 / log 3)."""
    line = cantor_sample(depth)[:, 0]
    xx, yy = np.meshgrid(line, line, indexing="ij")
    return np.stack([xx.reshape(-1), yy.reshape(-1)], axis=1)


def unit_square_cloud(side: int = 128, seed: int = DEFAULTS["seed"]) -> np.ndarray:
    """Стратифицированная равномерная выборка квадрата: одна точка на ячейку сетки side x side."""
    rng = task_generator(seed, "unit_square")
    i, j = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    base = np.stack([i.reshape(-1), j.reshape(-1)], axis=1).astype(float)
    return (base + rng.uniform(0.0, 1.0, size=base.shape)) / side


def segment_cloud(count: int = 10_000, seed: int = DEFAULTS["seed"]) -> np.ndarray:
    """Стратифицированная выборка отрезка {(t, t/2) : t in [0, 1]}."""
    rng = task_generator(seed, "segment")
    t = (np.arange(count) + rng.uniform(0.0, 1.0, size=count)) / count
    return np.stack([t, 0.5 * t], axis=1)


CLOUD_GENERATORS = {
    "cantor": lambda seed: cantor_sample(12),
    "dust": lambda seed: cantor_dust(6),
    "square": lambda seed: unit_square_cloud(128, seed),
    "segment": lambda seed: segment_cloud(10_000, seed),
}
