#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль проверки невырожденности бифуркации Андронова-Хопфа для
однопараметрических семейств плоских векторных полей f(mu, x, y) = (g, h).

Кандидаты ищутся как решения системы g = 0, h = 0, tr D_x f = 0 с
det D_x f > 0. Для каждого кандидата вычисляются производная следа вдоль
кривой неподвижных точек и первая ляпуновская величина в координатах
(u, v), где линейная часть антисимметрична.

Соглашение об именах: отрицательная ляпуновская величина означает
суперкритическую бифуркацию (рождается устойчивый цикл), положительная
означает субкритическую.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from typing_extensions import Literal

from config.reference_data import DEFAULTS, TOLERANCES
from lab.polyjet import PolyMap
from utils.error_handler import DegeneracyError, InputError
from utils.seeding import parallel_map

logger = logging.getLogger(__name__)

Classification = Literal[
    "nondegenerate-supercritical",
    "nondegenerate-subcritical",
    "degenerate-c",
    "degenerate-d",
    "not-hopf",
]

MU, X, Y = 0, 1, 2

LABEL_NOTE = ("super/subcritical labels follow the sign of the lyapunov quantity only; "
              "the sign of trace_mu_deriv (direction of the eigenvalue crossing) is not used")


class PlanarFamily:
    """
    Семейство f(mu, x, y) = (g, h): многочлен R^3 -> R^2.

    Raises:
        InputError: Если размерности отличны от (3, 2)
    """

    __slots__ = ("_f", "_name", "_trace")

    def __init__(self, f: PolyMap, name: str = "family"):
        if (f.domain_dim, f.range_dim) != (3, 2):
            raise InputError(f"Семейство должно быть отображением R^3 -> R^2, получено R^{f.domain_dim} -> R^{f.range_dim}")
        self._f = f
        self._name = name
        self._trace = f.d(X).component(0) + f.d(Y).component(1)

    @property
    def f(self) -> PolyMap:
        return self._f

    @property
    def name(self) -> str:
        return self._name

    @property
    def g(self) -> PolyMap:
        return self._f.component(0)

    @property
    def h(self) -> PolyMap:
        return self._f.component(1)

    @property
    def trace_map(self) -> PolyMap:
        """tr D_x f как скалярный многочлен от (mu, x, y)."""
        return self._trace

    @staticmethod
    def _point(mu: float, xy: Sequence[float]) -> np.ndarray:
        return np.array([mu, xy[0], xy[1]], dtype=float)

    def value(self, mu: float, xy: Sequence[float]) -> np.ndarray:
        return self._f.eval(self._point(mu, xy))

    def state_jacobian(self, mu: float, xy: Sequence[float]) -> np.ndarray:
        """D_x f в точке (2 x 2)."""
        return self._f.jacobian(self._point(mu, xy))[:, 1:]

    def parameter_derivative(self, mu: float, xy: Sequence[float]) -> np.ndarray:
        """D_mu f в точке (вектор длины 2)."""
        return self._f.d(MU).eval(self._point(mu, xy))

    def __repr__(self) -> str:
        return f"PlanarFamily(name={self._name!r}, degree={self._f.degree})"


@dataclass(frozen=True)
class HopfReport:
    """Результат проверки условий невырожденности в точке бифуркации."""

    mu0: float
    x0: Tuple[float, float]
    omega: float
    eigenvalues: Tuple[complex, complex]
    trace_mu_derivative: float
    lyapunov_quantity: float
    classification: Classification
    curve_slope: Tuple[float, float] = (0.0, 0.0)
    margin: float = 0.0

    @property
    def is_nondegenerate(self) -> bool:
        return self.classification.startswith("nondegenerate")

    @property
    def note(self) -> str:
        return LABEL_NOTE


@dataclass
class FixedCurve:
    """Дискретизация кривой неподвижных точек (mu, x(mu))."""

    mus: np.ndarray
    points: np.ndarray
    slope: Tuple[float, float]
    truncated: bool = False
    diagnostic: str = ""
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))


# ----------------------------------------------------------------------
# Поиск кандидатов
# ----------------------------------------------------------------------

def _candidate_system(family: PlanarFamily) -> PolyMap:
    return PolyMap.stack([family.g, family.h, family.trace_map])


def _newton_candidate(system: PolyMap, start: np.ndarray, max_iter: int) -> Optional[np.ndarray]:
    z = start.copy()
    residual = system.eval(z)
    norm = float(np.max(np.abs(residual)))
    for _ in range(max_iter):
        if norm <= 1e-13:
            break
        try:
            step = np.linalg.solve(system.jacobian(z), -residual)
        except np.linalg.LinAlgError:
            return None
        scale = 1.0
        candidate = z + step
        candidate_residual = system.eval(candidate)
        halvings = 0
        while not float(np.max(np.abs(candidate_residual))) <= norm and halvings < 10:
            scale *= 0.5
            candidate = z + scale * step
            candidate_residual = system.eval(candidate)
            halvings += 1
        z, residual = candidate, candidate_residual
        norm = float(np.max(np.abs(residual)))
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > 1e8:
            return None
    return z if norm <= 1e-10 else None


def find_hopf_candidates(family: PlanarFamily, box: float = DEFAULTS["hopf_box"],
                         grid: int = DEFAULTS["hopf_grid"],
                         workers: Optional[int] = None) -> List[Tuple[float, Tuple[float, float]]]:
    """
    Кандидаты (mu0, x0): f = 0, tr D_x f = 0, det D_x f > 1e-8.

    Метод Ньютона запускается из узлов сетки grid^3 в [-box, box]^3;
    решения дедуплицируются с точностью 1e-6 и упорядочиваются.

    Args:
        family (PlanarFamily): Семейство
        box (float): Полуширина области поиска
        grid (int): Число узлов по каждой оси
        workers (Optional[int]): Число потоков (на результат не влияет)

    Returns:
        List[Tuple[float, Tuple[float, float]]]: Кандидаты, возможно пустой список
    """
    system = _candidate_system(family)
    axis = np.linspace(-box, box, grid)
    mesh = np.meshgrid(axis, axis, axis, indexing="ij")
    seeds = np.stack([m.reshape(-1) for m in mesh], axis=1)

    solutions = parallel_map(lambda s: _newton_candidate(system, s, DEFAULTS["newton_max_iter"]),
                             list(seeds), workers)

    found: Dict[Tuple[int, ...], np.ndarray] = {}
    for z in solutions:
        if z is None:
            continue
        det = float(np.linalg.det(family.state_jacobian(z[MU], z[1:])))
        if det <= TOLERANCES["hopf_det"]:
            continue
        key = tuple(int(v) for v in np.round(z / TOLERANCES["orbit_dedup"]))
        found.setdefault(key, z)
    candidates = [(float(found[k][MU]), (float(found[k][X]), float(found[k][Y]))) for k in sorted(found)]
    logger.info(f"Семейство {family.name}: найдено кандидатов {len(candidates)}")
    return candidates


# ----------------------------------------------------------------------
# Кривая неподвижных точек
# ----------------------------------------------------------------------

def curve_slope(family: PlanarFamily, mu: float, xy: Sequence[float]) -> Tuple[float, float]:
    """
    (y', z') = -(D_x f)^-1 D_mu f по теореме о неявной функции.

    Raises:
        DegeneracyError: Если det D_x f близок к нулю
    """
    jac = family.state_jacobian(mu, xy)
    if abs(np.linalg.det(jac)) <= TOLERANCES["continuation_det"]:
        raise DegeneracyError(f"det D_x f вырожден при mu={mu}")
    slope = -np.linalg.solve(jac, family.parameter_derivative(mu, xy))
    return float(slope[0]), float(slope[1])


def _correct(family: PlanarFamily, mu: float, guess: np.ndarray, max_iter: int = 20) -> Tuple[np.ndarray, float]:
    x = guess.copy()
    for _ in range(max_iter):
        residual = family.value(mu, x)
        if float(np.max(np.abs(residual))) <= 1e-13:
            break
        x = x - np.linalg.solve(family.state_jacobian(mu, x), residual)
    return x, float(np.max(np.abs(family.value(mu, x))))


def _branch(family: PlanarFamily, mu0: float, x0: np.ndarray, delta: float, step: float,
            direction: int) -> Tuple[List[float], List[np.ndarray], List[float], str]:
    mus, points, residuals = [], [], []
    mu, x = mu0, x0.copy()
    steps = int(math.ceil(delta / step - 1e-12))
    for i in range(1, steps + 1):
        target = mu0 + direction * min(i * step, delta)
        try:
            tangent = np.array(curve_slope(family, mu, x))
            predicted = x + (target - mu) * tangent
            corrected, residual = _correct(family, target, predicted)
        except (DegeneracyError, np.linalg.LinAlgError) as e:
            return mus, points, residuals, f"truncated at mu={target:.6g}: {str(e)}"
        if residual >= 1e-9:
            return mus, points, residuals, f"truncated at mu={target:.6g}: residual {residual:.3e}"
        if abs(np.linalg.det(family.state_jacobian(target, corrected))) <= TOLERANCES["continuation_det"]:
            return mus, points, residuals, f"truncated at mu={target:.6g}: det D_x f below threshold"
        mu, x = target, corrected
        mus.append(mu)
        points.append(x)
        residuals.append(residual)
    return mus, points, residuals, ""


def track_fixed_curve(family: PlanarFamily, mu0: float, x0: Sequence[float],
                      delta: float = DEFAULTS["continuation_delta"],
                      step: float = DEFAULTS["continuation_step"]) -> FixedCurve:
    """
    Продолжение кривой неподвижных точек на [mu0 - delta, mu0 + delta]
    методом предиктор-корректор.

    Args:
        family (PlanarFamily): Семейство
        mu0 (float): Начальное значение параметра
        x0 (Sequence[float]): Неподвижная точка при mu0
        delta (float): Полуширина интервала продолжения
        step (float): Шаг по параметру

    Returns:
        FixedCurve: Узлы кривой по возрастанию mu и наклон в mu0

    Raises:
        DegeneracyError: Если det D_x f(mu0, x0) вырожден
    """
    if not delta > 0 or not step > 0:
        raise InputError(f"Нужно delta > 0 и step > 0, получено {delta}, {step}")
    start, residual = _correct(family, mu0, np.asarray(x0, dtype=float))
    slope = curve_slope(family, mu0, start)

    back_mus, back_points, back_res, back_note = _branch(family, mu0, start, delta, step, -1)
    fwd_mus, fwd_points, fwd_res, fwd_note = _branch(family, mu0, start, delta, step, +1)

    mus = np.array(back_mus[::-1] + [mu0] + fwd_mus)
    points = np.array(back_points[::-1] + [start] + fwd_points)
    residuals = np.array(back_res[::-1] + [residual] + fwd_res)
    diagnostic = "; ".join(note for note in (back_note, fwd_note) if note)
    if diagnostic:
        logger.warning(f"Кривая неподвижных точек усечена: {diagnostic}")
    return FixedCurve(mus, points, slope, bool(diagnostic), diagnostic, residuals)


# ----------------------------------------------------------------------
# Условия невырожденности
# ----------------------------------------------------------------------

def trace_mu_derivative(family: PlanarFamily, mu0: float, x0: Sequence[float],
                        y_prime: float, z_prime: float) -> float:
    """
    Производная следа D_x f вдоль кривой неподвижных точек:
    g_{mu x} + y' g_{xx} + z' g_{xy} + h_{mu y} + y' h_{xy} + z' h_{yy}.

    Все частные производные берутся точно по коэффициентам.
    """
    point = PlanarFamily._point(mu0, x0)
    g, h = family.g, family.h

    def at(poly: PolyMap, *variables: int) -> float:
        return float(poly.d(*variables).eval(point)[0])

    return (at(g, MU, X) + y_prime * at(g, X, X) + z_prime * at(g, X, Y)
            + at(h, MU, Y) + y_prime * at(h, X, Y) + z_prime * at(h, Y, Y))


def antisymmetric_coords(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Замена базиса T, при которой T^-1 A T = [[0, -omega], [omega, 0]].

    Первый базисный вектор направлен по e_1, второй равен A e_1 / omega;
    T нормирован так, что |det T| = 1.

    Args:
        matrix (np.ndarray): Матрица A 2 x 2 с нулевым следом и det > 0

    Returns:
        Tuple[np.ndarray, float]: (T, omega), omega = sqrt(det A)

    Raises:
        InputError: Если |tr A| >= 1e-8 или det A <= 1e-10
        DegeneracyError: Если невязка сопряжения превышает 1e-9
    """
    a = np.asarray(matrix, dtype=float)
    if a.shape != (2, 2):
        raise InputError(f"Ожидалась матрица 2 x 2, получено {a.shape}")
    if abs(np.trace(a)) >= TOLERANCES["hopf_trace"]:
        raise InputError(f"След матрицы {np.trace(a):.3e} не равен нулю")
    det = float(np.linalg.det(a))
    if det <= TOLERANCES["continuation_det"]:
        raise InputError(f"Определитель {det:.3e} не положителен")
    omega = math.sqrt(det)

    e1 = np.array([1.0, 0.0])
    transform = np.column_stack([e1, a @ e1 / omega])
    transform /= math.sqrt(abs(a[1, 0]) / omega)

    normal = np.array([[0.0, -omega], [omega, 0.0]])
    residual = float(np.max(np.abs(np.linalg.solve(transform, a @ transform) - normal)))
    if residual > TOLERANCES["antisymmetric"] * max(1.0, omega):
        raise DegeneracyError(f"Невязка приведения к антисимметричной форме {residual:.3e}")
    return transform, omega


def lyapunov_quantity(family: PlanarFamily, mu0: float, x0: Sequence[float]) -> float:
    """
    Ляпуновская величина в координатах (u, v) с антисимметричной линейной частью:

        omega (g_uuu + g_uvv + h_uuv + h_vvv) + g_uv (g_uu + g_vv)
        - h_uv (h_uu + h_vv) - g_uu h_uu + g_vv h_vv

    Замена координат (x, y) = x0 + T (u, v) применяется к многочлену точно.
    """
    transform, omega = antisymmetric_coords(family.state_jacobian(mu0, x0))
    substitution = np.zeros((3, 2))
    substitution[1:, :] = transform
    offset = np.array([mu0, x0[0], x0[1]], dtype=float)
    local = family.f.compose_affine(substitution, offset).transform_output(np.linalg.inv(transform))
    g, h = local.component(0), local.component(1)
    origin = np.zeros(2)
    u, v = 0, 1

    def at(poly: PolyMap, *variables: int) -> float:
        return float(poly.d(*variables).eval(origin)[0])

    g_uu, g_vv, g_uv = at(g, u, u), at(g, v, v), at(g, u, v)
    h_uu, h_vv, h_uv = at(h, u, u), at(h, v, v), at(h, u, v)
    cubic = at(g, u, u, u) + at(g, u, v, v) + at(h, u, u, v) + at(h, v, v, v)
    return (omega * cubic + g_uv * (g_uu + g_vv) - h_uv * (h_uu + h_vv)
            - g_uu * h_uu + g_vv * h_vv)


def hopf_report(family: PlanarFamily, mu0: float, x0: Sequence[float]) -> HopfReport:
    """
    Проверка условий (a)-(d) в заданной точке.

    Если точка не является неподвижной с чисто мнимыми собственными
    числами, возвращается классификация not-hopf.
    """
    x0 = (float(x0[0]), float(x0[1]))
    jac = family.state_jacobian(mu0, x0)
    eigenvalues = tuple(complex(v) for v in np.linalg.eigvals(jac))
    residual = float(np.max(np.abs(family.value(mu0, x0))))
    det = float(np.linalg.det(jac))
    if (residual > TOLERANCES["orbit_residual"] or abs(np.trace(jac)) >= TOLERANCES["hopf_trace"]
            or det <= TOLERANCES["hopf_det"]):
        return HopfReport(mu0, x0, 0.0, eigenvalues, float("nan"), float("nan"), "not-hopf")

    slope = curve_slope(family, mu0, x0)
    trace_derivative = trace_mu_derivative(family, mu0, x0, *slope)
    lyapunov = lyapunov_quantity(family, mu0, x0)
    threshold = TOLERANCES["hopf_degenerate"]
    if abs(trace_derivative) < threshold:
        classification = "degenerate-c"
    elif abs(lyapunov) < threshold:
        classification = "degenerate-d"
    elif lyapunov < 0:
        classification = "nondegenerate-supercritical"
    else:
        classification = "nondegenerate-subcritical"
    margin = min(abs(trace_derivative), abs(lyapunov))
    return HopfReport(mu0, x0, math.sqrt(det), eigenvalues, trace_derivative, lyapunov,
                      classification, slope, margin)


def hopf_classify(family: PlanarFamily, box: float = DEFAULTS["hopf_box"], grid: int = DEFAULTS["hopf_grid"],
                  workers: Optional[int] = None) -> List[HopfReport]:
    """
    Полный конвейер: поиск кандидатов, затем проверка условий (c) и (d).

    Returns:
        List[HopfReport]: Отчет для каждого кандидата в каноническом порядке
    """
    reports = []
    for mu0, x0 in find_hopf_candidates(family, box, grid, workers):
        try:
            report = hopf_report(family, mu0, x0)
        except (DegeneracyError, InputError) as e:
            logger.warning(f"Кандидат mu0={mu0:.6g} пропущен: {str(e)}")
            continue
        logger.info(f"mu0={mu0:.6g}, x0={x0}: {report.classification}")
        reports.append(report)
    return reports
