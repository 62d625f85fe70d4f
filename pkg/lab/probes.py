#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль конечномерных проб.

Проба есть упорядоченный конечный базис g_1..g_q элементов функционального
пространства вместе с коробкой [-R, R]^q, из которой равномерно
выбирается параметр lambda. Возмущенный элемент: f_lambda = f + sum lambda_i g_i.

Здесь же строится базис эрмитовой интерполяции 1-струй:
P_j(x) = prod_{i != j} |x - x_i|^2 и P_jk(x) = P_j(x) (x - x_j)_k.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from config.reference_data import DEFAULTS, LIMITS, TOLERANCES
from lab.polyjet import PolyMap, monomial_basis
from utils.error_handler import DegeneracyError, InputError, RangeError

logger = logging.getLogger(__name__)

Element = Union[PolyMap, np.ndarray]


def poly_ambient(n: int, m: int) -> str:
    return f"poly({n},{m})"


def sequence_ambient(length: int) -> str:
    return f"sequence({length})"


def ambient_of(element: Element) -> str:
    """Дескриптор пространства, которому принадлежит элемент."""
    if isinstance(element, PolyMap):
        return poly_ambient(element.domain_dim, element.range_dim)
    return sequence_ambient(int(np.asarray(element).shape[0]))


def _evaluation_matrix(basis: Sequence[Element], seed: int = 0) -> np.ndarray:
    """Матрица значений базиса на случайных точках (строка на элемент)."""
    if isinstance(basis[0], PolyMap):
        n = basis[0].domain_dim
        rng = np.random.default_rng(seed)
        count = max(len(basis), 1) + 8
        points = rng.uniform(-1.0, 1.0, size=(count, n))
        return np.array([g.eval(points).reshape(-1) for g in basis])
    return np.array([np.asarray(g, dtype=float) for g in basis])


def is_independent(basis: Sequence[Element], tol: float = TOLERANCES["probe_rank"], seed: int = 0) -> bool:
    """
    Проверка линейной независимости базиса по рангу матрицы значений.

    Args:
        basis (Sequence[Element]): Элементы пробы
        tol (float): Относительный порог сингулярных чисел
        seed (int): Зерно выбора точек

    Returns:
        bool: True, если ранг равен числу элементов
    """
    if not basis:
        return False
    matrix = _evaluation_matrix(basis, seed)
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        return False
    rank = int(np.sum(singular > tol * singular[0]))
    return rank == len(basis)


@dataclass(frozen=True, eq=False)
class Probe:
    """Конечномерная проба с коробкой выборки параметров."""

    ambient: str
    basis: Tuple[Element, ...]
    box_radius: float = DEFAULTS["box_radius"]
    name: str = field(default="probe", compare=False)

    def __post_init__(self):
        if not self.basis:
            raise InputError("Проба должна содержать хотя бы один элемент")
        if not self.box_radius > 0:
            raise InputError(f"Радиус коробки должен быть положительным: {self.box_radius}")
        for g in self.basis:
            if ambient_of(g) != self.ambient:
                raise InputError(f"Элемент из {ambient_of(g)} не принадлежит пространству {self.ambient}")
        if not is_independent(self.basis):
            raise InputError(f"Базис пробы {self.name} линейно зависим")

    @property
    def q(self) -> int:
        return len(self.basis)

    def with_radius(self, box_radius: float) -> "Probe":
        return Probe(self.ambient, self.basis, float(box_radius), self.name)

    def accepts(self, element: Element) -> bool:
        return ambient_of(element) == self.ambient

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Равномерная выборка lambda из [-R, R]^q."""
        return rng.uniform(-self.box_radius, self.box_radius, size=self.q)

    def perturb(self, base: Element, lam: Sequence[float]) -> Element:
        """
        Возмущение f_lambda = f + sum lambda_i g_i.

        Raises:
            InputError: Если базовый элемент из другого пространства
        """
        if not self.accepts(base):
            raise InputError(f"Базовый элемент из {ambient_of(base)} несовместим с пробой {self.ambient}")
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.q,):
            raise InputError(f"Ожидалось {self.q} параметров, получено {lam.shape}")
        if isinstance(base, PolyMap):
            result = base
            for c, g in zip(lam, self.basis):
                if c != 0.0:
                    result = result + g.scale(c)
            return result
        return np.asarray(base, dtype=float) + lam @ np.array(self.basis)


def constant_probe(m: int, n: int = 1, box_radius: float = DEFAULTS["box_radius"]) -> Probe:
    """Проба постоянных отображений e_1..e_m."""
    if m < 1:
        raise InputError(f"Размерность значений должна быть >= 1: {m}")
    basis = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        basis.append(PolyMap.constant(e, n))
    return Probe(poly_ambient(n, m), tuple(basis), box_radius, name=f"constant:{m}")


def harmonic_probe(length: int, box_radius: float = DEFAULTS["box_radius"]) -> Probe:
    """Одномерная проба последовательностей, натянутая на (1, 1/2, ..., 1/N)."""
    if length < 1:
        raise InputError(f"Длина усечения должна быть >= 1: {length}")
    element = 1.0 / np.arange(1, length + 1, dtype=float)
    return Probe(sequence_ambient(length), (element,), box_radius, name=f"harmonic:{length}")


def polynomial_probe(n: int, m: int, k: int, box_radius: float = DEFAULTS["box_radius"]) -> Probe:
    """
    Проба P^k(R^n, R^m) с мономиальным базисом, q = m * C(n+k, k).

    Raises:
        RangeError: При превышении ограничений степени или размерности
    """
    if k < 0:
        raise InputError(f"Степень должна быть неотрицательной: {k}")
    if k > LIMITS["max_degree"] or n > LIMITS["max_domain_dim"]:
        raise RangeError(f"Проба P^{k}(R^{n}) превышает ограничения размера")
    basis = monomial_basis(n, m, k)
    return Probe(poly_ambient(n, m), tuple(basis), box_radius, name=f"polynomial:{n},{m},{k}")


def linear_probe(n: int, m: int, box_radius: float = DEFAULTS["box_radius"]) -> Probe:
    """Проба линейных отображений x -> x_j e_i, q = n * m."""
    basis = []
    for j in range(n):
        for i in range(m):
            matrix = np.zeros((m, n))
            matrix[i, j] = 1.0
            basis.append(PolyMap.affine(matrix))
    return Probe(poly_ambient(n, m), tuple(basis), box_radius, name=f"linear:{n},{m}")


def _check_points(points: Sequence[Sequence[float]]) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] < 1:
        raise InputError("Нужна хотя бы одна точка интерполяции")
    p = points.shape[0]
    for a in range(p):
        for b in range(a + 1, p):
            if np.linalg.norm(points[a] - points[b]) <= TOLERANCES["point_separation"]:
                raise InputError(f"Точки {a} и {b} совпадают (расстояние <= {TOLERANCES['point_separation']})")
    return points


def _squared_distance(point: np.ndarray) -> PolyMap:
    """|x - x_i|^2 как скалярный многочлен."""
    n = point.shape[0]
    total = PolyMap.zero(n, 1)
    for k in range(n):
        coord = PolyMap.affine(np.eye(n)[k:k + 1, :], [-point[k]])
        total = total + coord.multiply(coord)
    return total


def hermite_basis(points: Sequence[Sequence[float]]) -> Tuple[List[PolyMap], List[List[PolyMap]]]:
    """
    Базис эрмитовой интерполяции 1-струй в p различных точках.

    Args:
        points (Sequence[Sequence[float]]): Точки x_1..x_p в R^n

    Returns:
        Tuple[List[PolyMap], List[List[PolyMap]]]: Многочлены P_j (степени 2p-2)
            и P_jk (степени 2p-1), P_jk индексируются как [j][k]

    Raises:
        InputError: Если точки совпадают
    """
    points = _check_points(points)
    p, n = points.shape
    squares = [_squared_distance(x) for x in points]

    p_j: List[PolyMap] = []
    p_jk: List[List[PolyMap]] = []
    for j in range(p):
        product = PolyMap.constant([1.0], n)
        for i in range(p):
            if i != j:
                product = product.multiply(squares[i])
        p_j.append(product)
        row = []
        for k in range(n):
            coord = PolyMap.affine(np.eye(n)[k:k + 1, :], [-points[j, k]])
            row.append(product.multiply(coord))
        p_jk.append(row)
    return p_j, p_jk


def hermite_system(points: np.ndarray, p_j: List[PolyMap], p_jk: List[List[PolyMap]]) -> np.ndarray:
    """
    Матрица условий (значения, затем градиенты в каждой точке) для базиса
    {P_j} U {P_jk}. Столбцы: сначала P_1..P_p, затем P_11..P_pn.
    """
    p, n = points.shape
    elements = list(p_j) + [g for row in p_jk for g in row]
    size = p * (n + 1)
    matrix = np.zeros((size, size))
    for col, g in enumerate(elements):
        values = g.eval(points)[:, 0]
        grads = np.column_stack([col.eval(points)[:, 0] for col in g.jacobian_map()])
        matrix[:p, col] = values
        matrix[p:, col] = grads.reshape(-1)
    return matrix


def _combine(elements: List[PolyMap], coefficients: np.ndarray, n: int, m: int) -> PolyMap:
    """Сумма sum_e c_e g_e, где c_e - строка коэффициентов длины m."""
    result = PolyMap.zero(n, m)
    for coeffs, g in zip(coefficients, elements):
        if np.any(coeffs != 0.0):
            result = result + g.multiply(PolyMap.constant(coeffs, n))
    return result


def _jet_defect(h: PolyMap, points: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Разность предписанных и фактических струй h в порядке строк системы."""
    p, n = points.shape
    actual_values = h.eval(points)
    actual_grads = np.stack([h.jacobian(x) for x in points])
    actual = np.vstack([actual_values, actual_grads.transpose(0, 2, 1).reshape(p * n, h.range_dim)])
    return rhs - actual


def hermite_interpolate(points: Sequence[Sequence[float]], values: Sequence[Sequence[float]],
                        gradients: Sequence[Sequence[Sequence[float]]]) -> PolyMap:
    """
    Многочлен степени <= 2p-1 с заданными значениями и матрицами Якоби.

    Каждая координата значений интерполируется отдельно (общая матрица,
    m правых частей). Многочлен собирается в мономиальном базисе, затем
    ошибка восстановления струй уменьшается итеративным уточнением.

    Args:
        points: p различных точек в R^n
        values: p векторов в R^m
        gradients: p матриц m x n

    Returns:
        PolyMap: Интерполянт h: R^n -> R^m

    Raises:
        InputError: При несогласованных размерах или совпадающих точках
        DegeneracyError: Если невязка решения превышает 1e-8 или ошибка
            восстановления значений и градиентов после уточнения больше 1e-9
    """
    points = _check_points(points)
    p, n = points.shape
    values = np.asarray(values, dtype=float).reshape(p, -1)
    m = values.shape[1]
    gradients = np.asarray(gradients, dtype=float)
    if gradients.shape != (p, m, n):
        raise InputError(f"Ожидались градиенты формы {(p, m, n)}, получено {gradients.shape}")

    p_j, p_jk = hermite_basis(points)
    matrix = hermite_system(points, p_j, p_jk)
    rhs = np.vstack([values, gradients.transpose(0, 2, 1).reshape(p * n, m)])

    try:
        solution = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as e:
        logger.error(f"Вырожденная система эрмитовой интерполяции: {str(e)}")
        raise DegeneracyError(f"Вырожденная система эрмитовой интерполяции: {str(e)}")

    residual = float(np.max(np.abs(matrix @ solution - rhs))) if rhs.size else 0.0
    if residual > TOLERANCES["hermite_residual"]:
        raise DegeneracyError(f"Невязка эрмитовой интерполяции {residual:.3e} превышает допуск")

    elements = list(p_j) + [g for row in p_jk for g in row]
    result = _combine(elements, solution, n, m)
    defect = _jet_defect(result, points, rhs)
    error = float(np.max(np.abs(defect)))

    # Разложение по мономам теряет разряды; поправки решаются в том же базисе
    for _ in range(LIMITS["hermite_refinements"]):
        if error == 0.0:
            break
        correction = np.linalg.solve(matrix, defect)
        candidate = result + _combine(elements, correction, n, m)
        candidate_defect = _jet_defect(candidate, points, rhs)
        candidate_error = float(np.max(np.abs(candidate_defect)))
        if candidate_error >= error:
            break
        result, defect, error = candidate, candidate_defect, candidate_error

    if error > TOLERANCES["hermite_reconstruction"]:
        raise DegeneracyError(f"Ошибка восстановления струй {error:.3e} превышает допуск "
                              f"{TOLERANCES['hermite_reconstruction']}")
    logger.debug(f"Эрмитова интерполяция: p={p}, n={n}, m={m}, невязка {residual:.2e}, ошибка {error:.2e}")
    return result
