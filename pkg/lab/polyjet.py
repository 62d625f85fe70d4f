#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль многочленных отображений R^n -> R^m и их k-струй.

Многочлен хранится как разреженная таблица: мультииндекс -> вектор
коэффициентов в R^m. Это конечномерная замена пространств C^k, на которой
строятся пробы, струи и все производные формулы лаборатории.

Соглашение о тензорах струи: хранятся коэффициенты Тейлора
D^i f(x) / i! в мономиальной форме (т.е. коэффициент при h^alpha равен
d^alpha f(x) / alpha!). Истинные производные возвращает метод
`Jet.derivative_tensor`, который явно домножает на alpha!.

Пример использования:
    from lab.polyjet import PolyMap, jet

    f = PolyMap(1, 1, {(1,): [1.0], (2,): [-1.0]})   # x - x^2
    j = jet(f, [0.0], 1)
    j.derivative_tensor(1)    # array([[1.]])
"""

import math
import logging
import itertools
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import comb

from config.reference_data import LIMITS
from utils.error_handler import InputError, RangeError

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]
Vector = Union[Sequence[float], np.ndarray]


def check_multi_index(alpha: Sequence[int], n: int) -> MultiIndex:
    """
    Проверка мультииндекса.

    Args:
        alpha (Sequence[int]): Показатели степеней
        n (int): Ожидаемая длина

    Returns:
        MultiIndex: Мультииндекс в виде кортежа

    Raises:
        InputError: Если длина не равна n или есть отрицательные показатели
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise InputError(f"Мультииндекс {alpha} должен иметь длину {n}")
    if any(a < 0 for a in alpha):
        raise InputError(f"Мультииндекс {alpha} содержит отрицательные показатели")
    return alpha


def multi_indices(n: int, degree: int) -> List[MultiIndex]:
    """Все мультииндексы длины n степени ровно degree в лексикографическом порядке."""
    if n == 0:
        return [()] if degree == 0 else []
    result = []
    for first in range(degree, -1, -1):
        for rest in multi_indices(n - 1, degree - first):
            result.append((first,) + rest)
    return result


def monomial_count(n: int, k: int) -> int:
    """Размерность пространства многочленов степени <= k от n переменных: C(n+k, k)."""
    return int(comb(n + k, k, exact=True))


def _factorial_multi(alpha: MultiIndex) -> float:
    return float(np.prod([math.factorial(a) for a in alpha])) if alpha else 1.0


class PolyMap:
    """
    Многочленное отображение R^n -> R^m с разреженной таблицей коэффициентов.

    Экземпляры неизменяемы: все операции возвращают новые объекты.
    """

    __slots__ = ("_n", "_m", "_coeffs", "_exps", "_matrix")

    def __init__(self, n: int, m: int, coefficients: Optional[Mapping[Sequence[int], Vector]] = None):
        n, m = int(n), int(m)
        if n < 1 or m < 1:
            raise InputError(f"Размерности должны быть положительными: n={n}, m={m}")
        if n > LIMITS["max_domain_dim"]:
            raise RangeError(f"Размерность области {n} превышает предел {LIMITS['max_domain_dim']}")

        table: Dict[MultiIndex, np.ndarray] = {}
        for key, value in (coefficients or {}).items():
            alpha = check_multi_index(key, n)
            vec = np.array(value, dtype=float).reshape(-1)
            if vec.shape != (m,):
                raise InputError(f"Коэффициент при {alpha} должен иметь длину {m}, получено {vec.shape[0]}")
            if alpha in table:
                vec = table[alpha] + vec
            table[alpha] = vec

        # Нулевые векторы не хранятся
        table = {alpha: vec for alpha, vec in table.items() if np.any(vec != 0.0)}
        for vec in table.values():
            vec.flags.writeable = False

        degree = max((sum(alpha) for alpha in table), default=0)
        if degree > LIMITS["max_degree"]:
            raise RangeError(f"Степень {degree} превышает предел {LIMITS['max_degree']}")

        self._n = n
        self._m = m
        self._coeffs = dict(sorted(table.items()))
        if self._coeffs:
            self._exps = np.array(list(self._coeffs.keys()), dtype=float)
            self._matrix = np.array(list(self._coeffs.values()), dtype=float)
        else:
            self._exps = np.zeros((0, n))
            self._matrix = np.zeros((0, m))

    # ------------------------------------------------------------------
    # Конструкторы
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, n: int, m: int) -> "PolyMap":
        return cls(n, m)

    @classmethod
    def constant(cls, value: Vector, n: int) -> "PolyMap":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(n, value.shape[0], {(0,) * n: value})

    @classmethod
    def monomial(cls, alpha: Sequence[int], value: Vector) -> "PolyMap":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(len(alpha), value.shape[0], {tuple(alpha): value})

    @classmethod
    def affine(cls, matrix: np.ndarray, offset: Optional[Vector] = None) -> "PolyMap":
        """Отображение x -> A x + b (A размера m x n)."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        m, n = matrix.shape
        table: Dict[MultiIndex, np.ndarray] = {}
        for j in range(n):
            alpha = tuple(1 if i == j else 0 for i in range(n))
            table[alpha] = matrix[:, j]
        if offset is not None:
            table[(0,) * n] = np.asarray(offset, dtype=float).reshape(m)
        return cls(n, m, table)

    @classmethod
    def from_univariate(cls, coefficients: Sequence[float]) -> "PolyMap":
        """Многочлен одной переменной по коэффициентам в порядке возрастания степени."""
        return cls(1, 1, {(i,): [c] for i, c in enumerate(coefficients)})

    @classmethod
    def stack(cls, components: Sequence["PolyMap"]) -> "PolyMap":
        """Сборка отображения из скалярных компонент."""
        if not components:
            raise InputError("Нужна хотя бы одна компонента")
        n = components[0].domain_dim
        m = len(components)
        table: Dict[MultiIndex, np.ndarray] = {}
        for i, comp in enumerate(components):
            if comp.domain_dim != n or comp.range_dim != 1:
                raise InputError("Компоненты должны быть скалярными с общей областью определения")
            for alpha, vec in comp.coefficients.items():
                table.setdefault(alpha, np.zeros(m))[i] = vec[0]
        return cls(n, m, table)

    # ------------------------------------------------------------------
    # Свойства
    # ------------------------------------------------------------------

    @property
    def domain_dim(self) -> int:
        return self._n

    @property
    def range_dim(self) -> int:
        return self._m

    @property
    def coefficients(self) -> Mapping[MultiIndex, np.ndarray]:
        return MappingProxyType(self._coeffs)

    @property
    def degree(self) -> int:
        return max((sum(alpha) for alpha in self._coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def __len__(self) -> int:
        return len(self._coeffs)

    # ------------------------------------------------------------------
    # Вычисление
    # ------------------------------------------------------------------

    def eval(self, x: Vector) -> np.ndarray:
        """
        Значение отображения в точке (или в пачке точек формы (N, n)).

        Args:
            x (Vector): Точка длины n или массив точек

        Returns:
            np.ndarray: Вектор длины m (или массив (N, m))

        Raises:
            InputError: При несовпадении размерности
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self._n,):
            raise InputError(f"Ожидалась точка размерности {self._n}, получено {x.shape}")
        if not self._coeffs:
            return np.zeros(x.shape[:-1] + (self._m,))
        monomials = np.prod(x[..., None, :] ** self._exps, axis=-1)
        return monomials @ self._matrix

    __call__ = eval

    def partial(self, alpha: Sequence[int]) -> "PolyMap":
        """
        Частная производная d^alpha f на уровне коэффициентов.

        Args:
            alpha (Sequence[int]): Мультииндекс дифференцирования

        Returns:
            PolyMap: Производная (степень падает на |alpha| или отображение нулевое)
        """
        alpha = check_multi_index(alpha, self._n)
        table: Dict[MultiIndex, np.ndarray] = {}
        for exps, vec in self._coeffs.items():
            if any(e < a for e, a in zip(exps, alpha)):
                continue
            factor = 1.0
            for e, a in zip(exps, alpha):
                for t in range(a):
                    factor *= e - t
            table[tuple(e - a for e, a in zip(exps, alpha))] = factor * vec
        return PolyMap(self._n, self._m, table)

    def d(self, *variables: int) -> "PolyMap":
        """Производная по перечисленным переменным (индексы с нуля, с повторами)."""
        alpha = [0] * self._n
        for v in variables:
            alpha[v] += 1
        return self.partial(alpha)

    def jacobian_map(self) -> List["PolyMap"]:
        """Столбцы матрицы Якоби как многочлены: [df/dx_1, ..., df/dx_n]."""
        return [self.d(j) for j in range(self._n)]

    def jacobian(self, x: Vector) -> np.ndarray:
        """Матрица Якоби m x n в точке x."""
        x = np.asarray(x, dtype=float)
        return np.column_stack([col.eval(x) for col in self.jacobian_map()])

    # ------------------------------------------------------------------
    # Арифметика
    # ------------------------------------------------------------------

    def _check_same_shape(self, other: "PolyMap") -> None:
        if (self._n, self._m) != (other._n, other._m):
            raise InputError(
                f"Несовпадение размерностей: ({self._n}, {self._m}) и ({other._n}, {other._m})")

    def __add__(self, other: "PolyMap") -> "PolyMap":
        if not isinstance(other, PolyMap):
            return NotImplemented
        self._check_same_shape(other)
        table = {alpha: vec.copy() for alpha, vec in self._coeffs.items()}
        for alpha, vec in other._coeffs.items():
            table[alpha] = table[alpha] + vec if alpha in table else vec.copy()
        return PolyMap(self._n, self._m, table)

    def __neg__(self) -> "PolyMap":
        return self.scale(-1.0)

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self + (-other)

    def scale(self, c: float) -> "PolyMap":
        return PolyMap(self._n, self._m, {alpha: c * vec for alpha, vec in self._coeffs.items()})

    def __mul__(self, other: Union[float, "PolyMap"]) -> "PolyMap":
        """Умножение на число или покомпонентное произведение (скалярный множитель транслируется)."""
        if isinstance(other, PolyMap):
            return self.multiply(other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def multiply(self, other: "PolyMap") -> "PolyMap":
        if self._n != other._n:
            raise InputError(f"Несовпадение областей определения: {self._n} и {other._n}")
        if self._m != other._m and 1 not in (self._m, other._m):
            raise InputError(f"Несовместимые размерности значений: {self._m} и {other._m}")
        m = max(self._m, other._m)
        if not self._coeffs or not other._coeffs:
            return PolyMap.zero(self._n, m)
        exps = (self._exps[:, None, :] + other._exps[None, :, :]).reshape(-1, self._n)
        values = (self._matrix[:, None, :] * other._matrix[None, :, :]).reshape(-1, m)
        keys, inverse = np.unique(exps.astype(int), axis=0, return_inverse=True)
        summed = np.zeros((keys.shape[0], m))
        np.add.at(summed, inverse.reshape(-1), values)
        return PolyMap(self._n, m, {tuple(int(e) for e in key): vec for key, vec in zip(keys, summed)})

    def power(self, k: int) -> "PolyMap":
        """Степень скалярного многочлена."""
        if self._m != 1:
            raise InputError("Возведение в степень определено только для скалярных многочленов")
        result = PolyMap.constant([1.0], self._n)
        for _ in range(int(k)):
            result = result.multiply(self)
        return result

    def component(self, i: int) -> "PolyMap":
        return PolyMap(self._n, 1, {alpha: vec[i:i + 1] for alpha, vec in self._coeffs.items()})

    def components(self) -> List["PolyMap"]:
        return [self.component(i) for i in range(self._m)]

    def transform_output(self, matrix: np.ndarray) -> "PolyMap":
        """Линейное преобразование значений: x -> M f(x)."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[1] != self._m:
            raise InputError(f"Матрица {matrix.shape} несовместима с размерностью значений {self._m}")
        return PolyMap(self._n, matrix.shape[0], {alpha: matrix @ vec for alpha, vec in self._coeffs.items()})

    def compose_affine(self, matrix: np.ndarray, offset: Optional[Vector] = None) -> "PolyMap":
        """
        Точная подстановка f(A y + b).

        Args:
            matrix (np.ndarray): Матрица A размера n x n'
            offset (Optional[Vector]): Сдвиг b длины n

        Returns:
            PolyMap: Многочлен от y в R^{n'}
        """
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[0] != self._n:
            raise InputError(f"Матрица подстановки {matrix.shape} несовместима с n={self._n}")
        offset = np.zeros(self._n) if offset is None else np.asarray(offset, dtype=float).reshape(self._n)
        new_n = matrix.shape[1]

        linear_forms = [PolyMap.affine(matrix[j:j + 1, :], offset[j:j + 1]) for j in range(self._n)]
        powers: Dict[Tuple[int, int], PolyMap] = {}

        def power_of(j: int, e: int) -> PolyMap:
            if (j, e) not in powers:
                powers[(j, e)] = PolyMap.constant([1.0], new_n) if e == 0 else power_of(j, e - 1).multiply(linear_forms[j])
            return powers[(j, e)]

        result = PolyMap.zero(new_n, self._m)
        for alpha, vec in self._coeffs.items():
            term = PolyMap.constant([1.0], new_n)
            for j, e in enumerate(alpha):
                if e:
                    term = term.multiply(power_of(j, e))
            result = result + PolyMap(new_n, self._m, {beta: c[0] * vec for beta, c in term._coeffs.items()})
        return result

    def shift(self, x0: Vector) -> "PolyMap":
        """f(x0 + h) как многочлен от h."""
        return self.compose_affine(np.eye(self._n), x0)

    def homogeneous_part(self, degree: int) -> "PolyMap":
        return PolyMap(self._n, self._m, {a: v for a, v in self._coeffs.items() if sum(a) == degree})

    def truncate(self, degree: int) -> "PolyMap":
        return PolyMap(self._n, self._m, {a: v for a, v in self._coeffs.items() if sum(a) <= degree})

    def univariate_coefficients(self, component: int = 0) -> np.ndarray:
        """Коэффициенты скалярной компоненты многочлена одной переменной по возрастанию степени."""
        if self._n != 1:
            raise InputError("Коэффициенты одной переменной определены только при n = 1")
        coeffs = np.zeros(self.degree + 1)
        for (e,), vec in self._coeffs.items():
            coeffs[e] = vec[component]
        return coeffs

    # ------------------------------------------------------------------
    # Сравнение
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        if (self._n, self._m) != (other._n, other._m) or self._coeffs.keys() != other._coeffs.keys():
            return False
        return all(np.array_equal(v, other._coeffs[a]) for a, v in self._coeffs.items())

    __hash__ = None

    def allclose(self, other: "PolyMap", atol: float = 1e-12) -> bool:
        if (self._n, self._m) != (other._n, other._m):
            return False
        for alpha in set(self._coeffs) | set(other._coeffs):
            u = self._coeffs.get(alpha, np.zeros(self._m))
            v = other._coeffs.get(alpha, np.zeros(self._m))
            if not np.allclose(u, v, rtol=0.0, atol=atol):
                return False
        return True

    def __repr__(self) -> str:
        return f"PolyMap(n={self._n}, m={self._m}, terms={len(self._coeffs)}, degree={self.degree})"


def partial(f: PolyMap, alpha: Sequence[int]) -> PolyMap:
    """Частная производная d^alpha f."""
    return f.partial(alpha)


class Jet:
    """
    k-струя отображения в точке: базовая точка и однородные члены
    тейлоровского разложения степеней 0..k в координатах h = x - x0.

    tensors[i]: однородный многочлен степени i от h, коэффициенты
    которого равны d^alpha f(x0) / alpha!.
    """

    __slots__ = ("_order", "_base_point", "_tensors")

    def __init__(self, order: int, base_point: Vector, tensors: Sequence[PolyMap]):
        order = int(order)
        if order < 0:
            raise InputError(f"Порядок струи должен быть неотрицательным: {order}")
        base_point = tuple(float(v) for v in np.asarray(base_point, dtype=float).reshape(-1))
        tensors = tuple(tensors)
        if len(tensors) != order + 1:
            raise InputError(f"Струя порядка {order} требует {order + 1} тензоров, получено {len(tensors)}")
        n = len(base_point)
        m = tensors[0].range_dim
        for i, t in enumerate(tensors):
            if t.domain_dim != n or t.range_dim != m:
                raise InputError(f"Тензор {i} имеет неверные размерности")
            if any(sum(alpha) != i for alpha in t.coefficients):
                raise InputError(f"Тензор {i} должен быть однородным степени {i}")
        self._order = order
        self._base_point = base_point
        self._tensors = tensors

    @property
    def order(self) -> int:
        return self._order

    @property
    def base_point(self) -> np.ndarray:
        return np.array(self._base_point)

    @property
    def tensors(self) -> Tuple[PolyMap, ...]:
        return self._tensors

    @property
    def domain_dim(self) -> int:
        return len(self._base_point)

    @property
    def range_dim(self) -> int:
        return self._tensors[0].range_dim

    def value(self) -> np.ndarray:
        """Значение f(x0)."""
        return self._tensors[0].eval(np.zeros(self.domain_dim))

    def derivative_tensor(self, i: int) -> np.ndarray:
        """
        Истинная производная D^i f(x0) как симметричный массив формы (m, n, ..., n).

        Args:
            i (int): Порядок производной (0 <= i <= k)

        Returns:
            np.ndarray: Массив производных, симметричный по последним i индексам
        """
        if not 0 <= i <= self._order:
            raise InputError(f"Порядок {i} вне диапазона 0..{self._order}")
        n, m = self.domain_dim, self.range_dim
        result = np.zeros((m,) + (n,) * i)
        coeffs = self._tensors[i].coefficients
        for index in itertools.product(range(n), repeat=i):
            alpha = tuple(index.count(j) for j in range(n))
            if alpha in coeffs:
                result[(slice(None),) + index] = _factorial_multi(alpha) * coeffs[alpha]
        return result

    def taylor_polynomial(self) -> PolyMap:
        """Тейлоровский многочлен степени k в исходных координатах x."""
        total = PolyMap.zero(self.domain_dim, self.range_dim)
        for t in self._tensors:
            total = total + t
        return total.compose_affine(np.eye(self.domain_dim), -self.base_point)

    def truncate(self, order: int) -> "Jet":
        if not 0 <= order <= self._order:
            raise InputError(f"Нельзя усечь струю порядка {self._order} до {order}")
        return Jet(order, self._base_point, self._tensors[:order + 1])

    def __add__(self, other: "Jet") -> "Jet":
        if not isinstance(other, Jet):
            return NotImplemented
        if self._order != other._order or self._base_point != other._base_point:
            raise InputError("Складывать можно только струи одного порядка в одной точке")
        return Jet(self._order, self._base_point, [a + b for a, b in zip(self._tensors, other._tensors)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (self._order == other._order and self._base_point == other._base_point
                and all(a == b for a, b in zip(self._tensors, other._tensors)))

    __hash__ = None

    def allclose(self, other: "Jet", atol: float = 1e-12) -> bool:
        return (self._order == other._order
                and np.allclose(self._base_point, other._base_point, rtol=0.0, atol=atol)
                and all(a.allclose(b, atol) for a, b in zip(self._tensors, other._tensors)))

    def __repr__(self) -> str:
        return f"Jet(order={self._order}, base_point={self._base_point}, m={self.range_dim})"


def jet(f: PolyMap, x: Vector, k: int) -> Jet:
    """
    k-струя многочлена f в точке x.

    Коэффициенты получаются точной подстановкой f(x + h) и группировкой
    мономов по степени.

    Args:
        f (PolyMap): Многочлен
        x (Vector): Базовая точка
        k (int): Порядок струи

    Returns:
        Jet: Струя порядка k

    Raises:
        InputError: Если k < 0 или размерность точки не совпадает
    """
    if int(k) < 0:
        raise InputError(f"Порядок струи должен быть неотрицательным: {k}")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != f.domain_dim:
        raise InputError(f"Ожидалась точка размерности {f.domain_dim}, получено {x.shape[0]}")
    shifted = f.shift(x)
    tensors = [shifted.homogeneous_part(i) for i in range(int(k) + 1)]
    return Jet(int(k), x, tensors)


def jet_decompose(j: Jet) -> Tuple[Jet, PolyMap]:
    """
    Разложение j^k f(x) = (j^{k-1} f(x), D^k f(x)).

    Returns:
        Tuple[Jet, PolyMap]: Усеченная струя и однородный член степени k

    Raises:
        InputError: Для струи нулевого порядка
    """
    if j.order == 0:
        raise InputError("Струю нулевого порядка нельзя разложить")
    return j.truncate(j.order - 1), j.tensors[-1]


def jet_recompose(lower: Jet, top: PolyMap) -> Jet:
    """Обратная операция к jet_decompose."""
    return Jet(lower.order + 1, lower.base_point, list(lower.tensors) + [top])


def monomial_basis(n: int, m: int, k: int) -> List[PolyMap]:
    """
    Мономиальный базис пространства P^k(R^n, R^m).

    Returns:
        List[PolyMap]: m * C(n+k, k) базисных отображений x^alpha e_i
    """
    if k > LIMITS["max_degree"]:
        raise RangeError(f"Степень {k} превышает предел {LIMITS['max_degree']}")
    basis = []
    for degree in range(k + 1):
        for alpha in multi_indices(n, degree):
            for i in range(m):
                e = np.zeros(m)
                e[i] = 1.0
                basis.append(PolyMap(n, m, {alpha: e}))
    return basis
