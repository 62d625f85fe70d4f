#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль детерминированной случайности и параллельного выполнения.

Все случайные величины выводятся из одного главного зерна: для каждой
задачи (модуль, номер) строится собственный генератор Philox со
счетчиковым ключом, поэтому результат не зависит от числа потоков и
порядка выполнения.
"""

import os
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from config.reference_data import DEFAULTS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "PREVLAB_WORKERS"


def derive_seed(master: int, module: str, index: int = 0) -> int:
    """
    Подзерно задачи из (главное зерно, имя модуля, номер задачи).

    Args:
        master (int): Главное зерно эксперимента
        module (str): Имя модуля-потребителя
        index (int): Номер задачи

    Returns:
        int: 64-битное подзерно
    """
    digest = hashlib.blake2b(f"{int(master)}:{module}:{int(index)}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def task_generator(master: int, module: str, index: int = 0) -> np.random.Generator:
    """Генератор Philox, ключ которого однозначно задан задачей."""
    return np.random.Generator(np.random.Philox(key=derive_seed(master, module, index)))


def resolve_workers(workers: Optional[int] = None) -> int:
    """
    Число рабочих потоков: явное значение, затем переменная окружения
    PREVLAB_WORKERS, затем значение по умолчанию.
    """
    if workers is None:
        env_value = os.environ.get(WORKERS_ENV)
        if env_value:
            try:
                workers = int(env_value)
            except ValueError:
                logger.warning(f"Некорректное значение {WORKERS_ENV}={env_value!r}, используется {DEFAULTS['workers']}")
                workers = DEFAULTS["workers"]
        else:
            workers = DEFAULTS["workers"]
    return max(1, int(workers))


def chunk_ranges(total: int, chunks: int) -> List[range]:
    """Разбиение 0..total-1 на последовательные блоки (не зависит от числа потоков)."""
    size = max(1, -(-total // max(1, chunks)))
    return [range(start, min(start + size, total)) for start in range(0, total, size)]


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """
    Применение func к элементам с сохранением порядка результатов.

    Args:
        func (Callable[[T], R]): Чистая функция без разделяемого состояния
        items (Sequence[T]): Элементы
        workers (Optional[int]): Число потоков

    Returns:
        List[R]: Результаты в порядке элементов
    """
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def flatten(parts: Iterable[Iterable[T]]) -> List[T]:
    return [item for part in parts for item in part]
