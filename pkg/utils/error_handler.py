#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль обработки ошибок: иерархия исключений лаборатории и их
отображение в коды завершения командной строки.
"""

import sys
import logging
import functools
from typing import Callable, Any

import numpy as np

logger = logging.getLogger(__name__)

# Коды завершения
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class PrevlabError(Exception):
    """Базовое исключение лаборатории."""


class InputError(PrevlabError, ValueError):
    """Некорректные входные данные: размерности, параметры, формат файла."""


class RangeError(InputError):
    """Параметр вне допустимого диапазона (включая ограничения степени)."""


class DegeneracyError(PrevlabError, ArithmeticError):
    """Численная неудача: вырожденная система, большая невязка."""


def exit_code_for(error: BaseException) -> int:
    """
    Определение кода завершения по типу исключения.

    Args:
        error (BaseException): Перехваченное исключение

    Returns:
        int: 2 для ошибок валидации, 3 для численных, 1 для прочих
    """
    if isinstance(error, InputError):
        return EXIT_VALIDATION
    if isinstance(error, (DegeneracyError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERICAL
    return EXIT_UNEXPECTED


def handle_errors(func: Callable[..., int]) -> Callable[..., int]:
    """
    Декоратор точки входа: логирует исключение, печатает строку в stderr
    и возвращает соответствующий код завершения.

    Args:
        func (Callable[..., int]): Функция, возвращающая код завершения

    Returns:
        Callable[..., int]: Обернутая функция
    """
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return func(*args, **kwargs)
        except PrevlabError as e:
            code = exit_code_for(e)
            logger.error(f"{type(e).__name__}: {str(e)}")
            print(f"ошибка: {str(e)}", file=sys.stderr)
            return code
        except (np.linalg.LinAlgError, FloatingPointError) as e:
            logger.error(f"Численная ошибка: {str(e)}", exc_info=True)
            print(f"численная ошибка: {str(e)}", file=sys.stderr)
            return EXIT_NUMERICAL
        except Exception as e:
            logger.error(f"Критическая ошибка: {str(e)}", exc_info=True)
            print(f"критическая ошибка: {str(e)}", file=sys.stderr)
            return EXIT_UNEXPECTED
    return wrapper
