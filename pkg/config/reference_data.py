#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Справочные данные лаборатории: допуски, значения по умолчанию,
схемы команд и встроенные тестовые отображения.
"""

import difflib
from typing import Dict, List, Optional

# Допуски численных проверок
TOLERANCES = {
    "atom_merge": 1e-12,
    "probe_rank": 1e-10,
    "point_separation": 1e-9,
    "hermite_residual": 1e-8,
    "hermite_reconstruction": 1e-9,
    "orbit_residual": 1e-9,
    "orbit_distinct": 1e-6,
    "orbit_dedup": 1e-6,
    "hyperbolic_lo": 1e-8,
    "hyperbolic_hi": 1e-6,
    "hopf_det": 1e-8,
    "hopf_trace": 1e-8,
    "hopf_degenerate": 1e-8,
    "continuation_det": 1e-10,
    "antisymmetric": 1e-9,
    "tongue_stability": 1e-6,
    "integral_zero": 1e-10,
    "jet_zero": 1e-9,
    "series_flat": 1e-9,
}

# Ограничения размера задач
LIMITS = {
    "max_degree": 16,
    "hermite_refinements": 3,
    "max_domain_dim": 8,
    "max_orbit_dim": 4,
    "max_period": 6,
    "max_ray_entries": 64,
    "max_shift_n": 25,
    "max_liouville_q": 10_000,
    "max_cloud_points": 100_000,
    "max_injectivity_dim": 10,
}

# Значения по умолчанию
DEFAULTS = {
    "seed": 0,
    "box_radius": 1.0,
    "samples": 10_000,
    "workers": 1,
    "newton_max_iter": 50,
    "orbit_box": 2.0,
    "orbit_grid": 9,
    "q_max": 32,
    "omega_grid": 4000,
    "tongue_iters": 600,
    "tongue_burn_in": 400,
    "hopf_box": 2.0,
    "hopf_grid": 5,
    "continuation_step": 0.01,
    "continuation_delta": 0.1,
    "fd_step": 1e-5,
    "density_refine": 4,
    "quadrature_nodes": 32,
    "out": "prevlab",
}

# Поддерживаемые команды и обязательные ключи конфигурации
COMMAND_REQUIRED_KEYS: Dict[str, List[str]] = {
    "shyness": ["base", "probe", "predicate"],
    "tongues": ["epsilon"],
    "hopf": ["family"],
    "sets": ["example"],
    "convolve": ["measures"],
    "density": ["set", "widths"],
    "dimension": ["cloud"],
}

# Заголовки CSV для каждой команды (версия схемы 1)
CSV_SCHEMA_VERSION = 1
CSV_SCHEMAS: Dict[str, List[str]] = {
    "shyness": ["predicate", "probe", "samples", "holds", "fails", "undecided",
                "failure_fraction", "ci_low", "ci_high", "seed", "box_radius"],
    "tongues": ["omega", "locked", "period", "multiplier"],
    "hopf": ["mu0", "x", "y", "omega", "trace_mu_deriv", "lyapunov", "classification"],
    "sets": ["a", "b"],
    "convolve": ["point", "weight"],
    "density": ["width", "lower", "upper"],
    "dimension": ["scale", "count"],
}

# Встроенные базовые элементы в текстовом формате polyjet
BUILTIN_BASES: Dict[str, str] = {
    "zero": "poly 1 1\n",
    "identity": "poly 1 1\n1 : 1\n",
    "x-x2": "poly 1 1\n1 : 1\n2 : -1\n",
    "half": "poly 1 1\n1 : 0.5\n",
    "square": "poly 1 1\n2 : 1\n",
    "logistic-3.2": "poly 1 1\n1 : 3.2\n2 : -3.2\n",
    "inverse-square": "seq 64 " + " ".join(repr(1.0 / (i * i)) for i in range(1, 65)) + "\n",
}


def hopf_normal_form_text(s: float, shift: float = 0.0) -> str:
    """
    Текст семейства нормальной формы Андронова-Хопфа
    g = (mu - shift)x - y + s x(x^2 + y^2), h = x + (mu - shift)y + s y(x^2 + y^2).

    Args:
        s (float): Кубический коэффициент
        shift (float): Сдвиг параметра mu

    Returns:
        str: Семейство в формате `family 3 2`
    """
    # Мономы (mu, x, y): -y в g и -shift*y в h делят одну строку
    lines = ["family 3 2",
             "1 1 0 : 1 0",
             f"0 0 1 : -1 {repr(-float(shift))}",
             "1 0 1 : 0 1",
             f"0 1 0 : {repr(-float(shift))} 1"]
    if s != 0:
        lines += [f"0 3 0 : {repr(float(s))} 0",
                  f"0 1 2 : {repr(float(s))} 0",
                  f"0 2 1 : 0 {repr(float(s))}",
                  f"0 0 3 : 0 {repr(float(s))}"]
    return "\n".join(lines) + "\n"


BUILTIN_FAMILIES: Dict[str, str] = {
    "normal-form-super": hopf_normal_form_text(-1.0),
    "normal-form-sub": hopf_normal_form_text(1.0),
    "normal-form-linear": hopf_normal_form_text(0.0),
    "normal-form-shifted": hopf_normal_form_text(-1.0, shift=1.0),
}


def suggest_command(command: str) -> Optional[str]:
    """
    Подбор ближайшей известной команды для сообщения об ошибке.

    Args:
        command (str): Введенная команда

    Returns:
        Optional[str]: Ближайшая команда или None
    """
    if not command:
        return None
    matches = difflib.get_close_matches(command.lower(), list(COMMAND_REQUIRED_KEYS), n=1, cutoff=0.6)
    return matches[0] if matches else None
