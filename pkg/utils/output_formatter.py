#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Модуль форматирования результатов: текстовый отчет `key = value`
и CSV для построения графиков.

Файлы записываются атомарно (временный файл в том же каталоге, затем
переименование), поэтому частичных выходных файлов не бывает.
"""

import io
import os
import csv
import logging
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from dateutil import tz

from config.reference_data import CSV_SCHEMA_VERSION, CSV_SCHEMAS

logger = logging.getLogger(__name__)

TIMESTAMP_KEY = "generated_at"


def format_value(value: Any) -> str:
    """Строковое представление значения; числа с плавающей точкой через repr."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def utc_timestamp() -> str:
    return datetime.now(tz.tzutc()).isoformat(timespec="seconds")


def format_report(command: str, fields: Sequence[Tuple[str, Any]], timestamp: bool = True) -> str:
    """
    Текстовый отчет: заголовок-комментарий и строки `key = value`.

    Строка времени создания единственная, которая меняется между
    повторными запусками.

    Args:
        command (str): Команда
        fields (Sequence[Tuple[str, Any]]): Пары ключ-значение в порядке вывода
        timestamp (bool): Добавить строку времени

    Returns:
        str: Текст отчета
    """
    lines = [f"# prevlab report: {command}"]
    if timestamp:
        lines.append(f"{TIMESTAMP_KEY} = {utc_timestamp()}")
    lines.append(f"command = {command}")
    for key, value in fields:
        lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"


def format_csv(command: str, rows: Iterable[Dict[str, Any]]) -> str:
    """
    CSV с заголовком-комментарием версии схемы и столбцами из CSV_SCHEMAS.

    Raises:
        KeyError: Если строка не содержит столбца схемы
    """
    columns = CSV_SCHEMAS[command]
    buffer = io.StringIO()
    buffer.write(f"# schema={CSV_SCHEMA_VERSION} command={command}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[column]) for column in columns])
    return buffer.getvalue()


def atomic_write(path: Union[str, Path], text: str) -> Path:
    """Запись файла через временный файл и os.replace."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_name, path)
    except Exception:
        if os.path.exists(temp_name):
            os.remove(temp_name)
        raise
    return path


def write_outputs(prefix: str, command: str, fields: Sequence[Tuple[str, Any]],
                  rows: List[Dict[str, Any]]) -> Tuple[Path, Path]:
    """
    Запись `<prefix>.report.txt` и `<prefix>.csv`.

    Оба текста формируются до записи, поэтому ошибка форматирования не
    оставляет файлов.

    Returns:
        Tuple[Path, Path]: Пути отчета и CSV
    """
    report_text = format_report(command, fields)
    csv_text = format_csv(command, rows)
    csv_path = atomic_write(f"{prefix}.csv", csv_text)
    report_path = atomic_write(f"{prefix}.report.txt", report_text)
    logger.info(f"Записаны файлы {report_path} и {csv_path} ({len(rows)} строк CSV)")
    return report_path, csv_path
