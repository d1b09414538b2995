# lmrate/infrastructure/files/experiment_loader.py
"""
Чтение ExperimentSpec из TOML с наложением флагов командной строки
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional

import pydantic

from ...core.entities.specs import ExperimentSpec
from ...shared.exceptions import ConfigError
from ...shared.logger import logger


def merge_overrides(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Наложить флаги поверх файла; вложенные таблицы (solver, sweep) сливаются по ключам"""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = value
    return merged


def _describe(error: pydantic.ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<корень>"
        lines.append(f"{location}: {item['msg']}")
    return "; ".join(lines)


def build_spec(data: Dict[str, Any], source: str = "<флаги>") -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(data)
    except pydantic.ValidationError as e:
        raise ConfigError(_describe(e), location=source) from e


def load_spec(path: Optional[Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentSpec:
    """
    Загрузить эксперимент

    Args:
        path: TOML-файл или None (только значения по умолчанию и флаги)
        overrides: значения из командной строки, None означает "не задано"

    Raises:
        ConfigError: синтаксис TOML (с номером строки и столбца) или нарушенное поле
    """
    data: Dict[str, Any] = {}
    source = "<флаги>"
    if path is not None:
        source = str(path)
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except FileNotFoundError as e:
            raise ConfigError("файл не найден", location=source) from e
        except tomllib.TOMLDecodeError as e:
            # Текст ошибки tomllib содержит "(at line L, column C)"
            raise ConfigError(f"синтаксис TOML: {e}", location=source) from e
        logger.debug(f"Загружен эксперимент {source}: {sorted(data)}")

    return build_spec(merge_overrides(data, overrides or {}), source)
