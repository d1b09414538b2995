# lmrate/core/repositories/report_repository.py
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List

from ..entities.experiment import PointResult
from ..entities.specs import ExperimentSpec


class ReportRepository(ABC):
    """Интерфейс хранилища результатов"""

    @abstractmethod
    async def save_table(self, kind: str, results: List[PointResult]) -> Path:
        """Сохранить сводную таблицу (solve или sweep)"""
        pass

    @abstractmethod
    async def save_record(self, result: PointResult, spec: ExperimentSpec) -> Path:
        """Сохранить полную запись одного решения"""
        pass

    @abstractmethod
    async def save_trajectory(self, result: PointResult) -> Path:
        """Сохранить покомпонентные невязки по итерациям"""
        pass

    @abstractmethod
    async def load_table(self, kind: str) -> List[dict]:
        """Прочитать сводную таблицу обратно (строки как словари)"""
        pass
