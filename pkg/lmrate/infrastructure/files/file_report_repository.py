# lmrate/infrastructure/files/file_report_repository.py

import csv
import io
import json
from pathlib import Path
from typing import List

import aiofiles
import aiofiles.os

from ...core.entities.experiment import PointResult
from ...core.entities.specs import ExperimentSpec
from ...core.repositories.report_repository import ReportRepository
from ...shared.logger import logger
from .mappers import (
    SCHEMA_VERSION,
    TABLE_COLUMNS,
    TRAJECTORY_COLUMNS,
    PointResultMapper,
    ReportMapper,
)


def _csv_text(rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


class FileReportRepository(ReportRepository):
    """
    Плоские файлы в каталоге вывода:

        <root>/<kind>.csv                 сводная таблица
        <root>/records/<key>.json         полная запись решения
        <root>/trajectories/<key>.csv     невязки по итерациям

    Каждый файл пишется целиком через временный файл и переименование.
    """

    def __init__(self, root: Path):
        self.root = Path(root)

    async def _write(self, path: Path, text: str) -> Path:
        await aiofiles.os.makedirs(path.parent, exist_ok=True)
        partial = path.with_name(path.name + ".part")
        async with aiofiles.open(partial, "w", encoding="utf-8", newline="") as f:
            await f.write(text)
        await aiofiles.os.replace(partial, path)
        logger.debug(f"Записан файл {path}")
        return path

    async def save_table(self, kind: str, results: List[PointResult]) -> Path:
        """
        Сохранить сводную таблицу

        Args:
            kind: solve или sweep
            results: строки в уже определённом порядке

        Returns:
            Путь к CSV
        """
        header = f"# lmrate {kind} schema {SCHEMA_VERSION}\n"
        rows = [TABLE_COLUMNS] + [PointResultMapper.entity_to_row(r) for r in results]
        return await self._write(self.root / f"{kind}.csv", header + _csv_text(rows))

    async def save_record(self, result: PointResult, spec: ExperimentSpec) -> Path:
        record = PointResultMapper.entity_to_record(result, spec)
        text = json.dumps(record, indent=2, ensure_ascii=False) + "\n"
        return await self._write(self.root / "records" / f"{result.point.key}.json", text)

    async def save_trajectory(self, result: PointResult) -> Path:
        rows = [TRAJECTORY_COLUMNS] + ReportMapper.trajectory_rows(result.report)
        path = self.root / "trajectories" / f"{result.point.key}.csv"
        return await self._write(path, _csv_text(rows))

    async def load_table(self, kind: str) -> List[dict]:
        async with aiofiles.open(self.root / f"{kind}.csv", "r", encoding="utf-8") as f:
            text = await f.read()
        lines = [line for line in text.splitlines() if not line.startswith("#")]
        return list(csv.DictReader(lines))
