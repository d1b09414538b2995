# lmrate/shared/dependencies.py

from pathlib import Path
from typing import Optional

from lmrate.core.entities.specs import OracleConfig, SolverConfig
from lmrate.core.repositories import ReportRepository
from lmrate.core.services.experiment_service import ExperimentService
from lmrate.core.services.verification_service import VerificationService
from lmrate.infrastructure.files import FileReportRepository
from lmrate.shared.config import Settings, settings


class DependencyContainer:
    """Контейнер зависимостей"""

    def __init__(self, cfg: Settings = settings):
        self.settings = cfg

    def get_report_repository(self, root: Path) -> ReportRepository:
        """Фабрика файлового хранилища результатов"""
        return FileReportRepository(root)

    def get_experiment_service(self, root: Path) -> ExperimentService:
        """Фабрика сервиса экспериментов; параллелизм из LMRATE_THREADS"""
        return ExperimentService(self.get_report_repository(root), threads=self.settings.THREADS)

    def get_verification_service(
        self,
        solver_config: Optional[SolverConfig] = None,
        oracle_config: Optional[OracleConfig] = None,
    ) -> VerificationService:
        return VerificationService(solver_config, oracle_config)


# Глобальный контейнер зависимостей
container = DependencyContainer()
