# lmrate/core/services/experiment_service.py
"""
Запуск экспериментов: дискретизация канала в каждой точке, решение в
выбранных режимах, сохранение таблиц и записей
"""

import asyncio
from dataclasses import dataclass
from typing import List, Tuple

from ..entities.channel import Constellation, OutputGrid
from ..entities.experiment import OperatingPoint, PointResult
from ..entities.probability import (
    InputDistribution,
    MetricMatrix,
    ProbabilityVector,
    TransitionMatrix,
)
from ..entities.specs import ExperimentSpec, RunMode
from ..repositories.report_repository import ReportRepository
from ...shared.logger import logger
from ...shared.utils import Angle
from .channel_service import (
    build_constellation,
    discretize_awgn,
    estimated_channel,
    iq_channel,
    metric_matrix,
    output_grid,
    sigma2_from_snr_db,
)
from .solver_service import SolverService


@dataclass(frozen=True)
class ChannelProblem:
    """Дискретный канал и метрика в одной точке (η, θ, SNR)"""
    s: TransitionMatrix
    d: MetricMatrix
    constellation: Constellation


def build_problem(
    spec: ExperimentSpec,
    eta: float,
    theta: Angle,
    snr_db: float,
    constellation: Constellation,
    grid: OutputGrid,
) -> ChannelProblem:
    H = iq_channel(eta, theta.radians)
    s = discretize_awgn(H, sigma2_from_snr_db(snr_db), constellation, grid)
    d = metric_matrix(constellation, grid, estimated_channel(spec.h_hat, H))
    return ChannelProblem(s=s, d=d, constellation=constellation)


def solve_point(
    spec: ExperimentSpec,
    eta: float,
    theta: Angle,
    snr_db: float,
) -> List[PointResult]:
    """Все режимы spec.mode в одной точке; канал строится один раз"""
    constellation = build_constellation(spec.scheme)
    grid = output_grid(spec.grid_n, spec.bound)
    problem = build_problem(spec, eta, theta, snr_db, constellation, grid)
    solver = SolverService(spec.solver)

    results = []
    for mode in spec.mode.modes():
        logger.info(
            f"{spec.scheme.value}: η={eta:g}, θ={theta}, SNR={snr_db:g} дБ, режим {mode.value}"
        )
        if mode is RunMode.CLM:
            report = solver.solve_clm(problem.s, problem.d, constellation.powers)
        else:
            uniform = ProbabilityVector.uniform(constellation.M)
            report = solver.solve_lm_fixed_input(uniform, problem.s, problem.d)
        point = OperatingPoint(spec.scheme, eta, theta, snr_db, mode)
        signal = InputDistribution(report.input_distribution, constellation.powers)
        results.append(PointResult(point=point, report=report, signal=signal))
    return results


class ExperimentService:
    """Сервис запуска solve/sweep"""

    def __init__(self, repository: ReportRepository, threads: int = 1):
        self.repository = repository
        self.threads = max(1, threads)

    def points(self, spec: ExperimentSpec) -> List[Tuple[float, Angle, float]]:
        """Декартово произведение (η, θ) × SNR"""
        return [
            (eta, theta, snr_db)
            for eta, theta in spec.parameter_pairs()
            for snr_db in sorted(set(spec.snr_db))
        ]

    async def run(self, spec: ExperimentSpec) -> List[PointResult]:
        """
        Решить все точки

        Точки считаются в потоках (не больше self.threads одновременно),
        результаты упорядочиваются по (η, θ, SNR, режим) независимо от
        порядка завершения.
        """
        semaphore = asyncio.Semaphore(self.threads)

        async def run_one(eta: float, theta: Angle, snr_db: float) -> List[PointResult]:
            async with semaphore:
                return await asyncio.to_thread(solve_point, spec, eta, theta, snr_db)

        batches = await asyncio.gather(*(run_one(*point) for point in self.points(spec)))
        results = sorted(
            (result for batch in batches for result in batch),
            key=lambda result: result.point.sort_key,
        )
        failed = sum(result.failed for result in results)
        logger.info(f"Решено точек: {len(results)}, со сбоем: {failed}")
        return results

    async def run_and_save(self, spec: ExperimentSpec, kind: str) -> List[PointResult]:
        """Решить и записать таблицу, записи и (при record_trajectory) траектории"""
        results = await self.run(spec)
        await self.repository.save_table(kind, results)
        for result in results:
            await self.repository.save_record(result, spec)
            if spec.solver.record_trajectory:
                await self.repository.save_trajectory(result)
        return results
