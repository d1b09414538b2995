# lmrate/core/entities/experiment.py
from dataclasses import dataclass
from typing import Tuple

from lmrate.core.entities.channel import Scheme
from lmrate.core.entities.probability import InputDistribution
from lmrate.core.entities.report import SolveReport
from lmrate.core.entities.specs import RunMode
from lmrate.shared.utils import Angle, to_bits

_MODE_ORDER = {RunMode.CLM: 0, RunMode.LM_UNIFORM: 1}


@dataclass(frozen=True)
class OperatingPoint:
    """Одна строка таблицы: схема, (η, θ), SNR и режим расчёта"""
    scheme: Scheme
    eta: float
    theta: Angle
    snr_db: float
    mode: RunMode

    @property
    def sort_key(self) -> Tuple[float, float, float, int]:
        return (self.eta, self.theta.radians, self.snr_db, _MODE_ORDER[self.mode])

    @property
    def key(self) -> str:
        """Имя файла записи: QPSK_eta0.9_thetapi-18_snr-5_clm"""
        theta = self.theta.label.replace("/", "-").replace("*", "")
        scheme, mode = self.scheme.value, self.mode.value
        return f"{scheme}_eta{self.eta:g}_theta{theta}_snr{self.snr_db:g}_{mode}"


@dataclass
class PointResult:
    """Результат решения в рабочей точке"""
    point: OperatingPoint
    report: SolveReport
    signal: InputDistribution

    @property
    def rate_bits(self) -> float:
        return to_bits(self.report.rate)

    @property
    def failed(self) -> bool:
        return self.report.failed

    @property
    def average_power(self) -> float:
        """Σ p_i ‖x_i‖² найденного входа"""
        return self.signal.average_power


@dataclass(frozen=True)
class CheckResult:
    """Строка таблицы verify"""
    name: str
    value: float
    reference: float
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.value - self.reference)

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance
