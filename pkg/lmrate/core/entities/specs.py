# lmrate/core/entities/specs.py
"""
Модели конфигурации решателя, оракулов и экспериментов (pydantic)
"""

import math
from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lmrate.core.entities.channel import Scheme
from lmrate.shared.exceptions import ConfigError
from lmrate.shared.utils import Angle, parse_angle
from lmrate.shared.validators import is_perfect_square

FINE_GRID = 10_000
FINE_GRID_QAM256 = 40_000


def _parse_budget(value: object) -> object:
    """'unconstrained' / 'inf' / None -> None (нет ограничения мощности)"""
    if value is None:
        return None
    if isinstance(value, str):
        if value.strip().lower() in ("unconstrained", "inf", "infinity", "none"):
            return None
        return float(value)
    if isinstance(value, (int, float)) and math.isinf(value):
        return None
    return value


class SolverConfig(BaseModel):
    """Параметры ADM"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iter: int = Field(default=3000, ge=1)
    rate_tol: float = Field(default=1e-10, gt=0)
    residual_tol: float = Field(default=1e-6, gt=0)
    stop_on_residuals: bool = False
    power_budget: Optional[float] = 1.0
    record_trajectory: bool = False
    warm_start: bool = True
    refine_steps: int = Field(default=50, ge=0)
    initial_inputs: Optional[List[List[float]]] = None

    @field_validator("power_budget", mode="before")
    @classmethod
    def _budget(cls, value: object) -> object:
        return _parse_budget(value)

    @field_validator("power_budget")
    @classmethod
    def _budget_positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError("бюджет мощности должен быть > 0 или 'unconstrained'")
        return value

    @property
    def unconstrained(self) -> bool:
        return self.power_budget is None


class OracleConfig(BaseModel):
    """Параметры переборного оракула"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    descent_steps: int = Field(default=200, gt=0)
    step_size: float = Field(default=1.0, gt=0)
    tolerance: float = Field(default=1e-14, gt=0)


class RunMode(str, Enum):
    """Что считать в каждой точке SNR"""
    CLM = "clm"
    LM_UNIFORM = "lm-uniform"
    BOTH = "both"

    def modes(self) -> List["RunMode"]:
        if self is RunMode.BOTH:
            return [RunMode.CLM, RunMode.LM_UNIFORM]
        return [self]


HHat = Union[Literal["identity", "true"], List[List[float]]]


class SweepGrid(BaseModel):
    """Сетка параметров (η, θ) для sweep"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    eta: List[float] = Field(min_length=1)
    theta: List[str] = Field(min_length=1)

    @field_validator("eta")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        if any(not v > 0 for v in values):
            raise ValueError("η должно быть > 0")
        return values

    @field_validator("theta")
    @classmethod
    def _angles(cls, values: List[str]) -> List[str]:
        return [parse_angle(v).label for v in values]

    @property
    def angles(self) -> List[Angle]:
        return [parse_angle(v) for v in self.theta]


class ExperimentSpec(BaseModel):
    """Описание эксперимента из TOML-файла и флагов CLI"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    scheme: Scheme = Scheme.QPSK
    eta: float = Field(default=0.9, gt=0)
    theta: str = "pi/18"
    snr_db: List[float] = Field(default_factory=lambda: [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0])
    grid_n: int = 2500
    bound: float = Field(default=8.0, gt=0)
    gamma: Optional[float] = 1.0
    h_hat: HHat = "identity"
    mode: RunMode = RunMode.BOTH
    output: Path = Path("results")
    solver: SolverConfig = Field(default_factory=SolverConfig)
    sweep: Optional[SweepGrid] = None

    @field_validator("scheme", mode="before")
    @classmethod
    def _scheme(cls, value: object) -> object:
        return Scheme.parse(value) if isinstance(value, str) else value

    @field_validator("theta", mode="before")
    @classmethod
    def _theta(cls, value: object) -> str:
        return parse_angle(str(value)).label

    @field_validator("snr_db")
    @classmethod
    def _snr_non_empty(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("список SNR не может быть пустым")
        return values

    @field_validator("grid_n")
    @classmethod
    def _grid_square(cls, value: int) -> int:
        if value < 4 or not is_perfect_square(value):
            raise ValueError(f"N={value} должно быть полным квадратом ≥ 4")
        return value

    @field_validator("gamma", mode="before")
    @classmethod
    def _gamma(cls, value: object) -> object:
        return _parse_budget(value)

    @field_validator("gamma")
    @classmethod
    def _gamma_positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError("Γ должно быть > 0 или 'unconstrained'")
        return value

    @field_validator("h_hat")
    @classmethod
    def _h_hat_shape(cls, value: HHat) -> HHat:
        if isinstance(value, list):
            if len(value) != 2 or any(len(row) != 2 for row in value):
                raise ValueError("явная матрица Ĥ должна быть 2×2")
        return value

    @model_validator(mode="before")
    @classmethod
    def _solver_budget(cls, data: object) -> object:
        # Бюджет мощности решателя берётся только из Γ эксперимента
        if not isinstance(data, dict):
            return data
        solver = data.get("solver") or {}
        if isinstance(solver, SolverConfig):
            explicit = "power_budget" in solver.model_fields_set
            solver = solver.model_dump()
        else:
            explicit = "power_budget" in solver
        gamma = _parse_budget(data.get("gamma", 1.0))
        if explicit and _parse_budget(solver["power_budget"]) != gamma:
            raise ConfigError(
                f"solver.power_budget={solver['power_budget']!r} расходится с gamma={gamma!r}; "
                "бюджет задаётся только через gamma",
                "solver.power_budget",
            )
        return {**data, "solver": {**solver, "power_budget": gamma}}

    @property
    def angle(self) -> Angle:
        return parse_angle(self.theta)

    @staticmethod
    def fine_grid_for(scheme: Scheme) -> int:
        return FINE_GRID_QAM256 if scheme is Scheme.QAM256 else FINE_GRID

    def parameter_pairs(self) -> List[tuple]:
        """Пары (η, θ) в порядке сортировки строк"""
        if self.sweep is None:
            pairs = [(self.eta, self.angle)]
        else:
            pairs = [(eta, angle) for eta in self.sweep.eta for angle in self.sweep.angles]
        return sorted(set(pairs), key=lambda pair: (pair[0], pair[1].radians))
