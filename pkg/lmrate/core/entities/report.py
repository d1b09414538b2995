# lmrate/core/entities/report.py
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from lmrate.core.entities.dual import DualState
from lmrate.core.entities.probability import ProbabilityVector


class Termination(Enum):
    """Причина остановки"""
    RATE_TOL = "rate_tol"
    RESIDUAL_TOL = "residual_tol"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class ResidualSet:
    """Невязки (r_φ, r_ψ, r_ζ, r_λ)"""
    r_phi: float
    r_psi: float
    r_zeta: float
    r_lambda: float

    def max(self) -> float:
        return max(self.r_phi, self.r_psi, self.r_zeta, self.r_lambda)

    def as_tuple(self) -> tuple:
        return (self.r_phi, self.r_psi, self.r_zeta, self.r_lambda)


@dataclass
class SolveReport:
    """Результат решения"""
    rate: float
    input_distribution: ProbabilityVector
    dual_state: DualState
    iterations: int
    termination: Termination
    residual_trajectory: List[ResidualSet] = field(default_factory=list)
    objective_trajectory: List[float] = field(default_factory=list)
    diagnostic: str = ""
    primal_rate: Optional[float] = None
    elapsed_s: float = 0.0

    @property
    def converged(self) -> bool:
        return self.termination in (Termination.RATE_TOL, Termination.RESIDUAL_TOL)

    @property
    def failed(self) -> bool:
        return self.termination is Termination.NUMERICAL_FAILURE

    @property
    def lam(self) -> float:
        return self.dual_state.lam

    @property
    def zeta(self) -> float:
        return self.dual_state.zeta

    @property
    def final_residuals(self) -> Optional[ResidualSet]:
        return self.residual_trajectory[-1] if self.residual_trajectory else None

    @property
    def duality_gap(self) -> Optional[float]:
        if self.primal_rate is None:
            return None
        return abs(self.primal_rate - self.rate)
