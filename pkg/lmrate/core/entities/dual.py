# lmrate/core/entities/dual.py
from dataclasses import dataclass, replace

import numpy as np

from lmrate.shared.types import FloatArray
from lmrate.shared.exceptions import ValidationError


@dataclass(frozen=True)
class DualState:
    """
    Итерация ADM: (φ, ψ̃, ζ, λ)

    φ и ψ̃ хранятся в логарифмах: при высоком SNR произведение ζ·d доходит
    до 10⁴ и ψ̃ в линейной шкале переполняется.
    """
    log_phi: FloatArray
    log_psi: FloatArray
    zeta: float
    lam: float

    def __post_init__(self) -> None:
        log_phi = np.array(self.log_phi, dtype=np.float64)
        log_psi = np.array(self.log_psi, dtype=np.float64)
        if log_phi.ndim != 1 or log_psi.ndim != 1:
            raise ValidationError("log φ и log ψ̃ должны быть векторами")
        # φ_i = 0 (log = −inf) допускается только для точек с p_i = 0
        if np.any(np.isnan(log_phi)) or np.any(log_phi == np.inf):
            raise ValidationError("log φ содержит nan/+inf")
        if not np.all(np.isfinite(log_psi)):
            raise ValidationError("log ψ̃ должен быть конечным")
        if not (self.zeta >= 0.0 and np.isfinite(self.zeta)):
            raise ValidationError(f"ζ должно быть ≥ 0, получено {self.zeta}")
        if not (self.lam >= 0.0 and np.isfinite(self.lam)):
            raise ValidationError(f"λ должно быть ≥ 0, получено {self.lam}")
        log_phi.setflags(write=False)
        log_psi.setflags(write=False)
        object.__setattr__(self, "log_phi", log_phi)
        object.__setattr__(self, "log_psi", log_psi)
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def initial(cls, M: int, N: int) -> "DualState":
        """φ = 1_M, ψ̃ = 1_N, ζ = λ = 1"""
        return cls(np.zeros(M), np.zeros(N), 1.0, 1.0)

    @property
    def phi(self) -> FloatArray:
        return np.exp(self.log_phi)

    @property
    def psi(self) -> FloatArray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_psi)

    def evolve(self, **changes: object) -> "DualState":
        return replace(self, **changes)


@dataclass(frozen=True)
class LogKernel:
    """Показатели ядра −ζ·d_ij"""
    exponents: FloatArray

    @classmethod
    def build(cls, zeta: float, d: FloatArray) -> "LogKernel":
        return cls(-zeta * d)
