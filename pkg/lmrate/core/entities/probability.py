# lmrate/core/entities/probability.py
from dataclasses import dataclass, field

import numpy as np

from lmrate.shared.types import FloatArray
from lmrate.shared.validators import (
    check_nonnegative,
    check_row_stochastic,
    check_simplex,
    frozen_array,
)
from lmrate.shared.exceptions import ValidationError

JOINT_TOL = 1e-9


@dataclass(frozen=True)
class ProbabilityVector:
    """Распределение на конечном алфавите (p_i или q_j)"""
    weights: FloatArray

    def __post_init__(self) -> None:
        weights = frozen_array(self.weights, "ProbabilityVector", ndim=1)
        check_simplex(weights, "ProbabilityVector")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, size: int) -> "ProbabilityVector":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def normalized(cls, values: object) -> "ProbabilityVector":
        """Нормировать неотрицательный вектор на симплекс"""
        raw = np.asarray(values, dtype=np.float64)
        total = raw.sum()
        if not np.isfinite(total) or total <= 0.0:
            raise ValidationError("нельзя нормировать вектор с нулевой суммой")
        return cls(raw / total)

    def __len__(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class TransitionMatrix:
    """Закон ДКБП s_ij = W(y_j|x_i), строки стохастические"""
    entries: FloatArray

    def __post_init__(self) -> None:
        entries = frozen_array(self.entries, "TransitionMatrix", ndim=2)
        check_row_stochastic(entries, "TransitionMatrix")
        object.__setattr__(self, "entries", entries)

    @property
    def M(self) -> int:
        return int(self.entries.shape[0])

    @property
    def N(self) -> int:
        return int(self.entries.shape[1])

    def output_distribution(self, p: ProbabilityVector) -> FloatArray:
        """q_j = Σ_i s_ij p_i"""
        if len(p) != self.M:
            raise ValidationError(f"размер p={len(p)} не совпадает с M={self.M}")
        return p.weights @ self.entries


@dataclass(frozen=True)
class MetricMatrix:
    """Метрика декодирования d_ij = −log q(x_i, y_j)"""
    entries: FloatArray

    def __post_init__(self) -> None:
        entries = frozen_array(self.entries, "MetricMatrix", ndim=2)
        check_nonnegative(entries, "MetricMatrix")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def scaled(self, factor: float) -> "MetricMatrix":
        return MetricMatrix(self.entries * factor)


@dataclass(frozen=True)
class JointDistribution:
    """Совместное распределение γ_ij"""
    entries: FloatArray

    def __post_init__(self) -> None:
        entries = frozen_array(self.entries, "JointDistribution", ndim=2)
        check_nonnegative(entries, "JointDistribution")
        total = float(entries.sum())
        if abs(total - 1.0) > JOINT_TOL:
            raise ValidationError(f"JointDistribution: сумма {total!r} != 1")
        object.__setattr__(self, "entries", entries)

    @property
    def row_marginal(self) -> FloatArray:
        return self.entries.sum(axis=1)

    @property
    def column_marginal(self) -> FloatArray:
        return self.entries.sum(axis=0)


@dataclass(frozen=True)
class InputDistribution:
    """Распределение по точкам созвездия вместе с их мощностями ‖x_i‖²"""
    probabilities: ProbabilityVector
    powers: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        powers = frozen_array(self.powers, "powers", ndim=1)
        check_nonnegative(powers, "powers")
        if powers.shape[0] != len(self.probabilities):
            raise ValidationError("число мощностей не совпадает с размером распределения")
        object.__setattr__(self, "powers", powers)

    @property
    def average_power(self) -> float:
        return float(self.probabilities.weights @ self.powers)
