# lmrate/core/services/information.py
"""
Энтропия, взаимная информация и совместное распределение (в натах)
"""

import numpy as np
from scipy.special import entr

from lmrate.core.entities.probability import (
    JointDistribution,
    ProbabilityVector,
    TransitionMatrix,
)
from lmrate.shared.exceptions import ValidationError
from lmrate.shared.types import FloatArray

# Вероятности ниже порога считаются точными нулями: 0·log 0 = 0
ZERO_FLOOR = 1e-300


def _entropy_terms(weights: FloatArray) -> FloatArray:
    cleaned = np.where(weights < ZERO_FLOOR, 0.0, weights)
    return entr(cleaned)


def entropy(p: ProbabilityVector) -> float:
    """−Σ p_i log p_i"""
    value = float(np.sum(_entropy_terms(p.weights)))
    return min(max(value, 0.0), float(np.log(len(p))))


def mutual_information(p: ProbabilityVector, s: TransitionMatrix) -> float:
    """
    I(p, s) = Σ_ij p_i s_ij log(s_ij / q_j)

    Считается как H(q) − Σ_i p_i H(s_i·), без деления на q_j.
    """
    _check_dimensions(p, s)
    q = s.output_distribution(p)
    output_entropy = float(np.sum(_entropy_terms(q)))
    row_entropies = np.sum(_entropy_terms(s.entries), axis=1)
    value = output_entropy - float(p.weights @ row_entropies)
    return max(value, 0.0)


def joint_from_input(p: ProbabilityVector, s: TransitionMatrix) -> JointDistribution:
    """γ_ij = p_i s_ij"""
    _check_dimensions(p, s)
    return JointDistribution(p.weights[:, None] * s.entries)


def _check_dimensions(p: ProbabilityVector, s: TransitionMatrix) -> None:
    if len(p) != s.M:
        raise ValidationError(f"размер p={len(p)} не совпадает с числом входов M={s.M}")
