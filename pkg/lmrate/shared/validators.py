# lmrate/shared/validators.py
"""
Проверки инвариантов числовых объектов
"""

import math

import numpy as np

from lmrate.shared.exceptions import ValidationError
from lmrate.shared.types import FloatArray

SIMPLEX_TOL = 1e-12


def frozen_array(values: object, name: str, ndim: int) -> FloatArray:
    """Копия в float64, только для чтения, с проверкой размерности и конечности"""
    array = np.array(values, dtype=np.float64)
    if array.ndim != ndim:
        raise ValidationError(f"{name}: ожидалась размерность {ndim}, получено {array.ndim}")
    if array.size == 0:
        raise ValidationError(f"{name}: пустой массив")
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name}: есть нечисловые значения")
    array.setflags(write=False)
    return array


def check_nonnegative(array: FloatArray, name: str) -> None:
    if np.any(array < 0.0):
        raise ValidationError(f"{name}: есть отрицательные элементы (min={array.min():.3e})")


def check_simplex(weights: FloatArray, name: str, tol: float = SIMPLEX_TOL) -> None:
    """Элемент симплекса: неотрицательные веса с суммой 1"""
    check_nonnegative(weights, name)
    total = math.fsum(weights.tolist())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"{name}: сумма весов {total!r} отличается от 1 больше чем на {tol}")


def check_row_stochastic(matrix: FloatArray, name: str, tol: float = SIMPLEX_TOL) -> None:
    check_nonnegative(matrix, name)
    deviation = np.max(np.abs(matrix.sum(axis=1) - 1.0))
    if deviation > tol:
        raise ValidationError(f"{name}: строки не нормированы (отклонение {deviation:.3e})")


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    root = math.isqrt(n)
    return root * root == n
