# lmrate/core/services/roots.py
"""
Поиск корня монотонно убывающей функции: Ньютон со страховкой бисекцией
"""

from typing import Callable, Optional, Tuple

import numpy as np

from lmrate.shared.exceptions import RootNotFoundError

MULTIPLIER_CAP = 1e6
ROOT_TOL = 1e-12
MAX_STEPS = 200

ValueAndSlope = Callable[[float], Tuple[float, float]]


def bracket_decreasing_root(
    func: ValueAndSlope,
    start: Optional[float] = None,
    tol: float = ROOT_TOL,
    cap: float = MULTIPLIER_CAP,
) -> Tuple[float, float]:
    """
    Найти [lo, hi] со сменой знака, считая f(0) > 0

    Начинаем с прошлого значения множителя (тёплый старт) и удваиваем hi,
    пока f(hi) > tol. Выход за cap означает, что корня нет.
    """
    lo = 0.0
    hi = start if start is not None and start > 0.0 else 1.0
    while True:
        value, _ = func(hi)
        if value <= tol:
            return lo, hi
        lo = hi
        hi *= 2.0
        if hi > cap:
            raise RootNotFoundError(
                f"нет смены знака до {cap:g}",
                diagnostic=f"f({lo:.6g}) = {value:.6g} > 0",
            )


def safeguarded_newton(
    func: ValueAndSlope,
    lo: float,
    hi: float,
    x0: Optional[float] = None,
    tol: float = ROOT_TOL,
    max_steps: int = MAX_STEPS,
) -> float:
    """
    Корень убывающей f на [lo, hi] при f(lo) > 0 ≥ f(hi)

    Шаг Ньютона принимается, только если остаётся внутри скобки и производная
    не вырождена; иначе делим скобку пополам.
    """
    x = x0 if x0 is not None and lo < x0 < hi else 0.5 * (lo + hi)
    for _ in range(max_steps):
        value, slope = func(x)
        if abs(value) <= tol:
            return x
        if value > 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * np.finfo(np.float64).eps * max(1.0, abs(x)):
            return x

        step_ok = np.isfinite(value) and np.isfinite(slope) and slope < -1e-300
        candidate = x - value / slope if step_ok else np.nan
        x = candidate if lo < candidate < hi else 0.5 * (lo + hi)
    return x


def solve_decreasing_root(
    func: ValueAndSlope,
    start: Optional[float] = None,
    tol: float = ROOT_TOL,
    cap: float = MULTIPLIER_CAP,
) -> float:
    """Скобка + Ньютон с бисекцией для f с f(0) > 0"""
    lo, hi = bracket_decreasing_root(func, start=start, tol=tol, cap=cap)
    value, _ = func(hi)
    if abs(value) <= tol:
        return hi
    return safeguarded_newton(func, lo, hi, x0=start, tol=tol)
