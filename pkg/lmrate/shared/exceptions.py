# lmrate/shared/exceptions.py
"""
Иерархия исключений пакета
"""

from typing import Optional


class LMRateError(Exception):
    """Базовое исключение пакета"""


class ValidationError(LMRateError, ValueError):
    """Нарушен инвариант при создании объекта"""


class NumericalFailureError(LMRateError):
    """Нечисловой результат, переполнение или исчезновение порядка"""

    def __init__(self, message: str, diagnostic: Optional[str] = None):
        super().__init__(message)
        self.diagnostic = diagnostic or message


class InfeasibleError(NumericalFailureError):
    """Бюджет мощности меньше минимальной мощности точки созвездия"""


class RootNotFoundError(NumericalFailureError):
    """Нет смены знака ниже предельного значения множителя"""


class DiscretizationError(LMRateError):
    """Сетка не разрешает гауссово ядро или задана неверно"""


class ConfigError(LMRateError, ValueError):
    """Ошибка разбора или проверки конфигурации эксперимента"""

    def __init__(self, message: str, location: Optional[str] = None):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location
