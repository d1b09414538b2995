"""
Общие модули и утилиты
"""

from lmrate.shared.config import settings
from lmrate.shared.logger import logger

__all__ = ['settings', 'logger']
