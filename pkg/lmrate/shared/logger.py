# lmrate/shared/logger.py
"""
Настройка системы логирования
"""

import logging
import sys

from lmrate.shared.config import Settings, settings

# Общий логгер пакета; обработчики вешает только CLI
logger = logging.getLogger("lmrate")


def setup_logger(cfg: Settings = settings) -> logging.Logger:
    """Настройка логгера"""
    logger.setLevel(getattr(logging, cfg.LOG_LEVEL))

    # Очищаем существующие обработчики
    logger.handlers.clear()

    formatter = logging.Formatter(
        fmt=cfg.LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    if cfg.LOG_FILE is not None:
        cfg.LOG_FILE.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(filename=cfg.LOG_FILE, encoding="utf-8")
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

    # stderr, чтобы не мешать выводу таблиц в stdout
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(
        logging.DEBUG if cfg.DEBUG else getattr(logging, cfg.LOG_LEVEL)
    )
    logger.addHandler(console_handler)

    # Внешние библиотеки
    logging.getLogger("asyncio").setLevel(logging.WARNING)

    return logger
