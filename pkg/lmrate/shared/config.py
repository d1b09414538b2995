# lmrate/shared/config.py
"""
Конфигурация процесса: переменные окружения LMRATE_* и файл .env
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Settings(BaseSettings):
    """Настройки процесса (логирование и параллелизм)"""

    model_config = SettingsConfigDict(
        env_prefix="LMRATE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # === ЛОГИРОВАНИЕ ===
    LOG_LEVEL: LogLevel = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE: Optional[Path] = None

    # === ВЫЧИСЛЕНИЯ ===
    DEBUG: bool = False
    THREADS: int = Field(default=1, ge=1)

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def _upper_level(cls, value: object) -> object:
        if isinstance(value, str):
            return value.upper()
        return value

    def validate_report(self) -> bool:
        """Печать проверки конфигурации"""
        print("\n" + "=" * 50)
        print("🔧 ПРОВЕРКА КОНФИГУРАЦИИ")
        print("=" * 50)

        print("📊 ЛОГИРОВАНИЕ:")
        print(f"   Level: {self.LOG_LEVEL}")
        print(f"   File: {self.LOG_FILE or 'нет (только консоль)'}")
        print(f"   Debug: {self.DEBUG}")

        print("\n🧮 ВЫЧИСЛЕНИЯ:")
        print(f"   Потоков для sweep: {self.THREADS}")

        warnings = []
        if self.THREADS > 1:
            warnings.append(
                "⚠️  THREADS > 1: строки sweep считаются параллельно, "
                "побитовая воспроизводимость гарантируется только при THREADS=1"
            )

        print("\n" + "=" * 50)
        if warnings:
            print("\n📢 ПРЕДУПРЕЖДЕНИЯ:")
            for warning in warnings:
                print(f"   {warning}")

        print("✅ Конфигурация проверена успешно!")
        return True


# Глобальный экземпляр настроек
settings = Settings()
