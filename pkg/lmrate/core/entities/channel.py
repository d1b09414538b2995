# lmrate/core/entities/channel.py
from dataclasses import dataclass
from enum import Enum

import numpy as np

from lmrate.shared.types import FloatArray
from lmrate.shared.validators import frozen_array
from lmrate.shared.exceptions import ValidationError


class Scheme(Enum):
    """Схемы модуляции"""
    QPSK = "QPSK"
    QAM16 = "QAM16"
    QAM64 = "QAM64"
    QAM256 = "QAM256"

    @property
    def order(self) -> int:
        return {"QPSK": 4, "QAM16": 16, "QAM64": 64, "QAM256": 256}[self.value]

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        """Принимает "QPSK", "16QAM", "qam16", "QAM-64" и т.п."""
        key = str(text).upper().replace("-", "").replace("_", "")
        aliases = {"4QAM": "QPSK", "QAM4": "QPSK"}
        for order in (16, 64, 256):
            aliases[f"{order}QAM"] = f"QAM{order}"
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError as e:
            raise ValidationError(f"неизвестная схема модуляции: {text!r}") from e


@dataclass(frozen=True)
class Constellation:
    """Точки созвездия на плоскости (M×2), средняя мощность нормирована к 1"""
    points: FloatArray
    scheme: Scheme

    def __post_init__(self) -> None:
        points = frozen_array(self.points, "Constellation.points", ndim=2)
        if points.shape[1] != 2:
            raise ValidationError("точки созвездия должны быть двумерными")
        object.__setattr__(self, "points", points)

    @property
    def M(self) -> int:
        return int(self.points.shape[0])

    @property
    def powers(self) -> FloatArray:
        """‖x_i‖²"""
        return np.sum(self.points ** 2, axis=1)

    @property
    def average_power(self) -> float:
        """Средняя мощность при равномерных весах"""
        return float(np.mean(self.powers))


@dataclass(frozen=True)
class OutputGrid:
    """Равномерная сетка √N×√N на [−B, B]², построчная нумерация"""
    points: FloatArray
    spacing: float
    bound: float

    def __post_init__(self) -> None:
        points = frozen_array(self.points, "OutputGrid.points", ndim=2)
        object.__setattr__(self, "points", points)

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.N)))


@dataclass(frozen=True)
class ChannelMatrixH:
    """H = diag(η₁, η₂) · R(θ)"""
    eta1: float
    eta2: float
    theta: float

    @property
    def matrix(self) -> FloatArray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        rotation = np.array([[c, s], [-s, c]])
        return np.diag([self.eta1, self.eta2]) @ rotation
