# lmrate/shared/utils.py
"""
Вспомогательные функции: углы, списки SNR, перевод единиц
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from lmrate.shared.exceptions import ConfigError

_PI_PATTERN = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<num>\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+))?\s*$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Angle:
    """Угол поворота: подпись для CSV и значение в радианах"""
    label: str
    radians: float

    def __str__(self) -> str:
        return self.label


def parse_angle(text: str) -> Angle:
    """
    Разобрать угол: "pi/18", "-pi/12", "2*pi/9", "3pi/4", "pi", "0" или радианы "0.1745"

    Кратные π разбираются точно через Fraction, чтобы подпись в CSV не зависела
    от округления.
    """
    raw = str(text).strip()
    match = _PI_PATTERN.match(raw)
    if match:
        num = int(match.group("num") or 1)
        den = int(match.group("den") or 1)
        if den == 0:
            raise ConfigError(f"знаменатель угла равен нулю: {raw!r}", "theta")
        multiple = Fraction(num, den)
        if match.group("sign") == "-":
            multiple = -multiple
        return Angle(_pi_label(multiple), float(multiple) * math.pi)
    try:
        value = float(raw)
    except ValueError as e:
        raise ConfigError(f"не удалось разобрать угол {raw!r}", "theta") from e
    if value == 0.0:
        return Angle("0", 0.0)
    return Angle(repr(value), value)


def _pi_label(multiple: Fraction) -> str:
    if multiple == 0:
        return "0"
    sign = "-" if multiple < 0 else ""
    num, den = abs(multiple.numerator), multiple.denominator
    head = "pi" if num == 1 else f"{num}*pi"
    return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"


def parse_float_list(text: str, name: str) -> List[float]:
    """Список через запятую: "-5,0,5" -> [-5.0, 0.0, 5.0]"""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise ConfigError("пустой список", name)
    try:
        return [float(item) for item in items]
    except ValueError as e:
        raise ConfigError(f"не число в списке {text!r}", name) from e


def to_bits(nats: float) -> float:
    """Перевод нат в биты"""
    return nats / math.log(2.0)
