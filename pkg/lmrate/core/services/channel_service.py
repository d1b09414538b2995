# lmrate/core/services/channel_service.py
"""
Созвездия, матрица IQ-дисбаланса, дискретизация AWGN и метрика декодирования
"""

import math
from typing import Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from lmrate.core.entities.channel import ChannelMatrixH, Constellation, OutputGrid, Scheme
from lmrate.core.entities.probability import MetricMatrix, TransitionMatrix
from lmrate.shared.exceptions import DiscretizationError, ValidationError
from lmrate.shared.logger import logger
from lmrate.shared.types import FloatArray
from lmrate.shared.validators import is_perfect_square

DEFAULT_BOUND = 8.0
# Наименьший показатель, при котором exp ещё не обращается в ноль
_LOG_TINY = math.log(np.finfo(np.float64).tiny)


def build_constellation(scheme: Scheme) -> Constellation:
    """
    Квадратное QAM-созвездие с уровнями {±1, ±3, …} по каждой оси,
    нормированное к средней мощности 1 при равномерных весах
    """
    side = math.isqrt(scheme.order)
    levels = np.arange(-(side - 1), side, 2, dtype=np.float64)
    inphase, quadrature = np.meshgrid(levels, levels, indexing="ij")
    points = np.column_stack([inphase.ravel(), quadrature.ravel()])
    # Для квадратного M-QAM средняя мощность сетки равна 2(M − 1)/3
    points /= math.sqrt(np.mean(np.sum(points ** 2, axis=1)))
    return Constellation(points=points, scheme=scheme)


def iq_channel(eta: float, theta: float) -> ChannelMatrixH:
    """H = diag(1, η)·R(θ)"""
    if not eta > 0:
        raise ValidationError(f"η должно быть > 0, получено {eta}")
    return ChannelMatrixH(eta1=1.0, eta2=float(eta), theta=float(theta))


def output_grid(N: int, B: float = DEFAULT_BOUND) -> OutputGrid:
    """
    Сетка √N×√N на [−B, B]² с концами

    Нумерация построчная: y_{r√N+s} = (−B + rΔy, −B + sΔy), r и s с нуля,
    первая координата меняется с r.
    """
    if N < 4 or not is_perfect_square(N):
        raise DiscretizationError(f"N={N} должно быть полным квадратом ≥ 4")
    if not B > 0:
        raise DiscretizationError(f"граница B={B} должна быть > 0")
    side = math.isqrt(N)
    coords = np.linspace(-B, B, side)
    first, second = np.meshgrid(coords, coords, indexing="ij")
    points = np.column_stack([first.ravel(), second.ravel()])
    return OutputGrid(points=points, spacing=2.0 * B / (side - 1), bound=float(B))


def sigma2_from_snr_db(snr_db: float) -> float:
    """SNR = 1/(2σ²)  =>  σ² = 1/(2·10^(SNR/10))"""
    return 1.0 / (2.0 * 10.0 ** (snr_db / 10.0))


def discretize_awgn(
    H: ChannelMatrixH,
    sigma2: float,
    constellation: Constellation,
    grid: OutputGrid,
) -> TransitionMatrix:
    """s_ij ∝ exp(−‖y_j − H x_i‖² / 2σ²), нормировка по строкам усечённой сетки"""
    if not sigma2 > 0:
        raise DiscretizationError(f"σ² должно быть > 0, получено {sigma2}")
    centers = constellation.points @ H.matrix.T
    logits = -cdist(centers, grid.points, "sqeuclidean") / (2.0 * sigma2)

    row_peaks = logits.max(axis=1)
    starved = np.flatnonzero(row_peaks < _LOG_TINY)
    if starved.size:
        raise DiscretizationError(
            f"строки {starved.tolist()} обнуляются: сетка (Δy={grid.spacing:.4g}, "
            f"B={grid.bound}) не разрешает шум σ²={sigma2:.4g}"
        )

    s = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
    s /= s.sum(axis=1, keepdims=True)
    logger.debug(
        f"Дискретизация: M={constellation.M}, N={grid.N}, σ²={sigma2:.4g}, "
        f"нулевых элементов {int(np.count_nonzero(s == 0.0))}"
    )
    return TransitionMatrix(s)


def metric_matrix(
    constellation: Constellation,
    grid: OutputGrid,
    h_hat: Union[FloatArray, Sequence[Sequence[float]]],
) -> MetricMatrix:
    """d_ij = ‖y_j − Ĥ x_i‖²"""
    h_hat = np.asarray(h_hat, dtype=np.float64)
    if h_hat.shape != (2, 2):
        raise ValidationError(f"Ĥ должна быть 2×2, получено {h_hat.shape}")
    assumed = constellation.points @ h_hat.T
    return MetricMatrix(cdist(assumed, grid.points, "sqeuclidean"))


def matched_metric(s: TransitionMatrix) -> MetricMatrix:
    """d_ij = −log s_ij (согласованное декодирование)"""
    if np.any(s.entries <= 0.0):
        raise ValidationError("согласованная метрика требует строго положительного s")
    return MetricMatrix(np.maximum(-np.log(s.entries), 0.0))


def estimated_channel(
    h_hat: Union[str, Sequence[Sequence[float]]],
    H: ChannelMatrixH,
) -> FloatArray:
    """Ĥ по режиму: identity | true | явная матрица"""
    if isinstance(h_hat, str):
        mode = h_hat.strip().lower()
        if mode == "identity":
            return np.eye(2)
        if mode in ("true", "true-h"):
            return H.matrix
        raise ValidationError(f"неизвестный режим Ĥ: {h_hat!r}")
    matrix = np.asarray(h_hat, dtype=np.float64)
    if matrix.shape != (2, 2):
        raise ValidationError(f"Ĥ должна быть 2×2, получено {matrix.shape}")
    return matrix
