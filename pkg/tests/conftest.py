# tests/conftest.py
"""
Общие фикстуры: маленькие каналы и конфигурации решателя
"""

import math

import numpy as np
import pytest

from lmrate.core.entities import (
    ExperimentSpec,
    MetricMatrix,
    ProbabilityVector,
    Scheme,
    SolverConfig,
    TransitionMatrix,
)
from lmrate.core.services.channel_service import (
    build_constellation,
    discretize_awgn,
    estimated_channel,
    iq_channel,
    metric_matrix,
    output_grid,
    sigma2_from_snr_db,
)

BSC_CAPACITY = 0.368064


@pytest.fixture
def bsc() -> TransitionMatrix:
    """Двоичный симметричный канал с вероятностью ошибки 0.1"""
    return TransitionMatrix([[0.9, 0.1], [0.1, 0.9]])


@pytest.fixture
def unconstrained() -> SolverConfig:
    return SolverConfig(power_budget="unconstrained", max_iter=20_000)


@pytest.fixture
def qpsk_channel():
    """QPSK на сетке 20×20, (η, θ) = (0.9, π/18), 5 дБ, Ĥ = I"""
    constellation = build_constellation(Scheme.QPSK)
    grid = output_grid(400)
    H = iq_channel(0.9, math.pi / 18)
    s = discretize_awgn(H, sigma2_from_snr_db(5.0), constellation, grid)
    d = metric_matrix(constellation, grid, estimated_channel("identity", H))
    return s, d, constellation


@pytest.fixture
def matched_2x2():
    s = TransitionMatrix([[0.8, 0.2], [0.3, 0.7]])
    d = MetricMatrix(-np.log(s.entries))
    return ProbabilityVector([0.5, 0.5]), s, d


@pytest.fixture
def small_spec(tmp_path) -> ExperimentSpec:
    """Эксперимент на сетке 10×10, чтобы тесты шли секунды"""
    return ExperimentSpec(
        scheme="QPSK",
        snr_db=[0.0, 10.0],
        grid_n=100,
        mode="both",
        output=tmp_path / "out",
    )
