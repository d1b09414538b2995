# tests/test_channel.py
import math

import numpy as np
import pytest

from lmrate.core.entities import Scheme, TransitionMatrix
from lmrate.core.services.channel_service import (
    build_constellation,
    discretize_awgn,
    estimated_channel,
    iq_channel,
    matched_metric,
    metric_matrix,
    output_grid,
    sigma2_from_snr_db,
)
from lmrate.shared.exceptions import ConfigError, DiscretizationError, ValidationError
from lmrate.shared.utils import parse_angle, to_bits


@pytest.mark.parametrize(
    "scheme, smallest",
    [
        (Scheme.QPSK, 1 / math.sqrt(2)),
        (Scheme.QAM16, 1 / math.sqrt(10)),
        (Scheme.QAM64, 1 / math.sqrt(42)),
    ],
)
def test_constellation_levels_and_power(scheme, smallest):
    constellation = build_constellation(scheme)
    assert constellation.M == scheme.order
    assert constellation.average_power == pytest.approx(1.0, abs=1e-12)
    assert np.min(np.abs(constellation.points)) == pytest.approx(smallest, abs=1e-12)


def test_scheme_aliases():
    assert Scheme.parse("16QAM") is Scheme.QAM16
    assert Scheme.parse("qam-64") is Scheme.QAM64
    with pytest.raises(ValidationError):
        Scheme.parse("8PSK")


def test_iq_channel_matrix():
    assert np.allclose(iq_channel(1.0, 0.0).matrix, np.eye(2))
    theta = math.pi / 18
    c, s = math.cos(theta), math.sin(theta)
    expected = np.array([[c, s], [-0.9 * s, 0.9 * c]])
    assert np.allclose(iq_channel(0.9, theta).matrix, expected)


def test_output_grid_spacing_and_order():
    grid = output_grid(10_000)
    assert grid.spacing == pytest.approx(16 / 99)
    assert grid.side == 100
    assert np.allclose(grid.points[0], [-8.0, -8.0])
    # построчно: вторая координата меняется быстрее
    assert np.allclose(grid.points[1], [-8.0, -8.0 + 16 / 99])
    assert np.allclose(grid.points[100], [-8.0 + 16 / 99, -8.0])
    assert np.allclose(grid.points[-1], [8.0, 8.0])


@pytest.mark.parametrize("n", [10, 3, 0])
def test_output_grid_rejects_non_square(n):
    with pytest.raises(DiscretizationError):
        output_grid(n)


@pytest.mark.parametrize("snr_db, sigma2", [(0.0, 0.5), (10.0, 0.05), (-10.0, 5.0)])
def test_sigma2_from_snr(snr_db, sigma2):
    assert sigma2_from_snr_db(snr_db) == pytest.approx(sigma2)


def test_discretize_awgn_rows_stochastic():
    constellation = build_constellation(Scheme.QAM16)
    grid = output_grid(400)
    s = discretize_awgn(iq_channel(0.9, math.pi / 18), 0.05, constellation, grid)
    assert s.entries.shape == (16, 400)
    assert np.allclose(s.entries.sum(axis=1), 1.0, atol=1e-12)


def test_discretize_awgn_peaks_near_the_point():
    constellation = build_constellation(Scheme.QPSK)
    grid = output_grid(1600)
    s = discretize_awgn(iq_channel(1.0, 0.0), 0.01, constellation, grid)
    nearest = grid.points[np.argmax(s.entries, axis=1)]
    assert np.all(np.linalg.norm(nearest - constellation.points, axis=1) <= grid.spacing)


def test_discretize_awgn_detects_row_underflow():
    constellation = build_constellation(Scheme.QPSK)
    with pytest.raises(DiscretizationError):
        discretize_awgn(iq_channel(1.0, 0.0), 1e-3, constellation, output_grid(4))


def test_metric_matrix_and_estimated_channel():
    constellation = build_constellation(Scheme.QPSK)
    grid = output_grid(100)
    H = iq_channel(0.8, math.pi / 12)
    assert np.allclose(estimated_channel("identity", H), np.eye(2))
    assert np.allclose(estimated_channel("true", H), H.matrix)
    assert np.allclose(estimated_channel([[1, 0], [0, 2]], H), [[1, 0], [0, 2]])

    d = metric_matrix(constellation, grid, np.eye(2))
    expected = np.sum((grid.points[3] - constellation.points[1]) ** 2)
    assert d.entries[1, 3] == pytest.approx(expected)
    assert np.all(d.entries >= 0.0)


def test_metric_matrix_is_rotation_consistent():
    """η = 1, Ĥ = H: метрика совпадает с расстоянием до заранее повёрнутых точек"""
    constellation = build_constellation(Scheme.QAM16)
    grid = output_grid(100)
    theta = math.pi / 18
    H = iq_channel(1.0, theta)
    d = metric_matrix(constellation, grid, estimated_channel("true", H))

    c, s = math.cos(theta), math.sin(theta)
    for i, (x1, x2) in enumerate(constellation.points):
        rotated = np.array([c * x1 + s * x2, -s * x1 + c * x2])
        assert math.hypot(*rotated) == pytest.approx(math.hypot(x1, x2), abs=1e-15)
        for j in (0, 17, 55, 99):
            expected = float(np.sum((grid.points[j] - rotated) ** 2))
            assert d.entries[i, j] == pytest.approx(expected, abs=1e-12)


def test_matched_metric_requires_positive_law():
    assert np.allclose(
        matched_metric(TransitionMatrix([[0.5, 0.5], [0.25, 0.75]])).entries,
        -np.log([[0.5, 0.5], [0.25, 0.75]]),
    )
    with pytest.raises(ValidationError):
        matched_metric(TransitionMatrix(np.eye(2)))


@pytest.mark.parametrize(
    "text, label, radians",
    [
        ("pi/18", "pi/18", math.pi / 18),
        ("-pi/12", "-pi/12", -math.pi / 12),
        ("2*pi/36", "pi/18", math.pi / 18),
        ("3pi/4", "3*pi/4", 3 * math.pi / 4),
        ("0", "0", 0.0),
    ],
)
def test_parse_angle(text, label, radians):
    angle = parse_angle(text)
    assert angle.label == label
    assert angle.radians == pytest.approx(radians, abs=1e-15)


def test_parse_angle_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_angle("pie/18")


def test_to_bits():
    assert to_bits(math.log(2.0)) == pytest.approx(1.0, abs=1e-15)
