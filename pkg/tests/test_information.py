# tests/test_information.py
import math

import numpy as np
import pytest

from lmrate.core.entities import JointDistribution, ProbabilityVector, TransitionMatrix
from lmrate.core.services.information import entropy, joint_from_input, mutual_information
from lmrate.shared.exceptions import ValidationError
from tests.conftest import BSC_CAPACITY


def test_entropy_binary():
    assert entropy(ProbabilityVector([0.9, 0.1])) == pytest.approx(0.325083, abs=1e-6)


def test_entropy_uniform_and_degenerate():
    assert entropy(ProbabilityVector.uniform(4)) == pytest.approx(math.log(4), abs=1e-15)
    assert entropy(ProbabilityVector([1.0, 0.0, 0.0])) == 0.0


def test_mutual_information_bsc(bsc):
    p = ProbabilityVector.uniform(2)
    assert mutual_information(p, bsc) == pytest.approx(BSC_CAPACITY, abs=1e-6)


def test_mutual_information_useless_channel():
    s = TransitionMatrix([[0.2, 0.3, 0.5], [0.2, 0.3, 0.5]])
    assert mutual_information(ProbabilityVector([0.4, 0.6]), s) == 0.0


def test_mutual_information_noiseless():
    s = TransitionMatrix(np.eye(4))
    assert mutual_information(ProbabilityVector.uniform(4), s) == pytest.approx(math.log(4))


def test_joint_from_input_marginals(bsc):
    p = ProbabilityVector([0.3, 0.7])
    joint = joint_from_input(p, bsc)
    assert np.allclose(joint.row_marginal, p.weights)
    assert np.allclose(joint.column_marginal, bsc.output_distribution(p))


def test_dimension_mismatch_rejected(bsc):
    with pytest.raises(ValidationError):
        mutual_information(ProbabilityVector.uniform(3), bsc)


@pytest.mark.parametrize(
    "weights",
    [[0.5, 0.6], [-0.1, 1.1], [float("nan"), 1.0]],
)
def test_probability_vector_invariants(weights):
    with pytest.raises(ValidationError):
        ProbabilityVector(weights)


def test_transition_matrix_rows_must_sum_to_one():
    with pytest.raises(ValidationError):
        TransitionMatrix([[0.5, 0.4], [0.1, 0.9]])


def test_joint_distribution_total_mass():
    with pytest.raises(ValidationError):
        JointDistribution([[0.5, 0.5], [0.5, 0.5]])


def test_mutual_information_entropy_identity():
    """I(p, s) = H(q) − Σ p_i H(s_i)"""
    rng = np.random.default_rng(31)
    raw = rng.uniform(0.05, 1.0, (4, 6))
    s = TransitionMatrix(raw / raw.sum(axis=1, keepdims=True))
    p = ProbabilityVector.normalized(rng.uniform(0.1, 1.0, 4))
    q = ProbabilityVector.normalized(s.output_distribution(p))
    conditional = sum(
        weight * entropy(ProbabilityVector(row)) for weight, row in zip(p.weights, s.entries)
    )
    assert mutual_information(p, s) == pytest.approx(entropy(q) - conditional, abs=1e-12)


def test_entropy_is_concave():
    rng = np.random.default_rng(32)
    for _ in range(20):
        first = ProbabilityVector.normalized(rng.uniform(0.0, 1.0, 5))
        second = ProbabilityVector.normalized(rng.uniform(0.0, 1.0, 5))
        alpha = float(rng.uniform())
        mixed = ProbabilityVector.normalized(alpha * first.weights + (1 - alpha) * second.weights)
        bound = alpha * entropy(first) + (1 - alpha) * entropy(second)
        assert entropy(mixed) >= bound - 1e-12
