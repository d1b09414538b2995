# tests/test_dual.py
import math

import numpy as np
import pytest

from lmrate.core.entities import DualState, MetricMatrix, ProbabilityVector
from lmrate.core.services.dual_service import (
    dual_objective,
    eval_F,
    eval_F_derivative,
    eval_G,
    eval_G_derivative,
    log_T,
    refine_fixed_input,
    solve_lambda,
    solve_zeta,
    update_p,
    update_phi,
    update_psi,
)
from lmrate.core.services.oracle_service import random_instance
from lmrate.core.services.solver_service import residuals
from lmrate.shared.exceptions import InfeasibleError, ValidationError


def naive_G(zeta, phi, psi, p, s, d):
    q = s.output_distribution(p)
    total = 0.0
    for k in range(s.M):
        for j in range(s.N):
            total += phi[k] * d[k, j] * math.exp(-zeta * d[k, j]) * psi[j] * q[j]
            total -= d[k, j] * s.entries[k, j] * p.weights[k]
    return total


# --- update_p / λ -------------------------------------------------------

def test_update_p_constant_T_gives_uniform():
    p, lam = update_p(np.zeros(4), np.ones(4), 1.0)
    assert lam == 0.0
    assert np.allclose(p.weights, 0.25)


def test_update_p_ratio_of_T():
    p, _ = update_p(np.log([3.0, 1.0]), np.ones(2), 1.0)
    assert np.allclose(p.weights, [0.75, 0.25])


def test_update_p_active_power_budget():
    p, lam = update_p(np.zeros(2), np.array([0.0, 2.0]), 0.5)
    assert lam == pytest.approx(math.log(3.0) / 2.0, abs=1e-9)
    assert np.allclose(p.weights, [0.75, 0.25], atol=1e-10)
    assert p.weights @ np.array([0.0, 2.0]) <= 0.5 + 1e-9


def test_update_p_unconstrained():
    p, lam = update_p(np.log([1.0, 2.0, 1.0]), np.array([0.0, 5.0, 9.0]), None)
    assert lam == 0.0
    assert np.allclose(p.weights, [0.25, 0.5, 0.25])


def test_solve_lambda_slack_budget_is_zero():
    assert solve_lambda(np.zeros(3), np.array([0.1, 0.2, 0.3]), 1.0) == 0.0


def test_solve_lambda_infeasible():
    with pytest.raises(InfeasibleError):
        solve_lambda(np.zeros(2), np.array([2.0, 3.0]), 1.0)


def test_F_is_monotone():
    rng = np.random.default_rng(3)
    log_t, powers = rng.normal(size=6), rng.uniform(0.0, 3.0, 6)
    for lam in rng.uniform(0.0, 5.0, 10):
        assert eval_F(lam + 1e-6, log_t, powers, 1.0) <= eval_F(lam, log_t, powers, 1.0) + 1e-15
        assert eval_F_derivative(lam, log_t, powers) <= 0.0


# --- φ, ψ̃ ---------------------------------------------------------------

def test_update_phi_with_zero_zeta_returns_p():
    p, s, d = random_instance(1, 3, 4)
    log_phi = update_phi(p, np.zeros(4), 0.0, s, d)
    assert np.allclose(np.exp(log_phi), p.weights, atol=1e-14)


def test_update_psi_with_zero_zeta():
    _, _, d = random_instance(2, 3, 4)
    phi = np.array([0.2, 0.5, 1.3])
    log_psi = update_psi(np.log(phi), 0.0, d)
    assert np.allclose(np.exp(log_psi), 1.0 / phi.sum())


def test_updates_zero_their_own_residuals():
    p, s, d = random_instance(4, 3, 5)
    state = DualState.initial(3, 5)
    state = state.evolve(log_phi=update_phi(p, state.log_psi, state.zeta, s, d))
    assert residuals(state, p, s, d).r_phi < 1e-12
    state = state.evolve(log_psi=update_psi(state.log_phi, state.zeta, d))
    assert residuals(state, p, s, d).r_psi < 1e-12


def test_matched_fixed_point(matched_2x2):
    p, s, d = matched_2x2
    q = s.output_distribution(p)
    log_phi, log_psi = np.log(p.weights), -np.log(q)
    assert eval_G(1.0, log_phi, log_psi, p, s, d) == pytest.approx(0.0, abs=1e-14)
    assert np.allclose(update_phi(p, log_psi, 1.0, s, d), log_phi)
    assert np.allclose(update_psi(log_phi, 1.0, d), log_psi)
    assert solve_zeta(log_phi, log_psi, p, s, d) == pytest.approx(1.0, abs=1e-9)


# --- G(ζ) ---------------------------------------------------------------

def test_G_vanishes_for_zero_metric():
    p, s, _ = random_instance(5, 2, 3)
    d = MetricMatrix(np.zeros((2, 3)))
    for zeta in (0.0, 0.5, 3.0):
        assert eval_G(zeta, np.zeros(2), np.zeros(3), p, s, d) == 0.0
    assert solve_zeta(np.zeros(2), np.zeros(3), p, s, d) == 0.0


def test_G_matches_naive_loop():
    p, s, d = random_instance(6, 3, 4)
    phi, psi = np.array([0.3, 1.2, 0.8]), np.array([1.5, 0.7, 2.0, 1.1])
    value = eval_G(0.7, np.log(phi), np.log(psi), p, s, d)
    assert value == pytest.approx(naive_G(0.7, phi, psi, p, s, d.entries), abs=1e-12)


def test_G_is_monotone():
    p, s, d = random_instance(7, 3, 4)
    rng = np.random.default_rng(7)
    log_phi, log_psi = rng.normal(size=3), rng.normal(size=4)
    for zeta in rng.uniform(0.0, 4.0, 10):
        upper = eval_G(zeta, log_phi, log_psi, p, s, d)
        assert eval_G(zeta + 1e-6, log_phi, log_psi, p, s, d) <= upper + 1e-14
        assert eval_G_derivative(zeta, log_phi, log_psi, p, s, d) <= 0.0


def test_solve_zeta_brackets_the_root():
    p, s, d = random_instance(8, 3, 4)
    # большое φ даёт G(0) > 0
    log_phi, log_psi = np.full(3, 1.0), np.zeros(4)
    assert eval_G(0.0, log_phi, log_psi, p, s, d) > 0.0
    zeta = solve_zeta(log_phi, log_psi, p, s, d)
    assert zeta > 0.0
    assert abs(eval_G(zeta, log_phi, log_psi, p, s, d)) <= 1e-10
    assert eval_G(zeta - 1e-6, log_phi, log_psi, p, s, d) >= 0.0
    assert eval_G(zeta + 1e-6, log_phi, log_psi, p, s, d) <= 0.0


# --- целевая функция ------------------------------------------------------

def test_block_updates_ascend():
    p, s, d = random_instance(9, 3, 4)
    powers = np.array([0.5, 1.0, 2.0])
    state = DualState.initial(3, 4)
    history = [dual_objective(state, p, s, d)]

    p, lam = update_p(log_T(state, s, d), powers, None)
    history.append(dual_objective(state, p, s, d))
    state = state.evolve(log_phi=update_phi(p, state.log_psi, state.zeta, s, d), lam=lam)
    history.append(dual_objective(state, p, s, d))
    state = state.evolve(log_psi=update_psi(state.log_phi, state.zeta, d))
    history.append(dual_objective(state, p, s, d))
    state = state.evolve(zeta=solve_zeta(state.log_phi, state.log_psi, p, s, d))
    history.append(dual_objective(state, p, s, d))

    assert all(b >= a - 1e-12 for a, b in zip(history, history[1:]))


def test_refine_fixed_input_ascends_to_stationarity():
    p, s, d = random_instance(17, 3, 4)
    state = DualState.initial(3, 4)
    log_phi = update_phi(p, state.log_psi, state.zeta, s, d)
    swept = state.evolve(log_phi=log_phi, log_psi=update_psi(log_phi, state.zeta, d))
    literal = swept.evolve(zeta=solve_zeta(swept.log_phi, swept.log_psi, p, s, d))

    log_phi, zeta = refine_fixed_input(swept.log_phi, swept.zeta, p, s, d, max_steps=50)
    refined = DualState(log_phi, update_psi(log_phi, zeta, d), zeta, 0.0)
    assert dual_objective(refined, p, s, d) >= dual_objective(literal, p, s, d) - 1e-12
    current = residuals(refined, p, s, d)
    assert current.r_phi < 1e-10
    assert current.r_psi < 1e-12
    assert current.r_zeta < 1e-10


def test_refine_fixed_input_skips_unused_inputs():
    _, s, d = random_instance(18, 3, 4)
    p = ProbabilityVector([0.6, 0.4, 0.0])
    log_phi = update_phi(p, np.zeros(4), 1.0, s, d)
    refined, zeta = refine_fixed_input(log_phi, 1.0, p, s, d, max_steps=50)
    assert refined[2] == -np.inf
    assert np.all(np.isfinite(refined[:2]))
    assert zeta >= 0.0


def test_refine_with_zero_steps_is_identity():
    p, s, d = random_instance(19, 3, 4)
    log_phi = update_phi(p, np.zeros(4), 1.0, s, d)
    refined, zeta = refine_fixed_input(log_phi, 1.0, p, s, d, max_steps=0)
    assert np.array_equal(refined, log_phi)
    assert zeta == 1.0


def test_objective_invariant_under_joint_rescaling():
    p, s, d = random_instance(10, 3, 4)
    state = DualState(np.log([0.4, 0.9, 1.7]), np.log([0.6, 1.1, 0.9, 2.0]), 0.8, 0.0)
    c = math.log(3.7)
    scaled = state.evolve(log_phi=state.log_phi + c, log_psi=state.log_psi - c)
    expected = dual_objective(state, p, s, d)
    assert dual_objective(scaled, p, s, d) == pytest.approx(expected, abs=1e-12)


def test_log_T_reformulation():
    """−Σ p log p + Σ p log T + 1 совпадает с целевой функцией"""
    p, s, d = random_instance(11, 3, 4)
    state = DualState(np.log([0.4, 0.9, 1.7]), np.log([0.6, 1.1, 0.9, 2.0]), 0.8, 0.0)
    via_T = 1.0 - p.weights @ np.log(p.weights) + p.weights @ log_T(state, s, d)
    assert via_T == pytest.approx(dual_objective(state, p, s, d), abs=1e-12)


def test_dual_state_invariants():
    with pytest.raises(ValidationError):
        DualState(np.zeros(2), np.zeros(3), -0.1, 0.0)
    with pytest.raises(ValidationError):
        DualState(np.zeros(2), np.array([0.0, np.inf, 0.0]), 1.0, 0.0)
    # φ_i = 0 допустимо
    DualState(np.array([-np.inf, 0.0]), np.zeros(3), 1.0, 0.0)
