# lmrate/core/services/dual_service.py
"""
Двойственная целевая функция, T_i, замкнутые обновления (p, φ, ψ̃) и
скалярные корни F(λ), G(ζ)

Все суммы по ядру e^{−ζ d_ij} считаются через log-sum-exp: на сетке [−8, 8]²
d_ij доходит до ~180, и прямые экспоненты обнуляются.
"""

from typing import Optional, Tuple

import numpy as np
from scipy.special import entr, logsumexp

from lmrate.core.entities.dual import DualState, LogKernel
from lmrate.core.entities.probability import MetricMatrix, ProbabilityVector, TransitionMatrix
from lmrate.core.services.roots import ROOT_TOL, solve_decreasing_root
from lmrate.shared.exceptions import InfeasibleError, NumericalFailureError
from lmrate.shared.types import BoolArray, FloatArray

# Столбцы с q_j ниже порога исключаются из всех q-взвешенных сумм
PRUNE_FLOOR = 1e-250


def active_columns(p: ProbabilityVector, s: TransitionMatrix) -> Tuple[BoolArray, FloatArray]:
    """Маска столбцов с q_j ≥ PRUNE_FLOOR и сам вектор q"""
    q = s.output_distribution(p)
    return q >= PRUNE_FLOOR, q


def _safe_log(values: FloatArray) -> FloatArray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _column_log_sums(log_phi: FloatArray, zeta: float, d: FloatArray) -> FloatArray:
    """L_j = log Σ_i φ_i e^{−ζ d_ij}"""
    kernel = LogKernel.build(zeta, d)
    return logsumexp(log_phi[:, None] + kernel.exponents, axis=0)


def _metric_expectation(p: ProbabilityVector, s: TransitionMatrix, d: MetricMatrix) -> float:
    """E_{p·s}[d] = Σ_ij d_ij s_ij p_i"""
    return float(p.weights @ np.sum(d.entries * s.entries, axis=1))


def _require_finite(value: float, what: str) -> float:
    if not np.isfinite(value):
        raise NumericalFailureError(f"{what}: нечисловое значение", diagnostic=f"{what} = {value}")
    return float(value)


def dual_objective(
    state: DualState,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> float:
    """
    Целевая функция двойной максимизации при ψ_j = ψ̃_j q_j:

    1 − Σ_ij φ_i e^{−ζd_ij} ψ̃_j q_j − ζ Σ_ij d_ij s_ij p_i − Σ p log p
      + Σ p log φ + Σ q log ψ̃
    """
    mask, q = active_columns(p, s)
    log_sums = _column_log_sums(state.log_phi, state.zeta, d.entries[:, mask])
    q_active = q[mask]
    log_psi = state.log_psi[mask]

    with np.errstate(over="ignore"):
        kernel_mass = float(q_active @ np.exp(log_psi + log_sums))
    positive = p.weights > 0.0
    p_log_phi = float(p.weights[positive] @ state.log_phi[positive])
    value = (
        1.0
        - kernel_mass
        - state.zeta * _metric_expectation(p, s, d)
        + float(np.sum(entr(p.weights)))
        + p_log_phi
        + float(q_active @ log_psi)
    )
    return _require_finite(value, "dual_objective")


def log_T(state: DualState, s: TransitionMatrix, d: MetricMatrix) -> FloatArray:
    """log T_i = log φ_i + Σ_j s_ij [−ψ̃_j Σ_k φ_k e^{−ζd_kj} + log ψ̃_j − ζ d_ij]"""
    log_sums = _column_log_sums(state.log_phi, state.zeta, d.entries)
    with np.errstate(over="ignore"):
        coupling = np.exp(state.log_psi + log_sums)
    bracket = s.entries @ (state.log_psi - coupling)
    bracket -= state.zeta * np.sum(s.entries * d.entries, axis=1)
    result = state.log_phi + bracket
    if np.any(np.isnan(result)) or np.any(result == np.inf):
        raise NumericalFailureError("log T: нечисловые элементы", diagnostic=f"log T = {result}")
    return result


def _softmax_weights(log_t: FloatArray, lam: float, powers: FloatArray) -> FloatArray:
    logits = log_t - lam * powers
    return np.exp(logits - logsumexp(logits))


def eval_F(lam: float, log_t: FloatArray, powers: FloatArray, gamma: float) -> float:
    """F(λ) = −Γ + Σ ‖x_i‖² T_i e^{−λ‖x_i‖²} / Σ T_i e^{−λ‖x_i‖²}"""
    return -gamma + float(_softmax_weights(log_t, lam, powers) @ powers)


def eval_F_derivative(lam: float, log_t: FloatArray, powers: FloatArray) -> float:
    """F′(λ) = −Var_w(‖x‖²) ≤ 0"""
    weights = _softmax_weights(log_t, lam, powers)
    mean = float(weights @ powers)
    return -max(float(weights @ (powers - mean) ** 2), 0.0)


def solve_lambda(
    log_t: FloatArray,
    powers: FloatArray,
    gamma: float,
    start: Optional[float] = None,
) -> float:
    """λ* = 0 при F(0) ≤ 0, иначе корень F на (0, ∞)"""
    if eval_F(0.0, log_t, powers, gamma) <= 0.0:
        return 0.0
    if float(np.min(powers)) > gamma:
        raise InfeasibleError(
            "бюджет мощности меньше минимальной мощности точки",
            diagnostic=f"min‖x‖² = {np.min(powers):.6g} > Γ = {gamma:.6g}",
        )

    def value_and_slope(lam: float) -> Tuple[float, float]:
        return eval_F(lam, log_t, powers, gamma), eval_F_derivative(lam, log_t, powers)

    try:
        return solve_decreasing_root(value_and_slope, start=start, tol=ROOT_TOL)
    except NumericalFailureError as e:
        raise InfeasibleError("F(λ) > 0 вплоть до предела λ", diagnostic=e.diagnostic) from e


def update_p(
    log_t: FloatArray,
    powers: FloatArray,
    gamma: Optional[float],
    start: Optional[float] = None,
) -> Tuple[ProbabilityVector, float]:
    """p_i ∝ T_i e^{−λ*‖x_i‖²}; при Γ = None (без ограничения) λ = 0"""
    lam = 0.0 if gamma is None else solve_lambda(log_t, powers, gamma, start=start)
    weights = _softmax_weights(log_t, lam, powers)
    return ProbabilityVector(weights / weights.sum()), lam


def update_phi(
    p: ProbabilityVector,
    log_psi: FloatArray,
    zeta: float,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> FloatArray:
    """log φ_i = log p_i − log Σ_j e^{−ζd_ij} ψ̃_j q_j"""
    mask, q = active_columns(p, s)
    kernel = LogKernel.build(zeta, d.entries[:, mask])
    log_weights = log_psi[mask] + np.log(q[mask])
    denominators = logsumexp(kernel.exponents + log_weights[None, :], axis=1)
    if not np.all(np.isfinite(denominators)):
        raise NumericalFailureError(
            "нулевой знаменатель в обновлении φ",
            diagnostic=f"строки {np.flatnonzero(~np.isfinite(denominators)).tolist()}",
        )
    return _safe_log(p.weights) - denominators


def update_psi(log_phi: FloatArray, zeta: float, d: MetricMatrix) -> FloatArray:
    """log ψ̃_j = −log Σ_i φ_i e^{−ζd_ij}"""
    log_sums = _column_log_sums(log_phi, zeta, d.entries)
    if not np.all(np.isfinite(log_sums)):
        raise NumericalFailureError(
            "исчезновение знаменателя в обновлении ψ̃",
            diagnostic=f"столбцов: {int(np.count_nonzero(~np.isfinite(log_sums)))}",
        )
    return -log_sums


def _coupling_logs(
    zeta: float,
    log_phi: FloatArray,
    log_psi: FloatArray,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> Tuple[FloatArray, FloatArray]:
    """log(φ_k e^{−ζd_kj} ψ̃_j q_j) по активным столбцам и соответствующие d"""
    mask, q = active_columns(p, s)
    d_active = d.entries[:, mask]
    kernel = LogKernel.build(zeta, d_active)
    logs = log_phi[:, None] + kernel.exponents + (log_psi[mask] + np.log(q[mask]))[None, :]
    return logs, d_active


def _weighted_log_mass(logs: FloatArray, weights: FloatArray) -> float:
    """log Σ w·e^{logs}; −inf при нулевых весах"""
    with np.errstate(divide="ignore"):
        return float(logsumexp(logs, b=weights))


def eval_G(
    zeta: float,
    log_phi: FloatArray,
    log_psi: FloatArray,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> float:
    """G(ζ) = Σ_kj [φ_k d_kj e^{−ζd_kj} ψ̃_j q_j − d_kj s_kj p_k]"""
    logs, d_active = _coupling_logs(zeta, log_phi, log_psi, p, s, d)
    with np.errstate(over="ignore"):
        tilted = np.exp(_weighted_log_mass(logs, d_active))
    return float(tilted) - _metric_expectation(p, s, d)


def eval_G_derivative(
    zeta: float,
    log_phi: FloatArray,
    log_psi: FloatArray,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> float:
    """G′(ζ) = −Σ_kj φ_k d_kj² e^{−ζd_kj} ψ̃_j q_j ≤ 0"""
    logs, d_active = _coupling_logs(zeta, log_phi, log_psi, p, s, d)
    with np.errstate(over="ignore"):
        return -float(np.exp(_weighted_log_mass(logs, d_active ** 2)))


def solve_zeta(
    log_phi: FloatArray,
    log_psi: FloatArray,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
    start: Optional[float] = None,
) -> float:
    """
    ζ* = 0 при G(0) ≤ 0, иначе корень G

    Ньютон идёт по h(ζ) = log Σ d·γ(ζ) − log E_{p·s}[d]: корень тот же, что у G,
    но h остаётся конечной там, где G переполняется.
    """
    if eval_G(0.0, log_phi, log_psi, p, s, d) <= 0.0:
        return 0.0
    expectation = _metric_expectation(p, s, d)
    if expectation <= 0.0:
        raise NumericalFailureError(
            "G(ζ) > 0 при любом ζ",
            diagnostic="E_{p·s}[d] = 0, а сдвинутая масса положительна",
        )
    log_expectation = np.log(expectation)

    def value_and_slope(zeta: float) -> Tuple[float, float]:
        logs, d_active = _coupling_logs(zeta, log_phi, log_psi, p, s, d)
        first = _weighted_log_mass(logs, d_active)
        second = _weighted_log_mass(logs, d_active ** 2)
        return first - log_expectation, -float(np.exp(second - first))

    # |G| ≈ E[d]·|h| у корня
    return solve_decreasing_root(value_and_slope, start=start, tol=ROOT_TOL / max(expectation, 1.0))


# Ньютон по (log φ, ζ) при фиксированном p
REFINE_TOL = ROOT_TOL
ASCENT_SLACK = 1e-13
ARMIJO = 1e-4
BACKTRACK_LIMIT = 40


def _reduced_objective(
    a: FloatArray,
    zeta: float,
    p_rows: FloatArray,
    q: FloatArray,
    d_rows: FloatArray,
    expectation: float,
) -> float:
    """h(a, ζ) = Σ p a − Σ_j q_j log Σ_i e^{a_i − ζd_ij} − ζ E_{p·s}[d]"""
    columns = logsumexp(a[:, None] - zeta * d_rows, axis=0)
    return float(p_rows @ a - q @ columns - zeta * expectation)


def _reduced_derivatives(
    a: FloatArray,
    zeta: float,
    p_rows: FloatArray,
    q: FloatArray,
    d_rows: FloatArray,
    expectation: float,
) -> Tuple[FloatArray, FloatArray]:
    """Градиент h и ковариация признаков (e_i, −d_ij), т.е. −∇²h"""
    logits = a[:, None] - zeta * d_rows
    weights = np.exp(logits - logsumexp(logits, axis=0)[None, :])
    weighted = weights * q[None, :]
    mass = weighted.sum(axis=1)
    column_means = np.sum(weights * d_rows, axis=0)

    m = a.size
    gradient = np.empty(m + 1)
    gradient[:m] = p_rows - mass
    gradient[m] = float(q @ column_means) - expectation

    covariance = np.empty((m + 1, m + 1))
    covariance[:m, :m] = np.diag(mass) - weighted @ weights.T
    cross = -(np.sum(weighted * d_rows, axis=1) - weighted @ column_means)
    covariance[:m, m] = cross
    covariance[m, :m] = cross
    covariance[m, m] = float(np.sum(weighted * d_rows ** 2) - q @ column_means ** 2)
    return gradient, covariance


def refine_fixed_input(
    log_phi: FloatArray,
    zeta: float,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
    max_steps: int,
) -> Tuple[FloatArray, float]:
    """
    Совместный подъём по (φ, ζ) при ψ̃, исключённом в замкнутой форме

    При ψ̃_j = 1/Σ_i φ_i e^{−ζd_ij} двойственная функция равна вогнутой
    h(log φ, ζ). Ньютон с бэктрекингом и границей ζ ≥ 0 доводит r_φ и r_ζ
    до REFINE_TOL там, где поочерёдные обновления (8) ползут при большом ζ.
    Строки с p_i = 0 не трогаются.
    """
    rows = p.weights > 0.0
    mask, q_all = active_columns(p, s)
    p_rows = p.weights[rows]
    q = q_all[mask]
    d_rows = d.entries[np.ix_(rows, mask)]
    expectation = _metric_expectation(p, s, d)
    zeta_tol = REFINE_TOL * max(expectation, 1.0)

    a = np.array(log_phi[rows], dtype=np.float64)
    m = a.size
    value = _reduced_objective(a, zeta, p_rows, q, d_rows, expectation)

    for _ in range(max_steps):
        gradient, covariance = _reduced_derivatives(a, zeta, p_rows, q, d_rows, expectation)
        zeta_frozen = zeta <= 0.0 and gradient[m] <= 0.0
        r_zeta = 0.0 if zeta_frozen else abs(gradient[m])
        if float(np.sum(np.abs(gradient[:m]))) < REFINE_TOL and r_zeta < zeta_tol:
            break

        direction = np.zeros(m + 1)
        if not zeta_frozen:
            direction = np.linalg.lstsq(covariance, gradient, rcond=None)[0]
            # на границе ζ = 0 шаг внутрь запрещён: ζ фиксируется
            zeta_frozen = zeta <= 0.0 and direction[m] < 0.0
        if zeta_frozen:
            direction = np.zeros(m + 1)
            direction[:m] = np.linalg.lstsq(covariance[:m, :m], gradient[:m], rcond=None)[0]
        slope = float(gradient @ direction)
        if not np.all(np.isfinite(direction)) or slope <= 0.0:
            break

        t = 1.0
        if direction[m] < 0.0:
            t = min(1.0, zeta / -direction[m])
        accepted = False
        for _ in range(BACKTRACK_LIMIT):
            trial_a = a + t * direction[:m]
            trial_zeta = max(zeta + t * direction[m], 0.0)
            trial = _reduced_objective(trial_a, trial_zeta, p_rows, q, d_rows, expectation)
            if np.isfinite(trial) and trial >= value + ARMIJO * t * slope - ASCENT_SLACK:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        a, zeta, value = trial_a, trial_zeta, trial

    refined = np.array(log_phi, dtype=np.float64)
    refined[rows] = a
    return refined, float(zeta)
