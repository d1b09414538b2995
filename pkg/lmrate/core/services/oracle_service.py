# lmrate/core/services/oracle_service.py
"""
Независимые проверки для крошечных задач

Модуль не импортирует ядра dual_service: совпадение с ADM должно получаться
по другому пути вычислений.
"""

import math
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy.special import logsumexp, rel_entr

from lmrate.core.entities.probability import MetricMatrix, ProbabilityVector, TransitionMatrix
from lmrate.core.entities.specs import OracleConfig
from lmrate.shared.exceptions import ValidationError
from lmrate.shared.logger import logger
from lmrate.shared.types import FloatArray

BRUTE_FORCE_MAX_SIZE = 64
BA_MAX_ITER = 100_000
# Ограничение метрики считается выполненным с этим относительным запасом
CONSTRAINT_SLACK = 1e-12


def _marginal_operator(M: int, N: int) -> FloatArray:
    """Строки: суммы γ по строкам (M штук), затем по столбцам (N штук); γ в построчном vec"""
    rows = np.kron(np.eye(M), np.ones((1, N)))
    columns = np.kron(np.ones((1, M)), np.eye(N))
    return np.vstack([rows, columns])


def _neg_entropy(gamma: FloatArray) -> float:
    return float(np.sum(gamma * np.log(gamma)))


def _maximal_support_point(constraints: FloatArray, rhs: FloatArray) -> FloatArray:
    """
    Точка {γ ≥ 0 : Aγ = b} с наибольшим носителем

    Однородная задача: max Σ t при A y = b τ, t ≤ y, 0 ≤ t ≤ 1, τ ≥ 1.
    Элементы, которые положительны хоть в одной допустимой точке, получают
    t = 1; ответ γ = y / τ, уточнённый проекцией на Aγ = b.
    """
    K = constraints.shape[1]
    identity = np.eye(K)
    cost = np.concatenate([np.zeros(K), -np.ones(K), [0.0]])
    equality = np.hstack([constraints, np.zeros_like(constraints), -rhs[:, None]])
    upper = np.hstack([-identity, identity, np.zeros((K, 1))])
    bounds = [(0.0, None)] * K + [(0.0, 1.0)] * K + [(1.0, None)]
    result = scipy.optimize.linprog(
        cost,
        A_ub=upper,
        b_ub=np.zeros(K),
        A_eq=equality,
        b_eq=np.zeros(rhs.size),
        bounds=bounds,
        method="highs",
    )
    if result.status != 0:
        raise ValidationError(f"перебор: допустимая γ не найдена ({result.message})")

    y, support, tau = result.x[:K], result.x[K : 2 * K] > 0.5, result.x[-1]
    gamma = np.where(support, y / tau, 0.0)
    restricted = constraints[:, support]
    correction = np.linalg.lstsq(restricted, rhs - constraints @ gamma, rcond=None)[0]
    gamma[support] += correction
    if np.any(gamma[support] <= 0.0):
        raise ValidationError("перебор: проекция на ограничения вышла из носителя")
    return gamma


def brute_force_lm(
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
    cfg: Optional[OracleConfig] = None,
) -> float:
    """
    LM rate прямой минимизацией I_γ(X;Y) по совместным γ с маргиналами (p, q)
    и E_γ[d] ≤ E_{p·s}[d]

    γ = p·s + B w, где столбцы B образуют базис ядра маргинальных ограничений
    и гиперплоскости метрики, так что маргиналы точны при любом w. Если
    независимая пара p⊗q допустима, ответ 0; иначе ограничение активно и по w
    идёт ньютоновский спуск с бэктрекингом, сохраняющим γ > 0 на носителе.
    Нули p·s внутри носителя маргиналов допускаются: старт тогда даёт
    _maximal_support_point.
    """
    cfg = cfg or OracleConfig()
    if s.M * s.N > BRUTE_FORCE_MAX_SIZE:
        raise ValidationError(
            f"перебор только для M·N ≤ {BRUTE_FORCE_MAX_SIZE}, получено {s.M * s.N}"
        )
    if s.entries.shape != d.shape or len(p) != s.M:
        raise ValidationError("размеры p, s и d не согласованы")

    # Нулевые строки и столбцы γ заданы маргиналами
    q = s.output_distribution(p)
    rows, cols = p.weights > 0.0, q > 0.0
    p_sub, q_sub = p.weights[rows], q[cols]
    d_sub = d.entries[np.ix_(rows, cols)]
    start = (p_sub[:, None] * s.entries[np.ix_(rows, cols)]).ravel()

    budget = float(start @ d_sub.ravel())
    product = np.outer(p_sub, q_sub)
    if float(np.sum(product * d_sub)) <= budget + CONSTRAINT_SLACK * max(1.0, abs(budget)):
        return 0.0

    M, N = d_sub.shape
    constraints = np.vstack([_marginal_operator(M, N), d_sub.ravel()[None, :]])
    if np.all(start > 0.0):
        gamma = start.copy()
    else:
        # p·s касается границы: старт из точки с наибольшим допустимым носителем
        rhs = np.concatenate([p_sub, q_sub, [budget]])
        gamma = _maximal_support_point(constraints, rhs)
    support = gamma > 0.0
    basis = scipy.linalg.null_space(constraints[:, support])
    inner = gamma[support]

    for step in range(cfg.descent_steps):
        if basis.shape[1] == 0:
            break
        gradient = basis.T @ (np.log(inner) + 1.0)
        hessian = basis.T @ (basis / inner[:, None])
        direction = -scipy.linalg.solve(hessian, gradient, assume_a="pos")
        decrement = float(-gradient @ direction)
        if decrement / 2.0 <= cfg.tolerance:
            break

        move = basis @ direction
        current = _neg_entropy(inner)
        t = cfg.step_size
        while True:
            candidate = inner + t * move
            feasible = np.all(candidate > 0.0)
            if feasible and _neg_entropy(candidate) <= current - 0.25 * t * decrement:
                break
            t *= 0.5
            if t < 1e-16:
                break
        if t < 1e-16:
            logger.debug(f"Перебор: бэктрекинг исчерпан на шаге {step}")
            break
        inner = candidate

    gamma[support] = inner
    joint = gamma.reshape(M, N)
    return float(np.sum(rel_entr(joint, np.outer(joint.sum(axis=1), joint.sum(axis=0)))))


def blahut_arimoto(
    s: TransitionMatrix,
    tol: float = 1e-12,
    max_iter: int = BA_MAX_ITER,
) -> Tuple[float, ProbabilityVector]:
    """
    Пропускная способность ДКБП (наты)

    Останов по разрыву верхней max_i D_i и нижней log Σ p_i e^{D_i} оценок,
    где D_i = KL(s_i· ‖ q).
    """
    log_p = np.full(s.M, -math.log(s.M))
    lower = upper = 0.0
    for _ in range(max_iter):
        p = np.exp(log_p)
        q = p @ s.entries
        divergences = np.sum(rel_entr(s.entries, q[None, :]), axis=1)
        lower = float(logsumexp(log_p + divergences))
        upper = float(np.max(divergences))
        if upper - lower <= tol:
            break
        log_p = log_p + divergences
        log_p -= logsumexp(log_p)
    else:
        logger.warning(f"Blahut–Arimoto: разрыв {upper - lower:.3e} после {max_iter} итераций")
    return max(lower, 0.0), ProbabilityVector.normalized(np.exp(log_p))


def scarlett_dual_objective(
    phi_hat: FloatArray,
    zeta: float,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> float:
    """Σ_ij p_i s_ij log(e^{−ζd_ij} φ̂_i / Σ_k p_k e^{−ζd_kj} φ̂_k)"""
    phi_hat = np.asarray(phi_hat, dtype=np.float64)
    if np.any(phi_hat <= 0.0) or zeta < 0.0:
        raise ValidationError("нужны φ̂ > 0 и ζ ≥ 0")
    with np.errstate(divide="ignore"):
        log_weights = np.log(p.weights) + np.log(phi_hat)
    exponents = -zeta * d.entries
    log_normalizers = logsumexp(log_weights[:, None] + exponents, axis=0)
    terms = exponents + np.log(phi_hat)[:, None] - log_normalizers[None, :]
    mass = p.weights[:, None] * s.entries
    return float(np.sum(np.where(mass > 0.0, mass * terms, 0.0)))


def g_lm(
    phi: FloatArray,
    psi: FloatArray,
    zeta: float,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> float:
    """
    Двойственная функция в исходных координатах ψ, прямыми циклами:

    H(p) + H(q) + Σ p log φ + Σ q log ψ − Σ_ij φ_i e^{−ζd_ij} ψ_j − ζ E_{p·s}[d] + 1
    """
    q = s.output_distribution(p)
    value = 1.0
    for i in range(s.M):
        if p.weights[i] > 0.0:
            value += p.weights[i] * (math.log(phi[i]) - math.log(p.weights[i]))
        for j in range(s.N):
            value -= phi[i] * math.exp(-zeta * d.entries[i, j]) * psi[j]
            value -= zeta * d.entries[i, j] * s.entries[i, j] * p.weights[i]
    for j in range(s.N):
        if q[j] > 0.0:
            value += q[j] * (math.log(psi[j]) - math.log(q[j]))
    return value


def optimal_psi(
    phi: FloatArray,
    zeta: float,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> FloatArray:
    """ψ*_j = q_j / Σ_k e^{−ζd_kj} φ_k"""
    q = s.output_distribution(p)
    return q / (np.asarray(phi) @ np.exp(-zeta * d.entries))


# Случайная метрика: −log s плюс шум, пока p⊗q остаётся недопустимой с этим запасом
INSTANCE_MARGIN = 0.01
INSTANCE_NOISE = 0.3
INSTANCE_ATTEMPTS = 100


def random_instance(
    seed: int,
    M: int,
    N: int,
) -> Tuple[ProbabilityVector, TransitionMatrix, MetricMatrix]:
    """
    Случайная задача со строго положительными p, s и d = −log s + U(0, 0.3)

    Шум перевыбирается, пока E_{p⊗q}[d] − E_{p·s}[d] < INSTANCE_MARGIN:
    иначе LM rate тривиально равна нулю.
    """
    rng = np.random.default_rng(seed)
    p = ProbabilityVector.normalized(rng.uniform(0.2, 1.0, M))
    raw = rng.uniform(0.1, 1.0, (M, N))
    s = TransitionMatrix(raw / raw.sum(axis=1, keepdims=True))
    q = s.output_distribution(p)
    matched = -np.log(s.entries)
    for _ in range(INSTANCE_ATTEMPTS):
        d = matched + rng.uniform(0.0, INSTANCE_NOISE, (M, N))
        product = float(np.sum(np.outer(p.weights, q) * d))
        joint = float(np.sum(p.weights[:, None] * s.entries * d))
        if product - joint >= INSTANCE_MARGIN:
            return p, s, MetricMatrix(d)
    raise ValidationError(f"seed={seed}: метрика с запасом {INSTANCE_MARGIN} не найдена")
