# lmrate/core/services/solver_service.py
"""
Alternating Double Maximization: C_LM с оптимизацией входа и LM rate при
фиксированном входе, невязки и восстановление прямого решения
"""

import time
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp, rel_entr

from lmrate.core.entities.dual import DualState, LogKernel
from lmrate.core.entities.probability import (
    JointDistribution,
    MetricMatrix,
    ProbabilityVector,
    TransitionMatrix,
)
from lmrate.core.entities.report import ResidualSet, SolveReport, Termination
from lmrate.core.entities.specs import SolverConfig
from lmrate.core.services.dual_service import (
    active_columns,
    dual_objective,
    eval_F,
    eval_G,
    log_T,
    refine_fixed_input,
    solve_zeta,
    update_p,
    update_phi,
    update_psi,
)
from lmrate.shared.exceptions import NumericalFailureError, ValidationError
from lmrate.shared.logger import logger
from lmrate.shared.types import FloatArray

PROGRESS_EVERY = 100

Step = Callable[[DualState, ProbabilityVector], Tuple[DualState, ProbabilityVector]]


def _positive_or_none(value: float) -> Optional[float]:
    return value if value > 0.0 else None


class SolverService:
    """Сервис решения задач LM rate / C_LM"""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()

    def solve_clm(
        self,
        s: TransitionMatrix,
        d: MetricMatrix,
        powers: FloatArray,
    ) -> SolveReport:
        """
        C_LM = max_p I_LM(p) при Σ p_i‖x_i‖² ≤ Γ

        Каждый старт из initial_inputs (и равномерный при warm_start) сначала
        решается при фиксированном входе; ADM продолжает из полученного
        двойственного состояния. Возвращается лучший по скорости старт.
        """
        _check_shapes(s, d)
        powers = np.asarray(powers, dtype=np.float64)
        if powers.shape != (s.M,):
            raise ValidationError(f"ожидалось {s.M} мощностей, получено {powers.shape}")

        starts: List[Optional[ProbabilityVector]] = [
            ProbabilityVector.uniform(s.M) if self.config.warm_start else None
        ]
        for weights in self.config.initial_inputs or []:
            seed = ProbabilityVector.normalized(weights)
            if len(seed) != s.M:
                raise ValidationError(f"начальное распределение длины {len(seed)}, ожидалось {s.M}")
            starts.append(seed)

        logger.info(f"C_LM: M={s.M}, N={s.N}, Γ={self.config.power_budget}, стартов {len(starts)}")
        reports = [self._solve_clm_from(seed, s, d, powers) for seed in starts]
        usable = [report for report in reports if not report.failed]
        if not usable:
            return reports[0]
        # max по скорости, при равенстве первый старт
        return max(usable, key=lambda report: report.rate)

    def solve_lm_fixed_input(
        self,
        p: ProbabilityVector,
        s: TransitionMatrix,
        d: MetricMatrix,
    ) -> SolveReport:
        """I_LM(p): обновляются только (φ, ψ̃, ζ), p заморожено"""
        _check_shapes(s, d)
        if len(p) != s.M:
            raise ValidationError(f"размер p={len(p)} не совпадает с M={s.M}")
        logger.info(f"LM rate при фиксированном входе: M={s.M}, N={s.N}")
        return self._run(self._fixed_step(s, d), DualState.initial(s.M, s.N), p, s, d, None, None)

    # ------------------------------------------------------------------

    def _solve_clm_from(
        self,
        seed: Optional[ProbabilityVector],
        s: TransitionMatrix,
        d: MetricMatrix,
        powers: FloatArray,
    ) -> SolveReport:
        state = DualState.initial(s.M, s.N)
        p = ProbabilityVector.uniform(s.M)
        if seed is not None:
            warm = SolverService(self.config.model_copy(update={"record_trajectory": False}))
            warm_report = warm._run(warm._fixed_step(s, d), state, seed, s, d, None, None)
            if warm_report.failed:
                return warm_report
            state, p = warm_report.dual_state, seed
        gamma = self.config.power_budget
        return self._run(self._adm_step(s, d, powers), state, p, s, d, gamma, powers)

    def _adm_step(self, s: TransitionMatrix, d: MetricMatrix, powers: FloatArray) -> Step:
        gamma = self.config.power_budget
        fixed = self._fixed_step(s, d)

        def step(state: DualState, _: ProbabilityVector) -> Tuple[DualState, ProbabilityVector]:
            # Порядок: λ/p по T прошлого состояния, затем φ, ψ̃ при старом ζ, затем ζ
            p, lam = update_p(log_T(state, s, d), powers, gamma, start=_positive_or_none(state.lam))
            inner, _ = fixed(state, p)
            return inner.evolve(lam=lam), p

        return step

    def _fixed_step(self, s: TransitionMatrix, d: MetricMatrix) -> Step:
        refine_steps = self.config.refine_steps

        def step(state: DualState, p: ProbabilityVector) -> Tuple[DualState, ProbabilityVector]:
            log_phi = update_phi(p, state.log_psi, state.zeta, s, d)
            log_psi = update_psi(log_phi, state.zeta, d)
            zeta = state.zeta
            if refine_steps > 0:
                log_phi, zeta = refine_fixed_input(log_phi, zeta, p, s, d, refine_steps)
                log_psi = update_psi(log_phi, zeta, d)
            zeta = solve_zeta(log_phi, log_psi, p, s, d, start=_positive_or_none(zeta))
            return DualState(log_phi, log_psi, zeta, 0.0), p

        return step

    def _run(
        self,
        step: Step,
        state: DualState,
        p: ProbabilityVector,
        s: TransitionMatrix,
        d: MetricMatrix,
        gamma: Optional[float],
        powers: Optional[FloatArray],
    ) -> SolveReport:
        cfg = self.config
        started = time.perf_counter()
        report = SolveReport(
            rate=float("nan"),
            input_distribution=p,
            dual_state=state,
            iterations=0,
            termination=Termination.MAX_ITER,
        )
        track_residuals = cfg.record_trajectory or cfg.stop_on_residuals
        previous: Optional[float] = None

        try:
            for iteration in range(1, cfg.max_iter + 1):
                state, p = step(state, p)
                rate = dual_objective(state, p, s, d)
                report.rate, report.input_distribution, report.dual_state = rate, p, state
                report.iterations = iteration
                report.objective_trajectory.append(rate)

                if track_residuals:
                    current = residuals(state, p, s, d, gamma, powers)
                    report.residual_trajectory.append(current)
                    if cfg.stop_on_residuals and current.max() < cfg.residual_tol:
                        report.termination = Termination.RESIDUAL_TOL
                        break

                if iteration % PROGRESS_EVERY == 0:
                    logger.debug(
                        f"итерация {iteration}: rate={rate:.12f}, "
                        f"ζ={state.zeta:.6g}, λ={state.lam:.6g}"
                    )
                # при остановке по невязкам rate_tol не действует
                if (
                    not cfg.stop_on_residuals
                    and previous is not None
                    and abs(rate - previous) < cfg.rate_tol
                ):
                    report.termination = Termination.RATE_TOL
                    break
                previous = rate

            if not track_residuals:
                report.residual_trajectory.append(residuals(state, p, s, d, gamma, powers))
            _, report.primal_rate = reconstruct_primal(state, p, s, d)
        except (NumericalFailureError, ValidationError) as e:
            report.termination = Termination.NUMERICAL_FAILURE
            report.diagnostic = getattr(e, "diagnostic", None) or str(e)
            report.primal_rate = None
            logger.error(f"Сбой на итерации {report.iterations + 1}: {e} ({report.diagnostic})")

        report.elapsed_s = time.perf_counter() - started
        logger.info(
            f"Готово: rate={report.rate:.10f} нат, итераций {report.iterations}, "
            f"остановка {report.termination.value}, {report.elapsed_s:.2f} с"
        )
        return report


def _check_shapes(s: TransitionMatrix, d: MetricMatrix) -> None:
    if s.entries.shape != d.shape:
        raise ValidationError(f"размеры s {s.entries.shape} и d {d.shape} не совпадают")


def solve_clm(
    s: TransitionMatrix,
    d: MetricMatrix,
    powers: FloatArray,
    cfg: Optional[SolverConfig] = None,
) -> SolveReport:
    return SolverService(cfg).solve_clm(s, d, powers)


def solve_lm_fixed_input(
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
    cfg: Optional[SolverConfig] = None,
) -> SolveReport:
    return SolverService(cfg).solve_lm_fixed_input(p, s, d)


def residuals(
    state: DualState,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
    gamma: Optional[float] = None,
    powers: Optional[FloatArray] = None,
) -> ResidualSet:
    """
    r_φ = Σ_i |φ_i Σ_j e^{−ζd_ij} ψ̃_j q_j − p_i|
    r_ψ = Σ_j |(ψ̃_j Σ_i φ_i e^{−ζd_ij} − 1) q_j|
    r_ζ = |G(ζ)| при ζ > 0, иначе max(0, G(0)); r_λ аналогично по F

    Без бюджета мощности (gamma=None) r_λ = 0.
    """
    mask, q = active_columns(p, s)
    kernel = LogKernel.build(state.zeta, d.entries[:, mask])
    log_q = np.log(q[mask])
    log_psi = state.log_psi[mask]

    row_sums = logsumexp(kernel.exponents + (log_psi + log_q)[None, :], axis=1)
    column_sums = logsumexp(state.log_phi[:, None] + kernel.exponents, axis=0)
    with np.errstate(over="ignore"):
        r_phi = float(np.sum(np.abs(np.exp(state.log_phi + row_sums) - p.weights)))
        r_psi = float(np.sum(np.abs((np.exp(log_psi + column_sums) - 1.0) * q[mask])))

    g = eval_G(state.zeta, state.log_phi, state.log_psi, p, s, d)
    r_zeta = abs(g) if state.zeta > 0.0 else max(0.0, g)

    if gamma is None or powers is None:
        r_lambda = 0.0
    else:
        f = eval_F(state.lam, log_T(state, s, d), np.asarray(powers, dtype=np.float64), gamma)
        r_lambda = abs(f) if state.lam > 0.0 else max(0.0, f)
    return ResidualSet(r_phi, r_psi, r_zeta, r_lambda)


def reconstruct_primal(
    state: DualState,
    p: ProbabilityVector,
    s: TransitionMatrix,
    d: MetricMatrix,
) -> Tuple[JointDistribution, float]:
    """
    γ_ij = φ_i e^{−ζd_ij} ψ̃_j q_j и I_γ(X;Y) по его собственным маргиналам

    Вне неподвижной точки масса γ отличается от 1 на величину невязок;
    γ нормируется, отклонение пишется в debug.
    """
    mask, q = active_columns(p, s)
    logs = np.full(d.shape, -np.inf)
    logs[:, mask] = (
        state.log_phi[:, None]
        + LogKernel.build(state.zeta, d.entries[:, mask]).exponents
        + (state.log_psi[mask] + np.log(q[mask]))[None, :]
    )
    with np.errstate(over="ignore"):
        gamma = np.exp(logs)
    total = float(gamma.sum())
    if not np.isfinite(total) or total <= 0.0:
        raise NumericalFailureError(
            "восстановление γ: масса не конечна", diagnostic=f"Σγ = {total}"
        )
    logger.debug(f"Восстановление γ: |Σγ − 1| = {abs(total - 1.0):.3e}")

    joint = JointDistribution(gamma / total)
    independent = np.outer(joint.row_marginal, joint.column_marginal)
    primal_rate = float(np.sum(rel_entr(joint.entries, independent)))
    return joint, primal_rate
