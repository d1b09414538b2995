# lmrate/core/services/verification_service.py
"""
Набор сверок ADM с независимыми оракулами на маленьких задачах с фиксированными seed
"""

import math
from typing import List, Optional

import numpy as np

from ..entities.channel import Scheme
from ..entities.experiment import CheckResult
from ..entities.probability import ProbabilityVector, TransitionMatrix
from ..entities.specs import OracleConfig, SolverConfig
from ...shared.logger import logger
from .channel_service import (
    build_constellation,
    discretize_awgn,
    iq_channel,
    matched_metric,
    output_grid,
    sigma2_from_snr_db,
)
from .information import entropy
from .oracle_service import (
    blahut_arimoto,
    brute_force_lm,
    g_lm,
    optimal_psi,
    random_instance,
    scarlett_dual_objective,
)
from .solver_service import SolverService

ORACLE_TOL = 1e-4
EQUIVALENCE_TOL = 1e-10
GAP_TOL = 1e-6
BRUTE_FORCE_INSTANCES = 25
EQUIVALENCE_DRAWS = 50
# Сетка 4×4 для QPSK: на [−3, 3]² все s_ij > 0 и согласованная метрика конечна
SMALL_GRID_N = 16
SMALL_GRID_BOUND = 3.0


class VerificationService:
    """Сверка ADM с оракулами"""

    def __init__(
        self,
        solver_config: Optional[SolverConfig] = None,
        oracle_config: Optional[OracleConfig] = None,
    ):
        self.solver_config = solver_config or SolverConfig(max_iter=20_000, power_budget=None)
        self.oracle_config = oracle_config or OracleConfig()

    def run(self) -> List[CheckResult]:
        checks: List[CheckResult] = []
        checks += self.check_bsc()
        checks += self.check_matched_qpsk()
        checks += self.check_brute_force()
        checks += self.check_dual_equivalence()
        checks += self.check_fixed_point()
        passed = sum(check.passed for check in checks)
        logger.info(f"Сверки: пройдено {passed} из {len(checks)}")
        return checks

    def _unconstrained(self) -> SolverService:
        return SolverService(self.solver_config.model_copy(update={"power_budget": None}))

    def _matched_capacity_checks(self, name: str, s: TransitionMatrix) -> List[CheckResult]:
        capacity, _ = blahut_arimoto(s)
        report = self._unconstrained().solve_clm(s, matched_metric(s), np.zeros(s.M))
        checks = [CheckResult(f"{name}: C_LM vs BA", report.rate, capacity, ORACLE_TOL)]
        if report.primal_rate is not None:
            checks.append(
                CheckResult(
                    f"{name}: прямая vs двойственная", report.primal_rate, report.rate, GAP_TOL
                )
            )
        return checks

    def check_bsc(self) -> List[CheckResult]:
        """ДСК с вероятностью ошибки 0.1: ln 2 − H(0.9, 0.1)"""
        s = TransitionMatrix([[0.9, 0.1], [0.1, 0.9]])
        reference = math.log(2.0) - entropy(ProbabilityVector([0.9, 0.1]))
        capacity, _ = blahut_arimoto(s)
        return [
            CheckResult("ДСК(0.1): BA vs ln2 − H", capacity, reference, 1e-9),
            *self._matched_capacity_checks("ДСК(0.1)", s),
        ]

    def check_matched_qpsk(self) -> List[CheckResult]:
        """QPSK 4×16 при 0 дБ, Ĥ = H, согласованная метрика"""
        constellation = build_constellation(Scheme.QPSK)
        grid = output_grid(SMALL_GRID_N, SMALL_GRID_BOUND)
        H = iq_channel(0.9, math.pi / 18)
        s = discretize_awgn(H, sigma2_from_snr_db(0.0), constellation, grid)
        return self._matched_capacity_checks("QPSK 4×16, 0 дБ", s)

    def check_brute_force(self) -> List[CheckResult]:
        """ADM при фиксированном входе против прямой минимизации на 2×3 и 3×3"""
        solver = SolverService(self.solver_config)
        worst = 0.0
        for seed in range(BRUTE_FORCE_INSTANCES):
            M = 2 if seed % 2 == 0 else 3
            p, s, d = random_instance(seed, M, 3)
            adm = solver.solve_lm_fixed_input(p, s, d).rate
            worst = max(worst, abs(adm - brute_force_lm(p, s, d, self.oracle_config)))
        return [
            CheckResult(
                f"|ADM − перебор|, max по {BRUTE_FORCE_INSTANCES} задачам",
                worst,
                0.0,
                ORACLE_TOL,
            )
        ]

    def check_dual_equivalence(self) -> List[CheckResult]:
        """Двойственная форма через φ̂ = φ/p против g_LM(φ, ψ*) на 3×4"""
        worst = 0.0
        for seed in range(EQUIVALENCE_DRAWS):
            p, s, d = random_instance(1000 + seed, 3, 4)
            rng = np.random.default_rng(seed)
            zeta = float(rng.uniform(0.0, 2.0))
            phi = rng.uniform(0.2, 2.0, 3)
            scarlett = scarlett_dual_objective(phi / p.weights, zeta, p, s, d)
            direct = g_lm(phi, optimal_psi(phi, zeta, p, s, d), zeta, p, s, d)
            worst = max(worst, abs(scarlett - direct))
        return [
            CheckResult(
                f"эквивалентность двойственных форм, max по {EQUIVALENCE_DRAWS}",
                worst,
                0.0,
                EQUIVALENCE_TOL,
            )
        ]

    def check_fixed_point(self) -> List[CheckResult]:
        """В неподвижной точке ADM двойственная форма с φ̂ = φ/p равна LM rate"""
        p, s, d = random_instance(7, 3, 3)
        report = SolverService(self.solver_config).solve_lm_fixed_input(p, s, d)
        state = report.dual_state
        value = scarlett_dual_objective(state.phi / p.weights, state.zeta, p, s, d)
        return [CheckResult("φ̂ = φ/p в неподвижной точке vs LM rate", value, report.rate, 1e-8)]
