# lmrate/presentation/commands.py
"""
Обработчики подкоманд CLI

Каждый обработчик возвращает код выхода: 0 - успех, 1 - сбой решения.
Ошибки конфигурации (код 2) перехватываются в cli.main.
"""

from typing import List, Optional

from ..core.entities.experiment import CheckResult, PointResult
from ..core.entities.specs import ExperimentSpec, RunMode, SweepGrid
from ..shared.config import Settings
from ..shared.dependencies import DependencyContainer, container

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# Параметры (η, θ) сравнения по умолчанию для sweep
DEFAULT_SWEEP = SweepGrid(eta=[0.9, 0.8], theta=["pi/18", "pi/12"])


def print_results(results: List[PointResult]) -> None:
    print(
        f"{'η':>5} {'θ':>8} {'SNR':>6} {'режим':>11} "
        f"{'нат':>12} {'бит':>12} {'итер':>6}  остановка"
    )
    for result in results:
        point, report = result.point, result.report
        print(
            f"{point.eta:>5g} {point.theta.label:>8} {point.snr_db:>6g} {point.mode.value:>11} "
            f"{report.rate:>12.8f} {result.rate_bits:>12.8f} {report.iterations:>6d}  "
            f"{report.termination.value}"
        )
        if report.failed:
            print(f"   ❌ {report.diagnostic}")


def _exit_code(results: List[PointResult]) -> int:
    return EXIT_FAILURE if any(result.failed for result in results) else EXIT_OK


async def cmd_solve(spec: ExperimentSpec, deps: Optional[DependencyContainer] = None) -> int:
    """Одна пара (η, θ), все точки SNR"""
    deps = deps or container
    spec = spec.model_copy(update={"sweep": None})
    print(
        f"🧮 {spec.scheme.value}: η={spec.eta:g}, θ={spec.theta}, "
        f"N={spec.grid_n}, режим {spec.mode.value}"
    )

    results = await deps.get_experiment_service(spec.output).run_and_save(spec, "solve")
    print_results(results)
    print(f"💾 Результаты: {spec.output}")
    return _exit_code(results)


async def cmd_baseline(spec: ExperimentSpec, deps: Optional[DependencyContainer] = None) -> int:
    """solve с равномерным входом"""
    return await cmd_solve(spec.model_copy(update={"mode": RunMode.LM_UNIFORM}), deps)


async def cmd_sweep(spec: ExperimentSpec, deps: Optional[DependencyContainer] = None) -> int:
    """Декартово произведение (η, θ) × SNR; строки упорядочены по (η, θ, SNR, режим)"""
    deps = deps or container
    if spec.sweep is None:
        spec = spec.model_copy(update={"sweep": DEFAULT_SWEEP})
    pairs = spec.parameter_pairs()
    print(f"🧮 Sweep {spec.scheme.value}: {len(pairs)} пар (η, θ) × {len(set(spec.snr_db))} SNR")

    results = await deps.get_experiment_service(spec.output).run_and_save(spec, "sweep")
    print_results(results)
    failed = sum(result.failed for result in results)
    if failed:
        print(f"⚠️  Строк со сбоем: {failed}")
    print(f"💾 Результаты: {spec.output}")
    return _exit_code(results)


def print_checks(checks: List[CheckResult]) -> None:
    print(f"{'проверка':<52} {'значение':>14} {'эталон':>14} {'|разн.|':>10} {'допуск':>8}  статус")
    for check in checks:
        status = "✅" if check.passed else "❌"
        print(
            f"{check.name:<52} {check.value:>14.10f} {check.reference:>14.10f} "
            f"{check.difference:>10.2e} {check.tolerance:>8.0e}  {status}"
        )


async def cmd_verify(deps: Optional[DependencyContainer] = None) -> int:
    """Сверка с оракулами; 0 только если прошли все проверки"""
    deps = deps or container
    print("🔍 Сверка ADM с оракулами...")
    checks = deps.get_verification_service().run()
    print_checks(checks)
    if all(check.passed for check in checks):
        print("✅ Все проверки пройдены")
        return EXIT_OK
    print("❌ Есть непройденные проверки")
    return EXIT_FAILURE


def cmd_check(cfg: Settings) -> int:
    """Проверка настроек процесса"""
    print("🔧 Проверка конфигурации...")
    return EXIT_OK if cfg.validate_report() else EXIT_CONFIG
