# lmrate/presentation/cli.py
"""
Командная строка: solve, sweep, baseline, verify, check

Примеры:
  lmrate solve --scheme QPSK --eta 0.9 --theta pi/18 --snr=-5,0,5,10
  lmrate sweep --config configs/sweep_qpsk.toml
  LMRATE_THREADS=4 lmrate sweep --scheme 16QAM --etas 0.9,0.8 --thetas pi/18,pi/12
  lmrate verify
"""

import argparse
import asyncio
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from ..core.entities.specs import ExperimentSpec
from ..infrastructure.files.experiment_loader import build_spec, load_spec
from ..shared.config import settings
from ..shared.exceptions import ConfigError, DiscretizationError, ValidationError
from ..shared.logger import logger, setup_logger
from ..shared.utils import parse_float_list
from .commands import EXIT_CONFIG, cmd_baseline, cmd_check, cmd_solve, cmd_sweep, cmd_verify


def _parse_h_hat(text: str) -> Any:
    mode = text.strip().lower()
    if mode in ("identity", "true", "true-h"):
        return "true" if mode.startswith("true") else "identity"
    values = parse_float_list(text, "h_hat")
    if len(values) != 4:
        raise ConfigError("явная матрица Ĥ задаётся четырьмя числами a,b,c,d", "h_hat")
    return [values[:2], values[2:]]


def _add_experiment_flags(parser: argparse.ArgumentParser, sweep: bool) -> None:
    parser.add_argument("--config", type=Path, help="TOML-файл эксперимента")
    parser.add_argument("--scheme", help="QPSK | 16QAM | 64QAM | 256QAM")
    parser.add_argument("--eta", type=float, help="η, масштаб квадратурной ветви")
    parser.add_argument("--theta", help="угол поворота, например pi/18")
    parser.add_argument("--snr", help="список SNR в дБ через запятую")
    parser.add_argument("--grid", type=int, help="число точек выходной сетки N (полный квадрат)")
    parser.add_argument("--fine-grid", action="store_true", help="N = 10000 (40000 для 256QAM)")
    parser.add_argument("--bound", type=float, help="граница сетки B")
    parser.add_argument("--gamma", help="бюджет мощности Γ или unconstrained")
    parser.add_argument("--h-hat", help="identity | true | a,b,c,d")
    parser.add_argument("--mode", choices=["clm", "lm-uniform", "both"])
    parser.add_argument("--output", type=Path, help="каталог результатов")
    parser.add_argument("--trajectory", action="store_true", help="сохранять невязки по итерациям")
    parser.add_argument("--max-iter", type=int)
    parser.add_argument("--rate-tol", type=float)
    if sweep:
        parser.add_argument("--etas", help="значения η через запятую")
        parser.add_argument("--thetas", help="углы через запятую")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmrate",
        description="LM rate и C_LM методом Alternating Double Maximization",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    _add_experiment_flags(
        commands.add_parser("solve", help="одна пара (η, θ), все SNR"), sweep=False
    )
    _add_experiment_flags(commands.add_parser("sweep", help="сетка (η, θ) × SNR"), sweep=True)
    _add_experiment_flags(
        commands.add_parser("baseline", help="LM rate при равномерном входе"), sweep=False
    )
    commands.add_parser("verify", help="сверка с оракулами")
    commands.add_parser("check", help="проверка настроек окружения")
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Флаги -> словарь полей ExperimentSpec; незаданные флаги не попадают"""
    overrides: Dict[str, Any] = {
        "scheme": args.scheme,
        "eta": args.eta,
        "theta": args.theta,
        "grid_n": args.grid,
        "bound": args.bound,
        "gamma": args.gamma,
        "mode": args.mode,
        "output": args.output,
    }
    if args.snr is not None:
        overrides["snr_db"] = parse_float_list(args.snr, "snr")
    if args.h_hat is not None:
        overrides["h_hat"] = _parse_h_hat(args.h_hat)

    solver: Dict[str, Any] = {"max_iter": args.max_iter, "rate_tol": args.rate_tol}
    if args.trajectory:
        solver["record_trajectory"] = True
    overrides["solver"] = {k: v for k, v in solver.items() if v is not None}

    sweep: Dict[str, Any] = {}
    if getattr(args, "etas", None):
        sweep["eta"] = parse_float_list(args.etas, "etas")
    if getattr(args, "thetas", None):
        sweep["theta"] = [item.strip() for item in args.thetas.split(",") if item.strip()]
    if sweep:
        overrides["sweep"] = sweep
    return {k: v for k, v in overrides.items() if v is not None}


def resolve_spec(args: argparse.Namespace) -> ExperimentSpec:
    spec = load_spec(args.config, collect_overrides(args))
    if args.fine_grid:
        data = spec.model_dump()
        data["grid_n"] = ExperimentSpec.fine_grid_for(spec.scheme)
        spec = build_spec(data)
    return spec


async def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "verify":
        return await cmd_verify()
    spec = resolve_spec(args)
    if args.command == "sweep":
        return await cmd_sweep(spec)
    if args.command == "baseline":
        return await cmd_baseline(spec)
    return await cmd_solve(spec)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Основная функция CLI; возвращает код выхода 0/1/2"""
    args = build_parser().parse_args(argv)
    setup_logger(settings)

    if args.command == "check":
        return cmd_check(settings)
    try:
        return asyncio.run(_dispatch(args))
    except (ConfigError, ValidationError, DiscretizationError) as e:
        logger.error(f"Ошибка конфигурации: {e}")
        print(f"❌ Ошибка конфигурации: {e}")
        return EXIT_CONFIG


def run() -> None:
    """Точка входа console_scripts"""
    raise SystemExit(main())
