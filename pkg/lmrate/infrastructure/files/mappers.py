# lmrate/infrastructure/files/mappers.py
from typing import Any, Dict, List

from ...core.entities.experiment import PointResult
from ...core.entities.report import SolveReport
from ...core.entities.specs import ExperimentSpec

SCHEMA_VERSION = 1

TABLE_COLUMNS = [
    "scheme",
    "eta",
    "theta",
    "snr_db",
    "mode",
    "rate_nats",
    "rate_bits",
    "iters",
    "term",
    "r_phi",
    "r_psi",
    "r_zeta",
    "r_lambda",
]

TRAJECTORY_COLUMNS = ["iteration", "objective", "r_phi", "r_psi", "r_zeta", "r_lambda"]


def format_float(value: float) -> str:
    """Кратчайшая точная запись float: одинаковые числа дают одинаковые байты"""
    return repr(float(value))


def _floats(values: Any) -> List[float]:
    return [float(v) for v in values]


class PointResultMapper:
    """Маппер результата рабочей точки"""

    @staticmethod
    def entity_to_row(result: PointResult) -> List[str]:
        """Строка сводной таблицы в порядке TABLE_COLUMNS"""
        point, report = result.point, result.report
        residuals = report.final_residuals
        residual_cells = (
            [format_float(v) for v in residuals.as_tuple()] if residuals else ["", "", "", ""]
        )
        return [
            point.scheme.value,
            format_float(point.eta),
            point.theta.label,
            format_float(point.snr_db),
            point.mode.value,
            format_float(report.rate),
            format_float(result.rate_bits),
            str(report.iterations),
            report.termination.value,
            *residual_cells,
        ]

    @staticmethod
    def entity_to_record(result: PointResult, spec: ExperimentSpec) -> Dict[str, Any]:
        """Полная запись решения; время счёта не пишется, чтобы файлы совпадали байт в байт"""
        point, report = result.point, result.report
        return {
            "schema_version": SCHEMA_VERSION,
            "key": point.key,
            "spec": spec.model_dump(mode="json"),
            "point": {
                "scheme": point.scheme.value,
                "eta": point.eta,
                "theta": point.theta.label,
                "theta_rad": point.theta.radians,
                "snr_db": point.snr_db,
                "mode": point.mode.value,
            },
            "rate_nats": report.rate,
            "rate_bits": result.rate_bits,
            "average_power": result.average_power,
            "iterations": report.iterations,
            "termination": report.termination.value,
            "diagnostic": report.diagnostic,
            **ReportMapper.entity_to_dict(report),
        }


class ReportMapper:
    """Маппер SolveReport"""

    @staticmethod
    def entity_to_dict(report: SolveReport) -> Dict[str, Any]:
        state = report.dual_state
        residuals = report.final_residuals
        return {
            "input_distribution": _floats(report.input_distribution.weights),
            "dual_state": {
                "log_phi": _floats(state.log_phi),
                "log_psi": _floats(state.log_psi),
                "zeta": state.zeta,
                "lam": state.lam,
            },
            "residuals": (
                dict(zip(TRAJECTORY_COLUMNS[2:], residuals.as_tuple())) if residuals else None
            ),
            "primal_rate": report.primal_rate,
            "duality_gap": report.duality_gap,
            "objective_trajectory": _floats(report.objective_trajectory),
            "residual_trajectory": [list(r.as_tuple()) for r in report.residual_trajectory],
        }

    @staticmethod
    def trajectory_rows(report: SolveReport) -> List[List[str]]:
        """Строки CSV траектории: итерация, целевая функция, четыре невязки"""
        return [
            [
                str(iteration),
                format_float(objective),
                *(format_float(v) for v in residual.as_tuple()),
            ]
            for iteration, (objective, residual) in enumerate(
                zip(report.objective_trajectory, report.residual_trajectory), start=1
            )
        ]
