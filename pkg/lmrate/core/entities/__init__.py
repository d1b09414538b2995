from lmrate.core.entities.channel import ChannelMatrixH, Constellation, OutputGrid, Scheme
from lmrate.core.entities.dual import DualState, LogKernel
from lmrate.core.entities.experiment import CheckResult, OperatingPoint, PointResult
from lmrate.core.entities.probability import (
    InputDistribution,
    JointDistribution,
    MetricMatrix,
    ProbabilityVector,
    TransitionMatrix,
)
from lmrate.core.entities.report import ResidualSet, SolveReport, Termination
from lmrate.core.entities.specs import (
    ExperimentSpec,
    OracleConfig,
    RunMode,
    SolverConfig,
    SweepGrid,
)

__all__ = [
    "ChannelMatrixH",
    "CheckResult",
    "Constellation",
    "DualState",
    "ExperimentSpec",
    "InputDistribution",
    "JointDistribution",
    "LogKernel",
    "MetricMatrix",
    "OperatingPoint",
    "OracleConfig",
    "OutputGrid",
    "PointResult",
    "ProbabilityVector",
    "ResidualSet",
    "RunMode",
    "Scheme",
    "SolveReport",
    "SolverConfig",
    "SweepGrid",
    "Termination",
    "TransitionMatrix",
]
