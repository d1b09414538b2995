from .experiment_service import ExperimentService
from .solver_service import SolverService
from .verification_service import VerificationService

__all__ = ["ExperimentService", "SolverService", "VerificationService"]
