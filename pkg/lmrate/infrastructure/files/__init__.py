from .experiment_loader import load_spec
from .file_report_repository import FileReportRepository

__all__ = ["FileReportRepository", "load_spec"]
