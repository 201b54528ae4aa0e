from .base import EventSample, ExpectationTable, Outcome, PerformanceTriple, RenewalModel
from .file_download import FileDownloadModel, fd_expectations, fd_realize
from .synthetic import SyntheticModel, deterministic_model, load_synthetic, synthetic_from_config

__all__ = [
    "EventSample",
    "ExpectationTable",
    "Outcome",
    "PerformanceTriple",
    "RenewalModel",
    "FileDownloadModel",
    "fd_expectations",
    "fd_realize",
    "SyntheticModel",
    "synthetic_from_config",
    "load_synthetic",
    "deterministic_model",
]
