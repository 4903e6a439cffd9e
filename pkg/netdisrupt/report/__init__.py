"""Batch report pipeline."""

from netdisrupt.report.config import AnalysisConfig, load_config
from netdisrupt.report.runner import ReportBundle, run_report

__all__ = ["AnalysisConfig", "ReportBundle", "load_config", "run_report"]
