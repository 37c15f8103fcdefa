"""Datasets, synthetic generation, batch evaluation and coverage analysis."""

from .coverage import CoverageRow, coverage_from_counts, coverage_table, format_coverage
from .evaluate import Report, TaskSummary, derive_seed, evaluate
from .generate import Difficulty, generate_instance, synthesize
from .records import load_dataset, plan_from_dict, plan_to_dict, read_traces, save_dataset, trace_to_dict, write_traces

__all__ = [
    "CoverageRow",
    "Difficulty",
    "Report",
    "TaskSummary",
    "coverage_from_counts",
    "coverage_table",
    "derive_seed",
    "evaluate",
    "format_coverage",
    "generate_instance",
    "load_dataset",
    "plan_from_dict",
    "plan_to_dict",
    "read_traces",
    "save_dataset",
    "synthesize",
    "trace_to_dict",
    "write_traces",
]
