"""Correlation-based attribute subset selection and PCA attribute ranking."""

__version__ = "0.1.0"

from .cfs import (
    Direction,
    MeritEvaluation,
    Mode,
    SelectionReport,
    exhaustive_best_subset,
    greedy_stepwise,
    merit,
    merit_value,
)
from .colstats import ColumnSummary, MissingPolicy, apply_missing_policy, standardize, summarize
from .correlate import (
    CorrelationStructure,
    correlation_structure,
    nominal_nominal_corr,
    nominal_numeric_corr,
    pearson,
)
from .dataset import Attribute, Dataset, parse_arff, parse_csv, to_arff, to_csv, validate_target
from .errors import AttrSelError, ConvergenceError, EmptyAnalysisError, ParseError, SchemaError
from .pca import PcaMode, PcaResult, components_for_threshold, eigen_sym, pca_fit, project

__all__ = [
    "Attribute",
    "AttrSelError",
    "ColumnSummary",
    "ConvergenceError",
    "CorrelationStructure",
    "Dataset",
    "Direction",
    "EmptyAnalysisError",
    "MeritEvaluation",
    "MissingPolicy",
    "Mode",
    "ParseError",
    "PcaMode",
    "PcaResult",
    "SchemaError",
    "SelectionReport",
    "apply_missing_policy",
    "components_for_threshold",
    "correlation_structure",
    "eigen_sym",
    "exhaustive_best_subset",
    "greedy_stepwise",
    "merit",
    "merit_value",
    "nominal_nominal_corr",
    "nominal_numeric_corr",
    "parse_arff",
    "parse_csv",
    "pca_fit",
    "pearson",
    "project",
    "standardize",
    "summarize",
    "to_arff",
    "to_csv",
    "validate_target",
]
