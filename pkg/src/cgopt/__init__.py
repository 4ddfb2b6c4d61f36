"""Competitive game optimizer with benchmark, engineering and UAV harnesses."""

from .core import CgoParams, Individual, Population, RunRecord, run
from .errors import CgoptError, ConfigurationError, DomainError, IngestionError
from .problem import FunctionProblem, Problem, SearchSpace

__all__ = [
    "CgoParams",
    "CgoptError",
    "ConfigurationError",
    "DomainError",
    "FunctionProblem",
    "Individual",
    "IngestionError",
    "Population",
    "Problem",
    "RunRecord",
    "SearchSpace",
    "run",
]

__version__ = "0.1.0"
