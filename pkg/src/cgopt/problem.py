"""Search spaces and the evaluation contract every optimizer in cgopt consumes.

A problem evaluates a *batch* of points at once: ``evaluate(X)`` takes an
``(m, dim)`` array and returns ``(objective, violation)``, two arrays of
length ``m``. Unconstrained problems report zero violation. Candidates are
ranked lexicographically on ``(violation, objective)``, which is exactly the
feasibility-rule ordering (feasible beats infeasible, feasibles by objective,
infeasibles by total violation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError

__all__ = ["SearchSpace", "Problem", "FunctionProblem", "sanitize", "is_better"]


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigurationError(
                f"bounds must be 1-D vectors of equal length, got {lower.shape} and {upper.shape}"
            )
        if lower.size == 0:
            raise ConfigurationError("search space must have at least one dimension")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigurationError("bounds must be finite")
        if np.any(lower >= upper):
            bad = int(np.argmax(lower >= upper))
            raise ConfigurationError(
                f"lower[{bad}] = {lower[bad]} is not below upper[{bad}] = {upper[bad]}"
            )
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, dim: int, low: float = -100.0, high: float = 100.0) -> "SearchSpace":
        if dim < 1:
            raise ConfigurationError(f"dim must be positive, got {dim}")
        return cls(np.full(dim, low), np.full(dim, high))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def sanitize(values) -> np.ndarray:
    """Map NaN (and -0 noise) to +inf so greedy comparisons stay well ordered."""
    values = np.array(values, dtype=float, copy=True, ndmin=1)
    values[np.isnan(values)] = np.inf
    return values


def is_better(f_new, v_new, f_old, v_old):
    """Strict feasibility-rule improvement; works elementwise on arrays."""
    return (v_new < v_old) | ((v_new == v_old) & (f_new < f_old))


class Problem:
    """Base class for anything an optimizer can minimize.

    Subclasses set ``name`` and ``space`` and implement ``objective`` on a
    batch ``(m, dim)``. Constrained problems also override ``violation``.
    """

    name: str
    space: SearchSpace

    @property
    def dim(self) -> int:
        return self.space.dim

    def objective(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def violation(self, X: np.ndarray) -> np.ndarray:
        return np.zeros(X.shape[0])

    def evaluate(self, X) -> tuple[np.ndarray, np.ndarray]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ConfigurationError(
                f"{self.name}: expected points of dimension {self.dim}, got {X.shape[1]}"
            )
        with np.errstate(all="ignore"):
            f = sanitize(self.objective(X))
            v = sanitize(self.violation(X))
        return f, v

    def __call__(self, x) -> float:
        """Objective value at a single point (violation ignored)."""
        return float(self.evaluate(x)[0][0])


@dataclass(frozen=True)
class FunctionProblem(Problem):
    """Wrap a plain Python callable.

    ``fn`` takes a single 1-D point unless ``vectorized`` is set, in which case
    it receives the whole ``(m, dim)`` batch.
    """

    name: str
    space: SearchSpace
    fn: Callable = field(repr=False)
    vectorized: bool = False
    constraint: Callable | None = field(default=None, repr=False)

    def objective(self, X):
        if self.vectorized:
            return np.asarray(self.fn(X), dtype=float)
        return np.array([self.fn(x) for x in X], dtype=float)

    def violation(self, X):
        if self.constraint is None:
            return np.zeros(X.shape[0])
        return np.array([self.constraint(x) for x in X], dtype=float)
