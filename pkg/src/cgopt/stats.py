"""Multi-run summaries and the two-sample rank-sum test.

Standard deviations use the ``n - 1`` denominator. The rank-sum p-value is
two-sided, from the normal approximation with continuity and tie corrections.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigurationError

__all__ = ["RunSet", "Summary", "summarize", "wilcoxon_ranksum", "ComparisonTable", "build_table"]


@dataclass(frozen=True)
class RunSet:
    algorithm: str
    problem: str
    values: tuple[float, ...]
    seeds: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if len(self.values) < 1:
            raise ConfigurationError("a run set needs at least one value")
        if len(self.values) != len(self.seeds):
            raise ConfigurationError("values and seeds must have the same length")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError("seeds within a run set must be distinct")

    @property
    def finite(self) -> np.ndarray:
        v = np.asarray(self.values)
        return v[np.isfinite(v)]

    @property
    def failures(self) -> int:
        """Runs that returned no finite value (for constrained problems: ended infeasible)."""
        return len(self.values) - len(self.finite)


@dataclass(frozen=True)
class Summary:
    best: float
    std: float
    mean: float


def summarize(rs: RunSet | Sequence[float]) -> Summary:
    """Best, sample std and mean over the finite values.

    If no value is finite all three are ``inf``. A single value has std 0,
    with a warning.
    """
    values = rs.finite if isinstance(rs, RunSet) else np.asarray(rs, dtype=float)
    if isinstance(rs, RunSet) and len(values) == 0:
        return Summary(math.inf, math.inf, math.inf)
    if len(values) == 0:
        raise ConfigurationError("cannot summarize an empty sample")
    if len(values) == 1:
        warnings.warn("sample std undefined for one value; reporting 0", RuntimeWarning, stacklevel=2)
        std = 0.0
    else:
        std = float(np.std(values, ddof=1))
    return Summary(float(np.min(values)), std, float(np.mean(values)))


def wilcoxon_ranksum(a, b) -> float:
    """Two-sided rank-sum p-value for independent samples ``a`` and ``b``."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n, m = len(a), len(b)
    if n < 3 or m < 3:
        raise ConfigurationError(f"each sample needs at least 3 values, got {n} and {m}")
    if np.isnan(a).any() or np.isnan(b).any():
        raise ConfigurationError("samples must not contain NaN")
    pooled = np.concatenate([a, b])
    total = n + m
    ranks = rankdata(pooled)
    w = float(ranks[:n].sum())
    mu = n * (total + 1) / 2.0
    _, counts = np.unique(pooled, return_counts=True)
    ties = float(np.sum(counts**3 - counts))
    var = n * m / 12.0 * ((total + 1) - ties / (total * (total - 1)))
    if var <= 0.0:
        return 1.0
    z = max(abs(w - mu) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def _num(x):
    """JSON-safe number: non-finite values become null."""
    return float(x) if math.isfinite(x) else None


def _cell(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass
class ComparisonTable:
    """Per-problem metrics with one column per algorithm, plus pairwise p-values."""

    algorithms: list[str]
    problems: list[str]
    summaries: dict = field(default_factory=dict)  # (problem, algorithm) -> Summary
    failures: dict = field(default_factory=dict)  # (problem, algorithm) -> int
    pvalues: dict = field(default_factory=dict)  # (problem, a, b) -> p

    METRICS = ("best", "std", "mean")

    def rows(self):
        for prob in self.problems:
            for metric in self.METRICS:
                yield prob, metric, [getattr(self.summaries[(prob, alg)], metric) for alg in self.algorithms]
            if self.failures:
                yield prob, "failed_runs", [self.failures.get((prob, alg), 0) for alg in self.algorithms]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["problem", "metric", *self.algorithms])
        for prob, metric, vals in self.rows():
            w.writerow([prob, metric, *(_cell(v) for v in vals)])
        return buf.getvalue()

    def pvalues_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["problem", "algorithm_a", "algorithm_b", "p_value"])
        for (prob, a, b), p in self.pvalues.items():
            w.writerow([prob, a, b, _cell(p)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "std_denominator": "n-1",
            "algorithms": list(self.algorithms),
            "rows": [
                {"problem": prob, "metric": metric, "values": dict(zip(self.algorithms, map(_json_value, vals)))}
                for prob, metric, vals in self.rows()
            ],
            "pvalues": [
                {"problem": prob, "algorithm_a": a, "algorithm_b": b, "p_value": _num(p)}
                for (prob, a, b), p in self.pvalues.items()
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _json_value(v):
    return int(v) if isinstance(v, (int, np.integer)) else _num(v)


def build_table(runsets: Iterable[RunSet], report_failures: bool = False) -> ComparisonTable:
    """Assemble a table from run sets; order follows first appearance."""
    runsets = list(runsets)
    algorithms = list(dict.fromkeys(rs.algorithm for rs in runsets))
    problems = list(dict.fromkeys(rs.problem for rs in runsets))
    by_key = {(rs.problem, rs.algorithm): rs for rs in runsets}
    table = ComparisonTable(algorithms, problems)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for key, rs in by_key.items():
            table.summaries[key] = summarize(rs)
            if report_failures:
                table.failures[key] = rs.failures
    for prob in problems:
        for a, b in combinations(algorithms, 2):
            ra, rb = by_key.get((prob, a)), by_key.get((prob, b))
            if ra is None or rb is None or len(ra.values) < 3 or len(rb.values) < 3:
                continue
            table.pvalues[(prob, a, b)] = wilcoxon_ranksum(ra.values, rb.values)
    return table
