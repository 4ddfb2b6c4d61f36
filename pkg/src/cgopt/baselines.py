"""Reference optimizers on the same Problem contract as CGO.

Both use the feasibility-first comparison from :mod:`cgopt.problem`, so they
run unchanged on constrained problems, and both report through
:class:`cgopt.core.RunRecord`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Individual, RunRecord, make_rng
from .errors import ConfigurationError
from .problem import Problem, SearchSpace, is_better

__all__ = ["PsoParams", "pso_run", "random_search_run"]


@dataclass(frozen=True)
class PsoParams:
    swarm_size: int = 50
    max_iterations: int = 1000
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp: float = 0.2
    seed: int = 0
    max_evaluations: Optional[int] = None

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ConfigurationError(f"swarm_size must be >= 1, got {self.swarm_size}")
        if self.max_iterations < 0:
            raise ConfigurationError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if not 0.0 <= self.inertia <= 1.0:
            raise ConfigurationError(f"inertia must be in [0, 1], got {self.inertia}")
        if not (self.cognitive > 0 and self.social > 0):
            raise ConfigurationError("cognitive and social coefficients must be positive")
        if not 0.0 < self.velocity_clamp <= 1.0:
            raise ConfigurationError(f"velocity_clamp must be in (0, 1], got {self.velocity_clamp}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if self.max_evaluations is not None and self.max_evaluations < self.swarm_size:
            raise ConfigurationError("max_evaluations must cover at least the initial swarm")


def _best_of(f, v) -> int:
    return int(np.lexsort((np.arange(len(f)), f, v))[0])


def _value(f: float, v: float) -> float:
    return f if v <= 0.0 else math.inf


def pso_run(space: SearchSpace, params: PsoParams, problem: Problem) -> RunRecord:
    """Global-best PSO with inertia weight and per-dimension velocity clamp.

    The clamp is ``velocity_clamp * (upper - lower)``. Positions leaving the
    box are clamped and that velocity component is zeroed. With
    ``max_evaluations`` set, the last iteration evaluates only as many
    particles as the budget allows, so totals match other optimizers exactly.
    """
    if problem.dim != space.dim:
        raise ConfigurationError(f"problem dimension {problem.dim} does not match space dimension {space.dim}")
    rng = make_rng(params.seed)
    n, dim = params.swarm_size, space.dim
    vmax = params.velocity_clamp * space.width
    X = space.lower + rng.random((n, dim)) * space.width
    V = rng.uniform(-vmax, vmax, (n, dim))
    f, v = problem.evaluate(X)
    evaluations = n
    P, pf, pv = X.copy(), f.copy(), v.copy()
    g = _best_of(pf, pv)
    G, gf, gv = P[g].copy(), pf[g], pv[g]

    budget = params.max_evaluations
    trace, viol, counts = [], [], []
    for _ in range(params.max_iterations):
        if budget is not None and evaluations >= budget:
            break
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        V = params.inertia * V + params.cognitive * r1 * (P - X) + params.social * r2 * (G - X)
        np.clip(V, -vmax, vmax, out=V)
        X = X + V
        out = (X < space.lower) | (X > space.upper)
        V[out] = 0.0
        X = space.clip(X)
        active = n if budget is None else min(n, budget - evaluations)
        f, v = problem.evaluate(X[:active])
        evaluations += active
        better = is_better(f, v, pf[:active], pv[:active])
        P[:active][better] = X[:active][better]
        pf[:active][better] = f[better]
        pv[:active][better] = v[better]
        g = _best_of(pf, pv)
        if is_better(pf[g], pv[g], gf, gv):
            G, gf, gv = P[g].copy(), pf[g], pv[g]
        trace.append(_value(gf, gv))
        viol.append(gv)
        counts.append(evaluations)
    return RunRecord(
        best_trace=np.array(trace, dtype=float),
        final_best=Individual(G, float(gf), float(gv)),
        evaluations=evaluations,
        seed=params.seed,
        algorithm="pso",
        violation_trace=np.array(viol, dtype=float),
        evaluation_trace=np.array(counts, dtype=np.int64),
    )


def random_search_run(space: SearchSpace, budget: int, seed: int, problem: Problem, chunk: int = 1024) -> RunRecord:
    """Uniform sampling; the trace holds the running best after each sample."""
    if budget < 1:
        raise ConfigurationError(f"budget must be >= 1, got {budget}")
    if seed < 0:
        raise ConfigurationError(f"seed must be non-negative, got {seed}")
    if problem.dim != space.dim:
        raise ConfigurationError(f"problem dimension {problem.dim} does not match space dimension {space.dim}")
    rng = make_rng(seed)
    trace = np.empty(budget)
    viol = np.empty(budget)
    best_x, best_f, best_v = None, math.inf, math.inf
    done = 0
    while done < budget:
        m = min(chunk, budget - done)
        X = space.lower + rng.random((m, space.dim)) * space.width
        f, v = problem.evaluate(X)
        for j in range(m):
            if best_x is None or is_better(f[j], v[j], best_f, best_v):
                best_x, best_f, best_v = X[j].copy(), float(f[j]), float(v[j])
            trace[done + j] = _value(best_f, best_v)
            viol[done + j] = best_v
        done += m
    return RunRecord(
        best_trace=trace,
        final_best=Individual(best_x, best_f, best_v),
        evaluations=budget,
        seed=seed,
        algorithm="random",
        violation_trace=viol,
        evaluation_trace=np.arange(1, budget + 1, dtype=np.int64),
    )
