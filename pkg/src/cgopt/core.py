"""Competitive Game Optimizer (CGO).

The engine keeps a population of candidate solutions and, every iteration,

1. jumps the worst fraction of the population to a Cauchy-scaled point
   around the incumbent best (safe-zone phase),
2. perturbs every member with a Levy-distributed step scaled by its distance
   to the best (search phase, greedy acceptance),
3. lets members meet a random opponent with an iteration-dependent encounter
   probability and recombine (battle phase, greedy acceptance for both
   participants).

All randomness comes from one ``numpy.random.Generator`` seeded from
``CgoParams.seed``; a run is a pure function of (space, params, problem).

Interpretation choices the update equations leave open:

* out-of-bounds coordinates are clamped to the nearest bound;
* one Levy scalar is drawn per individual per search phase and shared across
  that individual's dimensions;
* during a phase the incumbent best is frozen; it is refreshed once the phase
  has been applied to the whole population;
* ``ceil(worst_fraction * N)`` members are replaced in the safe-zone phase,
  ties broken by member index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma

from .errors import ConfigurationError, DomainError
from .problem import Problem, SearchSpace, is_better

__all__ = [
    "CgoParams",
    "Individual",
    "Population",
    "RunRecord",
    "make_rng",
    "levy_sigma",
    "levy_step",
    "initialize",
    "search_step",
    "encounter_probability",
    "battle_candidates",
    "battle_step",
    "cauchy_from_uniform",
    "safe_zone_step",
    "run",
]

RngStream = np.random.Generator

# |v| below this is redrawn in the Levy quotient u / |v|^(1/beta)
_LEVY_V_FLOOR = 1e-300


def make_rng(seed: int) -> RngStream:
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class CgoParams:
    population_size: int = 50
    max_iterations: int = 1000
    step_scale: float = 1.0
    levy_exponent: float = 1.5
    worst_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ConfigurationError(
                f"population_size must be an integer >= 2, got {self.population_size}"
            )
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 0:
            raise ConfigurationError(
                f"max_iterations must be a non-negative integer, got {self.max_iterations}"
            )
        if not 0.0 < self.levy_exponent < 2.0:
            raise ConfigurationError(
                f"levy_exponent must lie in (0, 2), got {self.levy_exponent}"
            )
        if not 0.0 < self.worst_fraction < 1.0:
            raise ConfigurationError(
                f"worst_fraction must lie in (0, 1), got {self.worst_fraction}"
            )
        if not math.isfinite(self.step_scale):
            raise ConfigurationError("step_scale must be finite")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")

    @property
    def worst_count(self) -> int:
        """Members replaced per safe-zone phase."""
        # the tiny offset stops 0.2*N style products landing just above an integer
        return max(1, math.ceil(self.worst_fraction * self.population_size - 1e-9))

    @property
    def kept_count(self) -> int:
        return self.population_size - self.worst_count


@dataclass
class Individual:
    position: np.ndarray
    fitness: float
    violation: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0

    def copy(self) -> "Individual":
        return Individual(self.position.copy(), self.fitness, self.violation)


@dataclass
class Population:
    """Population state. ``best`` is a detached copy, never a view into ``positions``."""

    space: SearchSpace
    positions: np.ndarray
    fitness: np.ndarray
    violation: np.ndarray
    best: Individual
    iteration: int = 0
    evaluations: int = 0

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def members(self) -> list[Individual]:
        return [
            Individual(self.positions[i].copy(), float(self.fitness[i]), float(self.violation[i]))
            for i in range(self.size)
        ]

    def best_index(self) -> int:
        order = np.lexsort((self.fitness, self.violation))
        return int(order[0])

    def sync_best(self) -> None:
        i = self.best_index()
        if is_better(self.fitness[i], self.violation[i], self.best.fitness, self.best.violation):
            self.best = Individual(
                self.positions[i].copy(), float(self.fitness[i]), float(self.violation[i])
            )

    def best_value(self) -> float:
        """Best objective so far, or +inf while no feasible point has been found."""
        return self.best.fitness if self.best.feasible else math.inf

    def evaluate(self, problem: Problem, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # hot path: skips the shape checks of Problem.evaluate
        with np.errstate(all="ignore"):
            f = np.asarray(problem.objective(X), dtype=float)
            v = np.asarray(problem.violation(X), dtype=float)
        f = np.where(np.isnan(f), np.inf, f)
        v = np.where(np.isnan(v), np.inf, v)
        self.evaluations += X.shape[0]
        return f, v


@dataclass
class RunRecord:
    best_trace: np.ndarray
    final_best: Individual
    evaluations: int
    seed: int
    algorithm: str = "cgo"
    violation_trace: np.ndarray = field(default=None, repr=False)
    evaluation_trace: np.ndarray = field(default=None, repr=False)

    @property
    def final_value(self) -> float:
        return self.final_best.fitness if self.final_best.feasible else math.inf


def levy_sigma(beta: float) -> float:
    """Scale of the numerator Gaussian in Mantegna's Levy-stable sampler.

    Defined for ``0 < beta < 2``; from 2 upward the sine factor is not
    positive and the root has no real value.
    """
    if not 0.0 < beta < 2.0:
        raise DomainError(f"Levy exponent must lie in (0, 2), got {beta}")
    num = gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return float((num / den) ** (1.0 / beta))


def levy_step(beta: float, rng: RngStream, size=None):
    """Draw ``u / |v|**(1/beta)`` with ``u ~ N(0, sigma^2)`` and ``v ~ N(0, 1)``."""
    sigma = levy_sigma(beta)
    u = rng.normal(0.0, sigma, size)
    v = np.atleast_1d(rng.normal(0.0, 1.0, size))
    tiny = np.abs(v) < _LEVY_V_FLOOR
    while np.any(tiny):
        v[tiny] = rng.normal(0.0, 1.0, int(tiny.sum()))
        tiny = np.abs(v) < _LEVY_V_FLOOR
    step = u / np.abs(v) ** (1.0 / beta)
    if size is None:
        return float(step[0])
    return step


def initialize(
    space: SearchSpace, params: CgoParams, problem: Problem, rng: RngStream
) -> Population:
    if space.dim != problem.dim:
        raise ConfigurationError(
            f"search space has {space.dim} dimensions but problem {problem.name!r} has {problem.dim}"
        )
    n = params.population_size
    X = space.lower + rng.random((n, space.dim)) * space.width
    X = space.clip(X)
    f, v = problem.evaluate(X)
    i = int(np.lexsort((f, v))[0])
    best = Individual(X[i].copy(), float(f[i]), float(v[i]))
    return Population(space, X, f, v, best, iteration=0, evaluations=n)


def _accept(pop: Population, idx, cand, f, v) -> np.ndarray:
    mask = is_better(f, v, pop.fitness[idx], pop.violation[idx])
    take = np.asarray(idx)[mask]
    pop.positions[take] = cand[mask]
    pop.fitness[take] = f[mask]
    pop.violation[take] = v[mask]
    return mask


def search_step(
    pop: Population, params: CgoParams, problem: Problem, rng: RngStream
) -> Population:
    """Levy-flight move for every member, kept only on strict improvement. Mutates ``pop``."""
    X = pop.positions
    step = levy_step(params.levy_exponent, rng, size=pop.size)
    cand = X + params.step_scale * step[:, None] * np.abs(pop.best.position - X)
    cand = pop.space.clip(cand)
    f, v = pop.evaluate(problem, cand)
    _accept(pop, np.arange(pop.size), cand, f, v)
    pop.sync_best()
    return pop


def encounter_probability(t: int, max_iterations: int) -> float:
    """``sqrt(2r - r^2)`` with ``r = t / max_iterations``; rises from 0 to 1."""
    if max_iterations < 1:
        raise DomainError(f"max_iterations must be >= 1, got {max_iterations}")
    if t < 0 or t > max_iterations:
        raise DomainError(f"iteration {t} outside [0, {max_iterations}]")
    r = t / max_iterations
    return math.sqrt(2.0 * r - r * r)


def _battle_move(own, other, r, a, b, best):
    return r * own + (1.0 - r) * other + a * (own - other) + b * (best - own)


def battle_candidates(xi, xk, best, r2, r3, c1, c2):
    """Post-battle positions for player ``i`` and its opponent ``k`` (unclamped).

    The opponent's update mirrors the player's with ``r3`` in place of ``r2``
    and the roles of ``c1`` and ``c2`` swapped.
    """
    return _battle_move(xi, xk, r2, c1, c2, best), _battle_move(xk, xi, r3, c2, c1, best)


def battle_step(
    pop: Population, params: CgoParams, problem: Problem, rng: RngStream, encounter: float
) -> Population:
    """Pairwise recombination gated by ``rand < encounter``. Mutates ``pop``.

    Both participants go through greedy acceptance independently. Players are
    visited in index order, so an opponent may already have moved this phase.
    """
    if not 0.0 <= encounter <= 1.0:
        raise DomainError(f"encounter probability must lie in [0, 1], got {encounter}")
    n, dim = pop.positions.shape
    if n < 2:
        return pop
    engage = rng.random(n) < encounter
    opponent = rng.integers(0, n - 1, size=n)
    opponent += opponent >= np.arange(n)
    # row 0 belongs to the player (r2, c1, c2), row 1 to its opponent (r3, c2, c1)
    mix = rng.random((n, 2, dim))
    coef = rng.uniform(-1.0, 1.0, (n, 2, dim))
    best = pop.best.position
    X, fit, viol = pop.positions, pop.fitness, pop.violation
    lower, upper = pop.space.lower, pop.space.upper
    players = np.flatnonzero(engage)
    if players.size == 0:
        pop.sync_best()
        return pop
    # speculative batch from the phase-start state; a pair touching an already moved member is redone
    rivals = opponent[players]
    own = np.stack([X[players], X[rivals]], axis=1)
    pre = _battle_move(own, own[:, ::-1], mix[players], coef[players], coef[players, ::-1], best)
    np.clip(pre, lower, upper, out=pre)
    before = pop.evaluations
    pre_f, pre_v = pop.evaluate(problem, pre.reshape(-1, dim))
    pre_f, pre_v = pre_f.reshape(-1, 2), pre_v.reshape(-1, 2)
    pop.evaluations = before
    moved = np.zeros(n, dtype=bool)
    for s, i in enumerate(players):
        pair = (i, opponent[i])
        if moved[i] or moved[pair[1]]:
            own = X[pair, :]
            cand = _battle_move(own, own[::-1], mix[i], coef[i], coef[i, ::-1], best)
            np.clip(cand, lower, upper, out=cand)
            f, v = pop.evaluate(problem, cand)
        else:
            cand, f, v = pre[s], pre_f[s], pre_v[s]
            pop.evaluations += 2
        for row, j in enumerate(pair):
            if v[row] < viol[j] or (v[row] == viol[j] and f[row] < fit[j]):
                X[j] = cand[row]
                fit[j] = f[row]
                viol[j] = v[row]
                moved[j] = True
    pop.sync_best()
    return pop


def cauchy_from_uniform(r):
    return np.tan(np.pi * (np.asarray(r) - 0.5))


def safe_zone_step(
    pop: Population, params: CgoParams, problem: Problem, rng: RngStream
) -> Population:
    """Unconditionally move the worst members to Cauchy jumps around the best. Mutates ``pop``."""
    count = min(params.worst_count, pop.size)
    order = np.lexsort((np.arange(pop.size), pop.fitness, pop.violation))
    worst = order[pop.size - count:]
    chy = cauchy_from_uniform(rng.random(count))
    best = pop.best.position
    with np.errstate(over="ignore", invalid="ignore"):
        cand = best + chy[:, None] * (best - pop.positions[worst])
    cand = np.where(np.isnan(cand), best, cand)
    cand = pop.space.clip(cand)
    f, v = pop.evaluate(problem, cand)
    pop.positions[worst] = cand
    pop.fitness[worst] = f
    pop.violation[worst] = v
    pop.sync_best()
    return pop


def run(
    space: SearchSpace,
    params: CgoParams,
    problem: Problem,
    observer: Optional[Callable[[str, Population], None]] = None,
) -> RunRecord:
    """Run CGO for ``params.max_iterations`` iterations.

    ``observer(phase, pop)`` is called after ``"init"`` and after each of
    ``"safe_zone"``, ``"search"``, ``"battle"`` every iteration; it must not
    mutate the population.
    """
    rng = make_rng(params.seed)
    pop = initialize(space, params, problem, rng)
    if observer is not None:
        observer("init", pop)
    t_max = params.max_iterations
    trace = np.empty(t_max)
    viol_trace = np.empty(t_max)
    eval_trace = np.empty(t_max, dtype=np.int64)
    for t in range(t_max):
        encounter = encounter_probability(t, t_max)
        safe_zone_step(pop, params, problem, rng)
        if observer is not None:
            observer("safe_zone", pop)
        search_step(pop, params, problem, rng)
        if observer is not None:
            observer("search", pop)
        battle_step(pop, params, problem, rng, encounter)
        if observer is not None:
            observer("battle", pop)
        pop.iteration = t + 1
        trace[t] = pop.best_value()
        viol_trace[t] = pop.best.violation
        eval_trace[t] = pop.evaluations
    return RunRecord(
        best_trace=trace,
        final_best=pop.best.copy(),
        evaluations=pop.evaluations,
        seed=params.seed,
        algorithm="cgo",
        violation_trace=viol_trace,
        evaluation_trace=eval_trace,
    )
