"""Constrained engineering design problems F1-F7 and feasibility-rule handling.

Constraints are handled without penalty weights. Every point gets a total
violation ``sum(max(0, g_i)) + sum(max(0, |h_j| - eps))`` and candidates are
ranked by

1. feasible beats infeasible,
2. two feasible points by objective,
3. two infeasible points by total violation,

which the optimizers in this package apply through the ``(violation,
objective)`` pair returned by :meth:`ConstrainedProblem.evaluate`.

Formulations (``x`` indexed from 1 in the comments below):

F1 tension/compression spring, x = (wire d, coil D, active coils N)
    f = (N + 2) D d^2
    g1 = 1 - D^3 N / (71785 d^4)
    g2 = (4D^2 - dD) / (12566 (D d^3 - d^4)) + 1 / (5108 d^2) - 1
    g3 = 1 - 140.45 d / (D^2 N)
F2 pressure vessel (continuous shell/head thickness)
    f = 0.6224 x1 x3 x4 + 1.7781 x2 x3^2 + 3.1661 x1^2 x4 + 19.84 x1^2 x3
    g1 = -x1 + 0.0193 x3, g2 = -x2 + 0.00954 x3,
    g3 = -pi x3^2 x4 - 4/3 pi x3^3 + 1296000, g4 = x4 - 240
F3 three-bar truss, l = 100, P = 2, sigma = 2
    f = l (2 sqrt2 x1 + x2)
    g1 = P (sqrt2 x1 + x2) / (sqrt2 x1^2 + 2 x1 x2) - sigma
    g2 = P x2 / (sqrt2 x1^2 + 2 x1 x2) - sigma
    g3 = P / (sqrt2 x2 + x1) - sigma
F4 welded beam (shear, bending stress, geometry, deflection, buckling)
    f = 1.10471 x1^2 x2 + 0.04811 x3 x4 (14 + x2)
    g1 = tau - 13600, g2 = sigma - 30000, g3 = x1 - x4,
    g4 = delta - 0.25, g5 = P - Pc
    with J = 2 sqrt2 x1 x2 (x2^2/4 + (x1 + x3)^2/4) and
    Pc = 4.013 E sqrt(x3^2 x4^6 / 30) / L^2 (1 - x3/(2L) sqrt(E/(4G)))
F5 speed reducer, 7 variables, 11 stress/geometry constraints
F6 gear train, teeth counts rounded to integers inside the objective
    f = (1/6.931 - x2 x3 / (x1 x4))^2
    g1 = x2 x3 / (x1 x4) - 1     (the train must reduce speed)
    h1 = 0                       (inactive placeholder equality)
F7 cantilever beam, five hollow square sections
    f = 0.0624 (x1 + ... + x5)
    g1 = 61/x1^3 + 37/x2^3 + 19/x3^3 + 7/x4^3 + 1/x5^3 - 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .problem import Problem, SearchSpace

__all__ = [
    "EQUALITY_TOL",
    "ConstrainedProblem",
    "PenalizedFitness",
    "violation",
    "assess",
    "feasibility_compare",
    "suite",
    "get",
]

EQUALITY_TOL = 1e-4
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ConstrainedProblem(Problem):
    name: str
    label: str
    title: str
    space: SearchSpace
    objective_fn: Callable = field(repr=False)
    inequalities: tuple = field(default=(), repr=False)
    equalities: tuple = field(default=(), repr=False)
    best_known: float = np.nan
    equality_tol: float = EQUALITY_TOL
    reference_point: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def counts(self) -> tuple[int, int, int]:
        """``(d, g, h)``: variables, inequality and equality constraints."""
        return self.dim, len(self.inequalities), len(self.equalities)

    def objective(self, X):
        return self.objective_fn(X)

    def constraint_values(self, X):
        X = np.atleast_2d(X)
        G = np.stack([g(X) for g in self.inequalities], axis=-1) if self.inequalities else np.zeros((X.shape[0], 0))
        H = np.stack([h(X) for h in self.equalities], axis=-1) if self.equalities else np.zeros((X.shape[0], 0))
        return G, H

    def violation(self, X):
        G, H = self.constraint_values(X)
        total = np.sum(np.maximum(G, 0.0), axis=-1)
        total = total + np.sum(np.maximum(np.abs(H) - self.equality_tol, 0.0), axis=-1)
        return np.where(np.isnan(total), np.inf, total)


@dataclass(frozen=True)
class PenalizedFitness:
    objective: float
    violation: float

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0

    @property
    def key(self) -> tuple[float, float]:
        """Sort key implementing the feasibility rules."""
        if self.feasible:
            return (0.0, self.objective)
        return (self.violation, 0.0)


def violation(problem: ConstrainedProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ConfigurationError(f"{problem.name}: expected {problem.dim} variables, got shape {x.shape}")
    with np.errstate(all="ignore"):
        return float(problem.violation(x[None, :])[0])


def assess(problem: ConstrainedProblem, x) -> PenalizedFitness:
    f, v = problem.evaluate(np.asarray(x, dtype=float)[None, :])
    return PenalizedFitness(float(f[0]), float(v[0]))


def feasibility_compare(a: PenalizedFitness, b: PenalizedFitness) -> int:
    """-1 if ``a`` is preferred, 1 if ``b`` is, 0 if neither."""
    ka, kb = a.key, b.key
    return -1 if ka < kb else (1 if kb < ka else 0)


# --- F1 spring -------------------------------------------------------------


def _spring_f(X):
    d, D, N = X[:, 0], X[:, 1], X[:, 2]
    return (N + 2.0) * D * d**2


def _spring_g1(X):
    d, D, N = X[:, 0], X[:, 1], X[:, 2]
    return 1.0 - D**3 * N / (71785.0 * d**4)


def _spring_g2(X):
    d, D = X[:, 0], X[:, 1]
    return (4.0 * D**2 - d * D) / (12566.0 * (D * d**3 - d**4)) + 1.0 / (5108.0 * d**2) - 1.0


def _spring_g3(X):
    d, D, N = X[:, 0], X[:, 1], X[:, 2]
    return 1.0 - 140.45 * d / (D**2 * N)


# --- F2 pressure vessel ----------------------------------------------------


def _vessel_f(X):
    x1, x2, x3, x4 = X.T
    return 0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3**2 + 3.1661 * x1**2 * x4 + 19.84 * x1**2 * x3


def _vessel_g1(X):
    return -X[:, 0] + 0.0193 * X[:, 2]


def _vessel_g2(X):
    return -X[:, 1] + 0.00954 * X[:, 2]


def _vessel_g3(X):
    x3, x4 = X[:, 2], X[:, 3]
    return -np.pi * x3**2 * x4 - 4.0 / 3.0 * np.pi * x3**3 + 1296000.0


def _vessel_g4(X):
    return X[:, 3] - 240.0


# --- F3 three-bar truss ----------------------------------------------------

_TRUSS_L, _TRUSS_P, _TRUSS_SIGMA = 100.0, 2.0, 2.0


def _truss_f(X):
    return _TRUSS_L * (2.0 * SQRT2 * X[:, 0] + X[:, 1])


def _truss_den(X):
    x1, x2 = X[:, 0], X[:, 1]
    return SQRT2 * x1**2 + 2.0 * x1 * x2


def _truss_g1(X):
    return _TRUSS_P * (SQRT2 * X[:, 0] + X[:, 1]) / _truss_den(X) - _TRUSS_SIGMA


def _truss_g2(X):
    return _TRUSS_P * X[:, 1] / _truss_den(X) - _TRUSS_SIGMA


def _truss_g3(X):
    return _TRUSS_P / (SQRT2 * X[:, 1] + X[:, 0]) - _TRUSS_SIGMA


# --- F4 welded beam --------------------------------------------------------

_WB_P, _WB_L, _WB_E, _WB_G = 6000.0, 14.0, 30e6, 12e6
_WB_TAU_MAX, _WB_SIGMA_MAX, _WB_DELTA_MAX = 13600.0, 30000.0, 0.25


def _welded_f(X):
    x1, x2, x3, x4 = X.T
    return 1.10471 * x1**2 * x2 + 0.04811 * x3 * x4 * (14.0 + x2)


def _welded_tau(X):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    tau1 = _WB_P / (SQRT2 * x1 * x2)
    moment = _WB_P * (_WB_L + x2 / 2.0)
    radius = np.sqrt(x2**2 / 4.0 + ((x1 + x3) / 2.0) ** 2)
    polar = 2.0 * (SQRT2 * x1 * x2 * (x2**2 / 4.0 + ((x1 + x3) / 2.0) ** 2))
    tau2 = moment * radius / polar
    return np.sqrt(tau1**2 + 2.0 * tau1 * tau2 * x2 / (2.0 * radius) + tau2**2)


def _welded_g1(X):
    return _welded_tau(X) - _WB_TAU_MAX


def _welded_g2(X):
    return 6.0 * _WB_P * _WB_L / (X[:, 3] * X[:, 2] ** 2) - _WB_SIGMA_MAX


def _welded_g3(X):
    return X[:, 0] - X[:, 3]


def _welded_g4(X):
    return 6.0 * _WB_P * _WB_L**3 / (_WB_E * X[:, 2] ** 2 * X[:, 3]) - _WB_DELTA_MAX


def _welded_g5(X):
    x3, x4 = X[:, 2], X[:, 3]
    buckling = (
        4.013 * _WB_E * np.sqrt(x3**2 * x4**6 / 30.0) / _WB_L**2
        * (1.0 - x3 / (2.0 * _WB_L) * np.sqrt(_WB_E / (4.0 * _WB_G)))
    )
    return _WB_P - buckling


# --- F5 speed reducer ------------------------------------------------------


def _reducer_f(X):
    x1, x2, x3, x4, x5, x6, x7 = X.T
    return (
        0.7854 * x1 * x2**2 * (3.3333 * x3**2 + 14.9334 * x3 - 43.0934)
        - 1.508 * x1 * (x6**2 + x7**2)
        + 7.4777 * (x6**3 + x7**3)
        + 0.7854 * (x4 * x6**2 + x5 * x7**2)
    )


def _reducer_g1(X):
    return 27.0 / (X[:, 0] * X[:, 1] ** 2 * X[:, 2]) - 1.0


def _reducer_g2(X):
    return 397.5 / (X[:, 0] * X[:, 1] ** 2 * X[:, 2] ** 2) - 1.0


def _reducer_g3(X):
    return 1.93 * X[:, 3] ** 3 / (X[:, 1] * X[:, 2] * X[:, 5] ** 4) - 1.0


def _reducer_g4(X):
    return 1.93 * X[:, 4] ** 3 / (X[:, 1] * X[:, 2] * X[:, 6] ** 4) - 1.0


def _reducer_g5(X):
    return np.sqrt((745.0 * X[:, 3] / (X[:, 1] * X[:, 2])) ** 2 + 16.9e6) / (110.0 * X[:, 5] ** 3) - 1.0


def _reducer_g6(X):
    return np.sqrt((745.0 * X[:, 4] / (X[:, 1] * X[:, 2])) ** 2 + 157.5e6) / (85.0 * X[:, 6] ** 3) - 1.0


def _reducer_g7(X):
    return X[:, 1] * X[:, 2] / 40.0 - 1.0


def _reducer_g8(X):
    return 5.0 * X[:, 1] / X[:, 0] - 1.0


def _reducer_g9(X):
    return X[:, 0] / (12.0 * X[:, 1]) - 1.0


def _reducer_g10(X):
    return (1.5 * X[:, 5] + 1.9) / X[:, 3] - 1.0


def _reducer_g11(X):
    return (1.1 * X[:, 6] + 1.9) / X[:, 4] - 1.0


_REDUCER_CONSTRAINTS = (
    _reducer_g1,
    _reducer_g2,
    _reducer_g3,
    _reducer_g4,
    _reducer_g5,
    _reducer_g6,
    _reducer_g7,
    _reducer_g8,
    _reducer_g9,
    _reducer_g10,
    _reducer_g11,
)


# --- F6 gear train ---------------------------------------------------------


def _gear_ratio(X):
    T = np.round(X)
    return T[:, 1] * T[:, 2] / (T[:, 0] * T[:, 3])


def _gear_f(X):
    return (1.0 / 6.931 - _gear_ratio(X)) ** 2


def _gear_g1(X):
    # unrounded, so the violation stays continuous in x
    return X[:, 1] * X[:, 2] / (X[:, 0] * X[:, 3]) - 1.0


def _gear_h1(X):
    return np.zeros(X.shape[0])


# --- F7 cantilever ---------------------------------------------------------


def _cantilever_f(X):
    return 0.0624 * np.sum(X, axis=1)


_CANTILEVER_LOADS = np.array([61.0, 37.0, 19.0, 7.0, 1.0])


def _cantilever_g1(X):
    return np.sum(_CANTILEVER_LOADS / X**3, axis=1) - 1.0


def _cantilever_optimum():
    # closed form: x_i proportional to a_i^(1/4)
    q = _CANTILEVER_LOADS**0.25
    return q * np.sum(q) ** (1.0 / 3.0)


def suite() -> list[ConstrainedProblem]:
    """F1-F7 with best-known values from the engineering benchmark table."""
    return [
        ConstrainedProblem(
            name="spring",
            label="F1",
            title="Tension/compression spring design",
            space=SearchSpace([0.05, 0.25, 2.0], [2.0, 1.3, 15.0]),
            objective_fn=_spring_f,
            inequalities=(_spring_g1, _spring_g2, _spring_g3),
            best_known=1.2665233e-02,
            reference_point=np.array([0.05168906, 0.35671766, 11.28897025]),
        ),
        ConstrainedProblem(
            name="pressure_vessel",
            label="F2",
            title="Pressure vessel design",
            space=SearchSpace([0.0, 0.0, 10.0, 10.0], [99.0, 99.0, 200.0, 200.0]),
            objective_fn=_vessel_f,
            inequalities=(_vessel_g1, _vessel_g2, _vessel_g3, _vessel_g4),
            best_known=5.8853328e03,
            reference_point=np.array([0.7781686413751053, 0.3846491626279018, 40.31961872409872, 200.0]),
        ),
        ConstrainedProblem(
            name="three_bar_truss",
            label="F3",
            title="Three-bar truss design",
            space=SearchSpace([0.0, 0.0], [1.0, 1.0]),
            objective_fn=_truss_f,
            inequalities=(_truss_g1, _truss_g2, _truss_g3),
            best_known=2.6389584e02,
            reference_point=np.array([0.78867513, 0.40824832]),
        ),
        ConstrainedProblem(
            name="welded_beam",
            label="F4",
            title="Welded beam design",
            space=SearchSpace([0.125, 0.1, 0.1, 0.1], [2.0, 10.0, 10.0, 2.0]),
            objective_fn=_welded_f,
            inequalities=(_welded_g1, _welded_g2, _welded_g3, _welded_g4, _welded_g5),
            best_known=1.6702177e00,
            reference_point=np.array([0.19883231, 3.3373653, 9.19202432, 0.19883231]),
        ),
        ConstrainedProblem(
            name="speed_reducer",
            label="F5",
            title="Weight minimization of a speed reducer",
            space=SearchSpace(
                [2.6, 0.7, 17.0, 7.3, 7.3, 2.9, 5.0], [3.6, 0.8, 28.0, 8.3, 8.3, 3.9, 5.5]
            ),
            objective_fn=_reducer_f,
            inequalities=_REDUCER_CONSTRAINTS,
            best_known=2.9944245e03,
            reference_point=np.array([3.5, 0.7, 17.0, 7.3, 7.715319911, 3.350214666, 5.286654465]),
        ),
        ConstrainedProblem(
            name="gear_train",
            label="F6",
            title="Gear train design",
            space=SearchSpace(np.full(4, 12.0), np.full(4, 60.0)),
            objective_fn=_gear_f,
            inequalities=(_gear_g1,),
            equalities=(_gear_h1,),
            best_known=0.0,
            reference_point=np.array([43.0, 16.0, 19.0, 49.0]),
        ),
        ConstrainedProblem(
            name="cantilever",
            label="F7",
            title="Cantilever beam design",
            space=SearchSpace(np.full(5, 0.01), np.full(5, 100.0)),
            objective_fn=_cantilever_f,
            inequalities=(_cantilever_g1,),
            best_known=1.3395842e00,
            reference_point=_cantilever_optimum(),
        ),
    ]


def get(name: str) -> ConstrainedProblem:
    for p in suite():
        if name in (p.name, p.label):
            return p
    raise ConfigurationError(f"unknown engineering problem {name!r}")
