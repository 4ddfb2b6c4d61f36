"""Unconstrained benchmark functions grouped into four categories.

The suite mirrors the structure of the CEC competition sets (unimodal,
simple multimodal, hybrid, composition) with classic textbook functions:

* every base function is written so its global minimum is 0 at the origin;
* a problem evaluates ``base(R @ (x - shift))``;
* hybrids apply two base functions to the two halves of the transformed
  vector;
* compositions blend three shifted base functions with distance-based
  Gaussian weights (the CEC composition scheme), so the landscape near each
  component optimum looks like that component.

Official CEC data (shift vectors, rotation matrices) can be plugged in with
:func:`load_offsets`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, IngestionError
from .problem import Problem, SearchSpace

__all__ = [
    "Category",
    "BenchmarkProblem",
    "HybridFunction",
    "CompositionFunction",
    "BASE_FUNCTIONS",
    "evaluate",
    "make_problem",
    "standard_suite",
    "load_offsets",
    "random_rotation",
]

ORTHOGONALITY_TOL = 1e-9
OFFSETS_FILE_TOL = 1e-6


class Category(str, enum.Enum):
    UNIMODAL = "Unimodal"
    SIMPLE_MULTIMODAL = "SimpleMultimodal"
    HYBRID = "Hybrid"
    COMPOSITION = "Composition"


# --- base functions, vectorized over leading axes: (..., d) -> (...) ------


def sphere(z):
    return np.sum(z * z, axis=-1)


def bent_cigar(z):
    return z[..., 0] ** 2 + 1e6 * np.sum(z[..., 1:] ** 2, axis=-1)


def zakharov(z):
    i = np.arange(1, z.shape[-1] + 1)
    s = np.sum(0.5 * i * z, axis=-1)
    return np.sum(z * z, axis=-1) + s**2 + s**4


def rastrigin(z):
    return np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=-1)


def ackley(z):
    d = z.shape[-1]
    a = -0.2 * np.sqrt(np.sum(z * z, axis=-1) / d)
    b = np.sum(np.cos(2.0 * np.pi * z), axis=-1) / d
    return -20.0 * np.exp(a) - np.exp(b) + 20.0 + np.e


def griewank(z):
    i = np.sqrt(np.arange(1, z.shape[-1] + 1))
    return np.sum(z * z, axis=-1) / 4000.0 - np.prod(np.cos(z / i), axis=-1) + 1.0


def rosenbrock(z):
    # shifted by one so the minimum sits at the origin
    y = z + 1.0
    return np.sum(100.0 * (y[..., 1:] - y[..., :-1] ** 2) ** 2 + (y[..., :-1] - 1.0) ** 2, axis=-1)


_SCHWEFEL_OPT = 420.9687462275036


def _schwefel_term(u):
    return u * np.sin(np.sqrt(np.abs(u)))


_SCHWEFEL_PEAK = float(_schwefel_term(_SCHWEFEL_OPT))


def schwefel(z):
    """Modified Schwefel function (CEC variant, defined on the whole real line)."""
    d = z.shape[-1]
    u = z + _SCHWEFEL_OPT
    inner = _schwefel_term(u)
    m = np.mod(np.abs(u), 500.0)
    hi = (500.0 - m) * np.sin(np.sqrt(np.abs(500.0 - m))) - (u - 500.0) ** 2 / (10000.0 * d)
    lo = (m - 500.0) * np.sin(np.sqrt(np.abs(m - 500.0))) - (u + 500.0) ** 2 / (10000.0 * d)
    g = np.where(u > 500.0, hi, np.where(u < -500.0, lo, inner))
    return d * _SCHWEFEL_PEAK - np.sum(g, axis=-1)


BASE_FUNCTIONS: dict[str, Callable] = {
    "sphere": sphere,
    "bent_cigar": bent_cigar,
    "zakharov": zakharov,
    "rastrigin": rastrigin,
    "ackley": ackley,
    "griewank": griewank,
    "rosenbrock": rosenbrock,
    "schwefel": schwefel,
}


@dataclass(frozen=True)
class HybridFunction:
    """First ``split`` coordinates through ``first``, the rest through ``second``."""

    first: str
    second: str
    split: float = 0.5

    def __call__(self, z):
        cut = max(1, int(round(self.split * z.shape[-1])))
        cut = min(cut, z.shape[-1] - 1)
        return BASE_FUNCTIONS[self.first](z[..., :cut]) + BASE_FUNCTIONS[self.second](z[..., cut:])

    @property
    def label(self) -> str:
        return f"hybrid({self.first}+{self.second})"


@dataclass(frozen=True)
class CompositionFunction:
    """Gaussian-weighted blend of shifted components.

    Component ``c`` contributes ``lam[c] * f_c(z - optima[c]) + bias[c]`` with
    weight ``exp(-|z - o_c|^2 / (2 d sigma_c^2)) / |z - o_c|``. Weights are
    normalized; at a component optimum that component takes all the weight.
    """

    components: tuple[str, ...]
    optima: np.ndarray = field(repr=False)
    sigma: tuple[float, ...]
    lam: tuple[float, ...]
    bias: tuple[float, ...]

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        d = z.shape[-1]
        parts, weights = [], []
        exact = np.zeros(z.shape[:-1], dtype=int) - 1
        for c, name in enumerate(self.components):
            diff = z - self.optima[c]
            sq = np.sum(diff * diff, axis=-1)
            parts.append(self.lam[c] * BASE_FUNCTIONS[name](diff) + self.bias[c])
            with np.errstate(divide="ignore"):
                w = np.exp(-sq / (2.0 * d * self.sigma[c] ** 2)) / np.sqrt(sq)
            exact = np.where((sq == 0.0) & (exact < 0), c, exact)
            weights.append(w)
        parts = np.stack(parts, axis=-1)
        weights = np.stack(weights, axis=-1)
        total = np.sum(weights, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            norm = weights / total
        # far from every optimum all weights underflow; fall back to equal weights
        flat = ~np.isfinite(norm).all(axis=-1) | (total[..., 0] == 0.0)
        norm = np.where(flat[..., None], 1.0 / len(self.components), norm)
        value = np.sum(norm * parts, axis=-1)
        if np.any(exact >= 0):
            at = exact >= 0
            picked = np.take_along_axis(parts, np.maximum(exact, 0)[..., None], axis=-1)[..., 0]
            value = np.where(at, picked, value)
        return value

    @property
    def label(self) -> str:
        return "composition(" + "+".join(self.components) + ")"


@dataclass(frozen=True, eq=False)
class BenchmarkProblem(Problem):
    name: str
    category: Category
    space: SearchSpace
    function: Callable = field(repr=False)
    known_optimum: Optional[float] = None
    shift: Optional[np.ndarray] = field(default=None, repr=False)
    rotation: Optional[np.ndarray] = field(default=None, repr=False)
    optimizer: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        d = self.space.dim
        if self.shift is not None:
            shift = np.asarray(self.shift, dtype=float)
            if shift.shape != (d,):
                raise ConfigurationError(f"{self.name}: shift must have length {d}, got {shift.shape}")
            object.__setattr__(self, "shift", shift)
        if self.rotation is not None:
            rot = np.asarray(self.rotation, dtype=float)
            if rot.shape != (d, d):
                raise ConfigurationError(f"{self.name}: rotation must be {d}x{d}, got {rot.shape}")
            err = orthogonality_error(rot)
            if err >= ORTHOGONALITY_TOL:
                raise ConfigurationError(f"{self.name}: rotation is not orthogonal (|R^T R - I| = {err:.3g})")
            object.__setattr__(self, "rotation", rot)
        if self.optimizer is None and self.known_optimum is not None:
            opt = self.shift if self.shift is not None else np.zeros(d)
            object.__setattr__(self, "optimizer", opt)

    def transform(self, X):
        Z = X if self.shift is None else X - self.shift
        if self.rotation is not None:
            Z = Z @ self.rotation.T
        return Z

    def objective(self, X):
        return self.function(self.transform(X))


def orthogonality_error(R) -> float:
    R = np.asarray(R, dtype=float)
    return float(np.max(np.abs(R.T @ R - np.eye(R.shape[0]))))


def evaluate(problem: BenchmarkProblem, x) -> float:
    """``f(R (x - shift))`` at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != problem.dim:
        raise ConfigurationError(
            f"{problem.name}: expected a vector of length {problem.dim}, got shape {x.shape}"
        )
    return float(problem.objective(x[None, :])[0])


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def make_problem(
    base: str,
    dim: int,
    *,
    shift=None,
    rotation=None,
    category: Category | None = None,
    bounds: tuple[float, float] = (-100.0, 100.0),
    name: str | None = None,
) -> BenchmarkProblem:
    """Single base function as a problem; minimum 0 at ``shift`` (origin by default)."""
    if base not in BASE_FUNCTIONS:
        raise ConfigurationError(f"unknown base function {base!r}; choose from {sorted(BASE_FUNCTIONS)}")
    if category is None:
        category = (
            Category.UNIMODAL
            if base in ("sphere", "bent_cigar", "zakharov")
            else Category.SIMPLE_MULTIMODAL
        )
    return BenchmarkProblem(
        name=name or base,
        category=category,
        space=SearchSpace.cube(dim, *bounds),
        function=BASE_FUNCTIONS[base],
        known_optimum=0.0,
        shift=shift,
        rotation=rotation,
    )


_SUITE_SEED = 20170101


def standard_suite(dim: int) -> list[BenchmarkProblem]:
    """Thirteen problems on ``[-100, 100]^dim`` covering the four categories.

    Shifts and rotations are drawn from a fixed seed, so the suite for a
    given ``dim`` is always the same.
    """
    if dim < 2:
        raise ConfigurationError(f"suite needs dim >= 2, got {dim}")
    rng = np.random.default_rng(_SUITE_SEED + dim)

    def shift():
        return rng.uniform(-80.0, 80.0, dim)

    problems = []
    for base in ("sphere", "bent_cigar", "zakharov"):
        problems.append(make_problem(base, dim, shift=shift(), category=Category.UNIMODAL))
    for base in ("rastrigin", "ackley", "griewank", "rosenbrock", "schwefel"):
        problems.append(
            make_problem(base, dim, shift=shift(), category=Category.SIMPLE_MULTIMODAL)
        )
    for first, second in (("zakharov", "rastrigin"), ("bent_cigar", "griewank"), ("rosenbrock", "ackley")):
        fn = HybridFunction(first, second)
        problems.append(
            BenchmarkProblem(
                name=f"hybrid_{first}_{second}",
                category=Category.HYBRID,
                space=SearchSpace.cube(dim),
                function=fn,
                known_optimum=0.0,
                shift=shift(),
                rotation=random_rotation(dim, rng),
            )
        )
    for components, lam in (
        (("rastrigin", "griewank", "schwefel"), (1.0, 10.0, 1.0)),
        (("ackley", "sphere", "rosenbrock"), (10.0, 1e-3, 1e-4)),
    ):
        optima = np.stack([shift() for _ in components])
        fn = CompositionFunction(
            components=components,
            optima=optima,
            sigma=(10.0, 20.0, 30.0),
            lam=lam,
            bias=(0.0, 100.0, 200.0),
        )
        problems.append(
            BenchmarkProblem(
                name="composition_" + "_".join(components),
                category=Category.COMPOSITION,
                space=SearchSpace.cube(dim),
                function=fn,
                known_optimum=0.0,
                optimizer=optima[0].copy(),
            )
        )
    return problems


def load_offsets(path, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Read a shift vector and a row-major rotation matrix from a text file.

    The file holds whitespace-separated reals: ``dim`` shift values followed by
    ``dim * dim`` rotation entries. Line breaks are not significant.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read offsets file: {exc}", path) from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for col, token in enumerate(line.split(), start=1):
            try:
                values.append(float(token))
            except ValueError:
                raise IngestionError(f"token {col} ({token!r}) is not a number", path, lineno) from None
    expected = dim + dim * dim
    if len(values) != expected:
        raise IngestionError(
            f"expected {expected} values ({dim} shift + {dim}x{dim} rotation), found {len(values)}",
            path,
        )
    shift = np.array(values[:dim])
    rotation = np.array(values[dim:]).reshape(dim, dim)
    err = orthogonality_error(rotation)
    if err > OFFSETS_FILE_TOL:
        raise IngestionError(f"rotation matrix is not orthogonal (max |R^T R - I| = {err:.3g})", path)
    return shift, rotation
