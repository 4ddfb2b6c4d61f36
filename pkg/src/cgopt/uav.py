"""UAV 3-D path planning over terrain with vertical cylindrical obstacles.

A path is ``n`` track points; start and goal are fixed and the decision vector
holds the ``n - 2`` interior points as absolute ``(x, y, z)`` triples, so the
search box is just the map extent and an altitude window repeated per point.

The cost of a path is ``w1 * length + w2 * obstacle + w3 * height``:

* length   sum of segment lengths;
* obstacle for every segment and cylinder, with ``d`` the horizontal distance
  from the cylinder axis to the segment: 0 beyond ``R + S``,
  ``R + S - d`` inside the safety ring, ``BIG`` on contact (``d <= R``);
* height   for every track point, with ``h`` its height above ground:
  ``|h - (h_min + h_max) / 2|`` inside the band, ``BIG`` outside it or off
  the map.

``BIG`` is a large finite stand-in for an infinite penalty; it keeps greedy
comparisons well ordered and counts the number of violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, IngestionError
from .problem import Problem, SearchSpace

__all__ = [
    "BIG",
    "Bump",
    "Terrain",
    "Obstacle",
    "Scenario",
    "UavProblem",
    "point_segment_distance",
    "decode",
    "encode",
    "length_cost",
    "obstacle_cost",
    "height_cost",
    "total_cost",
    "cost_terms",
    "clearances",
    "is_collision_free",
    "chord_hits_obstacle",
    "build_scenarios",
    "read_scenario",
    "write_scenario",
    "write_path_csv",
    "render_svg",
]

BIG = 1e8


def point_segment_distance(p, a, b):
    """Distance from points ``p`` to segments ``a -> b`` (2-D, broadcasting)."""
    p, a, b = np.asarray(p, float), np.asarray(a, float), np.asarray(b, float)
    ab = b - a
    ap = p - a
    denom = np.sum(ab * ab, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.sum(ap * ab, axis=-1) / denom
    t = np.where(denom > 0.0, np.clip(t, 0.0, 1.0), 0.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


@dataclass(frozen=True)
class Bump:
    """Gaussian hill ``height * exp(-r^2 / (2 spread^2))`` centred at ``(x, y)``."""

    x: float
    y: float
    height: float
    spread: float


@dataclass(frozen=True, eq=False)
class Terrain:
    """Ground elevation on a regular grid; ``heights[row, col]`` is at
    ``(origin_x + col * cell, origin_y + row * cell)``."""

    heights: np.ndarray = field(repr=False)
    cell: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        if h.ndim != 2 or h.shape[0] < 2 or h.shape[1] < 2:
            raise ConfigurationError(f"terrain grid must be at least 2x2, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ConfigurationError("terrain heights must be finite")
        if not self.cell > 0:
            raise ConfigurationError(f"cell size must be positive, got {self.cell}")
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    @classmethod
    def from_bumps(cls, width, depth, cell, base=0.0, bumps: Sequence[Bump] = ()):
        nx = int(round(width / cell)) + 1
        ny = int(round(depth / cell)) + 1
        xs = np.arange(nx) * cell
        ys = np.arange(ny) * cell
        gx, gy = np.meshgrid(xs, ys)
        h = np.full(gx.shape, float(base))
        for b in bumps:
            h += b.height * np.exp(-((gx - b.x) ** 2 + (gy - b.y) ** 2) / (2.0 * b.spread**2))
        return cls(h, float(cell))

    @property
    def extent(self) -> tuple[float, float, float, float]:
        ox, oy = self.origin
        ny, nx = self.heights.shape
        return ox, ox + (nx - 1) * self.cell, oy, oy + (ny - 1) * self.cell

    def height_at(self, x, y):
        """Bilinear ground height and an ``inside`` mask; outside points get NaN."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ny, nx = self.heights.shape
        fx = (x - self.origin[0]) / self.cell
        fy = (y - self.origin[1]) / self.cell
        inside = (fx >= 0) & (fx <= nx - 1) & (fy >= 0) & (fy <= ny - 1)
        ix = np.clip(np.floor(fx), 0, nx - 2).astype(int)
        iy = np.clip(np.floor(fy), 0, ny - 2).astype(int)
        tx = np.clip(fx - ix, 0.0, 1.0)
        ty = np.clip(fy - iy, 0.0, 1.0)
        h = self.heights
        z = (
            h[iy, ix] * (1 - tx) * (1 - ty)
            + h[iy, ix + 1] * tx * (1 - ty)
            + h[iy + 1, ix] * (1 - tx) * ty
            + h[iy + 1, ix + 1] * tx * ty
        )
        return np.where(inside, z, np.nan), inside


@dataclass(frozen=True)
class Obstacle:
    x: float
    y: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"obstacle radius must be positive, got {self.radius}")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything needed to score a path. Immutable; the terrain grid is
    generated from ``width``, ``depth``, ``cell``, ``base`` and ``bumps``."""

    name: str
    obstacles: tuple[Obstacle, ...]
    start: tuple[float, float, float]
    goal: tuple[float, float, float]
    waypoints: int = 50
    safety_width: float = 20.0
    h_min: float = 20.0
    h_max: float = 120.0
    weights: tuple[float, float, float] = (0.5, 0.3, 0.2)
    altitude: tuple[float, float] = (0.0, 200.0)
    width: float = 1000.0
    depth: float = 1000.0
    cell: float = 10.0
    base: float = 0.0
    bumps: tuple[Bump, ...] = ()
    region: tuple[float, float, float, float] | None = None
    terrain: Terrain = field(init=False, repr=False)

    def __post_init__(self):
        if self.waypoints < 3:
            raise ConfigurationError(f"a path needs at least 3 track points, got {self.waypoints}")
        if self.safety_width < 0:
            raise ConfigurationError("safety width must be non-negative")
        if not self.h_min < self.h_max:
            raise ConfigurationError(f"height band [{self.h_min}, {self.h_max}] is empty")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (3,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"weights must be three non-negative numbers summing to 1, got {self.weights}")
        if not self.altitude[0] < self.altitude[1]:
            raise ConfigurationError(f"altitude window {self.altitude} is empty")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "bumps", tuple(self.bumps))
        object.__setattr__(self, "start", tuple(float(v) for v in self.start))
        object.__setattr__(self, "goal", tuple(float(v) for v in self.goal))
        terrain = Terrain.from_bumps(self.width, self.depth, self.cell, self.base, self.bumps)
        object.__setattr__(self, "terrain", terrain)
        if self.region is not None:
            rx0, rx1, ry0, ry1 = (float(v) for v in self.region)
            x0, x1, y0, y1 = terrain.extent
            if not (x0 <= rx0 < rx1 <= x1 and y0 <= ry0 < ry1 <= y1):
                raise ConfigurationError(f"waypoint region {self.region} must be a non-empty box inside the map")
            object.__setattr__(self, "region", (rx0, rx1, ry0, ry1))

    @property
    def dim(self) -> int:
        return 3 * (self.waypoints - 2)

    @property
    def space(self) -> SearchSpace:
        x0, x1, y0, y1 = self.region if self.region is not None else self.terrain.extent
        lo = np.tile([x0, y0, self.altitude[0]], self.waypoints - 2)
        hi = np.tile([x1, y1, self.altitude[1]], self.waypoints - 2)
        return SearchSpace(lo, hi)

    @property
    def centers(self) -> np.ndarray:
        return np.array([o.center for o in self.obstacles], dtype=float).reshape(-1, 2)

    @property
    def radii(self) -> np.ndarray:
        return np.array([o.radius for o in self.obstacles], dtype=float)

    @property
    def chord_length(self) -> float:
        return float(np.linalg.norm(np.subtract(self.goal, self.start)))

    def with_waypoints(self, n: int) -> "Scenario":
        return replace(self, waypoints=n)


def decode(x, scenario: Scenario) -> np.ndarray:
    """Decision vector(s) to track points, shape ``(..., n, 3)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != scenario.dim:
        raise ConfigurationError(
            f"decision vector must have length 3*(n-2) = {scenario.dim}, got {x.shape[-1]}"
        )
    inner = x.reshape(x.shape[:-1] + (scenario.waypoints - 2, 3))
    lead = x.shape[:-1]
    start = np.broadcast_to(np.asarray(scenario.start), lead + (1, 3))
    goal = np.broadcast_to(np.asarray(scenario.goal), lead + (1, 3))
    return np.concatenate([start, inner, goal], axis=-2)


def encode(path) -> np.ndarray:
    """Inverse of :func:`decode`: drop the endpoints and flatten."""
    path = np.asarray(path, dtype=float)
    return path[..., 1:-1, :].reshape(path.shape[:-2] + (-1,))


def length_cost(path) -> np.ndarray | float:
    path = np.asarray(path, dtype=float)
    seg = np.diff(path, axis=-2)
    total = np.sum(np.linalg.norm(seg, axis=-1), axis=-1)
    return float(total) if total.ndim == 0 else total


def clearances(path, scenario: Scenario) -> np.ndarray:
    """Horizontal distance from every obstacle axis to every segment, ``(..., n-1, K)``."""
    path = np.asarray(path, dtype=float)
    a = path[..., :-1, None, :2]
    b = path[..., 1:, None, :2]
    return point_segment_distance(scenario.centers, a, b)


def _obstacle_terms(d, radii, safety):
    outer = radii + safety
    return np.where(d > outer, 0.0, np.where(d > radii, outer - d, BIG))


def obstacle_cost(path, scenario: Scenario):
    if not scenario.obstacles:
        path = np.asarray(path)
        total = np.zeros(path.shape[:-2])
    else:
        d = clearances(path, scenario)
        total = np.sum(_obstacle_terms(d, scenario.radii, scenario.safety_width), axis=(-1, -2))
    return float(total) if np.ndim(total) == 0 else total


def height_cost(path, scenario: Scenario):
    path = np.asarray(path, dtype=float)
    ground, inside = scenario.terrain.height_at(path[..., 0], path[..., 1])
    h = path[..., 2] - ground
    mid = 0.5 * (scenario.h_min + scenario.h_max)
    with np.errstate(invalid="ignore"):
        ok = inside & (h >= scenario.h_min) & (h <= scenario.h_max)
    terms = np.where(ok, np.abs(h - mid), BIG)
    total = np.sum(terms, axis=-1)
    return float(total) if np.ndim(total) == 0 else total


def cost_terms(x, scenario: Scenario) -> dict:
    """Per-term breakdown for one decision vector (or a batch)."""
    path = decode(x, scenario)
    f1 = length_cost(path)
    f2 = obstacle_cost(path, scenario)
    f3 = height_cost(path, scenario)
    w1, w2, w3 = scenario.weights
    # a zero weight drops its term entirely (0 * BIG would still be 0, but 0 * inf is not)
    total = sum(w * f for w, f in zip((w1, w2, w3), (f1, f2, f3)) if w != 0.0)
    return {"length": f1, "obstacle": f2, "height": f3, "total": total}


def total_cost(x, scenario: Scenario):
    return cost_terms(x, scenario)["total"]


def is_collision_free(path, scenario: Scenario) -> bool:
    if not scenario.obstacles:
        return True
    return bool(np.all(clearances(path, scenario) > scenario.radii))


def chord_hits_obstacle(scenario: Scenario) -> bool:
    chord = np.array([scenario.start, scenario.goal])
    return not is_collision_free(chord, scenario)


@dataclass(frozen=True, eq=False)
class UavProblem(Problem):
    scenario: Scenario

    @property
    def name(self) -> str:
        return f"uav_{self.scenario.name}"

    @property
    def space(self) -> SearchSpace:
        return self.scenario.space

    @property
    def dim(self) -> int:
        return self.scenario.dim

    def objective(self, X):
        return total_cost(X, self.scenario)


def _scenario(name, obstacles, bumps, start_xy, goal_xy, **kw):
    width = kw.pop("width", 1000.0)
    depth = kw.pop("depth", 1000.0)
    cell = kw.pop("cell", 10.0)
    h_min = kw.get("h_min", 20.0)
    h_max = kw.get("h_max", 120.0)
    bumps = tuple(Bump(*b) for b in bumps)
    terrain = Terrain.from_bumps(width, depth, cell, 0.0, bumps)
    low, high = float(terrain.heights.min()), float(terrain.heights.max())
    if high - low >= h_max - h_min:
        raise AssertionError(f"scenario {name}: terrain relief must be smaller than the height band")
    mid = 0.5 * (h_min + h_max)
    start = (*start_xy, float(terrain.height_at(*start_xy)[0]) + mid)
    goal = (*goal_xy, float(terrain.height_at(*goal_xy)[0]) + mid)
    # every altitude in the window is inside the band above every ground point; inset absorbs rounding
    altitude = (high + h_min + 1e-6, low + h_max - 1e-6)
    region = (
        min(start_xy[0], goal_xy[0]),
        max(start_xy[0], goal_xy[0]),
        min(start_xy[1], goal_xy[1]),
        max(start_xy[1], goal_xy[1]),
    )
    return Scenario(
        name=name,
        obstacles=tuple(Obstacle(*o) for o in obstacles),
        start=start,
        goal=goal,
        altitude=altitude,
        width=width,
        depth=depth,
        cell=cell,
        bumps=bumps,
        region=region,
        **kw,
    )


_ROLLING_HILLS = (
    (200.0, 700.0, 20.0, 140.0),
    (500.0, 250.0, 15.0, 120.0),
    (750.0, 600.0, 25.0, 160.0),
    (350.0, 450.0, 12.0, 90.0),
    (850.0, 150.0, 15.0, 110.0),
)


def build_scenarios() -> tuple[Scenario, Scenario]:
    """Two fixed synthetic environments: dense (7 cylinders) and sparse (4).

    Both fly corner to corner over gentle hills. Waypoints are confined to the
    start/goal bounding box and to an altitude window that lies inside the
    height band everywhere on the map.
    """
    dense = _scenario(
        "dense7",
        obstacles=(
            (230.0, 250.0, 70.0),
            (420.0, 400.0, 75.0),
            (600.0, 620.0, 80.0),
            (790.0, 780.0, 65.0),
            (350.0, 640.0, 60.0),
            (640.0, 360.0, 60.0),
            (800.0, 520.0, 55.0),
        ),
        bumps=_ROLLING_HILLS,
        start_xy=(60.0, 60.0),
        goal_xy=(940.0, 940.0),
    )
    sparse = _scenario(
        "sparse4",
        obstacles=(
            (300.0, 330.0, 80.0),
            (540.0, 500.0, 90.0),
            (760.0, 740.0, 70.0),
            (420.0, 760.0, 65.0),
        ),
        bumps=_ROLLING_HILLS,
        start_xy=(60.0, 60.0),
        goal_xy=(940.0, 940.0),
    )
    for s in (dense, sparse):
        if not chord_hits_obstacle(s):
            raise AssertionError(f"scenario {s.name}: straight chord must intersect an obstacle")
    return dense, sparse


# --- scenario files --------------------------------------------------------

_HEADER = "# cgopt UAV scenario"


def _fmt(*values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_scenario(scenario: Scenario, path) -> None:
    lines = [
        _HEADER,
        f"name = {scenario.name}",
        f"waypoints = {scenario.waypoints}",
        f"safety_width = {_fmt(scenario.safety_width)}",
        f"band = {_fmt(scenario.h_min, scenario.h_max)}",
        f"weights = {_fmt(*scenario.weights)}",
        f"start = {_fmt(*scenario.start)}",
        f"goal = {_fmt(*scenario.goal)}",
        f"altitude = {_fmt(*scenario.altitude)}",
        f"terrain.extent = {_fmt(scenario.width, scenario.depth)}",
        f"terrain.cell = {_fmt(scenario.cell)}",
        f"terrain.base = {_fmt(scenario.base)}",
    ]
    if scenario.region is not None:
        lines.append(f"region = {_fmt(*scenario.region)}")
    lines += [f"bump = {_fmt(b.x, b.y, b.height, b.spread)}" for b in scenario.bumps]
    lines += [f"obstacle = {_fmt(o.x, o.y, o.radius)}" for o in scenario.obstacles]
    FsPath(path).write_text("\n".join(lines) + "\n")


_SCALARS = {
    "waypoints": ("waypoints", 1, int),
    "safety_width": ("safety_width", 1, float),
    "band": (("h_min", "h_max"), 2, float),
    "weights": ("weights", 3, float),
    "start": ("start", 3, float),
    "goal": ("goal", 3, float),
    "altitude": ("altitude", 2, float),
    "terrain.extent": (("width", "depth"), 2, float),
    "terrain.cell": ("cell", 1, float),
    "terrain.base": ("base", 1, float),
    "region": ("region", 4, float),
}
_REQUIRED = ("name", "start", "goal")


def read_scenario(path) -> Scenario:
    """Parse a scenario file written by :func:`write_scenario`.

    Blank lines and ``#`` comments are ignored; every other line is
    ``key = values``. ``bump`` and ``obstacle`` may repeat.
    """
    path = FsPath(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read scenario: {exc}", path) from exc
    fields: dict = {}
    obstacles, bumps, seen = [], [], set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise IngestionError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        tokens = value.split()
        if key == "name":
            if len(tokens) != 1:
                raise IngestionError("name must be a single word", path, lineno)
            fields["name"] = tokens[0]
        elif key in ("obstacle", "bump"):
            want = 3 if key == "obstacle" else 4
            nums = _parse_numbers(tokens, want, key, path, lineno)
            try:
                (obstacles.append(Obstacle(*nums)) if key == "obstacle" else bumps.append(Bump(*nums)))
            except ConfigurationError as exc:
                raise IngestionError(str(exc), path, lineno) from None
        elif key in _SCALARS:
            target, count, kind = _SCALARS[key]
            nums = _parse_numbers(tokens, count, key, path, lineno)
            if kind is int:
                if nums[0] != int(nums[0]):
                    raise IngestionError(f"{key} must be an integer", path, lineno)
                nums = [int(nums[0])]
            if isinstance(target, tuple):
                fields.update(zip(target, nums))
            else:
                fields[target] = nums[0] if count == 1 else tuple(nums)
        else:
            raise IngestionError(f"unknown key {key!r}", path, lineno)
        seen.add(key)
    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise IngestionError(f"missing required keys: {', '.join(missing)}", path)
    try:
        return Scenario(obstacles=tuple(obstacles), bumps=tuple(bumps), **fields)
    except ConfigurationError as exc:
        raise IngestionError(str(exc), path) from None


def _parse_numbers(tokens, count, key, path, lineno):
    if len(tokens) != count:
        raise IngestionError(f"{key} needs {count} value(s), got {len(tokens)}", path, lineno)
    try:
        nums = [float(t) for t in tokens]
    except ValueError:
        raise IngestionError(f"{key}: non-numeric value in {' '.join(tokens)!r}", path, lineno) from None
    if not all(math.isfinite(v) for v in nums):
        raise IngestionError(f"{key}: values must be finite", path, lineno)
    return nums


# --- outputs ---------------------------------------------------------------


def write_path_csv(path_points, out) -> None:
    rows = ["j,x,y,z"]
    rows += [f"{j},{p[0]!r},{p[1]!r},{p[2]!r}" for j, p in enumerate(np.asarray(path_points, float).tolist())]
    FsPath(out).write_text("\n".join(rows) + "\n")


def render_svg(scenario: Scenario, path_points=None, size: int = 600) -> str:
    """Top view: obstacle discs, safety rings and the path polyline.

    The output depends only on its inputs (no timestamps or ids), so it is
    byte-stable across runs.
    """
    x0, x1, y0, y1 = scenario.terrain.extent
    scale = size / max(x1 - x0, y1 - y0)
    w = (x1 - x0) * scale
    h = (y1 - y0) * scale

    def sx(x):
        return f"{(x - x0) * scale:.3f}"

    def sy(y):
        return f"{h - (y - y0) * scale:.3f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.3f} {h:.3f}">',
        f"<title>{scenario.name}: top view</title>",
        f'<rect class="map" x="0" y="0" width="{w:.3f}" height="{h:.3f}" fill="#f4f1ea" stroke="#555"/>',
    ]
    for o in scenario.obstacles:
        parts.append(
            f'<circle class="safety" cx="{sx(o.x)}" cy="{sy(o.y)}" r="{(o.radius + scenario.safety_width) * scale:.3f}" '
            'fill="none" stroke="#d08c2b" stroke-dasharray="4 3"/>'
        )
        parts.append(
            f'<circle class="obstacle" cx="{sx(o.x)}" cy="{sy(o.y)}" r="{o.radius * scale:.3f}" '
            'fill="#8c2b2b" fill-opacity="0.6" stroke="#5a1a1a"/>'
        )
    if path_points is not None:
        pts = np.asarray(path_points, dtype=float)
        coords = " ".join(f"{sx(p[0])},{sy(p[1])}" for p in pts)
        parts.append(f'<polyline class="path" points="{coords}" fill="none" stroke="#1f4e9c" stroke-width="2"/>')
    for label, (px, py, _) in (("start", scenario.start), ("goal", scenario.goal)):
        parts.append(
            f'<rect class="{label}" x="{float(sx(px)) - 4:.3f}" y="{float(sy(py)) - 4:.3f}" '
            'width="8" height="8" fill="#222"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
