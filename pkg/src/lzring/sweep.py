"""FTPE over rectangular (j1, j2, r) grids, and grayscale heatmaps of the result.

Grid points run on a thread pool; the compiled kernels release the GIL.
Results land in a buffer indexed by grid position, so row order and output
bytes do not depend on the worker count.
"""

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, model, observables
from .errors import GridError, LzError, SweepError

AXES = ("j1", "j2", "r")
MAX_POINTS = 100_000


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    steps: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"axis steps must be >= 1, got {self.steps}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError("axis bounds must be finite")
        if self.min > self.max:
            raise ValueError(f"axis min {self.min} > max {self.max}")

    @classmethod
    def pinned(cls, value):
        return cls(value, value, 1)

    def values(self):
        if self.steps == 1:
            return [float(self.min)]
        step = (self.max - self.min) / (self.steps - 1)
        return [self.min + i * step for i in range(self.steps)]


@dataclass(frozen=True)
class GridSpec:
    j1: Axis = field(default_factory=lambda: Axis.pinned(0.0))
    j2: Axis = field(default_factory=lambda: Axis.pinned(0.0))
    r: Axis = field(default_factory=lambda: Axis.pinned(1.0))

    @property
    def size(self):
        return self.j1.steps * self.j2.steps * self.r.steps

    def points(self):
        """(j1, j2, r) tuples, j1 outermost, each axis ascending."""
        return list(itertools.product(self.j1.values(), self.j2.values(), self.r.values()))


@dataclass(frozen=True)
class SweepRow:
    j1: float
    j2: float
    r: float
    ftpe: float


@dataclass(frozen=True)
class Simulation:
    """Everything about a run except the swept couplings."""

    n: int = 4
    g: float = 1.0
    t_start: float = -30.0
    t_end: float = 30.0
    integrator: dynamics.IntegratorConfig = field(default_factory=dynamics.IntegratorConfig)


def evaluate_point(sim, j1, j2, r):
    params = model.CouplingParams(j1=j1, j2=j2, r=r, g=sim.g)
    h = model.build_hamiltonian(params, model.ring_topology(sim.n))
    traj = dynamics.evolve(h, sim.integrator, sim.t_start, sim.t_end)
    return observables.ftpe(traj.es_mean, traj.times).ftpe


def resolve_workers(threads):
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def run_grid(grid, sim=None, threads=0, max_points=MAX_POINTS):
    """Evaluate FTPE at every grid point; rows come back in grid order."""
    sim = sim or Simulation()
    if grid.size > max_points:
        raise GridError(f"grid has {grid.size} points, cap is {max_points}")
    points = grid.points()
    results = [None] * len(points)

    def work(idx):
        j1, j2, r = points[idx]
        try:
            results[idx] = evaluate_point(sim, j1, j2, r)
        except (LzError, ValueError) as exc:
            raise SweepError(points[idx], exc) from exc

    workers = min(resolve_workers(threads), len(points))
    if workers == 1:
        for idx in range(len(points)):
            work(idx)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # list() re-raises the first failure in grid order
            list(pool.map(work, range(len(points))))
    return [SweepRow(j1, j2, r, f) for (j1, j2, r), f in zip(points, results)]


def _quantize(value):
    v = min(max(value, 0.0), 1.0)
    return int(math.floor(255.0 * v + 0.5))


def heatmap_grid(rows, x_axis, y_axis):
    """Arrange rows into a 2-D FTPE array (top row = largest y) plus the axis values."""
    if x_axis not in AXES or y_axis not in AXES:
        raise GridError(f"axes must be among {AXES}, got {x_axis!r}, {y_axis!r}")
    if x_axis == y_axis:
        raise GridError("x and y axes must differ")
    if not rows:
        raise GridError("no rows to render")
    for other in set(AXES) - {x_axis, y_axis}:
        pinned = {getattr(row, other) for row in rows}
        if len(pinned) != 1:
            raise GridError(f"axis {other} is not pinned ({len(pinned)} distinct values); "
                            "more than two free axes")
    xs = sorted({getattr(row, x_axis) for row in rows})
    ys = sorted({getattr(row, y_axis) for row in rows})
    if len(rows) != len(xs) * len(ys):
        raise GridError(f"{len(rows)} rows do not form a {len(xs)}x{len(ys)} rectangle")
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: len(ys) - 1 - i for i, v in enumerate(ys)}
    grid = np.full((len(ys), len(xs)), np.nan)
    for row in rows:
        cell = (yi[getattr(row, y_axis)], xi[getattr(row, x_axis)])
        if not np.isnan(grid[cell]):
            raise GridError(f"duplicate point {x_axis}={getattr(row, x_axis)}, "
                            f"{y_axis}={getattr(row, y_axis)}")
        grid[cell] = row.ftpe
    return grid, xs, ys


def render_heatmap(rows, x_axis, y_axis):
    """Binary PGM (P5, maxval 255); x grows to the right, y grows upward."""
    grid, xs, ys = heatmap_grid(rows, x_axis, y_axis)
    pixels = bytes(_quantize(v) for v in grid.ravel())
    header = f"P5\n{len(xs)} {len(ys)}\n255\n".encode("ascii")
    return header + pixels


def parse_pgm(data):
    """Inverse of render_heatmap's container: returns a (height, width) uint8 array."""
    # header is exactly three newline-terminated lines; raster bytes may look like whitespace
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    width, height = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    raster = parts[3]
    if len(raster) != width * height:
        raise ValueError("PGM raster size mismatch")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
