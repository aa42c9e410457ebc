"""Point sets on the unit cube: uniform grids, fill distance, separation.

A PointSet is an immutable ordered collection of points in [0, 1]^d.  Sets
built by :func:`uniform_grid` remember their lattice parameter m, which
unlocks exact closed forms for the fill distance and separation radius;
arbitrary sets fall back to probe-based estimates and pairwise scans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import ArgumentError, ResourceLimitError

DEFAULT_MAX_POINTS = 4096
_DEFAULT_PROBE_COUNT = 2048


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered points in the unit cube, optionally tagged as a lattice.

    ``grid_m`` is set only by :func:`uniform_grid`; when present the points
    enumerate {0, 1/m, ..., 1}^dim in row-major order (first coordinate
    slowest).
    """

    dim: int
    points: np.ndarray
    grid_m: int | None = None
    _validated: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        object.__setattr__(self, "points", pts)
        if self._validated:
            pts.setflags(write=False)
            return
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise ArgumentError(f"dim must be a positive integer, got {self.dim!r}")
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ArgumentError(
                f"points must be an (N, {self.dim}) array, got shape {pts.shape}"
            )
        if pts.shape[0] == 0:
            raise ArgumentError("point set may not be empty")
        if not np.isfinite(pts).all():
            raise ArgumentError("points must be finite")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ArgumentError("all coordinates must lie in [0, 1]")
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise ArgumentError("point set contains duplicate points")
        if self.grid_m is not None and pts.shape[0] != (self.grid_m + 1) ** self.dim:
            raise ArgumentError("grid_m inconsistent with the number of points")
        pts.setflags(write=False)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_json(self) -> dict:
        out = {"dim": int(self.dim), "points": self.points.tolist()}
        if self.grid_m is not None:
            out["grid_m"] = int(self.grid_m)
        return out

    @staticmethod
    def from_json(obj: dict) -> "PointSet":
        return PointSet(
            dim=int(obj["dim"]),
            points=np.asarray(obj["points"], dtype=float),
            grid_m=int(obj["grid_m"]) if obj.get("grid_m") is not None else None,
        )

    def to_csv(self) -> str:
        lines = [",".join(repr(float(c)) for c in row) for row in self.points]
        return "\n".join(lines) + "\n"


def uniform_grid(m: int, d: int, max_points: int = DEFAULT_MAX_POINTS) -> PointSet:
    """The lattice {0, 1/m, ..., 1}^d in row-major order.

    Raises a resource-limit error when (m+1)^d exceeds ``max_points``
    (default 4096); Gram work downstream is dense, so the cap keeps memory
    and eigensolver cost bounded.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ArgumentError(f"m must be a positive integer, got {m!r}")
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ArgumentError(f"d must be a positive integer, got {d!r}")
    n = (m + 1) ** d
    if n > max_points:
        raise ResourceLimitError(
            f"grid with ({m}+1)^{d} = {n} points exceeds the cap of {max_points}"
        )
    axis = np.arange(m + 1) / m
    cols = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([c.ravel() for c in cols], axis=1)
    ps = PointSet(dim=int(d), points=pts, grid_m=int(m), _validated=True)
    return ps


def halton_points(n: int, d: int) -> PointSet:
    """Deterministic quasi-random probe set (unscrambled Halton sequence)."""
    sampler = qmc.Halton(d=d, scramble=False)
    pts = sampler.random(n)
    return PointSet(dim=int(d), points=pts, _validated=True)


def _min_dists_to(points: np.ndarray, probe: np.ndarray) -> np.ndarray:
    """For each probe point, the distance to the nearest set point."""
    out = np.empty(probe.shape[0])
    step = max(1, (1 << 22) // max(1, points.shape[0]))
    for i0 in range(0, probe.shape[0], step):
        diff = probe[i0 : i0 + step, None, :] - points[None, :, :]
        out[i0 : i0 + step] = np.sqrt((diff * diff).sum(axis=-1).min(axis=1))
    return out


def fill_distance(points: PointSet, probe: PointSet | None = None) -> float:
    """Largest distance from any domain point to the node set.

    Uniform grids use the exact value sqrt(d)/(2m) and ignore the probe.
    Other sets maximize the nearest-node distance over a probe set, by
    default 2048 unscrambled Halton points, which estimates the true fill
    distance from below with error at most the probe resolution.
    """
    if points is None or len(points) == 0:
        raise ArgumentError("point set may not be empty")
    if points.grid_m is not None:
        return float(np.sqrt(points.dim) / (2.0 * points.grid_m))
    if probe is None:
        probe = halton_points(_DEFAULT_PROBE_COUNT, points.dim)
    if probe.dim != points.dim:
        raise ArgumentError("probe dimension does not match the point set")
    return float(_min_dists_to(points.points, probe.points).max())


def separation_radius(points: PointSet) -> float:
    """Half the distance between the two closest points of the set."""
    n = len(points)
    if n < 2:
        raise ArgumentError("separation radius needs at least two points")
    if points.grid_m is not None:
        return 1.0 / (2.0 * points.grid_m)
    best = np.inf
    pts = points.points
    step = max(1, (1 << 22) // n)
    for i0 in range(0, n, step):
        diff = pts[i0 : i0 + step, None, :] - pts[None, :, :]
        d2 = (diff * diff).sum(axis=-1)
        for i in range(d2.shape[0]):
            d2[i, i0 + i] = np.inf
        best = min(best, float(d2.min()))
    return 0.5 * float(np.sqrt(best))
