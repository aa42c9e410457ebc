"""Gram systems, kernel interpolation, power functions, unit-ball sampling.

The central object is :class:`GramSystem`, a factorized kernel matrix over a
node set.  It backs the nodal basis, the interpolation projector and the
power function.  :class:`RkhsFunction` represents finite kernel combinations
whose norms and inner products are exact quadratic forms.

Numerical policy
----------------
Factorization uses Cholesky with an escalating diagonal jitter ladder
(0, then 1e-12 * trace/N doubling up to 1e-6 * trace/N); the jitter actually
used is recorded on the system.  Power-function values are Schur complements
computed in double precision; when a system is unjittered and the computed
values fall below the double-precision noise floor, the affected batch is
recomputed from exact node coordinates in extended precision (see
:mod:`rfl._exact`).  Jittered systems never escalate: their Schur complement
is an upper bound for the exact one and sits safely above the noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from . import _exact
from .errors import ArgumentError, SingularGramError
from .geometry import PointSet, halton_points, uniform_grid
from .kernels import Kernel

_EPS = float(np.finfo(float).eps)

JITTER_START_FACTOR = 1e-12
JITTER_MAX_FACTOR = 1e-6

_DEGENERATE_NORM = 1e-6
_COEFF_GUARD = 1e3
_SAMPLE_ATTEMPTS = 8


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Factorized Gram matrix over a node set.

    ``gram`` always holds the exact double-precision kernel matrix; the
    Cholesky ``factor`` belongs to ``gram + jitter_used * I``.
    ``condition_estimate`` is the squared ratio of the extreme diagonal
    entries of the factor, a cheap lower estimate of the condition number.
    """

    kernel: Kernel
    points: PointSet
    gram: np.ndarray
    factor: np.ndarray
    jitter_used: float
    condition_estimate: float

    def __len__(self) -> int:
        return len(self.points)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve (gram + jitter I) x = rhs through the stored factor."""
        return cho_solve((self.factor, True), rhs)


@dataclass(frozen=True, eq=False)
class RkhsFunction:
    """Finite kernel combination sum_j coeffs[j] * K(., centers[j])."""

    kernel: Kernel
    centers: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.shape[0] == 1 and centers.shape[1] != self.kernel.dim:
            centers = centers.T
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if centers.shape != (coeffs.shape[0], self.kernel.dim):
            raise ArgumentError(
                f"centers shape {centers.shape} does not match "
                f"{coeffs.shape[0]} coefficients in dimension {self.kernel.dim}"
            )
        if coeffs.shape[0] < 1:
            raise ArgumentError("an RKHS combination needs at least one center")
        centers.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coeffs", coeffs)

    def eval_at(self, X) -> np.ndarray:
        """Values at an (n, dim) array of points (or a single point)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.kernel.pairwise(X, self.centers) @ self.coeffs

    def __call__(self, x) -> float:
        return float(self.eval_at(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel.to_json(),
            "centers": self.centers.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "RkhsFunction":
        return RkhsFunction(
            kernel=Kernel.from_json(obj["kernel"]),
            centers=np.asarray(obj["centers"], dtype=float),
            coeffs=np.asarray(obj["coeffs"], dtype=float),
        )


def build_gram(kernel: Kernel, points: PointSet) -> GramSystem:
    """Assemble and factorize the Gram matrix of a node set.

    Cholesky is attempted on the raw matrix first; failures walk the jitter
    ladder until the factorization succeeds or the maximum jitter is
    exhausted, which raises :class:`SingularGramError`.
    """
    if kernel.dim != points.dim:
        raise ArgumentError(
            f"kernel dimension {kernel.dim} does not match point set dimension {points.dim}"
        )
    gram = kernel.pairwise(points.points, points.points)
    n = gram.shape[0]
    mean_diag = float(np.trace(gram)) / n
    jitter = 0.0
    while True:
        try:
            factor = np.linalg.cholesky(gram + jitter * np.eye(n) if jitter else gram)
            break
        except np.linalg.LinAlgError:
            if jitter == 0.0:
                jitter = JITTER_START_FACTOR * mean_diag
            else:
                jitter *= 2.0
            if jitter > JITTER_MAX_FACTOR * mean_diag:
                raise SingularGramError(
                    f"Cholesky failed up to jitter {JITTER_MAX_FACTOR * mean_diag:.3e} "
                    f"for {kernel.family} on {n} nodes (nodes too close or kernel too flat)"
                ) from None
    diag = np.diag(factor)
    cond = float((diag.max() / diag.min()) ** 2)
    return GramSystem(
        kernel=kernel,
        points=points,
        gram=gram,
        factor=factor,
        jitter_used=float(jitter),
        condition_estimate=cond,
    )


def nodal_eval(system: GramSystem, i: int, x) -> float:
    """Value of the i-th nodal basis function at x (0-based node index)."""
    n = len(system)
    if not (isinstance(i, (int, np.integer)) and 0 <= i < n):
        raise ArgumentError(f"node index must lie in [0, {n}), got {i!r}")
    X = np.atleast_2d(np.asarray(x, dtype=float))
    k_x = system.kernel.pairwise(system.points.points, X)[:, 0]
    return float(system.solve(k_x)[i])


def project(system: GramSystem, node_values) -> RkhsFunction:
    """Interpolation projector: the kernel combination matching node data.

    ``node_values`` is read as the vector of function values on the node
    set; the returned combination interpolates them (up to factorization
    accuracy) and is the orthogonal projection onto the node span whenever
    the values come from an RKHS function.
    """
    b = np.asarray(node_values, dtype=float)
    if b.shape != (len(system),):
        raise ArgumentError(
            f"expected {len(system)} node values, got shape {b.shape}"
        )
    coeffs = system.solve(b)
    return RkhsFunction(kernel=system.kernel, centers=system.points.points, coeffs=coeffs)


def _schur_floor(n: int, diag: float, scale: float) -> float:
    return scale * n * _EPS * diag


def _power_squared(system: GramSystem, X: np.ndarray, mode: str) -> np.ndarray:
    """Schur complements K(x,x) - k_x^T (gram + jitter)^{-1} k_x on a batch.

    ``mode`` selects the escalation rule: "point" guards every entry (used
    when individual values carry meaning) and recomputes just the entries
    below the double-precision floor in extended precision; "max" only
    guards the largest entry (enough for sup computations) and recomputes
    the whole batch when even the maximum sits below the floor.
    Escalation only ever fires on unjittered systems; a jittered Schur
    complement is already a valid upper bound.
    """
    k = system.kernel.pairwise(system.points.points, X)
    s = system.kernel.diagonal() - np.einsum("ij,ij->j", k, system.solve(k))
    if system.jitter_used == 0.0:
        n = len(system)
        diag = system.kernel.diagonal()
        if mode == "point":
            floor = _schur_floor(n, diag, 1e3)
            low = s < floor
            if low.any():
                s = s.copy()
                s[low] = _exact.schur_values(
                    system.kernel, system.points.points, X[low]
                )
        elif s.max() < _schur_floor(n, diag, 1e2):
            return _exact.schur_values(system.kernel, system.points.points, X)
    return np.maximum(s, 0.0)


def power_function(system: GramSystem, x) -> float:
    """Worst-case interpolation error factor at a single point."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    return float(np.sqrt(_power_squared(system, X, mode="point")[0]))


def power_values(system: GramSystem, eval_points) -> np.ndarray:
    """Power function on a batch of points with pointwise guarantees."""
    X = eval_points.points if isinstance(eval_points, PointSet) else np.atleast_2d(
        np.asarray(eval_points, dtype=float)
    )
    return np.sqrt(_power_squared(system, X, mode="point"))


def default_power_eval_set(points: PointSet) -> PointSet:
    """Evaluation set for sup computations: 16x the node resolution.

    One-dimensional grids refine to a 16x finer grid (which contains the
    nodes; harmless for a sup).  Everything else uses 4096 unscrambled
    Halton points, since a 16x finer lattice would blow the grid cap in
    d >= 2.
    """
    if points.grid_m is not None and points.dim == 1:
        return uniform_grid(min(16 * points.grid_m, 4095), 1)
    return halton_points(4096, points.dim)


def power_function_sup(system: GramSystem, eval_set: PointSet | None = None) -> float:
    """Maximum of the power function over a dense evaluation set."""
    if eval_set is None:
        eval_set = default_power_eval_set(system.points)
    s = _power_squared(system, eval_set.points, mode="max")
    return float(np.sqrt(s.max()))


def rkhs_inner(f: RkhsFunction, g: RkhsFunction) -> float:
    """Exact inner product of two kernel combinations."""
    if f.kernel != g.kernel:
        raise ArgumentError("inner product requires functions over the same kernel")
    cross = f.kernel.pairwise(f.centers, g.centers)
    return float(f.coeffs @ cross @ g.coeffs)


def rkhs_norm(f: RkhsFunction) -> float:
    """Native-space norm sqrt(<f, f>); round-off below zero clamps to 0."""
    return float(np.sqrt(max(rkhs_inner(f, f), 0.0)))


def linear_combination(fs, weights) -> RkhsFunction:
    """Weighted sum of kernel combinations as a single combination."""
    fs = list(fs)
    weights = list(weights)
    if len(fs) == 0 or len(fs) != len(weights):
        raise ArgumentError("need matching nonempty function and weight lists")
    kernel = fs[0].kernel
    for f in fs[1:]:
        if f.kernel != kernel:
            raise ArgumentError("all combined functions must share one kernel")
    centers = np.vstack([f.centers for f in fs])
    coeffs = np.concatenate([w * f.coeffs for w, f in zip(weights, fs)])
    return RkhsFunction(kernel=kernel, centers=centers, coeffs=coeffs)


def sample_unit_ball(
    kernel: Kernel, n_centers: int, norm_target: float, seed: int
) -> RkhsFunction:
    """Random kernel combination with an exactly prescribed norm.

    Centers are uniform in the cube and coefficients standard normal,
    rescaled so the native norm equals ``norm_target``.  Draws whose norm
    is numerically degenerate, or whose rescaled coefficients would be so
    large that evaluating the function loses pointwise accuracy, are
    rejected and redrawn from the same stream (at most 8 attempts).
    """
    if not (isinstance(n_centers, (int, np.integer)) and n_centers >= 1):
        raise ArgumentError(f"n_centers must be a positive integer, got {n_centers!r}")
    if not (0.0 < norm_target <= 1.0):
        raise ArgumentError(f"norm_target must lie in (0, 1], got {norm_target!r}")
    rng = np.random.default_rng(seed)
    for _ in range(_SAMPLE_ATTEMPTS):
        centers = rng.uniform(0.0, 1.0, size=(n_centers, kernel.dim))
        coeffs = rng.standard_normal(n_centers)
        gram = kernel.pairwise(centers, centers)
        norm = float(np.sqrt(max(coeffs @ gram @ coeffs, 0.0)))
        if norm <= _DEGENERATE_NORM:
            continue
        coeffs = coeffs * (norm_target / norm)
        if float(np.linalg.norm(coeffs)) > _COEFF_GUARD:
            continue
        return RkhsFunction(kernel=kernel, centers=centers, coeffs=coeffs)
    raise SingularGramError(
        f"could not draw a well-conditioned unit-ball sample after "
        f"{_SAMPLE_ATTEMPTS} attempts (seed {seed})"
    )


def sup_error(f: RkhsFunction, g: RkhsFunction, eval_set: PointSet) -> float:
    """Largest absolute difference of two functions over an evaluation set."""
    if f.kernel != g.kernel:
        raise ArgumentError("sup error requires functions over the same kernel")
    return float(np.abs(f.eval_at(eval_set.points) - g.eval_at(eval_set.points)).max())
