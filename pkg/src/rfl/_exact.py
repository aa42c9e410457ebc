"""Extended-precision fallbacks for quantities double precision cannot hold.

Flat kernels on fine grids produce Gram matrices whose smallest eigenvalue
and near-node Schur complements sit far below the double-precision noise
floor; the rounded matrix itself can even be indefinite while the true one
is positive definite.  The routines here rebuild the few affected scalars
from exact node coordinates with mpmath.  They are called only by
:mod:`rkhs` and :mod:`spectral`, and only after a double-precision attempt
has been measured against its own noise floor.

Everything in this module is deterministic and dependency-free apart from
mpmath itself.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

from .errors import UnsupportedConfigurationError
from .kernels import GAUSSIAN, INVERSE_MULTIQUADRIC, SOBOLEV, Kernel

_DPS = 50


def _profile_mp(kernel: Kernel, s2):
    """Radial profile at a squared distance, in the active mp precision."""
    if kernel.family == GAUSSIAN:
        return mp.e ** (-s2 / (2 * mp.mpf(kernel.sigma) ** 2))
    if kernel.family == INVERSE_MULTIQUADRIC:
        return (mp.mpf(kernel.sigma) ** 2 + s2) ** (-mp.mpf(kernel.beta))
    if kernel.r == 1:
        return mp.pi * mp.e ** (-2 * mp.pi * mp.sqrt(s2))
    if kernel.r == 2:
        x = mp.sqrt(s2)
        return (mp.pi / 2) * (1 + 2 * mp.pi * x) * mp.e ** (-2 * mp.pi * x)
    raise UnsupportedConfigurationError(
        "extended-precision fallback only covers sobolev orders r in {1, 2}"
    )


def _gram_mp(kernel: Kernel, coords) -> mp.matrix:
    n = len(coords)
    K = mp.matrix(n, n)
    for i in range(n):
        for j in range(i, n):
            s2 = sum((a - b) ** 2 for a, b in zip(coords[i], coords[j]))
            K[i, j] = K[j, i] = _profile_mp(kernel, s2)
    return K


def _grid_coords_1d(m: int):
    return [(mp.mpf(i) / m,) for i in range(m + 1)]


def grid_lambda_min(kernel: Kernel, m: int, d: int) -> float:
    """Smallest Gram eigenvalue on the uniform grid, via extended precision.

    For the gaussian family the grid Gram factors as the d-fold Kronecker
    power of the one-dimensional Gram (a product kernel on a full lattice),
    so the smallest eigenvalue in dimension d is the d-th power of the
    one-dimensional one.  That identity is exact, not an approximation, and
    keeps the mp eigensolve at size m+1 instead of (m+1)^d.
    """
    with mp.workdps(_DPS):
        if kernel.family == GAUSSIAN:
            one_d = Kernel(GAUSSIAN, sigma=kernel.sigma, dim=1)
            K = _gram_mp(one_d, _grid_coords_1d(m))
            lam = min(mp.eigsy(K, eigvals_only=True))
            return float(lam**d)
        if d != 1:
            raise UnsupportedConfigurationError(
                "extended-precision eigenvalues for d > 1 exist only for the "
                "gaussian family"
            )
        K = _gram_mp(kernel, _grid_coords_1d(m))
        lam = min(mp.eigsy(K, eigvals_only=True))
        return float(lam)


def schur_values(kernel: Kernel, nodes: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Exact Schur complements K(x,x) - k_x^T K^{-1} k_x at many points.

    ``nodes`` is the (N, d) node array and ``xs`` the (n, d) evaluation
    array; both are promoted coordinate-by-coordinate to mp floats, which
    is lossless.  Returns a float64 array of nonnegative values; entries
    below double-precision resolution round to the nearest representable
    value rather than to an arbitrary negative residue.
    """
    nodes = np.atleast_2d(nodes)
    xs = np.atleast_2d(xs)
    with mp.workdps(_DPS):
        coords = [tuple(mp.mpf(float(c)) for c in row) for row in nodes]
        K = _gram_mp(kernel, coords)
        diag = _profile_mp(kernel, mp.mpf(0))
        out = np.empty(xs.shape[0])
        for idx, row in enumerate(xs):
            x = tuple(mp.mpf(float(c)) for c in row)
            k = mp.matrix(
                [_profile_mp(kernel, sum((a - b) ** 2 for a, b in zip(c, x))) for c in coords]
            )
            y = mp.cholesky_solve(K, k)
            s = diag - sum(k[i] * y[i] for i in range(len(coords)))
            out[idx] = float(max(s, mp.mpf(0)))
    return out
