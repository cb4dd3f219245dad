"""Dense Gram-matrix sampling of isotropic fields on the sphere."""

import numpy as np
from scipy.linalg import lapack

from ..covariance import covariance_matrix
from ..exceptions import FactorizationError, ModelValidationError
from ..rng import standard_normal
from ..sparse import dense_cholesky
from .types import FieldSample

JITTER = 1e-10


def _pivoted_factor(G):
    """Rank-revealing ``F`` with ``G = F F^T`` for a semidefinite ``G``, or None."""
    n = G.shape[0]
    c, piv, rank, info = lapack.dpstrf(G, tol=JITTER * float(np.max(np.diag(G))), lower=1)
    if info < 0 or rank < 1:
        return None
    F = np.zeros((n, rank))
    F[piv - 1] = np.tril(c)[:, :rank]
    if np.max(np.abs(F @ F.T - G)) > 1e-8 * np.max(np.abs(G)):
        return None
    return F


def gram_factor(G):
    """Factor ``F`` with ``F F^T ~ G``.

    Cholesky first; a semidefinite matrix falls back to pivoted Cholesky
    (exact rank-deficient factor), then to one jitter of ``1e-10 trace/n``.
    """
    try:
        return dense_cholesky(G)
    except FactorizationError:
        pass
    F = _pivoted_factor(G)
    if F is not None:
        return F
    n = G.shape[0]
    try:
        return dense_cholesky(G + np.eye(n) * (JITTER * np.trace(G) / n))
    except FactorizationError as exc:
        raise ModelValidationError(f"Gram matrix is not positive semidefinite even after jitter: {exc}") from exc


def sphere_samples(s, points, seed, count=1, first_stream=0):
    points = np.asarray(points, dtype=float)
    F = gram_factor(covariance_matrix(s, points, "sphere_cosine"))
    out = []
    for k in range(count):
        z = standard_normal(seed, F.shape[1], stream=first_stream + k)
        out.append(FieldSample((F * z).sum(axis=1), points, seed, "schoenberg", stream=first_stream + k))
    return out


def sphere_sample(s, points, seed, stream=0):
    """Gaussian vector at unit vectors ``points`` with covariance ``schoenberg_eval`` of their cosines."""
    return sphere_samples(s, points, seed, 1, stream)[0]


def fibonacci_sphere(n):
    """``n`` nearly uniform unit vectors on S^2 (golden-angle spiral)."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = k * np.pi * (3.0 - np.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
