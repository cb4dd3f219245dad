"""Covariance evaluators, closure operations, Gram assembly and PD checks.

An evaluator is a callable with a ``domain`` tuple naming one factor per
argument: ``"euclidean"`` takes a distance, ``"sphere"`` the cosine of the
central angle, ``"time"`` a time lag. Calling it broadcasts over arrays.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_square_symmetric
from ..exceptions import ConfigurationError, DomainError

_ZERO_LAG = {"euclidean": 0.0, "sphere": 1.0, "time": 0.0}
_FACTORS = frozenset(_ZERO_LAG)


class CovarianceModel:
    """Base class for immutable covariance evaluators."""

    domain = ()

    def __call__(self, *args):
        raise NotImplementedError

    def variance(self):
        return float(self(*(_ZERO_LAG[f] for f in self.domain)))


class Constant(CovarianceModel):
    def __init__(self, value=1.0, domain=("euclidean",)):
        if value < 0:
            raise DomainError("a constant covariance must be nonnegative")
        if not set(domain) <= _FACTORS:
            raise ConfigurationError(f"unknown domain factors {domain}")
        self.value = float(value)
        self.domain = tuple(domain)

    def __call__(self, *args):
        shape = np.broadcast(*[np.asarray(a) for a in args]).shape
        out = np.full(shape, self.value)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"Constant({self.value!r}, domain={self.domain!r})"


class SchurProduct(CovarianceModel):
    """Pointwise product of evaluators sharing one domain."""

    def __init__(self, factors):
        factors = tuple(factors)
        if len(factors) < 2:
            raise ConfigurationError("a Schur product needs at least two factors")
        domain = factors[0].domain
        for f in factors[1:]:
            if f.domain != domain:
                raise ConfigurationError(f"domain mismatch in Schur product: {domain} vs {f.domain}")
        self.factors = factors
        self.domain = domain

    def __call__(self, *args):
        out = self.factors[0](*args)
        for f in self.factors[1:]:
            out = out * f(*args)
        return out

    def __repr__(self):
        return f"SchurProduct({list(self.factors)!r})"


class ProductSpace(CovarianceModel):
    """Tensor product ``f(x1) g(x2)`` on the product of two disjoint domains."""

    def __init__(self, first, second):
        if set(first.domain) & set(second.domain):
            raise ConfigurationError(f"product-space factors must have disjoint domains: {first.domain}, {second.domain}")
        self.first = first
        self.second = second
        self.domain = first.domain + second.domain

    def __call__(self, *args):
        k = len(self.first.domain)
        return self.first(*args[:k]) * self.second(*args[k:])

    def __repr__(self):
        return f"ProductSpace({self.first!r}, {self.second!r})"


def schur_product(f, g):
    """Pointwise product of two covariance evaluators on a common domain."""
    return SchurProduct((f, g))


def product_space(f, g):
    """Covariance on a product space from covariances on each factor."""
    return ProductSpace(f, g)


# ---------------------------------------------------------------------------
# Gram matrices


def _pairwise_distance(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _pairwise_cosine(points, tol=1e-9):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DomainError("sphere points must be a 2-D array of unit vectors")
    norms = np.sqrt(np.einsum("ij,ij->i", pts, pts))
    if np.any(np.abs(norms - 1.0) > tol):
        raise DomainError("sphere points must be unit vectors")
    u = np.clip(np.einsum("ik,jk->ij", pts, pts), -1.0, 1.0)
    np.fill_diagonal(u, 1.0)
    return u


def _spatial_args(factor, points):
    if factor == "euclidean":
        r = _pairwise_distance(points)
        np.fill_diagonal(r, 0.0)
        return r
    if factor == "sphere":
        return _pairwise_cosine(points)
    raise ConfigurationError(f"{factor!r} is not a spatial domain")


def covariance_matrix(model, points, metric="euclidean"):
    """Dense, exactly symmetric Gram matrix of ``model`` over ``points``.

    ``metric="euclidean"``: points is an ``(n, d)`` array. ``"sphere_cosine"``:
    ``(n, d+1)`` unit vectors. ``"spacetime"``: a pair ``(spatial, times)``
    whose spatial part is Euclidean or spherical according to ``model.domain[0]``.
    """
    if metric == "euclidean":
        if model.domain != ("euclidean",):
            raise ConfigurationError(f"metric 'euclidean' does not fit domain {model.domain}")
        args = (_spatial_args("euclidean", points),)
    elif metric == "sphere_cosine":
        if model.domain != ("sphere",):
            raise ConfigurationError(f"metric 'sphere_cosine' does not fit domain {model.domain}")
        args = (_spatial_args("sphere", points),)
    elif metric == "spacetime":
        if len(model.domain) != 2 or model.domain[1] != "time":
            raise ConfigurationError(f"metric 'spacetime' does not fit domain {model.domain}")
        spatial, times = points
        times = np.asarray(times, dtype=float).reshape(-1)
        args = (_spatial_args(model.domain[0], spatial), times[:, None] - times[None, :])
    else:
        raise ConfigurationError(f"unknown metric {metric!r}")
    n = args[0].shape[0]
    if n == 0:
        raise DomainError("points must be nonempty")
    iu, ju = np.triu_indices(n)
    values = np.asarray(model(*(a[iu, ju] for a in args)), dtype=float)
    K = np.empty((n, n))
    K[iu, ju] = values
    K[ju, iu] = values
    return K


@dataclass(frozen=True)
class PDCheck:
    """Outcome of ``check_positive_definite``; truthy when the matrix passed."""

    positive_definite: bool
    min_eigenvalue: float
    min_pivot: float

    def __bool__(self):
        return self.positive_definite


def check_positive_definite(M, rel_tol=1e-10):
    """Decide positive (semi)definiteness of a symmetric matrix.

    Passes iff a Cholesky factorization of ``M + rel_tol * ||M|| I`` succeeds,
    i.e. no pivot falls below ``-rel_tol * ||M||``. Also reports the smallest
    eigenvalue and the smallest Cholesky pivot of the shifted matrix.
    """
    M = check_square_symmetric(M)
    eig = np.linalg.eigvalsh(M)
    norm = float(np.max(np.abs(eig))) if eig.size else 0.0
    shift = rel_tol * max(norm, np.finfo(float).tiny)
    try:
        L = np.linalg.cholesky(M + shift * np.eye(M.shape[0]))
    except np.linalg.LinAlgError:
        return PDCheck(False, float(eig[0]), float("nan"))
    min_pivot = float(np.min(np.diag(L)) ** 2 - shift)
    return PDCheck(True, float(eig[0]), min_pivot)
