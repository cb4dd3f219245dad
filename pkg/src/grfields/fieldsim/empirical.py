"""Cross-moment estimates with jackknife standard errors."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError
from .types import GridSpec, same_geometry


@dataclass(frozen=True)
class CovEstimate:
    estimate: np.ndarray
    se: np.ndarray
    count: int

    @property
    def degenerate(self):
        """True where the standard error is zero (no sample variation)."""
        return self.se == 0.0


def _jackknife_mean(stats):
    """Mean over axis 0 with its delete-one jackknife standard error."""
    n = stats.shape[0]
    total = stats.sum(axis=0)
    loo = (total - stats) / (n - 1)
    centred = loo - loo.mean(axis=0)
    se = np.sqrt((n - 1) / n * (centred * centred).sum(axis=0))
    return total / n, se


def _stack(samples):
    samples = list(samples)
    if len(samples) < 2:
        raise DomainError("at least two samples are needed")
    first = samples[0]
    for s in samples[1:]:
        if not same_geometry(first, s):
            raise DomainError("samples live on different geometries")
    return first, np.stack([s.values for s in samples])


def empirical_covariance(samples, pairs):
    """Mean-zero cross moments ``E[x_i x_j]`` for each ``(i, j)`` in ``pairs``.

    The products are sorted per pair before averaging, so the estimate does
    not depend on the order of the samples.
    """
    first, X = _stack(samples)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= X.shape[1]):
        raise DomainError("pair index out of range")
    prods = np.sort(X[:, pairs[:, 0]] * X[:, pairs[:, 1]], axis=0)
    est, se = _jackknife_mean(prods)
    return CovEstimate(est, se, X.shape[0])


def lag_covariance(samples, lags):
    """Covariance at cell lags on a periodic grid, averaging ``x_i x_(i+l)`` over all sites of each sample."""
    first, X = _stack(samples)
    grid = first.geometry
    if not isinstance(grid, GridSpec):
        raise DomainError("lag covariances need grid samples")
    fields = X.reshape((X.shape[0],) + grid.shape)
    axes = tuple(range(1, grid.dims + 1))
    stats = []
    for lag in lags:
        lag = tuple(np.atleast_1d(lag).astype(int))
        if len(lag) != grid.dims:
            raise DomainError(f"lag {lag} does not match a {grid.dims}-D grid")
        shifted = np.roll(fields, shift=tuple(-x for x in lag), axis=axes)
        stats.append((fields * shifted).reshape(X.shape[0], -1).mean(axis=1))
    stats = np.sort(np.stack(stats, axis=1), axis=0)
    est, se = _jackknife_mean(stats)
    return CovEstimate(est, se, X.shape[0])
