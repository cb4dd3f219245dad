"""scikit-learn style kriging estimators over the two routes."""

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .covariance import covariance_matrix
from .exceptions import ConfigurationError
from .gmrf import GMRF, krige


def _vertices(X, n):
    X = check_array(X, ensure_2d=False, dtype=None)
    v = np.asarray(X).reshape(-1)
    if not np.all(np.equal(np.mod(v, 1), 0)):
        raise ValueError("vertex indices must be integers")
    v = v.astype(np.int64)
    if v.size and (v.min() < 0 or v.max() >= n):
        raise ValueError(f"vertex index out of range for {n} vertices")
    return v


class GMRFKriging(RegressorMixin, BaseEstimator):
    """Conditional mean of a GMRF given values at some vertices.

    ``X`` holds vertex indices (one per row); ``precision`` is a SparseMatrix.
    """

    def __init__(self, precision=None, mean=None, ordering="amd"):
        self.precision = precision
        self.mean = mean
        self.ordering = ordering

    def fit(self, X, y):
        if self.precision is None:
            raise ConfigurationError("GMRFKriging needs a precision matrix")
        v = _vertices(X, self.precision.n)
        y = check_array(y, ensure_2d=False).reshape(-1)
        if v.size != y.size:
            raise ValueError("X and y lengths differ")
        if np.unique(v).size != v.size:
            raise ValueError("each vertex may be observed once")
        self.gmrf_ = GMRF(self.precision, self.mean, self.ordering)
        self.observed_ = dict(zip(v.tolist(), y.tolist()))
        self.n_features_in_ = 1
        return self

    def predict(self, X, return_std=False):
        check_is_fitted(self, "gmrf_")
        v = _vertices(X, self.gmrf_.n)
        mean = np.empty(v.size)
        std = np.zeros(v.size)
        known = np.array([t in self.observed_ for t in v.tolist()], dtype=bool)
        mean[known] = [self.observed_[t] for t in v[known].tolist()]
        free = np.unique(v[~known])
        if free.size:
            m, var = krige(self.gmrf_, self.observed_, free)
            pos = np.searchsorted(free, v[~known])
            mean[~known] = m[pos]
            std[~known] = np.sqrt(np.maximum(var[pos], 0.0))
        return (mean, std) if return_std else mean


class CovarianceKriging(RegressorMixin, BaseEstimator):
    """Simple (zero-mean) kriging with a Euclidean covariance evaluator ``model``."""

    def __init__(self, model=None, nugget=0.0):
        self.model = model
        self.nugget = nugget

    def fit(self, X, y):
        if self.model is None:
            raise ConfigurationError("CovarianceKriging needs a covariance model")
        X, y = check_X_y(X, y, y_numeric=True)
        K = covariance_matrix(self.model, X, "euclidean")
        K[np.diag_indices_from(K)] += self.nugget
        self.X_fit_ = X
        self.chol_ = cho_factor(K, lower=True)
        self.alpha_ = cho_solve(self.chol_, y)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, return_std=False):
        check_is_fitted(self, "alpha_")
        X = check_array(X)
        Ks = np.asarray(self.model(cdist(X, self.X_fit_)), dtype=float)
        mean = Ks @ self.alpha_
        if not return_std:
            return mean
        v = cho_solve(self.chol_, Ks.T)
        var = self.model.variance() - np.einsum("ij,ji->i", Ks, v)
        return mean, np.sqrt(np.maximum(var, 0.0))
