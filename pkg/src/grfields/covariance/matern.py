"""Matern family on R^d, Bessel-potential kernels and their spectral side."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .._validation import check_positive_int, check_scalar_positive
from ..exceptions import AccuracyError, ConfigurationError, DomainError, ModelValidationError
from ..specfun import bessel_k, bessel_k_scaled
from .base import CovarianceModel

# below this argument (kappa * r) the correlation equals 1 to double precision
_TINY_ARG = 1e-100


@dataclass(frozen=True)
class MaternParams:
    """Matern parameter bundle.

    The smoothness ``nu`` doubles as the SPDE exponent ``eta``, so the
    Bessel-potential order is ``alpha = 2 * nu + d``.
    """

    nu: float
    kappa: float
    sigma2: float = 1.0
    d: int = 1

    def __post_init__(self):
        for name in ("nu", "kappa", "sigma2"):
            object.__setattr__(
                self, name, check_scalar_positive(getattr(self, name), name, error=ModelValidationError)
            )
        object.__setattr__(self, "d", check_positive_int(self.d, "d", error=ModelValidationError))

    @property
    def eta(self):
        return self.nu

    @property
    def alpha(self):
        return 2.0 * self.nu + self.d

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)

    @property
    def range(self):
        """Empirical range sqrt(8 nu) / kappa."""
        return math.sqrt(8.0 * self.nu) / self.kappa

    def replace(self, **changes):
        values = dict(nu=self.nu, kappa=self.kappa, sigma2=self.sigma2, d=self.d)
        values.update(changes)
        return MaternParams(**values)


def _check_lag(r):
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise DomainError("distances must be nonnegative")
    return r


def _correlation_scalar(nu, x):
    if x < _TINY_ARG:
        return 1.0
    log_rho = (
        (1.0 - nu) * math.log(2.0)
        - math.lgamma(nu)
        + nu * math.log(x)
        + math.log(bessel_k_scaled(nu, x))
        - x
    )
    return min(1.0, math.exp(log_rho))


def matern_correlation(p, r):
    """Matern correlation rho_nu(r) = 2^(1-nu)/Gamma(nu) (kappa r)^nu K_nu(kappa r).

    Equals 1 at ``r = 0``. ``r`` may be a scalar or an array.
    """
    r = _check_lag(r)
    x = p.kappa * r
    if x.ndim == 0:
        return _correlation_scalar(p.nu, float(x))
    out = np.empty(x.shape)
    flat = out.reshape(-1)
    for k, xk in enumerate(x.reshape(-1)):
        flat[k] = _correlation_scalar(p.nu, float(xk))
    return out


def spectral_normalizer(p):
    """Constant making ``(kappa^2 + w^2)^-(nu + d/2)`` a probability density on R^d."""
    return math.exp(
        math.lgamma(p.nu + 0.5 * p.d) - math.lgamma(p.nu) - 0.5 * p.d * math.log(math.pi)
    ) * p.kappa ** (2.0 * p.nu)


def matern_spectral_density(p, w):
    """Normalized spectral density of the Matern correlation at frequency magnitude ``w``."""
    w = np.asarray(w, dtype=float)
    if np.any(np.isnan(w)) or np.any(w < 0):
        raise DomainError("frequency magnitude must be nonnegative")
    out = spectral_normalizer(p) * (p.kappa**2 + w * w) ** (-(p.nu + 0.5 * p.d))
    return float(out) if out.ndim == 0 else out


def spectral_to_correlation(p, lags, w_max=2000.0, step=0.01):
    """Trapezoid-rule inverse Fourier transform of the 1-D spectral density.

    Returns ``2 * int_0^w_max f(w) cos(w r) dw`` for each lag. Truncation error
    is about ``f(w_max) / r``; use lags bounded away from zero.
    """
    if p.d != 1:
        raise ConfigurationError("the Fourier-pair transform is implemented for d = 1 only")
    w = np.arange(0.0, w_max + 0.5 * step, step)
    f = matern_spectral_density(p, w)
    weights = np.full(w.shape, step)
    weights[0] = weights[-1] = 0.5 * step
    lags = np.asarray(lags, dtype=float)
    return np.array([2.0 * np.dot(weights * f, np.cos(w * lag)) for lag in lags.reshape(-1)]).reshape(lags.shape)


def _spde_constant(p):
    """sigma^2 / (Gamma(eta + d/2) (4 pi)^(d/2) kappa^(2 eta) 2^(eta - 1))."""
    eta, d = p.eta, p.d
    log_c = (
        math.lgamma(eta + 0.5 * d)
        + 0.5 * d * math.log(4.0 * math.pi)
        + 2.0 * eta * math.log(p.kappa)
        + (eta - 1.0) * math.log(2.0)
    )
    return p.sigma2 * math.exp(-log_c)


def matern_variance_spde(p):
    """Value of ``matern_covariance`` at lag 0: the SPDE-normalized marginal variance."""
    return _spde_constant(p) * math.gamma(p.eta) * 2.0 ** (p.eta - 1.0)


def matern_covariance(p, r):
    """SPDE-normalized Matern covariance (the Bessel-potential kernel of order alpha, times sigma^2).

    ``C(r) = sigma^2 (kappa r)^eta K_eta(kappa r) / (Gamma(eta + d/2) (4 pi)^(d/2) kappa^(2 eta) 2^(eta-1))``
    """
    r = _check_lag(r)
    const = _spde_constant(p)
    x = p.kappa * r
    limit = math.gamma(p.eta) * 2.0 ** (p.eta - 1.0)

    def one(xk):
        if xk < _TINY_ARG:
            return const * limit
        return const * xk**p.eta * bessel_k(p.eta, xk)

    if x.ndim == 0:
        return one(float(x))
    return np.array([one(float(xk)) for xk in x.reshape(-1)]).reshape(x.shape)


def bessel_potential_kernel(alpha, d, r):
    """Kernel of (I - Laplacian)^(-alpha/2) on R^d at distance ``r > 0``."""
    alpha = check_scalar_positive(alpha, "alpha")
    d = check_positive_int(d, "d", error=DomainError)
    r = check_scalar_positive(r, "r")
    eta = 0.5 * (alpha - d)
    denom = 2.0 ** (0.5 * (d + alpha - 2.0)) * math.pi ** (0.5 * d) * math.gamma(0.5 * alpha)
    return bessel_k(eta, r) * r**eta / denom


def stein_integral_oracle(alpha, d, r):
    """Bessel-potential kernel from the heat-semigroup integral.

    ``G(r) = ((4 pi)^(alpha/2) Gamma(alpha/2))^-1 int_0^inf exp(-pi r^2/u - u/(4 pi)) u^((alpha-d)/2) du/u``
    integrated adaptively after ``u = e^t``.
    """
    alpha = check_scalar_positive(alpha, "alpha")
    d = check_positive_int(d, "d", error=DomainError)
    r = check_scalar_positive(r, "r")
    eta = 0.5 * (alpha - d)
    a = math.pi * r * r
    b = 1.0 / (4.0 * math.pi)

    def log_f(t):
        return -a * math.exp(-t) - b * math.exp(t) + eta * t

    t_peak = math.log(2.0 * math.pi * (eta + math.hypot(eta, r)))
    log_peak = log_f(t_peak)
    lo = t_peak - 1.0
    while log_f(lo) > log_peak - 40.0:
        lo -= 2.0 * (t_peak - lo)
    hi = t_peak + 1.0
    while log_f(hi) > log_peak - 40.0:
        hi += 2.0 * (hi - t_peak)

    def f(t):
        return math.exp(log_f(t) - log_peak)

    total = 0.0
    err = 0.0
    for u, v in ((lo, t_peak), (t_peak, hi)):
        val, abserr = integrate.quad(f, u, v, epsabs=0.0, epsrel=1e-12, limit=500)[:2]
        total += val
        err += abserr
    if err > 1e-10 * total:
        raise AccuracyError(f"Stein integral quadrature reached only {err / total:.1e} relative accuracy")
    log_pref = -0.5 * alpha * math.log(4.0 * math.pi) - math.lgamma(0.5 * alpha)
    return total * math.exp(log_peak + log_pref)


class Matern(CovarianceModel):
    """Matern covariance evaluator on R^d.

    ``normalization="variance"`` gives ``sigma2 * rho(r)`` (variance sigma2);
    ``normalization="spde"`` gives ``matern_covariance`` (the SPDE constant).
    """

    domain = ("euclidean",)

    def __init__(self, params, normalization="variance"):
        if normalization not in ("variance", "spde"):
            raise ConfigurationError(f"unknown normalization {normalization!r}")
        self.params = params
        self.normalization = normalization

    def __call__(self, r):
        if self.normalization == "spde":
            return matern_covariance(self.params, r)
        return self.params.sigma2 * matern_correlation(self.params, r)

    def __repr__(self):
        p = self.params
        return f"Matern(nu={p.nu!r}, kappa={p.kappa!r}, sigma2={p.sigma2!r}, d={p.d}, normalization={self.normalization!r})"
