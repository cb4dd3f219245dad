"""Isotropic covariances on spheres and sphere x line.

A Schoenberg series is ``c * sum_n a_n P_n^lam(u)`` with ``a_n >= 0``,
``sum a_n = 1`` and ``lam = (d - 1)/2`` on S^d. The argument ``u`` is the
cosine of the central angle between two unit vectors. Coefficients multiply
the raw Gegenbauer polynomials, so the variance is ``c * sum a_n P_n^lam(1)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_positive_int, check_scalar_positive, check_unit_interval
from ..exceptions import ConfigurationError, ModelValidationError
from ..specfun import gegenbauer_at_one
from .base import CovarianceModel
from .matern import MaternParams, matern_correlation

MAX_TERMS = 10_001
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class SchoenbergSeries(CovarianceModel):
    """Finite Schoenberg mixture on the sphere S^dim."""

    dim: int
    coeffs: tuple
    scale: float = 1.0

    domain = ("sphere",)

    def __post_init__(self):
        check_positive_int(self.dim, "sphere dimension", minimum=2, error=ModelValidationError)
        coeffs = tuple(float(a) for a in self.coeffs)
        if not coeffs:
            raise ModelValidationError("a Schoenberg series needs at least one coefficient")
        if len(coeffs) > MAX_TERMS:
            raise ModelValidationError(f"at most {MAX_TERMS} coefficients are supported")
        for n, a in enumerate(coeffs):
            if not math.isfinite(a) or a < 0:
                raise ModelValidationError(f"coefficient a_{n} = {a!r} is negative or not finite", index=n)
        total = math.fsum(coeffs)
        if abs(total - 1.0) > _SUM_TOL:
            raise ModelValidationError(f"coefficients sum to {total!r}, not 1")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scale", check_scalar_positive(self.scale, "scale", error=ModelValidationError))

    @property
    def lam(self):
        return 0.5 * (self.dim - 1)

    def __call__(self, u):
        return schoenberg_eval(self, u)

    def variance(self):
        return self.scale * math.fsum(a * gegenbauer_at_one(n, self.lam) for n, a in enumerate(self.coeffs))


def _gegenbauer_mixture(coeffs, lam, u, weights=None):
    """sum_n coeffs[n] * P_n^lam(u) [* weights[n]] by streaming recurrence."""
    prev = np.ones_like(u)
    total = coeffs[0] * prev if weights is None else coeffs[0] * prev * weights[0]
    if len(coeffs) == 1:
        return total
    cur = 2.0 * lam * u
    for n in range(1, len(coeffs)):
        if n >= 2:
            prev, cur = cur, (2.0 * u * (n + lam - 1.0) * cur - (n + 2.0 * lam - 2.0) * prev) / n
        term = coeffs[n] * cur
        total = total + (term if weights is None else term * weights[n])
    return total


def schoenberg_eval(s, u):
    """Evaluate ``c * sum a_n P_n^lam(u)`` for ``u`` in [-1, 1]."""
    u = check_unit_interval(u)
    out = s.scale * _gegenbauer_mixture(s.coeffs, s.lam, u)
    return float(out) if out.ndim == 0 else out


def geodesic_distance(x, y):
    """Great-circle distance between unit vectors on the unit sphere."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))


CF_KINDS = ("gaussian", "cauchy", "student_spectral", "tabulated")
_CF_PARAMS = {
    "gaussian": ("sigma",),
    "cauchy": ("gamma",),
    "student_spectral": ("nu", "kappa"),
    "tabulated": ("t", "values"),
}


@dataclass(frozen=True)
class CharFunction(CovarianceModel):
    """Characteristic function of a symmetric law on the line, used as a temporal correlation.

    ``gaussian``: ``exp(-sigma^2 t^2 / 2)``; ``cauchy``: ``exp(-gamma |t|)``;
    ``student_spectral``: the Matern correlation in ``|t|`` (characteristic
    function of a Student-type density); ``tabulated``: linear interpolation
    in ``|t|`` of knots starting at ``(0, 1)``, held constant past the last knot.
    """

    kind: str
    params: dict = field(default_factory=dict)

    domain = ("time",)

    def __post_init__(self):
        if self.kind not in CF_KINDS:
            raise ConfigurationError(f"unknown characteristic-function kind {self.kind!r}")
        expected = set(_CF_PARAMS[self.kind])
        if set(self.params) != expected:
            raise ConfigurationError(f"{self.kind} needs parameters {sorted(expected)}, got {sorted(self.params)}")
        params = dict(self.params)
        if self.kind == "tabulated":
            t = np.asarray(params["t"], dtype=float)
            v = np.asarray(params["values"], dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise ModelValidationError("tabulated knots need matching 1-D t and values arrays")
            if t[0] != 0.0 or v[0] != 1.0:
                raise ModelValidationError("tabulated characteristic function must start at (0, 1)")
            if np.any(np.diff(t) <= 0):
                raise ModelValidationError("tabulated t knots must be strictly increasing")
            if np.any(np.abs(v) > 1.0):
                raise ModelValidationError("tabulated values must satisfy |phi(t)| <= 1")
            params["t"] = tuple(t.tolist())
            params["values"] = tuple(v.tolist())
        else:
            for name in _CF_PARAMS[self.kind]:
                params[name] = check_scalar_positive(params[name], name, error=ModelValidationError)
        object.__setattr__(self, "params", params)

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        p = self.params
        if self.kind == "gaussian":
            out = np.exp(-0.5 * (p["sigma"] * t) ** 2)
        elif self.kind == "cauchy":
            out = np.exp(-p["gamma"] * t)
        elif self.kind == "student_spectral":
            out = np.asarray(matern_correlation(MaternParams(p["nu"], p["kappa"]), t))
        else:
            out = np.interp(t, p["t"], p["values"])
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GeoTemporalModel(CovarianceModel):
    """Covariance ``c * sum a_n P_n^lam(u) phi_n(t)`` on sphere x line.

    A single characteristic function gives the separable model.
    """

    series: SchoenbergSeries
    cfs: tuple

    domain = ("sphere", "time")

    def __post_init__(self):
        cfs = tuple(self.cfs)
        if len(cfs) not in (1, len(self.series.coeffs)):
            raise ModelValidationError(
                f"need 1 or {len(self.series.coeffs)} characteristic functions, got {len(cfs)}"
            )
        object.__setattr__(self, "cfs", cfs)

    def __call__(self, u, t):
        return berg_porcu_eval(self, u, t)

    def variance(self):
        return self.series.variance()


def berg_porcu_eval(m, u, t):
    """Evaluate the sphere x line mixture at (cosine ``u``, time lag ``t``)."""
    u = check_unit_interval(u)
    t = np.asarray(t, dtype=float)
    u, t = np.broadcast_arrays(u, t)
    s = m.series
    if len(m.cfs) == 1:
        phi = m.cfs[0](t)
        weights = [phi] * len(s.coeffs)
    else:
        weights = [cf(t) for cf in m.cfs]
    out = s.scale * _gegenbauer_mixture(s.coeffs, s.lam, u, weights)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out
