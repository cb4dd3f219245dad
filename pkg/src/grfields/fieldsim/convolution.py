"""White-noise convolution samplers on periodic grids.

A kernel ``k`` is laid out on the grid by minimum-image distance and the
field is the circular convolution ``X_i = sum_o k_o W_(i-o)`` with cell
increments ``W ~ N(0, h^d)``. The exact covariance of the discrete field is
therefore ``h^d sum_o k_o k_(o+l)``, which ``covariance_target`` returns.
"""

import numpy as np

from ..covariance import MaternParams, matern_covariance
from ..exceptions import ConfigurationError, DomainError
from ..rng import standard_normal
from .types import FieldSample, GridSpec

TAIL_TOL = 1e-6
_EXTEND = 3  # the tail check lays the kernel out on a lattice this many periods wide
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


def white_noise(n, spacing=1.0, seed=None, dims=1, stream=0):
    """``n`` independent cell increments of variance ``spacing**dims``."""
    from ..rng import DEFAULT_SEED

    seed = DEFAULT_SEED if seed is None else seed
    if n < 1:
        raise DomainError("white noise needs at least one cell")
    return standard_normal(seed, n, stream=stream) * spacing ** (0.5 * dims)


def whittle_kernel(p):
    """Convolution kernel of the SPDE solution: ``sigma`` times the Green's kernel of ``(kappa^2 - Laplacian)^(alpha/2)``.

    With ``alpha = 2 nu + d`` this is ``sigma * c_eta`` evaluated at unit
    variance, so the field is linear in ``sigma``.
    """
    unit = p.replace(sigma2=1.0)
    sigma = p.sigma

    def kernel(r):
        return sigma * np.asarray(matern_covariance(unit, r), dtype=float)

    kernel.params = p
    return kernel


def _signed_offsets(size, periods=1):
    m = size * periods
    o = np.arange(m)
    return np.where(o < (m + 1) // 2, o, o - m)


def _evaluate_radial(kernel, sq, spacing):
    """Evaluate ``kernel`` at ``spacing * sqrt(sq)`` for integer squared offsets, once per distinct value."""
    uniq, inv = np.unique(sq, return_inverse=True)
    vals = np.asarray(kernel(spacing * np.sqrt(uniq.astype(float))), dtype=float).reshape(uniq.shape)
    if uniq[0] == 0 and not np.isfinite(vals[0]):
        vals[0] = _origin_cell_average(kernel, spacing, sq.ndim)
    return vals[inv].reshape(sq.shape)


def _origin_cell_average(kernel, spacing, dims):
    """Average of a radial kernel over the origin cell by 5-point Gauss rules on the half-cell."""
    x = 0.25 * spacing * (_GAUSS_X + 1.0)
    w = 0.5 * _GAUSS_W
    if dims == 1:
        return float(np.sum(w * kernel(x)))
    xx, yy = np.meshgrid(x, x, indexing="ij")
    ww = np.outer(w, w)
    return float(np.sum(ww * kernel(np.hypot(xx, yy))))


def _squared_offsets(shape, periods):
    axes = [_signed_offsets(s, periods) for s in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return sum(m.astype(np.int64) ** 2 for m in mesh), mesh


def discretize_kernel(kernel, grid):
    """Kernel values on the periodic grid (minimum-image offsets), with the tail check.

    Raises ``ConfigurationError`` when values are not finite or when more
    than ``1e-6`` of the kernel's absolute mass lies outside the half-period
    window, measured on a lattice three periods wide.
    """
    sq_ext, mesh = _squared_offsets(grid.shape, _EXTEND)
    ext = _evaluate_radial(kernel, sq_ext, grid.spacing)
    if not np.all(np.isfinite(ext)):
        raise ConfigurationError("kernel is not square-summable on the grid: non-finite values")
    inside = np.ones(ext.shape, dtype=bool)
    for axis, m in zip(grid.shape, mesh):
        inside &= (m >= -(axis // 2)) & (m < (axis + 1) // 2)
    total = float(np.sum(np.abs(ext)))
    if total == 0.0:
        raise ConfigurationError("kernel vanishes on the grid")
    tail = float(np.sum(np.abs(ext[~inside]))) / total
    if tail >= TAIL_TOL:
        raise ConfigurationError(
            f"grid too small for the kernel: tail mass {tail:.3e} outside half the domain exceeds {TAIL_TOL:g}"
        )
    sq, _ = _squared_offsets(grid.shape, 1)
    return _evaluate_radial(kernel, sq, grid.spacing)


def circular_convolve(kvals, noise):
    """``X_i = sum_o k_o W_(i-o)`` over the trailing grid axes, by direct summation over nonzero ``k_o``."""
    out = np.zeros(noise.shape)
    axes = tuple(range(noise.ndim - kvals.ndim, noise.ndim))
    for o in zip(*np.nonzero(kvals)):
        out += kvals[o] * np.roll(noise, shift=o, axis=axes)
    return out


def covariance_target(kvals, grid, lags):
    """Exact covariance ``h^d sum_o k_o k_(o+l)`` of the discrete field at each lag (cell offsets)."""
    out = []
    for lag in lags:
        lag = tuple(np.atleast_1d(lag).astype(int))
        if len(lag) != grid.dims:
            raise DomainError(f"lag {lag} does not match a {grid.dims}-D grid")
        shifted = np.roll(kvals, shift=tuple(-x for x in lag), axis=tuple(range(grid.dims)))
        out.append(grid.cell_volume * float(np.sum(kvals * shifted)))
    return np.array(out)


def _noise_batch(grid, seed, count, first_stream):
    return np.stack(
        [white_noise(grid.size, grid.spacing, seed, grid.dims, stream=first_stream + k) for k in range(count)]
    ).reshape((count,) + grid.shape)


def kernel_convolution_samples(kernel, grid, seed, count=1, noise=None, model_id="kernel", first_stream=0):
    """``count`` convolution fields; field ``k`` uses noise stream ``first_stream + k``.

    ``noise`` (shape ``(count,) + grid.shape`` or ``grid.shape``) overrides the generator.
    """
    kvals = discretize_kernel(kernel, grid)
    if noise is None:
        W = _noise_batch(grid, seed, count, first_stream)
    else:
        W = np.asarray(noise, dtype=float).reshape((-1,) + grid.shape)
        count = W.shape[0]
    X = circular_convolve(kvals, W)
    return [
        FieldSample(X[k].reshape(-1), grid, seed, model_id, stream=first_stream + k) for k in range(count)
    ]


def kernel_convolution_sample(kernel, grid, seed, noise=None, model_id="kernel", stream=0):
    """Gaussian field from convolving white noise with an arbitrary square-summable radial kernel."""
    return kernel_convolution_samples(kernel, grid, seed, 1, noise, model_id, stream)[0]


def _check_whittle(p, grid):
    if not isinstance(p, MaternParams):
        raise ConfigurationError("whittle sampling needs MaternParams")
    if not isinstance(grid, GridSpec):
        raise ConfigurationError("whittle sampling needs a GridSpec")
    if p.d != grid.dims:
        raise ConfigurationError(f"model dimension d={p.d} does not match a {grid.dims}-D grid")


def whittle_samples(p, grid, seed, count=1, noise=None, first_stream=0):
    _check_whittle(p, grid)
    return kernel_convolution_samples(whittle_kernel(p), grid, seed, count, noise, "whittle", first_stream)


def whittle_sample(p, grid, seed, noise=None, stream=0):
    """Matern field as the periodic convolution of white noise with ``whittle_kernel(p)``."""
    return whittle_samples(p, grid, seed, 1, noise, stream)[0]
