"""Covariance-route simulation: white-noise convolutions, sphere sampling and empirical covariances."""

from .convolution import (
    circular_convolve,
    covariance_target,
    discretize_kernel,
    kernel_convolution_sample,
    kernel_convolution_samples,
    white_noise,
    whittle_kernel,
    whittle_sample,
    whittle_samples,
)
from .empirical import CovEstimate, empirical_covariance, lag_covariance
from .export import format_csv, pgm_bytes, read_pgm, write_csv, write_pgm
from .sphere import fibonacci_sphere, gram_factor, sphere_sample, sphere_samples
from .types import FieldSample, GridSpec

__all__ = [
    "CovEstimate",
    "FieldSample",
    "GridSpec",
    "circular_convolve",
    "covariance_target",
    "discretize_kernel",
    "empirical_covariance",
    "fibonacci_sphere",
    "format_csv",
    "gram_factor",
    "kernel_convolution_sample",
    "kernel_convolution_samples",
    "lag_covariance",
    "pgm_bytes",
    "read_pgm",
    "sphere_sample",
    "sphere_samples",
    "white_noise",
    "whittle_kernel",
    "whittle_sample",
    "whittle_samples",
    "write_csv",
    "write_pgm",
]
