"""Gaussian random fields with and without covariances."""

__version__ = "0.1.0"
